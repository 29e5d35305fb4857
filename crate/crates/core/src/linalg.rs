//! Small dense linear algebra: 3×3 float helpers, Cardano eigenvalues,
//! one-sided Jacobi SVD and cyclic Jacobi for symmetric matrices.

use num_complex::Complex64;

pub type V3 = [f64; 3];
pub type C3 = [Complex64; 3];
pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

pub fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &V3) -> f64 {
    a[0].hypot(a[1]).hypot(a[2])
}

pub fn normalize(a: &V3) -> V3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

pub fn scale(a: &V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Angle between the lines spanned by `a` and `b`, in [0, π/2].
pub fn angle(a: &V3, b: &V3) -> f64 {
    norm(&cross(a, b)).atan2(dot(a, b).abs())
}

pub fn mat_vec(m: &Mat3, v: &V3) -> V3 {
    [dot(&m[0], v), dot(&m[1], v), dot(&m[2], v)]
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    out
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[j][i];
        }
    }
    out
}

pub fn det(m: &Mat3) -> f64 {
    dot(&m[0], &cross(&m[1], &m[2]))
}

/// Transposed cofactor matrix: `m · adjugate(m) = det(m) · I`.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let c0 = cross(&m[1], &m[2]);
    let c1 = cross(&m[2], &m[0]);
    let c2 = cross(&m[0], &m[1]);
    transpose(&[c0, c1, c2])
}

pub fn inverse(m: &Mat3) -> Option<Mat3> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let mut a = adjugate(m);
    for row in a.iter_mut() {
        for x in row.iter_mut() {
            *x /= d;
        }
    }
    Some(a)
}

pub fn sup_norm(m: &Mat3) -> f64 {
    m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub fn scale_mat(m: &Mat3, s: f64) -> Mat3 {
    let mut out = *m;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

/// Scale by a positive factor to sup-norm 1.
pub fn sup_scale(m: &Mat3) -> Mat3 {
    let s = sup_norm(m);
    if s == 0.0 {
        return *m;
    }
    scale_mat(m, 1.0 / s)
}

/// Divide by the entry of largest modulus, so the result has sup-norm 1 and a
/// positive largest entry (the first one in row-major order on ties).
pub fn sup_normalize(m: &Mat3) -> Mat3 {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for x in m.iter().flatten() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if best == 0.0 {
        return *m;
    }
    scale_mat(m, sign / best)
}

/// Distance between two arrays up to a nonzero scale: both are sup-normalized
/// and the sign is aligned optimally.
pub fn projective_distance(a: &Mat3, b: &Mat3) -> f64 {
    let a = scale_mat(a, 1.0 / sup_norm(a));
    let b = scale_mat(b, 1.0 / sup_norm(b));
    let mut plus = 0.0f64;
    let mut minus = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            plus = plus.max((a[i][j] - b[i][j]).abs());
            minus = minus.max((a[i][j] + b[i][j]).abs());
        }
    }
    plus.min(minus)
}

pub fn mat_pow(m: &Mat3, n: u32) -> Mat3 {
    let mut out = IDENTITY;
    for _ in 0..n {
        out = sup_normalize(&mat_mul(&out, m));
    }
    out
}

pub fn c3(v: &V3) -> C3 {
    [v[0].into(), v[1].into(), v[2].into()]
}

pub fn cdot(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn ccross(a: &C3, b: &C3) -> C3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn cnorm(a: &C3) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn cnormalize(a: &C3) -> C3 {
    let n = cnorm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

/// Hermitian inner product ⟨a, b⟩ = Σ a_i conj(b_i).
pub fn hdot(a: &C3, b: &C3) -> Complex64 {
    a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj()
}

/// Fubini–Study angle between complex lines spanned by `a` and `b`.
pub fn cangle(a: &C3, b: &C3) -> f64 {
    let mut wedge = 0.0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            wedge += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    wedge.sqrt().atan2(hdot(a, b).norm())
}

pub fn cmat_vec(m: &Mat3, v: &C3) -> C3 {
    let row = |r: &[f64; 3]| v[0] * r[0] + v[1] * r[1] + v[2] * r[2];
    [row(&m[0]), row(&m[1]), row(&m[2])]
}

/// Roots of the characteristic polynomial, sorted by modulus descending
/// (ties broken by real part, then imaginary part, descending).
pub fn eigenvalues(m: &Mat3) -> [Complex64; 3] {
    let s = sup_norm(m);
    if s == 0.0 {
        return [Complex64::new(0.0, 0.0); 3];
    }
    let a = scale_mat(m, 1.0 / s);
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let d = det(&a);
    let mut roots = cubic_roots(-tr, minors, -d);
    for r in roots.iter_mut() {
        *r *= s;
    }
    sort_by_modulus(&mut roots);
    roots
}

pub fn sort_by_modulus(roots: &mut [Complex64; 3]) {
    roots.sort_by(|x, y| {
        y.norm()
            .total_cmp(&x.norm())
            .then(y.re.total_cmp(&x.re))
            .then(y.im.total_cmp(&x.im))
    });
}

/// Roots of λ³ + a λ² + b λ + c by Cardano, with explicit handling of the
/// triple- and double-root cases and a Newton polish on simple real roots.
pub fn cubic_roots(a: f64, b: f64, c: f64) -> [Complex64; 3] {
    let shift = -a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let size = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    let eps = 1e-13;
    let re = |x: f64| Complex64::new(x, 0.0);
    if p.abs() <= eps * size * size && q.abs() <= eps * size * size * size {
        return [re(shift); 3];
    }
    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let disc_scale = half_q * half_q + third_p.abs().powi(3);
    let poly = |x: f64| ((x + a) * x + b) * x + c;
    let dpoly = |x: f64| (3.0 * x + 2.0 * a) * x + b;
    let newton = |x: f64| {
        let d = dpoly(x);
        if d != 0.0 {
            let y = x - poly(x) / d;
            if y.is_finite() && poly(y).abs() <= poly(x).abs() {
                return y;
            }
        }
        x
    };
    if disc.abs() <= 1e-12 * disc_scale {
        let double = -3.0 * q / (2.0 * p);
        let single = 3.0 * q / p;
        return [re(newton(single + shift)), re(double + shift), re(double + shift)];
    }
    if disc > 0.0 {
        let sq = disc.sqrt();
        let w = if half_q >= 0.0 { -half_q - sq } else { -half_q + sq };
        let u = w.cbrt();
        let v = if u != 0.0 { -third_p / u } else { 0.0 };
        let t = u + v;
        let real = newton(t + shift);
        let cre = -t / 2.0 + shift;
        let cim = 3f64.sqrt() / 2.0 * (u - v);
        let cim = cim.abs();
        [re(real), Complex64::new(cre, cim), Complex64::new(cre, -cim)]
    } else {
        let r = 2.0 * (-third_p).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let tau = 2.0 * std::f64::consts::PI / 3.0;
        let t0 = r * phi.cos();
        let t1 = r * (phi - tau).cos();
        let t2 = r * (phi + tau).cos();
        [re(newton(t0 + shift)), re(newton(t1 + shift)), re(newton(t2 + shift))]
    }
}

/// Null vectors of a real 3×3 matrix, decided by row cross products.
/// Returns one vector when the rank is 2, an orthonormal pair when the rank is
/// 1, and the standard basis when the matrix vanishes.
pub fn real_null_space(a: &Mat3, rel_tol: f64) -> Vec<V3> {
    let s = sup_norm(a);
    if s == 0.0 {
        return vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    let a = scale_mat(a, 1.0 / s);
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut best = [0.0; 3];
    let mut best_n = 0.0;
    for (i, j) in pairs {
        let c = cross(&a[i], &a[j]);
        let n = norm(&c);
        if n > best_n {
            best_n = n;
            best = c;
        }
    }
    if best_n > rel_tol {
        return vec![normalize(&best)];
    }
    let row = *a
        .iter()
        .max_by(|x, y| norm(x).total_cmp(&norm(y)))
        .expect("three rows");
    let r = normalize(&row);
    let helper = if r[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = normalize(&cross(&r, &helper));
    let e2 = cross(&r, &e1);
    vec![e1, e2]
}

/// One null vector of a complex 3×3 matrix of rank 2 (bilinear row crosses).
pub fn complex_null_vector(rows: &[C3; 3]) -> C3 {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut best = rows[0];
    let mut best_n = -1.0;
    for (i, j) in pairs {
        let c = ccross(&rows[i], &rows[j]);
        let n = cnorm(&c);
        if n > best_n {
            best_n = n;
            best = c;
        }
    }
    cnormalize(&best)
}

/// Solve a 3×3 system by Cramer's rule; `None` when singular.
pub fn solve3(m: &Mat3, rhs: &V3) -> Option<V3> {
    let d = det(m);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let adj = adjugate(m);
    let x = mat_vec(&adj, rhs);
    let out = scale(&x, 1.0 / d);
    out.iter().all(|v| v.is_finite()).then_some(out)
}

/// One step of shifted inverse iteration towards the eigenvector for `lambda`.
pub fn inverse_iteration_polish(m: &Mat3, lambda: f64, x: &V3) -> V3 {
    let shift = lambda + 1e-9 * lambda.abs().max(1e-300);
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= shift;
    }
    match solve3(&a, x) {
        Some(y) if norm(&y) > 0.0 => {
            let y = normalize(&y);
            let before = residual(m, lambda, x);
            let after = residual(m, lambda, &y);
            if after <= before {
                y
            } else {
                *x
            }
        }
        _ => *x,
    }
}

/// ‖m·v − λ v‖ / ‖v‖.
pub fn residual(m: &Mat3, lambda: f64, v: &V3) -> f64 {
    let mv = mat_vec(m, v);
    let r = [mv[0] - lambda * v[0], mv[1] - lambda * v[1], mv[2] - lambda * v[2]];
    norm(&r) / norm(v)
}

pub fn complex_residual(m: &Mat3, lambda: Complex64, v: &C3) -> f64 {
    let mv = cmat_vec(m, v);
    let r = [mv[0] - lambda * v[0], mv[1] - lambda * v[1], mv[2] - lambda * v[2]];
    cnorm(&r) / cnorm(v)
}

/// Thin singular value decomposition of a dense row-major m×n matrix by
/// one-sided Jacobi rotations. Returns singular values (descending), the
/// matching left singular vectors (as columns, length m; zero when σ = 0) and
/// right singular vectors (as columns, length n).
pub struct Svd {
    pub sigma: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

pub fn svd(rows: &[Vec<f64>], n: usize) -> Svd {
    let m = rows.len();
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|x| x * x).sum();
                let beta: f64 = cols[q].iter().map(|x| x * x).sum();
                let gamma: f64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (cols[p][k], cols[q][k]);
                    cols[p][k] = c * x - s * y;
                    cols[q][k] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (v[p][k], v[q][k]);
                    v[p][k] = c * x - s * y;
                    v[q][k] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let sig: Vec<f64> = cols.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&i, &j| sig[j].total_cmp(&sig[i]).then(i.cmp(&j)));
    let mut out = Svd { sigma: vec![], u: vec![], v: vec![] };
    for &j in &order {
        let s = sig[j];
        out.sigma.push(s);
        out.u.push(if s > 0.0 { cols[j].iter().map(|x| x / s).collect() } else { vec![0.0; m] });
        out.v.push(v[j].clone());
    }
    out
}

pub fn svd3(m: &Mat3) -> Svd {
    let rows: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
    svd(&rows, 3)
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (x, y) = (a[k][p], a[k][q]);
                    a[k][p] = c * x - s * y;
                    a[k][q] = s * x + c * y;
                }
                for k in 0..n {
                    let (x, y) = (a[p][k], a[q][k]);
                    a[p][k] = c * x - s * y;
                    a[q][k] = s * x + c * y;
                }
                for row in vecs.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]).then(i.cmp(&j)));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let cols = order.iter().map(|&i| vecs.iter().map(|row| row[i]).collect()).collect();
    (vals, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn cubic_distinct_real() {
        // (λ-1)(λ-2)(λ-3)
        let r = cubic_roots(-6.0, 11.0, -6.0);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!(close(re[0], 1.0, 1e-14) && close(re[1], 2.0, 1e-14) && close(re[2], 3.0, 1e-14));
        assert!(r.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn cubic_triple_and_double() {
        let r = cubic_roots(-6.0, 12.0, -8.0);
        assert!(r.iter().all(|z| *z == Complex64::new(2.0, 0.0)));
        // (λ-1)²(λ+2) = λ³ - 3λ + 2
        let r = cubic_roots(0.0, -3.0, 2.0);
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!(close(re[0], -2.0, 1e-14) && close(re[1], 1.0, 1e-14) && close(re[2], 1.0, 1e-14));
    }

    #[test]
    fn cubic_complex_pair() {
        // (λ-2)(λ²+1) = λ³ - 2λ² + λ - 2
        let r = cubic_roots(-2.0, 1.0, -2.0);
        assert!(close(r[0].re, 2.0, 1e-14) && r[0].im == 0.0);
        assert!(close(r[1].re, 0.0, 1e-14) && close(r[1].im, 1.0, 1e-14));
        assert!(close(r[2].im, -1.0, 1e-14));
    }

    #[test]
    fn svd_of_diagonal_and_rank_one() {
        let s = svd3(&[[0.0, 0.0, 3.0], [0.0, -5.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(s.sigma, vec![5.0, 3.0, 1.0]);
        let s = svd3(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [-1.0, -2.0, -3.0]]);
        assert!(close(s.sigma[0], 6f64.sqrt() * 14f64.sqrt(), 1e-12));
        assert!(s.sigma[1] < 1e-14 && s.sigma[2] < 1e-14);
    }

    #[test]
    fn symmetric_eigen_two_by_two() {
        let (vals, vecs) = symmetric_eigen(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(close(vals[0], 1.0, 1e-14) && close(vals[1], 3.0, 1e-14));
        assert!(close(vecs[1][0].abs(), 0.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn null_space_rank_one() {
        let ns = real_null_space(&[[0.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, -1.0, 1.0]], 1e-10);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(close(v[1] - v[2], 0.0, 1e-15));
        }
    }

    #[test]
    fn angles() {
        assert!(close(angle(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), std::f64::consts::FRAC_PI_2, 1e-15));
        assert!(close(angle(&[1.0, 0.0, 0.0], &[-1.0, -1.0, 0.0]), std::f64::consts::FRAC_PI_4, 1e-15));
        let a = c3(&[1.0, 2.0, 0.5]);
        let b = [a[0] * Complex64::new(0.0, 2.0), a[1] * Complex64::new(0.0, 2.0), a[2] * Complex64::new(0.0, 2.0)];
        assert!(cangle(&a, &b) < 1e-15);
    }
}
