//! Nearest-neighbour queries on the projective plane through kd-trees over
//! both unit representatives of each sample.

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use crate::linalg::{self, C3, V3};

fn doubled(vs: &[V3]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(2 * vs.len());
    for v in vs {
        out.push(*v);
        out.push(linalg::scale(v, -1.0));
    }
    out
}

pub struct PointIndex {
    points: Vec<V3>,
    tree: Option<ImmutableKdTree<f64, 3>>,
}

impl PointIndex {
    /// Takes unit vectors.
    pub fn new(points: Vec<V3>) -> Self {
        let tree = (!points.is_empty()).then(|| ImmutableKdTree::new_from_slice(&doubled(&points)));
        PointIndex { points, tree }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[V3] {
        &self.points
    }

    /// Index and projective angle of the nearest sample to a unit vector.
    pub fn nearest(&self, x: &V3) -> Option<(usize, f64)> {
        let tree = self.tree.as_ref()?;
        let nn = tree.nearest_one::<SquaredEuclidean>(x);
        let k = (nn.item / 2) as usize;
        Some((k, linalg::angle(&self.points[k], x)))
    }

    pub fn nearest_angle(&self, x: &V3) -> f64 {
        self.nearest(x).map_or(f64::INFINITY, |(_, a)| a)
    }
}

/// Line samples (unit coefficient vectors), queried for the smallest
/// distance from a point of the complex plane.
pub struct LineIndex {
    lines: Vec<V3>,
    tree: Option<ImmutableKdTree<f64, 3>>,
}

impl LineIndex {
    pub fn new(lines: Vec<V3>) -> Self {
        let tree = (!lines.is_empty()).then(|| ImmutableKdTree::new_from_slice(&doubled(&lines)));
        LineIndex { lines, tree }
    }

    pub fn lines(&self) -> &[V3] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    /// Nearest line sample to a line, as a projective angle.
    pub fn nearest_line(&self, l: &V3) -> Option<(usize, f64)> {
        let tree = self.tree.as_ref()?;
        let nn = tree.nearest_one::<SquaredEuclidean>(l);
        let k = (nn.item / 2) as usize;
        Some((k, linalg::angle(&self.lines[k], l)))
    }

    /// min over samples of |z·l| for unit z, the sine of the point-line
    /// distance, by brute force.
    pub fn min_pairing_brute(&self, z: &C3) -> f64 {
        self.scan(&linalg::cnormalize(z))
    }

    fn scan(&self, z: &C3) -> f64 {
        self.lines.iter().map(|l| pairing(z, l)).fold(f64::INFINITY, f64::min)
    }

    /// As `min_pairing_brute`, pruned by the kd-tree. Writing z = x + iy, the
    /// quadratic form f(l) = (x·l)² + (y·l)² vanishes only along n = x × y
    /// and grows at least like μ·sin²θ away from it, μ being the smaller
    /// eigenvalue of the form on the plane orthogonal to n.
    pub fn min_pairing(&self, z: &C3) -> f64 {
        let Some(tree) = self.tree.as_ref() else {
            return f64::INFINITY;
        };
        let z = linalg::cnormalize(z);
        let x: V3 = z.map(|c| c.re);
        let y: V3 = z.map(|c| c.im);
        let n = linalg::cross(&x, &y);
        let nn = linalg::norm(&n);
        if nn < 1e-6 {
            return self.scan(&z);
        }
        let n = linalg::scale(&n, 1.0 / nn);
        let mu = plane_min_eigen(&x, &y, &n);
        if mu <= 1e-12 {
            return self.scan(&z);
        }
        let seeds = tree.nearest_n::<SquaredEuclidean>(&n, std::num::NonZero::new(16).unwrap());
        let mut best = f64::INFINITY;
        for s in &seeds {
            best = best.min(pairing(&z, &self.lines[(s.item / 2) as usize]));
        }
        let sin = (best * best / mu).sqrt();
        if sin >= 0.999 {
            return self.scan(&z);
        }
        // Slightly enlarged so rounding never prunes the minimizer.
        let theta = sin.asin() * (1.0 + 1e-9) + 1e-12;
        let chord = 2.0 * (theta / 2.0).sin();
        for s in tree.within_unsorted::<SquaredEuclidean>(&n, chord * chord) {
            best = best.min(pairing(&z, &self.lines[(s.item / 2) as usize]));
        }
        best
    }

    /// Smallest projective distance from z to a line sample.
    pub fn min_distance(&self, z: &C3) -> f64 {
        self.min_pairing(z).min(1.0).asin()
    }
}

/// Both indices of an approximation, built once and shared by the checks.
pub struct ApproxIndex {
    pub points: PointIndex,
    pub lines: LineIndex,
    /// Largest error bound over the base arc.
    pub error_bound: f64,
}

fn pairing(z: &C3, l: &V3) -> f64 {
    (z[0] * l[0] + z[1] * l[1] + z[2] * l[2]).norm()
}

fn plane_min_eigen(x: &V3, y: &V3, n: &V3) -> f64 {
    // Orthonormal basis of n⊥.
    let a = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let e1 = linalg::normalize(&linalg::cross(n, &a));
    let e2 = linalg::cross(n, &e1);
    let q = |u: &V3, v: &V3| linalg::dot(x, u) * linalg::dot(x, v) + linalg::dot(y, u) * linalg::dot(y, v);
    let (a11, a12, a22) = (q(&e1, &e1), q(&e1, &e2), q(&e2, &e2));
    let tr = a11 + a22;
    let disc = ((a11 - a22).powi(2) + 4.0 * a12 * a12).sqrt();
    (tr - disc) / 2.0
}


#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_unit<R: Rng>(rng: &mut R) -> V3 {
        linalg::normalize(&[rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
    }

    #[test]
    fn nearest_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<V3> = (0..500).map(|_| rand_unit(&mut rng)).collect();
        let idx = PointIndex::new(pts.clone());
        for _ in 0..200 {
            let q = rand_unit(&mut rng);
            let brute = pts.iter().map(|p| linalg::angle(p, &q)).fold(f64::INFINITY, f64::min);
            assert!((idx.nearest_angle(&q) - brute).abs() < 1e-14);
        }
    }

    #[test]
    fn pruned_pairing_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lines: Vec<V3> = (0..2000).map(|_| rand_unit(&mut rng)).collect();
        let idx = LineIndex::new(lines);
        for _ in 0..300 {
            let x = rand_unit(&mut rng);
            let y = rand_unit(&mut rng);
            let s: f64 = rng.gen_range(0.0..1.0);
            let z: C3 = [0, 1, 2].map(|k| Complex64::new(x[k], s * y[k]));
            assert_eq!(idx.min_pairing(&z), idx.min_pairing_brute(&z));
        }
    }
}
