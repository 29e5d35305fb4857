//! Eigen-structure of projective maps and limits of normalized powers.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, V3};
use crate::projective::{Field, HLine, HPoint, ProjMap};

pub const RANK_TOL: f64 = 1e-8;
pub const GAP_TOL: f64 = 1e-6;
/// Bound on the relative eigenpair residual ‖m·v − λv‖ / ‖m‖.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumClass {
    Loxodromic,
    Elation,
    InvolutionLike,
    Other,
}

impl SpectrumClass {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumClass::Loxodromic => "loxodromic",
            SpectrumClass::Elation => "elation",
            SpectrumClass::InvolutionLike => "involution-like",
            SpectrumClass::Other => "other",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    /// Eigenvalues of the stored representative, modulus descending.
    pub eigenvalues: [Complex64; 3],
    /// Eigenvalues of the determinant-one representative.
    pub normalized: [Complex64; 3],
    /// ln|λ1| − ln|λ2| and ln|λ2| − ln|λ3|.
    pub moduli_gaps: [f64; 2],
    pub class: SpectrumClass,
    /// Dimension of each eigenvalue's real eigenspace (0 for non-real eigenvalues).
    pub eigenspace_dims: [usize; 3],
    pub attracting_point: Option<HPoint>,
    pub repelling_point: Option<HPoint>,
    pub saddle_point: Option<HPoint>,
    pub attracting_line: Option<HLine>,
    pub repelling_line: Option<HLine>,
    /// Largest relative eigenpair residual over the real eigenvectors found.
    pub residual: f64,
}

impl SpectrumReport {
    pub fn moduli(&self) -> [f64; 3] {
        self.eigenvalues.map(|z| z.norm())
    }

    /// Attracting, repelling and saddle points as unit vectors.
    pub fn fixed_points(&self) -> Vec<V3> {
        [&self.attracting_point, &self.repelling_point, &self.saddle_point]
            .into_iter()
            .flatten()
            .map(|p| p.to_real().expect("real point"))
            .collect()
    }
}

fn is_real(z: Complex64, scale: f64) -> bool {
    z.im.abs() <= 1e-12 * scale.max(1e-300)
}

fn eigvecs_for(m: &Mat3, lambda: f64) -> Vec<V3> {
    let mut a = *m;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= lambda;
    }
    let ns = linalg::real_null_space(&a, 1e-9);
    if ns.len() == 1 {
        vec![linalg::inverse_iteration_polish(m, lambda, &ns[0])]
    } else {
        ns
    }
}

pub fn spectrum(map: &ProjMap) -> Result<SpectrumReport> {
    let raw = map.raw_f64();
    let scale = linalg::sup_norm(&raw);
    let m = linalg::scale_mat(&raw, 1.0 / scale);
    let ev = linalg::eigenvalues(&m);
    let eigenvalues = ev.map(|z| z * scale);
    let d = linalg::det(&m);
    if d == 0.0 {
        return Err(Error::Singular);
    }
    let c = d.cbrt();
    let normalized = ev.map(|z| z / c);
    let mods = ev.map(|z| z.norm());
    let moduli_gaps = [mods[0].ln() - mods[1].ln(), mods[1].ln() - mods[2].ln()];
    let top = mods[0];

    let mut dims = [0usize; 3];
    let mut vectors: [Option<V3>; 3] = [None, None, None];
    let mut residual = 0.0f64;
    for k in 0..3 {
        if !is_real(ev[k], top) {
            continue;
        }
        let vs = eigvecs_for(&m, ev[k].re);
        dims[k] = vs.len();
        for v in &vs {
            residual = residual.max(linalg::residual(&m, ev[k].re, v));
        }
        vectors[k] = Some(vs[0]);
    }
    if residual > EIGEN_TOL {
        return Err(Error::IllConditioned(residual));
    }

    let loxodromic = moduli_gaps[0] > GAP_TOL && moduli_gaps[1] > GAP_TOL && ev.iter().all(|z| is_real(*z, top));
    let all_equal = (ev[0] - ev[1]).norm() <= 1e-8 * top && (ev[1] - ev[2]).norm() <= 1e-8 * top;
    let class = if loxodromic {
        SpectrumClass::Loxodromic
    } else if all_equal && is_real(ev[0], top) && dims[0] == 2 {
        SpectrumClass::Elation
    } else if !map.is_identity()
        && linalg::projective_distance(&linalg::mat_mul(&m, &m), &linalg::IDENTITY) <= 1e-10
    {
        SpectrumClass::InvolutionLike
    } else {
        SpectrumClass::Other
    };

    let mut report = SpectrumReport {
        eigenvalues,
        normalized,
        moduli_gaps,
        class,
        eigenspace_dims: dims,
        attracting_point: None,
        repelling_point: None,
        saddle_point: None,
        attracting_line: None,
        repelling_line: None,
        residual,
    };
    if loxodromic {
        let mt = linalg::transpose(&m);
        let left = |lambda: f64| -> Result<HLine> {
            let vs = eigvecs_for(&mt, lambda);
            let r = linalg::residual(&mt, lambda, &vs[0]);
            if r > EIGEN_TOL {
                return Err(Error::IllConditioned(r));
            }
            HLine::real(vs[0])
        };
        report.attracting_point = Some(HPoint::real(vectors[0].unwrap())?);
        report.saddle_point = Some(HPoint::real(vectors[1].unwrap())?);
        report.repelling_point = Some(HPoint::real(vectors[2].unwrap())?);
        report.attracting_line = Some(left(ev[2].re)?);
        report.repelling_line = Some(left(ev[0].re)?);
    }
    Ok(report)
}

/// Limit data of a sequence of sup-normalized arrays.
#[derive(Debug, Clone)]
pub struct PseudoData {
    pub source: Mat3,
    pub numeric_rank: usize,
    pub image_point: Option<HPoint>,
    pub kernel_line: Option<HLine>,
    pub sv_ratio: f64,
    /// Index in the input sequence of the element used as the limit.
    pub index: usize,
    /// σ₂/σ₁ for every element of the sequence.
    pub ratios: Vec<f64>,
}

impl PseudoData {
    /// Action of the rank-one limit off its kernel.
    pub fn apply(&self, x: &HPoint, tol: f64) -> Result<HPoint> {
        let (Some(image), Some(kernel)) = (&self.image_point, &self.kernel_line) else {
            return Err(Error::NotEscaping(self.sv_ratio));
        };
        let d = crate::projective::dist_point_line(&x.to_float_in(kernel.field()), kernel)?;
        if d <= tol {
            Err(Error::KernelHit)
        } else {
            Ok(image.clone())
        }
    }
}

impl HPoint {
    fn to_float_in(&self, field: Field) -> HPoint {
        match field {
            Field::Real => self.clone(),
            Field::Complex => HPoint::complex(self.to_complex()).expect("nonzero"),
        }
    }
}

/// Detect the singular limit of a sequence of distinct maps after
/// sup-normalization. The limit is the element with the smallest σ₂/σ₁
/// (the latest one on ties); its rank-one part gives the image point and
/// the kernel line.
pub fn pseudo_limit_data(seq: &[ProjMap], field: Field, rank_tol: f64) -> Result<PseudoData> {
    if seq.len() < 2 {
        return Err(Error::TooShort);
    }
    let arrays: Vec<Mat3> = seq.iter().map(|m| linalg::sup_scale(&m.raw_f64())).collect();
    pseudo_limit_of_arrays(&arrays, field, rank_tol)
}

pub fn pseudo_limit_of_arrays(arrays: &[Mat3], field: Field, rank_tol: f64) -> Result<PseudoData> {
    if arrays.len() < 2 {
        return Err(Error::TooShort);
    }
    let svds: Vec<linalg::Svd> = arrays.iter().map(linalg::svd3).collect();
    let ratios: Vec<f64> = svds.iter().map(|s| s.sigma[1] / s.sigma[0]).collect();
    let mut index = 0;
    for (k, r) in ratios.iter().enumerate() {
        if *r <= ratios[index] {
            index = k;
        }
    }
    let best = ratios[index];
    if best > rank_tol {
        return Err(Error::NotEscaping(best));
    }
    let s = &svds[index];
    let numeric_rank = s.sigma.iter().filter(|x| **x / s.sigma[0] > rank_tol).count();
    let u: V3 = [s.u[0][0], s.u[0][1], s.u[0][2]];
    let v: V3 = [s.v[0][0], s.v[0][1], s.v[0][2]];
    let kernel = HLine::real(v)?;
    let kernel_line = match field {
        Field::Real => kernel,
        Field::Complex => crate::projective::complexify(&kernel),
    };
    Ok(PseudoData {
        source: linalg::sup_normalize(&arrays[index]),
        numeric_rank,
        image_point: Some(HPoint::real(u)?),
        kernel_line: Some(kernel_line),
        sv_ratio: best,
        index,
        ratios,
    })
}

/// Sup-normalized powers g¹..gⁿ. Exact maps are multiplied exactly until
/// their entries pass `bit_ceiling` bits, then in floating point.
pub fn powers(g: &ProjMap, n: usize, bit_ceiling: u64) -> Vec<Mat3> {
    let mut out = Vec::with_capacity(n);
    let mut acc = g.clone();
    for _ in 0..n {
        out.push(linalg::sup_scale(&acc.raw_f64()));
        acc = next_power(&acc, g, bit_ceiling);
    }
    out
}

/// Sup-normalized powers g^(2^1)..g^(2^n) by repeated squaring, exact while
/// the entries stay under `bit_ceiling` bits. Nilpotent parts (elations)
/// only survive squaring in exact arithmetic.
pub fn doubling_powers(g: &ProjMap, n: usize, bit_ceiling: u64) -> Vec<Mat3> {
    let mut acc = g.clone();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        acc = next_power(&acc, &acc, bit_ceiling);
        out.push(linalg::sup_scale(&acc.raw_f64()));
    }
    out
}

fn next_power(acc: &ProjMap, g: &ProjMap, bit_ceiling: u64) -> ProjMap {
    let prod = acc.compose(g);
    if prod.is_exact() && prod.bits() > bit_ceiling {
        prod.to_float()
    } else {
        prod
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::{dist, line_dist};

    fn m_tau1() -> ProjMap {
        ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]]).unwrap()
    }

    fn m_i() -> ProjMap {
        ProjMap::ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]).unwrap()
    }

    #[test]
    fn diagonal_loxodromic() {
        let r = spectrum(&ProjMap::ints([[4, 0, 0], [0, 2, 0], [0, 0, 1]]).unwrap()).unwrap();
        assert_eq!(r.class, SpectrumClass::Loxodromic);
        assert_eq!(r.attracting_point.unwrap(), HPoint::real([1.0, 0.0, 0.0]).unwrap());
        assert_eq!(r.repelling_point.unwrap(), HPoint::real([0.0, 0.0, 1.0]).unwrap());
        assert_eq!(r.attracting_line.unwrap(), HLine::real([0.0, 0.0, 1.0]).unwrap());
        assert_eq!(r.repelling_line.unwrap(), HLine::real([1.0, 0.0, 0.0]).unwrap());
    }

    #[test]
    fn tau1_letter_is_an_elation() {
        let r = spectrum(&m_tau1()).unwrap();
        assert_eq!(r.class, SpectrumClass::Elation);
        for z in r.eigenvalues {
            assert!((z - Complex64::new(2.0, 0.0)).norm() <= 1e-10);
        }
        assert_eq!(r.eigenspace_dims[0], 2);
        assert!(r.attracting_point.is_none());
    }

    #[test]
    fn tau1_times_i_is_loxodromic() {
        let g = m_tau1().compose(&m_i());
        assert_eq!(g, ProjMap::ints([[-2, 0, 0], [0, -1, 1], [0, 1, 3]]).unwrap());
        let r = spectrum(&g).unwrap();
        let s5 = 5f64.sqrt();
        let want = [1.0 + s5, -2.0, 1.0 - s5];
        for k in 0..3 {
            assert!((r.eigenvalues[k] - Complex64::new(want[k], 0.0)).norm() <= 1e-10);
        }
        assert_eq!(r.class, SpectrumClass::Loxodromic);
        let a = HPoint::real([0.0, 1.0, 2.0 + s5]).unwrap();
        assert!(dist(r.attracting_point.as_ref().unwrap(), &a).unwrap() <= 1e-10);
        // saddle = meet of the two invariant lines = middle eigenvector
        let saddle = crate::projective::meet(r.attracting_line.as_ref().unwrap(), r.repelling_line.as_ref().unwrap()).unwrap();
        assert!(dist(&saddle, r.saddle_point.as_ref().unwrap()).unwrap() <= 1e-10);
        assert!(dist(&saddle, &HPoint::ints(1, 0, 0)).unwrap() <= 1e-10);
    }

    #[test]
    fn involution_and_identity() {
        assert_eq!(spectrum(&m_i()).unwrap().class, SpectrumClass::InvolutionLike);
        assert_eq!(spectrum(&ProjMap::identity()).unwrap().class, SpectrumClass::Other);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let r = spectrum(&ProjMap::ints([[0, -1, 0], [1, 0, 0], [0, 0, 2]]).unwrap()).unwrap();
        assert_eq!(r.class, SpectrumClass::Other);
        assert!((r.eigenvalues[0].re - 2.0).abs() < 1e-12);
        assert!((r.eigenvalues[1].im.abs() - 1.0).abs() < 1e-12);
        assert_eq!(r.eigenspace_dims, [1, 0, 0]);
    }

    #[test]
    fn diagonal_powers_limit() {
        let g = ProjMap::ints([[4, 0, 0], [0, 2, 0], [0, 0, 1]]).unwrap();
        let seq = powers(&g, 40, 4096);
        let pd = pseudo_limit_of_arrays(&seq, Field::Real, RANK_TOL).unwrap();
        assert_eq!(pd.numeric_rank, 1);
        assert!(dist(pd.image_point.as_ref().unwrap(), &HPoint::ints(1, 0, 0)).unwrap() < 1e-12);
        assert!(line_dist(pd.kernel_line.as_ref().unwrap(), &HLine::ints(1, 0, 0)).unwrap() < 1e-12);
        assert!(matches!(pd.apply(&HPoint::ints(0, 1, 1), 1e-9), Err(Error::KernelHit)));
        assert!(pd.apply(&HPoint::ints(1, 1, 1), 1e-9).is_ok());
    }

    #[test]
    fn elation_doubling_limit() {
        let seq = doubling_powers(&m_tau1(), 60, 4096);
        let pd = pseudo_limit_of_arrays(&seq, Field::Real, RANK_TOL).unwrap();
        assert_eq!(pd.numeric_rank, 1);
        assert!(dist(pd.image_point.as_ref().unwrap(), &HPoint::ints(0, 1, 1)).unwrap() <= 1e-12);
        assert!(line_dist(pd.kernel_line.as_ref().unwrap(), &HLine::ints(0, 1, -1)).unwrap() <= 1e-12);
    }

    #[test]
    fn identity_does_not_escape() {
        let seq = vec![ProjMap::identity(); 5];
        assert!(matches!(pseudo_limit_data(&seq, Field::Real, RANK_TOL), Err(Error::NotEscaping(_))));
        assert!(matches!(pseudo_limit_data(&seq[..1], Field::Real, RANK_TOL), Err(Error::TooShort)));
    }
}
