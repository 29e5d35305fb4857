//! Structural checks of the group action against a sampled limit set.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, C3, Mat3, V3};
use crate::marked_box::MarkedBox;
use crate::projective::{meet, Field, HLine, HPoint, ProjMap};
use crate::representation::{enumerate_group, GroupElement, DEDUPE_TOL, MARK_TOL};
use crate::spectrum::{doubling_powers, powers, pseudo_limit_of_arrays, spectrum, PseudoData, SpectrumClass, SpectrumReport};

use super::index::ApproxIndex;
use super::LimitSetApprox;

/// Smallest projective distance from a complex point to the complexified
/// line samples.
pub fn kulkarni_distance(z: &HPoint, approx: &LimitSetApprox) -> Result<f64> {
    if approx.lines.is_empty() {
        return Err(Error::EmptyApprox);
    }
    Ok(approx.line_index().min_distance(&z.to_complex()))
}

/// (max over fixed points of the distance to the curve samples, max over
/// curve samples of the distance to the fixed points).
pub fn density_gap(idx: &ApproxIndex, fixed: &[V3]) -> (f64, f64) {
    let to_curve = fixed.par_iter().map(|f| idx.points.nearest_angle(f)).reduce(|| 0.0, f64::max);
    let fixed_index = super::PointIndex::new(fixed.to_vec());
    let to_fixed =
        idx.points.points().par_iter().map(|c| fixed_index.nearest_angle(c)).reduce(|| 0.0, f64::max);
    (to_curve, to_fixed)
}

#[derive(Debug, Clone, Copy)]
pub struct FixedStructure {
    pub attracting_gap: f64,
    pub repelling_gap: f64,
    pub attracting_line_gap: f64,
    pub repelling_line_gap: f64,
    /// Distance from the saddle point to the meet of the two fixed lines.
    pub saddle_meet_residual: f64,
    /// Distance from the saddle point to the nearest curve sample.
    pub saddle_separation: f64,
}

impl FixedStructure {
    pub fn point_gap(&self) -> f64 {
        self.attracting_gap.max(self.repelling_gap)
    }

    pub fn line_gap(&self) -> f64 {
        self.attracting_line_gap.max(self.repelling_line_gap)
    }
}

pub fn fixed_structure_check(spec: &SpectrumReport, idx: &ApproxIndex) -> Result<FixedStructure> {
    if spec.class != SpectrumClass::Loxodromic {
        return Err(Error::NotLoxodromic);
    }
    let real = |p: &Option<HPoint>| p.as_ref().and_then(|p| p.to_real()).ok_or(Error::NotLoxodromic);
    let real_line = |l: &Option<HLine>| l.as_ref().and_then(|l| l.to_real()).ok_or(Error::NotLoxodromic);
    let att = real(&spec.attracting_point)?;
    let rep = real(&spec.repelling_point)?;
    let sad = real(&spec.saddle_point)?;
    let att_line = real_line(&spec.attracting_line)?;
    let rep_line = real_line(&spec.repelling_line)?;
    let crossing = meet(spec.attracting_line.as_ref().unwrap(), spec.repelling_line.as_ref().unwrap())?;
    let nearest_line = |l: &V3| idx.lines.nearest_line(l).map_or(f64::INFINITY, |(_, a)| a);
    Ok(FixedStructure {
        attracting_gap: idx.points.nearest_angle(&att),
        repelling_gap: idx.points.nearest_angle(&rep),
        attracting_line_gap: nearest_line(&att_line),
        repelling_line_gap: nearest_line(&rep_line),
        saddle_meet_residual: linalg::angle(&crossing.to_real().unwrap(), &sad),
        saddle_separation: idx.points.nearest_angle(&sad),
    })
}

/// Candidate common eigenvectors: eigenvectors of each array, and the
/// intersections of two-dimensional eigenspaces of different arrays.
fn real_candidates(arrays: &[Mat3]) -> Vec<V3> {
    let mut vectors = Vec::new();
    let mut planes: Vec<(usize, V3)> = Vec::new();
    for (k, a) in arrays.iter().enumerate() {
        for lambda in distinct_real_eigenvalues(a) {
            let mut shifted = *a;
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] -= lambda;
            }
            let ns = linalg::real_null_space(&shifted, 1e-9);
            match ns.len() {
                1 => vectors.push(linalg::inverse_iteration_polish(a, lambda, &ns[0])),
                2 => planes.push((k, linalg::normalize(&linalg::cross(&ns[0], &ns[1])))),
                3 => vectors.extend([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
                _ => {}
            }
        }
    }
    for (i, (ki, ni)) in planes.iter().enumerate() {
        // A lone plane contributes its own basis.
        let a = if ni[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = linalg::normalize(&linalg::cross(ni, &a));
        vectors.push(e1);
        vectors.push(linalg::cross(ni, &e1));
        for (kj, nj) in &planes[i + 1..] {
            if ki == kj {
                continue;
            }
            let c = linalg::cross(ni, nj);
            if linalg::norm(&c) > 1e-12 {
                vectors.push(linalg::normalize(&c));
            }
        }
    }
    vectors
}

fn distinct_real_eigenvalues(a: &Mat3) -> Vec<f64> {
    let scale = linalg::sup_norm(a);
    let mut out: Vec<f64> = Vec::new();
    for z in linalg::eigenvalues(a) {
        if z.im.abs() <= 1e-9 * scale && !out.iter().any(|x| (x - z.re).abs() <= 1e-9 * scale) {
            out.push(z.re);
        }
    }
    out
}

fn complex_candidates(arrays: &[Mat3]) -> Vec<C3> {
    let mut out = Vec::new();
    for a in arrays {
        let scale = linalg::sup_norm(a);
        for z in linalg::eigenvalues(a) {
            if z.im.abs() <= 1e-9 * scale {
                continue;
            }
            let rows: [C3; 3] = std::array::from_fn(|i| {
                std::array::from_fn(|j| Complex64::new(a[i][j], 0.0) - if i == j { z } else { Complex64::new(0.0, 0.0) })
            });
            out.push(linalg::complex_null_vector(&rows));
        }
    }
    out
}

fn real_residual(arrays: &[Mat3], v: &V3) -> f64 {
    arrays.iter().map(|a| linalg::angle(&linalg::mat_vec(a, v), v)).fold(0.0, f64::max)
}

fn complex_residual(arrays: &[Mat3], v: &C3) -> f64 {
    arrays.iter().map(|a| linalg::cangle(&linalg::cmat_vec(a, v), v)).fold(0.0, f64::max)
}

/// Best common eigenvector of the arrays and its residual, the max over
/// arrays of the angle between a·v and v.
fn common_eigenvector(arrays: &[Mat3], field: Field) -> Result<(C3, bool, f64)> {
    if arrays.is_empty() {
        return Err(Error::TooFew(1));
    }
    let arrays: Vec<Mat3> = arrays.iter().map(linalg::sup_scale).collect();
    let mut best: Option<(C3, bool, f64)> = None;
    let mut consider = |v: C3, real: bool, r: f64| {
        if best.as_ref().is_none_or(|b| r < b.2) {
            best = Some((v, real, r));
        }
    };
    for v in real_candidates(&arrays) {
        let r = real_residual(&arrays, &v);
        consider(linalg::c3(&v), true, r);
    }
    if field == Field::Complex {
        for v in complex_candidates(&arrays) {
            let r = complex_residual(&arrays, &v);
            consider(v, false, r);
        }
    }
    best.ok_or(Error::TooFew(1))
}

fn real_part(v: &C3) -> V3 {
    v.map(|c| c.re)
}

/// Line minimizing the max over maps of angle(mᵀ·l, l), which vanishes
/// exactly when l is invariant, over eigenvectors of the transposes and
/// intersections of their eigenplanes.
pub fn invariant_line_search(maps: &[ProjMap], field: Field) -> Result<(HLine, f64)> {
    let arrays: Vec<Mat3> = maps.iter().map(|m| linalg::transpose(&m.to_f64())).collect();
    let (v, real, r) = common_eigenvector(&arrays, field)?;
    let line = if real { HLine::real(real_part(&v))? } else { HLine::complex(v)? };
    Ok((line, r))
}

/// Point minimizing the max over maps of angle(m·x, x).
pub fn invariant_point_search(maps: &[ProjMap], field: Field) -> Result<(HPoint, f64)> {
    let arrays: Vec<Mat3> = maps.iter().map(|m| m.to_f64()).collect();
    let (v, real, r) = common_eigenvector(&arrays, field)?;
    let point = if real { HPoint::real(real_part(&v))? } else { HPoint::complex(v)? };
    Ok((point, r))
}

/// Invariant-line search over the Σ elements of length 1..=2. Returns the
/// line when its residual is within `tol`.
pub fn degeneracy_gate(seed: &MarkedBox, tol: f64) -> Result<Option<(HLine, f64)>> {
    let maps: Vec<ProjMap> = enumerate_group(seed, 2, DEDUPE_TOL)?
        .into_iter()
        .filter(|g| !g.word.is_empty() && g.in_sigma(MARK_TOL) && !g.map.is_identity())
        .map(|g| g.map)
        .collect();
    if maps.is_empty() {
        return Ok(None);
    }
    let (line, r) = invariant_line_search(&maps, Field::Real)?;
    Ok((r <= tol).then_some((line, r)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerSchedule {
    /// g¹, g², ..., gⁿ.
    Sequential,
    /// g², g⁴, ..., g^(2ⁿ); used for elations, whose normalized powers
    /// converge only like 1/n.
    Doubling,
}

#[derive(Debug, Clone)]
pub struct PseudoCheck {
    pub data: PseudoData,
    pub schedule: PowerSchedule,
    /// Distance from the image point to the nearest curve sample.
    pub image_gap: f64,
    /// Angle from the kernel line to the nearest line sample.
    pub kernel_gap: f64,
    /// Fubini–Study angle between the complex-field kernel and the
    /// complexified nearest line sample.
    pub complex_kernel_gap: f64,
}

pub fn pseudo_sequence_check(g: &ProjMap, idx: &ApproxIndex, n_max: usize) -> Result<PseudoCheck> {
    let (data, schedule) = pseudo_powers(g, n_max, crate::spectrum::RANK_TOL)?;
    let image = data.image_point.as_ref().and_then(|p| p.to_real()).ok_or(Error::NotEscaping(data.sv_ratio))?;
    let kernel = data.kernel_line.as_ref().and_then(|l| l.to_real()).ok_or(Error::NotEscaping(data.sv_ratio))?;
    let (k, kernel_gap) = idx.lines.nearest_line(&kernel).ok_or(Error::EmptyApprox)?;
    let complex = pseudo_limit_of_arrays(&schedule_arrays(g, n_max, schedule), Field::Complex, crate::spectrum::RANK_TOL)?;
    let ck = complex.kernel_line.as_ref().ok_or(Error::NotEscaping(complex.sv_ratio))?.to_complex();
    let nearest = linalg::c3(&idx.lines.lines()[k]);
    Ok(PseudoCheck {
        image_gap: idx.points.nearest_angle(&image),
        kernel_gap,
        complex_kernel_gap: linalg::cangle(&ck, &nearest),
        data,
        schedule,
    })
}

fn schedule_arrays(g: &ProjMap, n_max: usize, schedule: PowerSchedule) -> Vec<Mat3> {
    match schedule {
        PowerSchedule::Sequential => powers(g, n_max, crate::marked_box::BIT_CEILING),
        PowerSchedule::Doubling => doubling_powers(g, n_max.min(64), crate::marked_box::BIT_CEILING),
    }
}

/// Pseudo-limit of the powers of g, doubling for elations.
pub fn pseudo_powers(g: &ProjMap, n_max: usize, rank_tol: f64) -> Result<(PseudoData, PowerSchedule)> {
    let schedule = match spectrum(g) {
        Ok(r) if r.class == SpectrumClass::Elation => PowerSchedule::Doubling,
        _ => PowerSchedule::Sequential,
    };
    let data = pseudo_limit_of_arrays(&schedule_arrays(g, n_max, schedule), Field::Real, rank_tol)?;
    Ok((data, schedule))
}

#[derive(Debug, Clone)]
pub struct ClusterCheck {
    /// None when there are no elements (vacuous).
    pub max_gap: Option<f64>,
    pub proxies: usize,
}

/// Images of the probes under the longest quarter of the words serve as
/// cluster-point proxies; returns the largest Kulkarni distance among them.
pub fn orbit_cluster_check(
    probes: &[HPoint],
    elements: &[GroupElement],
    idx: &ApproxIndex,
    probe_margin: f64,
) -> Result<ClusterCheck> {
    if idx.lines.is_empty() {
        return Err(Error::EmptyApprox);
    }
    let zs: Vec<C3> = probes.iter().map(|p| linalg::cnormalize(&p.to_complex())).collect();
    for z in &zs {
        let d = idx.lines.min_distance(z);
        if d < probe_margin {
            return Err(Error::ProbeTooClose(d));
        }
    }
    if elements.is_empty() {
        return Ok(ClusterCheck { max_gap: None, proxies: 0 });
    }
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by_key(|&k| elements[k].word.len());
    let take = elements.len().div_ceil(4);
    let proxies: Vec<Mat3> = order[order.len() - take..].iter().map(|&k| elements[k].map.to_f64()).collect();
    let max_gap = zs
        .par_iter()
        .flat_map_iter(|z| proxies.iter().map(move |m| linalg::cmat_vec(m, z)))
        .map(|w| idx.lines.min_distance(&w))
        .reduce(|| 0.0, f64::max);
    Ok(ClusterCheck { max_gap: Some(max_gap), proxies: take * zs.len() })
}

/// Largest distance from a curve sample to the orbit of a real probe, over
/// all probes. The orbit is taken under `maps`, which should reach every
/// translate the approximation was built from.
pub fn minimality_gap(probes: &[V3], maps: &[Mat3], idx: &ApproxIndex) -> f64 {
    probes
        .iter()
        .map(|x| {
            let orbit: Vec<V3> = maps.iter().map(|m| linalg::normalize(&linalg::mat_vec(m, x))).collect();
            let oi = super::PointIndex::new(orbit);
            idx.points.points().par_iter().map(|c| oi.nearest_angle(c)).reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Products t∘h of each translate with each element: the part of the group
/// the approximation is built from.
pub fn orbit_maps(approx: &LimitSetApprox, elements: &[GroupElement]) -> Vec<Mat3> {
    let hs: Vec<Mat3> = elements.iter().map(|g| g.map.to_f64()).collect();
    approx.translates.iter().flat_map(|t| hs.iter().map(move |h| linalg::sup_scale(&linalg::mat_mul(&t.map, h)))).collect()
}
