//! Samples of the invariant curve and line field, their globalization by group
//! translates, and the structural checks run against them.

mod census;
mod checks;
mod hermitian;
mod index;
mod verify;

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, V3};
use crate::marked_box::{max_pairwise, orbit, BoxOp, MarkedBox, BIT_CEILING};
use crate::projective::{HLine, HPoint};
use crate::representation::{enumerate_group, GroupElement, DEDUPE_TOL, MARK_TOL};
use crate::scalar::fmt_f64;

pub use census::{general_position_census, general_position_census_vectors};
pub use checks::{
    degeneracy_gate, density_gap, fixed_structure_check, invariant_line_search, invariant_point_search,
    kulkarni_distance, minimality_gap, orbit_cluster_check, orbit_maps, pseudo_sequence_check, ClusterCheck, FixedStructure,
    PseudoCheck, PowerSchedule,
};
pub use hermitian::{hermitian_invariant_search, HermitianResult};
pub use index::{ApproxIndex, LineIndex, PointIndex};
pub use verify::{
    elation_closed_form_residual, exact_law_counts, fmt_coords, spectrum_oracle_residual, verify_all, CheckResult, Status,
    VerifyConfig, VerifyReport, CHECK_NAMES,
};

/// Where a sample comes from: a base sample index and the translate applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Param {
    /// 0 for the base arc, otherwise an index into `LimitSetApprox::translates`.
    pub translate: u32,
    /// Position along the base arc, 0..=2^depth.
    pub leaf: u32,
}

#[derive(Debug, Clone)]
pub struct Translate {
    /// Word of the group element; `inverse` marks g⁻¹.
    pub word: String,
    pub inverse: bool,
    pub map: Mat3,
}

#[derive(Debug, Clone)]
pub struct CurveSample {
    pub param: Param,
    /// Unit representative.
    pub point: V3,
    pub error_bound: f64,
}

#[derive(Debug, Clone)]
pub struct LineSample {
    pub param: Param,
    /// Unit coefficient vector.
    pub line: V3,
    pub error_bound: f64,
}

impl CurveSample {
    pub fn hpoint(&self) -> HPoint {
        HPoint::real(self.point).expect("unit vector")
    }
}

impl LineSample {
    pub fn hline(&self) -> HLine {
        HLine::real(self.line).expect("unit vector")
    }

    pub fn cline(&self) -> HLine {
        crate::projective::complexify(&self.hline())
    }
}

/// Exact data of the base arc.
#[derive(Debug, Clone)]
pub struct BaseSample {
    pub word: String,
    pub point: HPoint,
    pub line: HLine,
}

#[derive(Debug, Clone)]
pub struct LimitSetApprox {
    pub depth: usize,
    pub translate_len: usize,
    /// Index 0 is the identity.
    pub translates: Vec<Translate>,
    pub base: Vec<BaseSample>,
    pub curve: Vec<CurveSample>,
    pub lines: Vec<LineSample>,
}

impl LimitSetApprox {
    /// Largest error bound over the base arc: the scalar tolerance unit.
    pub fn base_error_bound(&self) -> f64 {
        self.curve[..self.base.len()].iter().fold(0.0, |a, s| a.max(s.error_bound))
    }

    pub fn base_line_error_bound(&self) -> f64 {
        self.lines[..self.base.len()].iter().fold(0.0, |a, s| a.max(s.error_bound))
    }

    pub fn param_label(&self, p: Param) -> String {
        let base = &self.base[p.leaf as usize].word;
        if p.translate == 0 {
            return base.clone();
        }
        let t = &self.translates[p.translate as usize];
        format!("{}{}*{}", t.word, if t.inverse { "^-1" } else { "" }, base)
    }

    pub fn point_index(&self) -> PointIndex {
        PointIndex::new(self.curve.iter().map(|s| s.point).collect())
    }

    pub fn line_index(&self) -> LineIndex {
        LineIndex::new(self.lines.iter().map(|s| s.line).collect())
    }

    pub fn index(&self) -> ApproxIndex {
        ApproxIndex { points: self.point_index(), lines: self.line_index(), error_bound: self.base_error_bound() }
    }

    /// `param<TAB>x<TAB>y<TAB>z<TAB>error_bound`, one sample per line.
    pub fn curve_dump(&self) -> String {
        let mut out = String::new();
        for s in &self.curve {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                self.param_label(s.param),
                fmt_f64(s.point[0]),
                fmt_f64(s.point[1]),
                fmt_f64(s.point[2]),
                fmt_f64(s.error_bound)
            ));
        }
        out
    }

    /// `param<TAB>a<TAB>b<TAB>c`, one line sample per line.
    pub fn line_dump(&self) -> String {
        let mut out = String::new();
        for s in &self.lines {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                self.param_label(s.param),
                fmt_f64(s.line[0]),
                fmt_f64(s.line[1]),
                fmt_f64(s.line[2])
            ));
        }
        out
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.translate, self.leaf)
    }
}

/// Leaves of the τ-tree at `depth`, ordered along the curve from t to b.
pub fn ordered_leaves(seed: &MarkedBox, depth: usize) -> Result<Vec<(String, MarkedBox)>> {
    let o = orbit(seed, depth, &[BoxOp::Tau1, BoxOp::Tau2], BIT_CEILING)?;
    let mut leaves: Vec<(String, MarkedBox)> =
        o.nodes.into_iter().filter(|n| n.word.len() == depth).map(|n| (n.word, n.bx)).collect();
    // The rightmost letter is applied first, so it is the most significant digit.
    leaves.sort_by(|a, b| a.0.chars().rev().cmp(b.0.chars().rev()));
    Ok(leaves)
}

/// Fires when every curve sample up to depth 3 lies within 1e-9 of one line.
pub fn flatness(seed: &MarkedBox) -> Result<f64> {
    let leaves = ordered_leaves(seed, 3)?;
    let mut pts: Vec<V3> = leaves.iter().map(|(_, b)| b.t.to_real().unwrap()).collect();
    pts.push(leaves.last().unwrap().1.b.to_real().unwrap());
    let rows: Vec<Vec<f64>> = pts.iter().map(|p| p.to_vec()).collect();
    let svd = linalg::svd(&rows, 3);
    let normal: V3 = [svd.v[2][0], svd.v[2][1], svd.v[2][2]];
    Ok(pts.iter().map(|p| linalg::dot(p, &normal).abs().asin()).fold(0.0, f64::max))
}

pub const FLATNESS_TOL: f64 = 1e-9;

/// Marks of the τ-only orbit boxes down to `depth` (2^depth + 1 distinct
/// points along the base arc), their top-edge lines, and the images of both
/// under every Σ element g with 1 ≤ |g| ≤ `translate_len` and under g⁻¹.
pub fn sample_curve(seed: &MarkedBox, depth: usize, translate_len: usize) -> Result<LimitSetApprox> {
    let sigma: Vec<GroupElement> = if translate_len > 0 {
        enumerate_group(seed, translate_len, DEDUPE_TOL)?
            .into_iter()
            .filter(|g| g.in_sigma(MARK_TOL) && !g.word.is_empty())
            .collect()
    } else {
        Vec::new()
    };
    sample_curve_with(seed, depth, translate_len, &sigma)
}

/// As `sample_curve`, with the translating elements supplied (those with
/// 1 ≤ |word| ≤ `translate_len` are used).
pub fn sample_curve_with(
    seed: &MarkedBox,
    depth: usize,
    translate_len: usize,
    elements: &[GroupElement],
) -> Result<LimitSetApprox> {
    if flatness(seed)? <= FLATNESS_TOL {
        return Err(Error::DegenerateSeed("curve samples up to depth 3 are collinear".into()));
    }
    let leaves = ordered_leaves(seed, depth)?;
    let n = leaves.len();

    let per_leaf: Vec<Result<([V3; 4], [V3; 4], BaseSample)>> = leaves
        .par_iter()
        .map(|(w, bx)| {
            let pt = bx.pappus_triple()?;
            let diamond = [&bx.t, &pt.u, &pt.v, &bx.b].map(|p| p.to_real().unwrap());
            let lines = [bx.top_edge()?, bx.bottom_edge()?, crate::projective::join(&bx.p, &bx.r)?, crate::projective::join(&bx.q, &bx.s)?];
            let line_diamond = lines.clone().map(|l| l.to_real().unwrap());
            Ok((diamond, line_diamond, BaseSample { word: w.clone(), point: bx.t.clone(), line: lines[0].clone() }))
        })
        .collect();
    let mut diamonds = Vec::with_capacity(n);
    let mut line_diamonds = Vec::with_capacity(n);
    let mut base = Vec::with_capacity(n + 1);
    for item in per_leaf {
        let (d, ld, b) = item?;
        diamonds.push(d);
        line_diamonds.push(ld);
        base.push(b);
    }
    let last = &leaves[n - 1].1;
    base.push(BaseSample { word: "b".into(), point: last.b.clone(), line: last.bottom_edge()? });

    let mut translates = vec![Translate { word: String::new(), inverse: false, map: linalg::IDENTITY }];
    for g in elements.iter().filter(|g| !g.word.is_empty() && g.word.len() <= translate_len) {
        let m = g.map.to_f64();
        translates.push(Translate { word: g.word.as_str().to_string(), inverse: false, map: m });
        translates.push(Translate {
            word: g.word.as_str().to_string(),
            inverse: true,
            map: linalg::sup_scale(&linalg::adjugate(&m)),
        });
    }

    let base_points: Vec<V3> = base.iter().map(|b| b.point.to_real().unwrap()).collect();
    let base_lines: Vec<V3> = base.iter().map(|b| b.line.to_real().unwrap()).collect();
    let blocks: Vec<(Vec<CurveSample>, Vec<LineSample>)> = translates
        .par_iter()
        .enumerate()
        .map(|(ti, tr)| {
            let m = tr.map;
            let dual = linalg::transpose(&linalg::adjugate(&m));
            let arc: Vec<f64> = diamonds
                .iter()
                .map(|d| max_pairwise(&d.map(|x| linalg::normalize(&linalg::mat_vec(&m, &x)))))
                .collect();
            let larc: Vec<f64> = line_diamonds
                .iter()
                .map(|d| max_pairwise(&d.map(|x| linalg::normalize(&linalg::mat_vec(&dual, &x)))))
                .collect();
            let bound = |v: &[f64], k: usize| {
                let left = if k > 0 { v[k - 1] } else { 0.0 };
                let right = if k < n { v[k] } else { 0.0 };
                left.max(right)
            };
            let curve = (0..=n)
                .map(|k| CurveSample {
                    param: Param { translate: ti as u32, leaf: k as u32 },
                    point: canonical(&linalg::mat_vec(&m, &base_points[k])),
                    error_bound: bound(&arc, k),
                })
                .collect();
            let lines = (0..=n)
                .map(|k| LineSample {
                    param: Param { translate: ti as u32, leaf: k as u32 },
                    line: canonical(&linalg::mat_vec(&dual, &base_lines[k])),
                    error_bound: bound(&larc, k),
                })
                .collect();
            (curve, lines)
        })
        .collect();
    let mut curve = Vec::with_capacity(blocks.len() * (n + 1));
    let mut lines = Vec::with_capacity(blocks.len() * (n + 1));
    for (c, l) in blocks {
        curve.extend(c);
        lines.extend(l);
    }
    Ok(LimitSetApprox { depth, translate_len, translates, base, curve, lines })
}

/// Unit vector with its largest-modulus entry positive.
pub fn canonical(v: &V3) -> V3 {
    let n = linalg::norm(v);
    let lead = v.iter().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { *x } else { acc });
    linalg::scale(v, lead.signum() / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projective::dist_point_line;

    #[test]
    fn symmetric_seed_is_flat() {
        let th = MarkedBox::symmetric_seed();
        assert!(flatness(&th).unwrap() <= FLATNESS_TOL);
        assert!(matches!(sample_curve(&th, 1, 0), Err(Error::DegenerateSeed(_))));
    }

    #[test]
    fn default_seed_depth_one() {
        let seed = MarkedBox::default_seed();
        assert!(flatness(&seed).unwrap() > 1e-3);
        let a = sample_curve(&seed, 1, 0).unwrap();
        assert_eq!(a.curve.len(), 3);
        let p: Vec<HPoint> = a.base.iter().map(|b| b.point.clone()).collect();
        assert!(!crate::projective::collinear(&p[0], &p[1], &p[2]));
        assert_eq!(p[0], seed.t);
        assert_eq!(p[2], seed.b);
    }

    #[test]
    fn sample_count_and_marks_on_edges() {
        let seed = MarkedBox::default_seed();
        for d in 0..6 {
            let a = sample_curve(&seed, d, 0).unwrap();
            assert_eq!(a.curve.len(), (1 << d) + 1);
            for b in &a.base {
                assert_eq!(dist_point_line(&b.point, &b.line).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn leaves_run_from_t_to_b() {
        let seed = MarkedBox::default_seed();
        let leaves = ordered_leaves(&seed, 3).unwrap();
        let words: Vec<&str> = leaves.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, vec!["111", "211", "121", "221", "112", "212", "122", "222"]);
        for k in 1..leaves.len() {
            // consecutive leaves share a mark
            assert_eq!(leaves[k - 1].1.b, leaves[k].1.t);
        }
    }
}
