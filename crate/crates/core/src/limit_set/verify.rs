//! The full verification run and its text report.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{self, V3};
use crate::marked_box::{random_box, random_map, BoxOp, MarkedBox};
use crate::projective::{det_ints, Field, HPoint, ProjMap};
use crate::representation::{
    anti_homomorphism_residual, disjoint_pair, enumerate_group, find_loxodromics, order_three_words, reduce_word,
    rho_hat_unchecked, GroupElement, Word, DEDUPE_TOL,
};
use crate::scalar::fmt_f64;
use crate::spectrum::{spectrum, SpectrumClass, SpectrumReport};

use super::census::{general_position_census_vectors, triples};
use super::checks::{
    degeneracy_gate, density_gap, fixed_structure_check, invariant_line_search, invariant_point_search,
    minimality_gap, orbit_cluster_check, orbit_maps, pseudo_powers, pseudo_sequence_check,
};
use super::hermitian::hermitian_invariant_search;
use super::{sample_curve_with, ApproxIndex, LimitSetApprox};

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub depth: usize,
    pub maxlen: usize,
    /// Word length of the translating elements; `maxlen / 2` when unset.
    pub translate_len: Option<usize>,
    pub mark_tol: f64,
    pub rank_tol: f64,
    pub gap_tol: f64,
    pub no_invariant_tol: f64,
    pub gate_tol: f64,
    /// Geometric tolerances are this multiple of the error bound.
    pub bound_factor: f64,
    pub saddle_factor: f64,
    pub law_boxes: usize,
    pub law_maps: usize,
    pub word_pairs: usize,
    pub pseudo_count: usize,
    pub pseudo_powers: usize,
    pub probes: usize,
    pub probe_margin: f64,
    pub census_lines: usize,
    pub census_tol: f64,
    pub hermitian_tol: f64,
    pub rng_seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            depth: 14,
            maxlen: 8,
            translate_len: None,
            mark_tol: 1e-9,
            rank_tol: 1e-8,
            gap_tol: 1e-6,
            no_invariant_tol: 1e-3,
            gate_tol: 1e-9,
            bound_factor: 5.0,
            saddle_factor: 10.0,
            law_boxes: 1000,
            law_maps: 100,
            word_pairs: 200,
            pseudo_count: 5,
            pseudo_powers: 60,
            probes: 10,
            probe_margin: 1e-3,
            census_lines: 200,
            census_tol: 1e-6,
            hermitian_tol: 1e-6,
            rng_seed: 20240101,
        }
    }
}

impl VerifyConfig {
    pub fn translate_len(&self) -> usize {
        self.translate_len.unwrap_or(self.maxlen / 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Degenerate,
    Skipped,
    /// Recorded for reference; never affects the overall status.
    Info,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Degenerate => "degenerate",
            Status::Skipped => "skipped",
            Status::Info => "info",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// residual ≤ tolerance
    AtMost,
    /// residual > tolerance
    Above,
    /// residual = tolerance
    Equal,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub status: Status,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub detail: Vec<String>,
    pub wall_time: Duration,
}

impl CheckResult {
    fn measured(name: &'static str, residual: f64, bound: Bound, tolerance: f64) -> Self {
        let ok = match bound {
            Bound::AtMost => residual <= tolerance,
            Bound::Above => residual > tolerance,
            Bound::Equal => residual == tolerance,
        };
        CheckResult {
            name,
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            tolerance,
            bound,
            detail: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    fn with_status(name: &'static str, status: Status, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name,
            status,
            residual,
            tolerance,
            bound: Bound::AtMost,
            detail: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        let mut c = Self::with_status(name, Status::Skipped, f64::NAN, f64::NAN);
        c.detail.push(why.to_string());
        c
    }

    fn note(mut self, s: impl Into<String>) -> Self {
        self.detail.push(s.into());
        self
    }

    fn tolerance_text(&self) -> String {
        let t = fmt_f64(self.tolerance);
        match self.bound {
            Bound::AtMost => t,
            Bound::Above => format!(">{t}"),
            Bound::Equal => format!("={t}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub overall: Status,
    /// Reason attached to the overall status.
    pub reason: Option<String>,
    pub wall_time: Duration,
}

impl VerifyReport {
    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Report text: one `name<TAB>status<TAB>residual<TAB>tolerance` line per
    /// check, an `OVERALL<TAB>status` line, then `# ` detail lines. Timing is
    /// left out so reports compare byte for byte.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", c.name, c.status, fmt_f64(c.residual), c.tolerance_text()));
        }
        out.push_str(&format!("OVERALL\t{}\n", self.overall));
        if let Some(r) = &self.reason {
            out.push_str(&format!("# reason: {r}\n"));
        }
        for c in &self.checks {
            for d in &c.detail {
                out.push_str(&format!("# {}: {}\n", c.name, d));
            }
        }
        out
    }
}

pub const CHECK_NAMES: [&str; 35] = [
    "degeneracy_gate",
    "pappus_collinearity",
    "involution",
    "conjugation",
    "equivariance",
    "anti_homomorphism",
    "anti_homomorphism_sigma",
    "mark_consistency",
    "sigma_quarantine",
    "spectrum_oracle",
    "loxodromic_harvest",
    "order_three",
    "fixed_points",
    "fixed_lines",
    "saddle_meet",
    "saddle_separation",
    "density_fixed_to_curve",
    "density_curve_to_fixed",
    "density_refinement",
    "invariant_line",
    "invariant_point",
    "invariant_line_complex",
    "invariant_point_complex",
    "pseudo_limit_rank",
    "pseudo_limit_image",
    "pseudo_limit_kernel",
    "pseudo_limit_elation",
    "orbit_cluster",
    "minimality",
    "kulkarni_monotone",
    "kulkarni_equality",
    "general_position",
    "general_position_control",
    "hermitian_search",
    "hermitian_control",
];

struct Runner {
    checks: Vec<CheckResult>,
}

impl Runner {
    fn run(&mut self, f: impl FnOnce() -> CheckResult) {
        let start = Instant::now();
        let mut c = f();
        c.wall_time = start.elapsed();
        self.checks.push(c);
    }

    fn push(&mut self, c: CheckResult) {
        self.checks.push(c);
    }

    fn skip_rest(&mut self, why: &str) {
        for name in CHECK_NAMES {
            if !self.checks.iter().any(|c| c.name == name) {
                self.checks.push(CheckResult::skipped(name, why));
            }
        }
        self.sort();
    }

    fn sort(&mut self) {
        self.checks.sort_by_key(|c| CHECK_NAMES.iter().position(|n| *n == c.name).unwrap_or(usize::MAX));
    }
}

fn error_check(name: &'static str, e: impl fmt::Display) -> CheckResult {
    CheckResult::with_status(name, Status::Fail, f64::NAN, f64::NAN).note(format!("error: {e}"))
}

/// Exact laws of the box operations on random rational boxes: the number of
/// violations of each law.
pub fn exact_law_counts(n_boxes: usize, n_maps: usize, rng: &mut ChaCha8Rng) -> [usize; 4] {
    let mut counts = [0usize; 4];
    let boxes: Vec<MarkedBox> = (0..n_boxes).map(|_| random_box(rng)).collect();
    for bx in &boxes {
        match bx.pappus_triple() {
            Ok(pt) => {
                let ok = match (pt.u.ints_ref(), pt.m.ints_ref(), pt.v.ints_ref()) {
                    (Some(u), Some(m), Some(v)) => det_ints(u, m, v) == 0.into(),
                    _ => false,
                };
                counts[0] += usize::from(!ok);
            }
            Err(_) => counts[0] += 1,
        }
        let ii = bx.apply(BoxOp::I).and_then(|b| b.apply(BoxOp::I));
        counts[1] += usize::from(!matches!(ii, Ok(b) if b.same_class(bx)));
        let conj = bx.apply(BoxOp::I).and_then(|b| b.apply(BoxOp::Tau1)).and_then(|b| b.apply(BoxOp::I));
        let direct = bx.apply(BoxOp::Tau2);
        counts[2] += usize::from(!matches!((conj, direct), (Ok(a), Ok(b)) if a.same_class(&b)));
    }
    for bx in boxes.iter().take(n_maps) {
        let a = random_map(rng);
        for op in BoxOp::ALL {
            let lhs = bx.transform(&a).and_then(|b| b.apply(op));
            let rhs = bx.apply(op).and_then(|b| b.transform(&a));
            counts[3] += usize::from(!matches!((lhs, rhs), (Ok(x), Ok(y)) if x.same_class(&y)));
        }
    }
    counts
}

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let letters = ['i', '1', '2'];
    loop {
        let raw: String = (0..len).map(|_| letters[rng.gen_range(0..3)]).collect();
        let w = reduce_word(&raw).expect("valid letters");
        if w.len() == len {
            return w;
        }
    }
}

/// Closed-form spectra of the symmetric letter maps: largest deviation.
pub fn spectrum_oracle_residual() -> Result<f64> {
    let tau1 = ProjMap::ints([[2, 0, 0], [0, 1, 1], [0, -1, 3]])?;
    let inv = ProjMap::ints([[-1, 0, 0], [0, -1, 0], [0, 0, 1]])?;
    let r = spectrum(&tau1)?;
    let mut worst = 0.0f64;
    for z in r.eigenvalues {
        worst = worst.max((z - num_complex::Complex64::new(2.0, 0.0)).norm());
    }
    if r.class != SpectrumClass::Elation || r.eigenspace_dims[0] != 2 {
        worst = f64::INFINITY;
    }
    let g = tau1.compose(&inv);
    let r = spectrum(&g)?;
    let s5 = 5f64.sqrt();
    let expect = [1.0 + s5, -2.0, 1.0 - s5];
    for (z, e) in r.eigenvalues.iter().zip(expect) {
        worst = worst.max((z - num_complex::Complex64::new(e, 0.0)).norm());
    }
    let att = r.attracting_point.as_ref().and_then(|p| p.to_real()).unwrap_or([0.0; 3]);
    worst = worst.max(linalg::angle(&att, &[0.0, 1.0, 2.0 + s5]));
    if r.class != SpectrumClass::Loxodromic {
        worst = f64::INFINITY;
    }
    Ok(worst)
}

/// Pseudo-limit of the symmetric τ₁ letter map against its closed form:
/// image the t-mark, kernel the top edge.
pub fn elation_closed_form_residual(n_max: usize, rank_tol: f64) -> Result<f64> {
    let sym = MarkedBox::symmetric_seed();
    let g = rho_hat_unchecked(&reduce_word("1")?, &sym)?;
    let (data, _) = pseudo_powers(&g.map, n_max, rank_tol)?;
    let image = data.image_point.expect("escaping sequence");
    let kernel = data.kernel_line.expect("escaping sequence");
    let di = crate::projective::dist(&image, &sym.t)?;
    let dk = crate::projective::line_dist(&kernel, &sym.top_edge()?)?;
    Ok(di.max(dk))
}

fn complex_probes(rng: &mut ChaCha8Rng, count: usize, idx: &ApproxIndex, margin: f64) -> Vec<HPoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z: [num_complex::Complex64; 3] =
            std::array::from_fn(|_| num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        if linalg::cnorm(&z) < 1e-3 || idx.lines.min_distance(&z) < margin {
            continue;
        }
        out.push(HPoint::complex(z).expect("nonzero"));
    }
    out
}

fn real_probes(rng: &mut ChaCha8Rng, count: usize) -> Vec<V3> {
    (0..count)
        .map(|_| {
            let v = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            linalg::normalize(&v)
        })
        .collect()
}

/// Unit representative with its largest entry positive, rounded to twelve
/// decimals, as `[a,b,c]`.
pub fn fmt_coords(v: &[num_complex::Complex64; 3]) -> String {
    let v = linalg::cnormalize(v);
    let lead = v.iter().fold(num_complex::Complex64::new(0.0, 0.0), |a, z| if z.norm() > a.norm() { *z } else { a });
    let phase = lead.conj() / lead.norm();
    let round = |x: f64| (x * 1e12).round() / 1e12 + 0.0;
    let parts: Vec<String> = v
        .iter()
        .map(|z| {
            let z = z * phase;
            let (re, im) = (round(z.re), round(z.im));
            if im == 0.0 {
                format!("{re}")
            } else {
                format!("{re}{:+}i", im)
            }
        })
        .collect();
    format!("[{}]", parts.join(","))
}

fn status_of(report: &[CheckResult]) -> (Status, Option<String>) {
    if report.iter().any(|c| c.status == Status::Degenerate) {
        return (Status::Degenerate, Some("degenerate seed".into()));
    }
    let failed: Vec<&str> = report.iter().filter(|c| c.status == Status::Fail).map(|c| c.name).collect();
    let incomplete = report.iter().any(|c| matches!(c.status, Status::Skipped | Status::Inconclusive));
    if !failed.is_empty() {
        let mut reason = format!("failed: {}", failed.join(", "));
        if incomplete {
            reason.push_str("; insufficient search depth");
        }
        return (Status::Fail, Some(reason));
    }
    if incomplete {
        return (Status::Inconclusive, Some("insufficient search depth".into()));
    }
    (Status::Pass, None)
}

/// Runs every check on the seed and aggregates the report. Failures are
/// entries, not errors.
pub fn verify_all(seed: &MarkedBox, cfg: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let mut runner = Runner { checks: Vec::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);

    let letters: Vec<ProjMap> = ["i", "1", "2"]
        .iter()
        .filter_map(|w| rho_hat_unchecked(&reduce_word(w).ok()?, seed).ok().map(|g| g.map))
        .collect();

    match degeneracy_gate(seed, cfg.gate_tol) {
        Ok(Some((line, r))) => {
            runner.push(
                CheckResult::with_status("degeneracy_gate", Status::Degenerate, r, cfg.gate_tol)
                    .note(format!("common invariant line {}", fmt_coords(&line.to_complex()))),
            );
            let (l, lr) = invariant_line_search(&letters, Field::Real)
                .map(|(l, r)| (fmt_coords(&l.to_complex()), r))
                .unwrap_or_else(|e| (e.to_string(), f64::NAN));
            let status = if lr <= cfg.gate_tol { Status::Degenerate } else { Status::Fail };
            runner.push(
                CheckResult::with_status("invariant_line", status, lr, cfg.no_invariant_tol)
                    .note(format!("line {l}")),
            );
            runner.skip_rest("degenerate seed");
            let (overall, reason) = status_of(&runner.checks);
            return VerifyReport { checks: runner.checks, overall, reason, wall_time: start.elapsed() };
        }
        Ok(None) => runner.push(CheckResult::measured("degeneracy_gate", 0.0, Bound::Equal, 0.0)),
        Err(e) => runner.push(error_check("degeneracy_gate", e)),
    }

    {
        let start = Instant::now();
        let c = exact_law_counts(cfg.law_boxes, cfg.law_maps, &mut rng);
        let t = start.elapsed();
        for (name, k) in ["pappus_collinearity", "involution", "conjugation", "equivariance"].into_iter().zip(c) {
            let mut r = CheckResult::measured(name, k as f64, Bound::Equal, 0.0);
            r.wall_time = t;
            runner.push(r);
        }
    }

    // Group elements up to maxlen; Σ is the part passing the mark check.
    let elements = match enumerate_group(seed, cfg.maxlen, DEDUPE_TOL) {
        Ok(e) => e,
        Err(e) => {
            runner.push(error_check("mark_consistency", e));
            runner.skip_rest("group enumeration failed");
            let (overall, reason) = status_of(&runner.checks);
            return VerifyReport { checks: runner.checks, overall, reason, wall_time: start.elapsed() };
        }
    };
    let sigma: Vec<GroupElement> =
        elements.iter().filter(|g| g.in_sigma(cfg.mark_tol)).cloned().collect();
    let sigma_nontrivial: Vec<GroupElement> = sigma.iter().filter(|g| !g.word.is_empty()).cloned().collect();

    runner.run(|| {
        if cfg.maxlen < 2 {
            return CheckResult::skipped("anti_homomorphism", "maxlen below 2");
        }
        let mut worst = 0.0f64;
        for _ in 0..cfg.word_pairs {
            let total = rng.gen_range(2..=cfg.maxlen);
            let lu = rng.gen_range(1..total);
            let u = random_word(&mut rng, lu);
            let v = random_word(&mut rng, total - lu);
            match anti_homomorphism_residual(&u, &v, seed) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return error_check("anti_homomorphism", e),
            }
        }
        CheckResult::measured("anti_homomorphism", worst, Bound::AtMost, 1e-10)
            .note(format!("{} random reduced word pairs with |u|+|v| <= {}", cfg.word_pairs, cfg.maxlen))
    });

    runner.run(|| {
        let words: Vec<&Word> = sigma_nontrivial.iter().map(|g| &g.word).collect();
        if words.len() < 2 || cfg.maxlen < 2 {
            return CheckResult::skipped("anti_homomorphism_sigma", "fewer than two Σ words");
        }
        let mut worst = 0.0f64;
        let mut done = 0;
        let mut attempts = 0;
        while done < cfg.word_pairs && attempts < 100 * cfg.word_pairs {
            attempts += 1;
            let u = words[rng.gen_range(0..words.len())];
            let v = words[rng.gen_range(0..words.len())];
            if u.len() + v.len() > cfg.maxlen {
                continue;
            }
            match anti_homomorphism_residual(u, v, seed) {
                Ok(r) => worst = worst.max(r),
                Err(e) => return error_check("anti_homomorphism_sigma", e),
            }
            done += 1;
        }
        CheckResult::measured("anti_homomorphism_sigma", worst, Bound::AtMost, 1e-10)
            .note(format!("{done} pairs of Σ words with |u|+|v| <= {}", cfg.maxlen))
    });

    runner.run(|| {
        let worst = elements.iter().map(|g| g.mark_residual).fold(0.0, f64::max);
        let bad = elements.len() - sigma.len();
        CheckResult::measured("mark_consistency", worst, Bound::AtMost, cfg.mark_tol)
            .note(format!("{bad} of {} elements fail the mark check", elements.len()))
    });

    runner.push(
        CheckResult::with_status("sigma_quarantine", Status::Info, (elements.len() - sigma.len()) as f64, 0.0)
            .note(format!("{} of {} elements in Σ", sigma.len(), elements.len())),
    );

    runner.run(|| match spectrum_oracle_residual() {
        Ok(r) => CheckResult::measured("spectrum_oracle", r, Bound::AtMost, 1e-10),
        Err(e) => error_check("spectrum_oracle", e),
    });

    let lox: Vec<(GroupElement, SpectrumReport)> = find_loxodromics(&sigma_nontrivial);
    let pair = disjoint_pair(&lox, cfg.gap_tol);
    runner.push(match pair {
        Some((i, j, sep)) => CheckResult::measured("loxodromic_harvest", sep, Bound::Above, cfg.gap_tol).note(format!(
            "{} loxodromic elements; disjoint fixed sets: {} and {}",
            lox.len(),
            lox[i].0.word,
            lox[j].0.word
        )),
        None => CheckResult::with_status("loxodromic_harvest", Status::Inconclusive, lox.len() as f64, cfg.gap_tol)
            .note("no loxodromic pair with disjoint fixed sets at this word length"),
    });

    runner.run(|| match order_three_words(seed, cfg.maxlen.min(6)) {
        Ok(ws) => CheckResult::with_status("order_three", Status::Info, ws.len() as f64, 0.0).note(format!(
            "order-3 words up to length {}: {}",
            cfg.maxlen.min(6),
            if ws.is_empty() { "none".to_string() } else { ws.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",") }
        )),
        Err(e) => error_check("order_three", e),
    });

    let tl = cfg.translate_len();
    let approx = match sample_curve_with(seed, cfg.depth, tl, &sigma_nontrivial) {
        Ok(a) => a,
        Err(e) => {
            let status = if matches!(e, crate::Error::DegenerateSeed(_)) { Status::Degenerate } else { Status::Fail };
            runner.push(CheckResult::with_status("fixed_points", status, f64::NAN, f64::NAN).note(e.to_string()));
            runner.skip_rest("no curve approximation");
            let (overall, reason) = status_of(&runner.checks);
            return VerifyReport { checks: runner.checks, overall, reason, wall_time: start.elapsed() };
        }
    };
    let idx = approx.index();
    let eb = idx.error_bound;
    let geo_tol = cfg.bound_factor * eb;
    let approx_note = format!(
        "depth {}, {} translates, {} curve samples, error bound {}",
        approx.depth,
        approx.translates.len(),
        approx.curve.len(),
        fmt_f64(eb)
    );

    structure_checks(&mut runner, &lox, &idx, cfg, geo_tol, eb, &approx_note);
    density_checks(&mut runner, seed, cfg, &elements, &lox, &idx, geo_tol);
    invariant_checks(&mut runner, &letters, cfg);
    pseudo_checks(&mut runner, &lox, &idx, cfg, geo_tol);
    kulkarni_checks(&mut runner, seed, cfg, &sigma_nontrivial, &sigma, &approx, &idx, geo_tol, &mut rng);
    census_checks(&mut runner, &approx, cfg);
    hermitian_checks(&mut runner, &lox, pair, cfg);

    runner.sort();
    let (overall, reason) = status_of(&runner.checks);
    VerifyReport { checks: runner.checks, overall, reason, wall_time: start.elapsed() }
}

fn structure_checks(
    runner: &mut Runner,
    lox: &[(GroupElement, SpectrumReport)],
    idx: &ApproxIndex,
    cfg: &VerifyConfig,
    geo_tol: f64,
    eb: f64,
    approx_note: &str,
) {
    if lox.is_empty() {
        for name in ["fixed_points", "fixed_lines", "saddle_meet", "saddle_separation"] {
            runner.push(CheckResult::skipped(name, "no loxodromic elements"));
        }
        return;
    }
    let results: Vec<_> = lox.iter().map(|(g, r)| (g, fixed_structure_check(r, idx))).collect();
    let mut point_gap = 0.0f64;
    let mut line_gap = 0.0f64;
    let mut meet = 0.0f64;
    let mut sep = f64::INFINITY;
    let mut worst = ("", "", "", "");
    let mut worst_vals = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    for (g, r) in &results {
        match r {
            Ok(fs) => {
                if fs.point_gap() > worst_vals.0 {
                    worst_vals.0 = fs.point_gap();
                    worst.0 = g.word.as_str();
                }
                if fs.line_gap() > worst_vals.1 {
                    worst_vals.1 = fs.line_gap();
                    worst.1 = g.word.as_str();
                }
                if fs.saddle_meet_residual > worst_vals.2 {
                    worst_vals.2 = fs.saddle_meet_residual;
                    worst.2 = g.word.as_str();
                }
                if fs.saddle_separation < worst_vals.3 {
                    worst_vals.3 = fs.saddle_separation;
                    worst.3 = g.word.as_str();
                }
                point_gap = point_gap.max(fs.point_gap());
                line_gap = line_gap.max(fs.line_gap());
                meet = meet.max(fs.saddle_meet_residual);
                sep = sep.min(fs.saddle_separation);
            }
            Err(_) => {
                point_gap = f64::INFINITY;
            }
        }
    }
    let n = lox.len();
    runner.push(
        CheckResult::measured("fixed_points", point_gap, Bound::AtMost, geo_tol)
            .note(format!("{n} loxodromic elements; worst {}", worst.0))
            .note(approx_note.to_string()),
    );
    runner.push(
        CheckResult::measured("fixed_lines", line_gap, Bound::AtMost, geo_tol).note(format!("worst {}", worst.1)),
    );
    runner.push(CheckResult::measured("saddle_meet", meet, Bound::AtMost, 1e-8).note(format!("worst {}", worst.2)));
    runner.push(
        CheckResult::measured("saddle_separation", sep, Bound::Above, cfg.saddle_factor * eb)
            .note(format!("closest saddle {}", worst.3)),
    );
}

fn fixed_set(lox: &[(GroupElement, SpectrumReport)]) -> Vec<V3> {
    lox.iter()
        .flat_map(|(_, r)| {
            [&r.attracting_point, &r.repelling_point].into_iter().flatten().filter_map(|p| p.to_real()).collect::<Vec<_>>()
        })
        .collect()
}

fn density_checks(
    runner: &mut Runner,
    seed: &MarkedBox,
    cfg: &VerifyConfig,
    elements: &[GroupElement],
    lox: &[(GroupElement, SpectrumReport)],
    idx: &ApproxIndex,
    geo_tol: f64,
) {
    if lox.is_empty() {
        for name in ["density_fixed_to_curve", "density_curve_to_fixed", "density_refinement"] {
            runner.push(CheckResult::skipped(name, "no loxodromic elements"));
        }
        return;
    }
    let fixed = fixed_set(lox);
    let (g1, g2) = density_gap(idx, &fixed);
    runner.push(CheckResult::measured("density_fixed_to_curve", g1, Bound::AtMost, geo_tol));
    runner.push(CheckResult::measured("density_curve_to_fixed", g2, Bound::AtMost, geo_tol));

    if cfg.maxlen < 4 {
        runner.push(CheckResult::skipped("density_refinement", "maxlen below 4"));
        return;
    }
    let coarse_len = cfg.maxlen - 2;
    let coarse_elements: Vec<GroupElement> = elements
        .iter()
        .filter(|g| !g.word.is_empty() && g.word.len() <= coarse_len && g.in_sigma(cfg.mark_tol))
        .cloned()
        .collect();
    let result = sample_curve_with(seed, cfg.depth, coarse_len / 2, &coarse_elements).map(|a| {
        let cidx = a.index();
        let clox = find_loxodromics(&coarse_elements);
        density_gap(&cidx, &fixed_set(&clox))
    });
    runner.push(match result {
        Ok((c1, c2)) => {
            // Residual: the smaller of the two decreases; positive means both shrank.
            let shrink = (c1 - g1).min(c2 - g2);
            CheckResult::measured("density_refinement", shrink, Bound::Above, 0.0).note(format!(
                "maxlen {coarse_len}: ({}, {}); maxlen {}: ({}, {})",
                fmt_f64(c1),
                fmt_f64(c2),
                cfg.maxlen,
                fmt_f64(g1),
                fmt_f64(g2)
            ))
        }
        Err(e) => error_check("density_refinement", e),
    });
}

fn invariant_checks(runner: &mut Runner, letters: &[ProjMap], cfg: &VerifyConfig) {
    for (name, field, line) in [
        ("invariant_line", Field::Real, true),
        ("invariant_point", Field::Real, false),
        ("invariant_line_complex", Field::Complex, true),
        ("invariant_point_complex", Field::Complex, false),
    ] {
        let res = if line {
            invariant_line_search(letters, field).map(|(l, r)| (fmt_coords(&l.to_complex()), r))
        } else {
            invariant_point_search(letters, field).map(|(p, r)| (fmt_coords(&p.to_complex()), r))
        };
        runner.push(match res {
            Ok((best, r)) => {
                CheckResult::measured(name, r, Bound::Above, cfg.no_invariant_tol).note(format!("best candidate {best}"))
            }
            Err(e) => error_check(name, e),
        });
    }
}

fn pseudo_checks(
    runner: &mut Runner,
    lox: &[(GroupElement, SpectrumReport)],
    idx: &ApproxIndex,
    cfg: &VerifyConfig,
    geo_tol: f64,
) {
    let mut order: Vec<usize> = (0..lox.len()).collect();
    order.sort_by(|&a, &b| lox[b].1.moduli_gaps[0].total_cmp(&lox[a].1.moduli_gaps[0]).then(a.cmp(&b)));
    let chosen: Vec<usize> = order.into_iter().take(cfg.pseudo_count).collect();
    if chosen.len() < cfg.pseudo_count {
        for name in ["pseudo_limit_rank", "pseudo_limit_image", "pseudo_limit_kernel"] {
            runner.push(CheckResult::skipped(name, "too few loxodromic elements"));
        }
    } else {
        let mut ratio = 0.0f64;
        let mut rank_ok = true;
        let mut image = 0.0f64;
        let mut kernel = 0.0f64;
        let mut words = Vec::new();
        let mut failure = None;
        for &k in &chosen {
            let (g, _) = &lox[k];
            words.push(g.word.to_string());
            match pseudo_sequence_check(&g.map, idx, cfg.pseudo_powers) {
                Ok(c) => {
                    ratio = ratio.max(c.data.sv_ratio);
                    rank_ok &= c.data.numeric_rank == 1;
                    image = image.max(c.image_gap);
                    kernel = kernel.max(c.kernel_gap).max(c.complex_kernel_gap);
                }
                Err(e) => failure = Some(format!("{}: {e}", g.word)),
            }
        }
        if let Some(f) = failure {
            runner.push(error_check("pseudo_limit_rank", f));
            runner.push(error_check("pseudo_limit_image", "see pseudo_limit_rank"));
            runner.push(error_check("pseudo_limit_kernel", "see pseudo_limit_rank"));
        } else {
            let mut rank = CheckResult::measured("pseudo_limit_rank", ratio, Bound::AtMost, cfg.rank_tol)
                .note(format!("elements {}", words.join(",")));
            if !rank_ok {
                rank.status = Status::Fail;
                rank = rank.note("numeric rank above 1");
            }
            runner.push(rank);
            runner.push(CheckResult::measured("pseudo_limit_image", image, Bound::AtMost, geo_tol));
            runner.push(CheckResult::measured("pseudo_limit_kernel", kernel, Bound::AtMost, geo_tol));
        }
    }
    runner.run(|| match elation_closed_form_residual(cfg.pseudo_powers, cfg.rank_tol) {
        Ok(r) => CheckResult::measured("pseudo_limit_elation", r, Bound::AtMost, 1e-12),
        Err(e) => error_check("pseudo_limit_elation", e),
    });
}

#[allow(clippy::too_many_arguments)]
fn kulkarni_checks(
    runner: &mut Runner,
    seed: &MarkedBox,
    cfg: &VerifyConfig,
    sigma_nontrivial: &[GroupElement],
    sigma: &[GroupElement],
    approx: &LimitSetApprox,
    idx: &ApproxIndex,
    geo_tol: f64,
    rng: &mut ChaCha8Rng,
) {
    let probes = complex_probes(rng, cfg.probes, idx, cfg.probe_margin);
    runner.run(|| match orbit_cluster_check(&probes, sigma_nontrivial, idx, cfg.probe_margin) {
        Ok(c) => match c.max_gap {
            Some(g) => CheckResult::measured("orbit_cluster", g, Bound::AtMost, geo_tol)
                .note(format!("{} cluster proxies from {} probes", c.proxies, probes.len())),
            None => CheckResult::skipped("orbit_cluster", "no group elements; vacuous"),
        },
        Err(e) => error_check("orbit_cluster", e),
    });

    let real = real_probes(rng, cfg.probes);
    runner.run(|| {
        if sigma_nontrivial.is_empty() {
            return CheckResult::skipped("minimality", "no group elements");
        }
        let maps = orbit_maps(approx, sigma);
        let gap = minimality_gap(&real, &maps, idx);
        CheckResult::measured("minimality", gap, Bound::AtMost, geo_tol).note(format!(
            "{} real probes, orbits under {} translates times {} elements",
            real.len(),
            approx.translates.len(),
            sigma.len()
        ))
    });

    runner.run(|| {
        if cfg.depth < 3 {
            return CheckResult::skipped("kulkarni_monotone", "depth below 3");
        }
        let coarse = match sample_curve_with(seed, cfg.depth - 2, approx.translate_len, sigma_nontrivial) {
            Ok(a) => a,
            Err(e) => return error_check("kulkarni_monotone", e),
        };
        let cl = coarse.line_index();
        let mut worst = 0.0f64;
        for p in &probes {
            let z = p.to_complex();
            worst = worst.max(idx.lines.min_distance(&z) - cl.min_distance(&z));
        }
        CheckResult::measured("kulkarni_monotone", worst, Bound::AtMost, 0.0)
            .note(format!("depth {} against depth {}", cfg.depth, cfg.depth - 2))
    });

    runner.push(
        CheckResult::with_status("kulkarni_equality", Status::Info, f64::NAN, f64::NAN)
            .note("equality of the Kulkarni and equicontinuity regions is not testable at finite depth; only the consistency checks above are run"),
    );
}

fn census_checks(runner: &mut Runner, approx: &LimitSetApprox, cfg: &VerifyConfig) {
    let n = approx.base.len();
    let want = cfg.census_lines.min(n);
    runner.run(|| {
        if want < 3 {
            return CheckResult::skipped("general_position", "fewer than three line samples");
        }
        // Evenly spaced along the base arc.
        let lines: Vec<V3> = (0..want).map(|k| approx.lines[k * (n - 1) / (want - 1).max(1)].line).collect();
        match general_position_census_vectors(&lines, cfg.census_tol) {
            Ok((conc, gp)) => {
                let mut c = CheckResult::measured("general_position", conc as f64, Bound::Equal, 2.0)
                    .note(format!("{want} lines: {gp} of {} triples in general position", triples(want)));
                if gp != triples(want) {
                    c.status = Status::Fail;
                }
                c
            }
            Err(e) => error_check("general_position", e),
        }
    });
    runner.run(|| {
        let pencil = [[0.0, 1.0, -1.0], [0.0, 1.0, 0.0], [0.0, 1.0, 1.0]];
        match general_position_census_vectors(&pencil, cfg.census_tol) {
            Ok((conc, gp)) => {
                let mut c = CheckResult::measured("general_position_control", conc as f64, Bound::Equal, 3.0);
                if gp != 0 {
                    c.status = Status::Fail;
                }
                c
            }
            Err(e) => error_check("general_position_control", e),
        }
    });
}

fn hermitian_checks(
    runner: &mut Runner,
    lox: &[(GroupElement, SpectrumReport)],
    pair: Option<(usize, usize, f64)>,
    cfg: &VerifyConfig,
) {
    runner.run(|| match pair {
        Some((i, j, _)) => match hermitian_invariant_search(&[lox[i].0.map.clone(), lox[j].0.map.clone()]) {
            Ok(h) => {
                let mut c = CheckResult::measured("hermitian_search", h.joint_residual, Bound::Above, cfg.hermitian_tol)
                    .note(format!("elements {} and {}, null space dimension {}", lox[i].0.word, lox[j].0.word, h.null_dim));
                if h.found {
                    c.status = Status::Fail;
                    c = c.note("invariant form of signature (2,1) found");
                }
                c
            }
            Err(e) => error_check("hermitian_search", e),
        },
        None => CheckResult::skipped("hermitian_search", "no disjoint loxodromic pair"),
    });
    runner.run(|| {
        let g = ProjMap::float([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]]).expect("invertible");
        match hermitian_invariant_search(&[g]) {
            Ok(h) => {
                let mut c = CheckResult::measured("hermitian_control", h.joint_residual, Bound::AtMost, 1e-12);
                if !h.found || h.signature != Some((2, 1)) {
                    c.status = Status::Fail;
                }
                c
            }
            Err(e) => error_check("hermitian_control", e),
        }
    });
}
