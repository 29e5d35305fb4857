use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pappus_core::limit_set::{
    elation_closed_form_residual, exact_law_counts, general_position_census_vectors, hermitian_invariant_search,
    spectrum_oracle_residual, verify_all, Status, VerifyConfig, VerifyReport,
};
use pappus_core::marked_box::MarkedBox;
use pappus_core::projective::ProjMap;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every named check passes; the detail lists each with its residual.
fn checks_pass(report: &VerifyReport, names: &[&str]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in names {
        match report.get(name) {
            Some(c) => {
                pass &= c.status == Status::Pass;
                parts.push(format!("{name}={} ({:e} vs {:e})", c.status.name(), c.residual, c.tolerance));
            }
            None => {
                pass = false;
                parts.push(format!("{name}=missing"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn exact_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let [pappus, involution, conjugation, equivariance] = exact_law_counts(1000, 100, &mut rng);
    outcome(
        pappus + involution + conjugation + equivariance == 0,
        format!(
            "violations over 1000 boxes / 100 maps: pappus {pappus}, involution {involution}, conjugation {conjugation}, equivariance {equivariance}"
        ),
    )
}

fn spectrum_oracle() -> Outcome {
    match spectrum_oracle_residual() {
        Ok(r) => outcome(r <= 1e-10, format!("closed-form deviation {r:e}")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn pseudo_limits(report: &VerifyReport) -> Outcome {
    let base = checks_pass(report, &["pseudo_limit_rank", "pseudo_limit_image", "pseudo_limit_kernel"]);
    match elation_closed_form_residual(60, 1e-8) {
        Ok(r) => outcome(base.pass && r <= 1e-12, format!("{}, elation closed form {r:e}", base.detail)),
        Err(e) => outcome(false, format!("{}, elation closed form error: {e}", base.detail)),
    }
}

fn no_invariants(report: &VerifyReport, symmetric: &VerifyReport) -> Outcome {
    let base = checks_pass(
        report,
        &["invariant_line", "invariant_point", "invariant_line_complex", "invariant_point_complex"],
    );
    let text = symmetric.to_text();
    let flagged = symmetric.overall == Status::Degenerate
        && symmetric.get("invariant_line").is_some_and(|c| c.status == Status::Degenerate && c.residual == 0.0)
        && text.contains("# invariant_line: line [1,0,0]");
    outcome(base.pass && flagged, format!("{}, symmetric seed flagged: {flagged}", base.detail))
}

fn general_position(report: &VerifyReport) -> Outcome {
    let base = checks_pass(report, &["general_position"]);
    // Three horizontal lines meet at the point at infinity [1,0,0].
    let pencil: Vec<[f64; 3]> = (0..3).map(|k| [0.0, 1.0, k as f64 - 1.0]).collect();
    let control = match general_position_census_vectors(&pencil, 1e-6) {
        Ok((conc, count)) => conc == 3 && count == 0,
        Err(_) => false,
    };
    let counts = report.get("general_position").map(|c| c.detail.join("; ")).unwrap_or_default();
    outcome(base.pass && control, format!("{} [{counts}], pencil control {control}", base.detail))
}

fn hermitian(report: &VerifyReport) -> Outcome {
    let base = checks_pass(report, &["hermitian_search"]);
    let g = ProjMap::float([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]]).expect("invertible");
    let control = match hermitian_invariant_search(&[g]) {
        Ok(r) => r.found && r.signature == Some((2, 1)) && r.joint_residual <= 1e-12,
        Err(_) => false,
    };
    outcome(base.pass && control, format!("{}, diagonal control {control}", base.detail))
}

fn determinism(seed: &MarkedBox, cfg: &VerifyConfig) -> Outcome {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| verify_all(seed, cfg).to_text())
    };
    let one = run(1);
    let eight = run(8);
    outcome(one == eight, format!("1 vs 8 workers: {} vs {} bytes, identical: {}", one.len(), eight.len(), one == eight))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = VerifyConfig::default();
    let seed = MarkedBox::default_seed();
    let report = verify_all(&seed, &cfg);
    let symmetric = verify_all(&MarkedBox::symmetric_seed(), &cfg);

    let criteria: Vec<(&str, Outcome)> = vec![
        ("C1 exact box laws", exact_laws()),
        ("C2 representation", checks_pass(&report, &["anti_homomorphism", "mark_consistency"])),
        ("C3 spectrum oracle", spectrum_oracle()),
        (
            "C4 fixed structure",
            checks_pass(&report, &["fixed_points", "fixed_lines", "saddle_separation"]),
        ),
        ("C5 pseudo-limits", pseudo_limits(&report)),
        ("C6 no invariant lines or points", no_invariants(&report, &symmetric)),
        (
            "C7 density",
            checks_pass(&report, &["density_fixed_to_curve", "density_curve_to_fixed", "density_refinement"]),
        ),
        ("C8 general position", general_position(&report)),
        ("C9 not complex hyperbolic", hermitian(&report)),
        ("C10 Kulkarni consistency", checks_pass(&report, &["orbit_cluster", "minimality", "kulkarni_monotone"])),
        ("C11 determinism", determinism(&seed, &cfg)),
    ];

    let mut failed = 0;
    for (name, o) in &criteria {
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
