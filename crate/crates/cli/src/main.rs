mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use pappus_core::limit_set::{
    degeneracy_gate, sample_curve_with, verify_all, LimitSetApprox, Status, VerifyConfig, FLATNESS_TOL,
};
use pappus_core::marked_box::{orbit, BoxOp, MarkedBox, BIT_CEILING};
use pappus_core::projective::HPoint;
use pappus_core::render::{self, Drawing, SliceSpec, View};
use pappus_core::representation::{enumerate_group, reduce_word, rho_hat_unchecked, GroupElement, DEDUPE_TOL};
use pappus_core::scalar::fmt_f64;
use pappus_core::spectrum::spectrum;

use crate::output::{write_atomic, CliError};

pub const MAX_DEPTH: usize = 24;
pub const MAX_MAXLEN: usize = 12;
pub const MAX_GRID: usize = 4096;

#[derive(Parser, Debug)]
#[command(name = "pappus", version, about = "Pappus marked boxes and the limit set of their group")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump the orbit of the seed box under the box operations.
    Orbit(OrbitArgs),
    /// Dump curve and line-field samples.
    Curve(CurveArgs),
    /// Draw the curve, line field or orbit boxes as SVG.
    Render(RenderArgs),
    /// Rasterize the distance to the limit set on a complex line as PGM.
    Slice(SliceArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
    /// Print the spectrum of one group element.
    Spectrum(SpectrumArgs),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// `default`, `symmetric`, or six points p;q;r;s;t;b as x/y/z.
    #[arg(long, default_value = "default", allow_hyphen_values = true)]
    seed: String,
    #[arg(long, default_value_t = 14)]
    depth: usize,
    #[arg(long, default_value_t = 8)]
    maxlen: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value_t = 1e-8)]
    rank_tol: f64,
    #[arg(long, default_value_t = 1e-6)]
    gap_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    mark_tol: f64,
    #[arg(long, default_value_t = 1e-3)]
    no_invariant_tol: f64,
    /// `key=value` lines overriding defaults; flags given here win.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[command(flatten)]
    common: Common,
    /// Letters of the operations to use.
    #[arg(long, default_value = "12")]
    alphabet: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CurveArgs {
    #[command(flatten)]
    common: Common,
    /// Word length of the translating group elements.
    #[arg(long, default_value_t = 0)]
    translate: usize,
    #[arg(long)]
    out: PathBuf,
    /// Line dump path; defaults to the curve path with a `.lines` suffix.
    #[arg(long)]
    lines_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    translate: usize,
    /// Comma-separated subset of curve, lines, boxes.
    #[arg(long, default_value = "curve")]
    draw: String,
    #[arg(long, default_value = "-2:2:-2:2", allow_hyphen_values = true)]
    view: String,
    #[arg(long, default_value_t = 512)]
    max_lines: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SliceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    translate: usize,
    /// Base point x/y/z; entries may be complex (a+bi).
    #[arg(long, default_value = "0/1/1", allow_hyphen_values = true)]
    base: String,
    #[arg(long, default_value = "1/0/0", allow_hyphen_values = true)]
    dir: String,
    /// re_min:re_max:im_min:im_max of the slice parameter.
    #[arg(long, default_value = "-1:1:-1:1", allow_hyphen_values = true)]
    window: String,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Translate word length; half of maxlen when unset.
    #[arg(long)]
    translate: Option<usize>,
    /// Report path; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    word: String,
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => return report(e),
    };
    let mut command = Cli::command().args_override_self(true);
    for name in ["orbit", "curve", "render", "slice", "verify", "spectrum"] {
        command = command.mut_subcommand(name, |s| s.args_override_self(true));
    }
    let cli = match command.try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        return report(e);
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("pappus: {e}");
    ExitCode::from(e.exit_code())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PAPPUS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("PAPPUS_THREADS={v:?} is not a count")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Orbit(a) => cmd_orbit(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Render(a) => cmd_render(a),
        Command::Slice(a) => cmd_slice(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Spectrum(a) => cmd_spectrum(a),
    }
}

impl Common {
    fn validate(&self) -> Result<(), CliError> {
        if self.depth > MAX_DEPTH {
            return Err(CliError::Usage(format!("depth {} exceeds {MAX_DEPTH}", self.depth)));
        }
        if self.maxlen > MAX_MAXLEN {
            return Err(CliError::Usage(format!("maxlen {} exceeds {MAX_MAXLEN}", self.maxlen)));
        }
        for (name, v) in [
            ("rank-tol", self.rank_tol),
            ("gap-tol", self.gap_tol),
            ("mark-tol", self.mark_tol),
            ("no-invariant-tol", self.no_invariant_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    fn seed(&self) -> Result<MarkedBox, CliError> {
        self.validate()?;
        let bx: MarkedBox = self.seed.parse().map_err(|e| CliError::Usage(format!("seed: {e}")))?;
        let violations = bx.validate();
        if !violations.is_empty() {
            let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(CliError::Usage(format!("invalid seed: {}", list.join("; "))));
        }
        Ok(match self.mode {
            Mode::Exact => bx,
            Mode::Float => bx.to_float(),
        })
    }

    fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            depth: self.depth,
            maxlen: self.maxlen,
            mark_tol: self.mark_tol,
            rank_tol: self.rank_tol,
            gap_tol: self.gap_tol,
            no_invariant_tol: self.no_invariant_tol,
            ..VerifyConfig::default()
        }
    }
}

fn gate(seed: &MarkedBox) -> Result<(), CliError> {
    if let Some((line, r)) = degeneracy_gate(seed, FLATNESS_TOL)? {
        return Err(CliError::Degenerate(format!(
            "the group preserves the line {} (residual {})",
            pappus_core::limit_set::fmt_coords(&line.to_complex()),
            fmt_f64(r)
        )));
    }
    Ok(())
}

fn sigma_elements(seed: &MarkedBox, maxlen: usize, mark_tol: f64) -> Result<Vec<GroupElement>, CliError> {
    if maxlen == 0 {
        return Ok(Vec::new());
    }
    Ok(enumerate_group(seed, maxlen, DEDUPE_TOL)?
        .into_iter()
        .filter(|g| !g.word.is_empty() && g.in_sigma(mark_tol))
        .collect())
}

fn approx(common: &Common, seed: &MarkedBox, translate: usize) -> Result<LimitSetApprox, CliError> {
    if translate > MAX_MAXLEN {
        return Err(CliError::Usage(format!("translate {translate} exceeds {MAX_MAXLEN}")));
    }
    let elements = sigma_elements(seed, translate, common.mark_tol)?;
    Ok(sample_curve_with(seed, common.depth, translate, &elements)?)
}

fn cmd_orbit(a: OrbitArgs) -> Result<u8, CliError> {
    let seed = a.common.seed()?;
    let alphabet: Vec<BoxOp> = a
        .alphabet
        .chars()
        .map(BoxOp::from_letter)
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if alphabet.is_empty() {
        return Err(CliError::Usage("empty alphabet".into()));
    }
    gate(&seed)?;
    let o = orbit(&seed, a.common.depth, &alphabet, BIT_CEILING)?;
    let mut text = String::new();
    for n in &o.nodes {
        text.push_str(&n.to_tsv());
        text.push('\n');
    }
    write_atomic(&a.out, text.as_bytes())?;
    Ok(0)
}

fn cmd_curve(a: CurveArgs) -> Result<u8, CliError> {
    let seed = a.common.seed()?;
    let approx = approx(&a.common, &seed, a.translate)?;
    let lines_path = a.lines_out.clone().unwrap_or_else(|| output::with_suffix(&a.out, "lines"));
    write_atomic(&a.out, approx.curve_dump().as_bytes())?;
    write_atomic(&lines_path, approx.line_dump().as_bytes())?;
    Ok(0)
}

fn cmd_render(a: RenderArgs) -> Result<u8, CliError> {
    let view: View = a.view.parse().map_err(|e: pappus_core::Error| CliError::Usage(e.to_string()))?;
    let parts: Vec<&str> = a.draw.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if parts.is_empty() {
        return Err(CliError::Usage("nothing to draw".into()));
    }
    if let Some(bad) = parts.iter().find(|p| !matches!(**p, "curve" | "lines" | "boxes")) {
        return Err(CliError::Usage(format!("unknown draw item {bad:?}")));
    }
    let seed = a.common.seed()?;
    let want = |k: &str| parts.contains(&k);
    let sampled = if want("curve") || want("lines") { Some(approx(&a.common, &seed, a.translate)?) } else { None };
    let boxes: Vec<MarkedBox> = if want("boxes") {
        orbit(&seed, a.common.depth, &[BoxOp::Tau1, BoxOp::Tau2], BIT_CEILING)?.nodes.into_iter().map(|n| n.bx).collect()
    } else {
        Vec::new()
    };
    let drawing = Drawing {
        curve: sampled.as_ref().filter(|_| want("curve")),
        lines: sampled.as_ref().filter(|_| want("lines")),
        max_lines: a.max_lines,
        boxes: &boxes,
    };
    write_atomic(&a.out, render::svg(&drawing, &view).as_bytes())?;
    Ok(0)
}

fn cmd_slice(a: SliceArgs) -> Result<u8, CliError> {
    if a.grid == 0 || a.grid > MAX_GRID {
        return Err(CliError::Usage(format!("grid must be in 1..={MAX_GRID}")));
    }
    let parse_point = |s: &str| s.parse::<HPoint>().map_err(|e| CliError::Usage(format!("{s:?}: {e}")));
    let base = parse_point(&a.base)?.to_complex();
    let dir = parse_point(&a.dir)?.to_complex();
    let w: View = a.window.parse().map_err(|e: pappus_core::Error| CliError::Usage(e.to_string()))?;
    let spec = SliceSpec::new(base, dir, (w.xmin, w.xmax, w.ymin, w.ymax))
        .map_err(|_| CliError::Usage("degenerate slice: base and dir are dependent".into()))?;
    let seed = a.common.seed()?;
    let approx = approx(&a.common, &seed, a.translate)?;
    let idx = approx.line_index();
    let values = render::slice_values(&idx, &spec, a.grid);
    let comments = vec![
        format!(
            "kulkarni distance over w in [{}]: depth {}, {} translates, {} line samples",
            a.window,
            approx.depth,
            approx.translates.len(),
            approx.lines.len()
        ),
        "sampled approximation of the limit set; value 65535 is distance pi/2".to_string(),
    ];
    write_atomic(&a.out, &render::pgm(&values, a.grid, &comments))?;
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, CliError> {
    let seed = a.common.seed()?;
    let mut cfg = a.common.verify_config();
    if let Some(t) = a.translate {
        if t > MAX_MAXLEN {
            return Err(CliError::Usage(format!("translate {t} exceeds {MAX_MAXLEN}")));
        }
        cfg.translate_len = Some(t);
    }
    let report = verify_all(&seed, &cfg);
    let text = report.to_text();
    match &a.out {
        Some(p) => write_atomic(p, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(match report.overall {
        Status::Pass => 0,
        Status::Degenerate => 3,
        _ => 1,
    })
}

fn cmd_spectrum(a: SpectrumArgs) -> Result<u8, CliError> {
    let seed = a.common.seed()?;
    let word = reduce_word(&a.word).map_err(|e| CliError::Usage(e.to_string()))?;
    let g = rho_hat_unchecked(&word, &seed)?;
    let r = spectrum(&g.map)?;
    let point = |p: &Option<HPoint>| p.as_ref().map_or("-".to_string(), |p| p.to_string());
    let eig: Vec<String> = r
        .normalized
        .iter()
        .map(|z| if z.im == 0.0 { fmt_f64(z.re) } else { format!("{}{:+e}i", fmt_f64(z.re), z.im) })
        .collect();
    println!(
        "{}\t{}\t{}\t{},{}\t{}\t{}\t{}\t{}",
        g.word,
        r.class.name(),
        eig.join(","),
        fmt_f64(r.moduli_gaps[0]),
        fmt_f64(r.moduli_gaps[1]),
        point(&r.attracting_point),
        point(&r.repelling_point),
        point(&r.saddle_point),
        fmt_f64(g.mark_residual)
    );
    Ok(0)
}
