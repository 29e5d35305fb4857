use std::path::Path;
use std::process::{Command, Output};

fn pappus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pappus")).args(args).output().expect("binary runs")
}

fn pappus_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pappus")).args(args).env("PAPPUS_THREADS", threads).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn orbit_lists_the_binary_tree() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.tsv");
    let o = pappus(&["orbit", "--depth", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let words: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(words, ["ε", "1", "2", "11", "12", "21", "22"]);
    assert!(text.lines().all(|l| l.split('\t').count() == 8));
}

#[test]
fn symmetric_seed_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.tsv");
    let o = pappus(&["orbit", "--seed", "symmetric", "--depth", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3);
    assert!(!out.exists());

    let o = pappus(&["verify", "--seed", "symmetric", "--depth", "4", "--maxlen", "2"]);
    assert_eq!(code(&o), 3);
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("invariant_line\tdegenerate"));
    assert!(report.contains("line [1,0,0]"));
}

#[test]
fn inline_seed_matches_default() {
    let o1 = pappus(&["spectrum", "--word", "12"]);
    let o2 = pappus(&["spectrum", "--word", "12", "--seed", "-1/1/1;1/1/1;1/-1/1;-1/-1/1;1:4/1/1;-1:3/-1/1"]);
    assert_eq!(code(&o1), 0);
    assert_eq!(o1.stdout, o2.stdout);
    let line = String::from_utf8(o1.stdout).unwrap();
    assert_eq!(line.lines().count(), 1);
    assert_eq!(line.split('\t').nth(1), Some("loxodromic"));
}

#[test]
fn invalid_seed_is_a_usage_error() {
    let o = pappus(&["spectrum", "--word", "1", "--seed", "1/0/0;0/1/0"]);
    assert_eq!(code(&o), 2);
    let o = pappus(&["spectrum", "--word", "1x"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn curve_depth_zero_has_two_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.tsv");
    let o = pappus(&["curve", "--depth", "0", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 2);
    let lines = dir.path().join("curve.tsv.lines");
    assert_eq!(std::fs::read_to_string(lines).unwrap().lines().count(), 2);
}

#[test]
fn render_boxes_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("boxes.svg");
    let o = pappus(&["render", "--draw", "boxes", "--depth", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 7);

    assert_eq!(code(&pappus(&["render", "--draw", "", "--out", path_str(&out)])), 2);
    assert_eq!(code(&pappus(&["render", "--view", "1:0:0:1", "--out", path_str(&out)])), 2);
    assert_eq!(code(&pappus(&["render", "--view", "nonsense", "--out", path_str(&out)])), 2);
}

#[test]
fn render_is_deterministic_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    let args = |p: &Path| {
        vec!["render", "--draw", "curve,lines", "--depth", "8", "--translate", "2", "--out"]
            .into_iter()
            .map(String::from)
            .chain([path_str(p).to_string()])
            .collect::<Vec<_>>()
    };
    let run = |p: &Path, t: &str| {
        let v = args(p);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        code(&pappus_threads(&refs, t))
    };
    assert_eq!(run(&a, "1"), 0);
    assert_eq!(run(&b, "8"), 0);
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(String::from_utf8(x).unwrap().contains("<polyline"));
}

#[test]
fn slice_writes_a_sixteen_bit_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("slice.pgm");
    let o = pappus(&["slice", "--depth", "6", "--grid", "16", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = std::fs::read(&out).unwrap();
    assert!(bytes.starts_with(b"P5\n"));
    let header_end = bytes.windows(6).position(|w| w == b"65535\n").unwrap() + 6;
    assert_eq!(bytes.len() - header_end, 16 * 16 * 2);

    let o = pappus(&["slice", "--base", "1/0/0", "--dir", "2/0/0", "--out", path_str(&out)]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&pappus(&["slice", "--grid", "5000", "--out", path_str(&out)])), 2);
}

#[test]
fn verify_without_words_is_inconclusive() {
    let o = pappus(&["verify", "--depth", "4", "--maxlen", "0"]);
    assert_eq!(code(&o), 1);
    let report = String::from_utf8(o.stdout).unwrap();
    assert!(report.contains("loxodromic_harvest\tinconclusive"));
    assert!(report.contains("insufficient search depth"));
    assert!(!report.contains("OVERALL\tpass"));
}

#[test]
fn verify_report_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let base = ["verify", "--depth", "8", "--maxlen", "4", "--out"];
    let oa = pappus_threads(&[&base[..], &[path_str(&a)]].concat(), "1");
    let ob = pappus_threads(&[&base[..], &[path_str(&b)]].concat(), "8");
    assert_eq!(code(&oa), code(&ob));
    let ra = std::fs::read_to_string(&a).unwrap();
    assert_eq!(ra, std::fs::read_to_string(&b).unwrap());
    assert!(ra.lines().filter(|l| !l.starts_with('#')).count() >= 12);
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# orbit settings\ndepth = 1\n").unwrap();
    let out = dir.path().join("orbit.tsv");
    let o = pappus(&["orbit", "--config", path_str(&cfg), "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
    let o = pappus(&["orbit", "--config", path_str(&cfg), "--depth", "2", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 7);

    std::fs::write(&cfg, "depht = 1\n").unwrap();
    assert_eq!(code(&pappus(&["orbit", "--config", path_str(&cfg), "--out", path_str(&out)])), 2);
}

#[test]
fn limits_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    assert_eq!(code(&pappus(&["orbit", "--depth", "25", "--out", path_str(&out)])), 2);
    assert_eq!(code(&pappus(&["verify", "--maxlen", "13"])), 2);
    assert_eq!(code(&pappus(&["verify", "--rank-tol", "-1"])), 2);
    assert_eq!(code(&pappus(&["frobnicate"])), 2);
    assert_eq!(code(&pappus_threads(&["spectrum", "--word", "1"], "lots")), 2);
}
