use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(config: &str, args: &[&str]) -> (Output, TempDir) {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, config).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dvcv"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .arg("--quiet")
        .args(args)
        .output()
        .unwrap();
    (out, dir)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(summary: &str, key: &str) -> f64 {
    summary
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {summary}"))
        .parse()
        .unwrap()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

const SMALL_TOMO: &str = "n_samples = 800\ntomo_cutoff = 6\nmax_iters = 40\n";

#[test]
fn rates_summary_reports_double_b_probability() {
    let (out, _dir) = run("scenario = rates\n", &[]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.starts_with("scenario=rates "), "{s}");
    assert_eq!(s.lines().count(), 1);
    let p = field(&s, "p_dB");
    assert!((p - 4.16e-11).abs() < 1e-13, "{p}");
}

#[test]
fn rsp_prepares_target_with_high_fidelity() {
    let (out, dir) = run("scenario = rsp\na = 1\nb = 0\n", &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(field(&stdout(&out), "fidelity") >= 0.99);
    let names: Vec<String> = read_dir_sorted(&dir.path().join("out")).into_iter().map(|f| f.0).collect();
    assert!(names.iter().any(|n| n.ends_with("_rho.json")));
    assert!(names.iter().any(|n| n.ends_with("_wigner.csv")));
}

#[test]
fn positional_scenario_overrides_config() {
    let (out, _dir) = run("scenario = rsp\n", &["rates"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("scenario=rates "));
}

#[test]
fn runs_are_byte_identical() {
    let cfg = format!("scenario = tomo-roundtrip\nseed = 11\n{SMALL_TOMO}");
    let (a, da) = run(&cfg, &[]);
    let (b, db) = run(&cfg, &[]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(read_dir_sorted(&da.path().join("out")), read_dir_sorted(&db.path().join("out")));
}

#[test]
fn seed_flag_changes_samples() {
    let cfg = format!("scenario = tomo-roundtrip\nseed = 11\n{SMALL_TOMO}");
    let (a, da) = run(&cfg, &[]);
    let (b, db) = run(&cfg, &["--seed", "12"]);
    assert!(a.status.success() && b.status.success());
    let fa = read_dir_sorted(&da.path().join("out"));
    let fb = read_dir_sorted(&db.path().join("out"));
    assert!(fa.iter().any(|(n, _)| n.contains("seed11")));
    assert!(fb.iter().any(|(n, _)| n.contains("seed12")));
    let samples = |files: &[(String, Vec<u8>)]| files.iter().find(|(n, _)| n.ends_with("_samples.csv")).unwrap().1.clone();
    assert_ne!(samples(&fa), samples(&fb));
}

#[test]
fn config_errors_exit_with_two() {
    for (cfg, args) in [
        ("scenario = rates\nsqueez_r = 0.2\n", &[][..]),
        ("scenario = rates\n", &["warp-drive"][..]),
        ("R_tap = 0.1\n", &[][..]),
        ("scenario = rates\nR_tap = 2\n", &[][..]),
        ("scenario = rates\nR_tap = 0.1\nR_tap = 0.2\n", &[][..]),
    ] {
        let (out, _dir) = run(cfg, args);
        assert_eq!(out.status.code(), Some(2), "{cfg:?} {args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn missing_config_file_exits_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_dvcv"))
        .args(["--config", "/nonexistent/run.cfg", "rates"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three() {
    let (out, _dir) = run("scenario = resource\ncutoff_cv = 4\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cutoff"));
}
