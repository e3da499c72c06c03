use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BASE: &str = "[equation]\nalpha = 0.0\nbeta = 1.5\n";

fn run(cmd: &str, config: &str, dir: &Path) -> Output {
    let cfg = dir.join("input.toml");
    fs::write(&cfg, config).unwrap();
    run_file(cmd, &cfg, &dir.join("out"))
}

fn run_file(cmd: &str, cfg: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ergolab")).args([cmd, "--config"]).arg(cfg).arg("--out").arg(out).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn report_value(report: &str, key: &str) -> Option<f64> {
    report.lines().find_map(|l| l.trim().strip_prefix(&format!("{key}=")).and_then(|v| v.parse().ok()))
}

#[test]
fn exponents_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("exponents", BASE, dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "gamma=1 tau=3 grad_rate=2 C=4 uniqueness=unique");
}

#[test]
fn beta_at_most_one_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve", "[equation]\nalpha = 0.0\nbeta = 1.0\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("equation.beta"));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_keys_are_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("solve", &format!("{BASE}gamma = 3.0\n"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("gamma") && err.contains(":4:"), "{err}");
}

#[test]
fn ergodic_constant_for_negative_constant_forcing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[equation]\nalpha = 0.0\nbeta = 2.0\n[forcing]\nkind = \"constant\"\nvalue = -20.0\n[grid]\nn = 201\n";
    let o = run("ergodic", cfg, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("out/report.txt")).unwrap();
    assert!(report.starts_with("schema=1\n"));
    assert!(report.contains("case_tag=ergodic_regime"));
    let c = report_value(&report, "c").expect("c in report");
    let oracle = 20.0 - PI * PI;
    assert!((c - oracle).abs() <= 0.02 * oracle, "c = {c}");
    let ladder = fs::read_to_string(dir.path().join("out/ladder.csv")).unwrap();
    assert_eq!(ladder.lines().next(), Some("lambda,c"));
}

#[test]
fn solve_profile_is_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[boundary]\nlo = 1.0\nhi = 2.0\n[grid]\nn = 101\n");
    let o = run("solve", &cfg, dir.path());
    assert!(o.status.success());
    let out = dir.path().join("out");
    for name in ["profile.csv", "report.txt", "run.log", "config.toml"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let profile = fs::read_to_string(out.join("profile.csv")).unwrap();
    let mut lines = profile.lines();
    assert_eq!(lines.next(), Some("x,d,u,grad_u,residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.iter().flatten().all(|v| v.is_finite()));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    assert_eq!((rows[0][2], rows[100][2]), (1.0, 2.0));
    let leftovers = fs::read_dir(&out).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"));
    assert_eq!(leftovers.count(), 0);
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[grid]\nn = 81\n");
    assert!(run("explosive", &cfg, dir.path()).status.success());
    let first = dir.path().join("out");
    let again = dir.path().join("again");
    assert!(run_file("explosive", &first.join("config.toml"), &again).status.success());
    for name in ["report.txt", "profile.csv", "ladder.csv", "config.toml"] {
        assert_eq!(fs::read_to_string(first.join(name)).unwrap(), fs::read_to_string(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn verify_reports_each_selected_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}[grid]\nn = 81\n[boundary]\nlo = 0.0\nhi = 1.0\n[verify]\nchecks = [\"residual\", \"comparison\"]\n");
    let o = run("verify", &cfg, dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("check residual: pass") && text.contains("check comparison: pass"), "{text}");
    assert!(!text.contains("check rate"));
}

#[test]
fn beta_above_alpha_plus_two_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("rate", "[equation]\nalpha = 0.0\nbeta = 3.0\n", dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("equation.beta"));
}
