use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn gasball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gasball")).args(args).output().expect("binary runs")
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out-dir", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    gasball(&args)
}

/// Data rows of a CSV artifact, provenance lines dropped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(table: &[Vec<String>], name: &str) -> Vec<String> {
    let k = table[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    table[1..].iter().map(|r| r[k].clone()).collect()
}

const REFERENCE: &str = "schema_version = 1
[model]
dim = 2
base_radius = 1.0
ball_radius = 0.3
gas_mass = 1.0
ball_mass = 0.05
gravity = 1.0
energy = 3.0
n_particles = 40
";

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn solve_without_ball_gives_closed_form_rate() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("solve", &configs().join("no_ball.toml"), tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = rows(&tmp.path().join("equilibrium.csv"));
    let lambda: f64 = column(&t, "lambda_a")[0].parse().unwrap();
    // d = 3, m = g = 1, E = 3
    assert!((lambda - 5.0 / 6.0).abs() < 1e-10);
    assert_eq!(rows(&tmp.path().join("psi_profile.csv")).len(), 1);
}

#[test]
fn solve_floating_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", REFERENCE);
    let out_dir = tmp.path().join("out");
    let out = run("solve", &cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(0));
    let t = rows(&out_dir.join("equilibrium.csv"));
    let y: f64 = column(&t, "y_a")[0].parse().unwrap();
    assert!((y - 1.042992806443654).abs() < 1e-9);
    assert_eq!(column(&t, "floating")[0], "true");
    for c in ["residual_k", "residual_g"] {
        let r: f64 = column(&t, c)[0].parse().unwrap();
        assert!(r.abs() <= 1e-9);
    }
    let prof = rows(&out_dir.join("psi_profile.csv"));
    assert!(prof.len() > 1000);
    let text = std::fs::read_to_string(out_dir.join("equilibrium.csv")).unwrap();
    assert!(text.starts_with("# gasball "));
    assert!(text.contains("# config_sha256 ") && text.contains("# seed none"));
}

#[test]
fn invalid_energy_is_a_config_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &REFERENCE.replace("energy = 3.0", "energy = 0.01"));
    let out_dir = tmp.path().join("out");
    let out = run("solve", &cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.exists());
}

#[test]
fn heavy_ball_rests_with_distinct_status() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &REFERENCE.replace("ball_mass = 0.05", "ball_mass = 2.0"));
    let out_dir = tmp.path().join("out");
    let out = run("solve", &cfg, &out_dir, &[]);
    assert_eq!(out.status.code(), Some(4));
    let t = rows(&out_dir.join("equilibrium.csv"));
    assert_eq!(column(&t, "floating")[0], "false");
    let y: f64 = column(&t, "y_a")[0].parse().unwrap();
    assert_eq!(y, 0.3);
}

#[test]
fn usage_and_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(gasball(&["validate"]).status.code(), Some(1));
    assert_eq!(gasball(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(gasball(&["--help"]).status.code(), Some(0));
    let missing = tmp.path().join("nope.toml");
    assert_eq!(run("validate", &missing, tmp.path(), &[]).status.code(), Some(1));
    let cfg = write_config(tmp.path(), "v2.toml", &REFERENCE.replace("schema_version = 1", "schema_version = 2"));
    assert_eq!(run("solve", &cfg, tmp.path(), &[]).status.code(), Some(1));
    // stochastic commands need a seed
    let cfg = write_config(tmp.path(), "c.toml", REFERENCE);
    assert_eq!(run("simulate", &cfg, tmp.path(), &["--duration", "1"]).status.code(), Some(1));
    assert_eq!(run("sample", &cfg, tmp.path(), &[]).status.code(), Some(1));
    assert_eq!(run("simulate", &cfg, tmp.path(), &["--seed", "1", "--duration", "1", "--mode", "sticky"]).status.code(), Some(1));
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        &format!("{REFERENCE}[run]\nstart = \"high\"\nstart_height = 1.5\nobservation_dt = 0.01\n"),
    );
    let args = ["--seed", "5", "--duration", "30", "--mode", "lambertian"];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let ra = run("simulate", &cfg, &a, &args);
    let rb = run("simulate", &cfg, &b, &args);
    assert!(matches!(ra.status.code(), Some(0) | Some(3)), "{}", String::from_utf8_lossy(&ra.stderr));
    assert_eq!(ra.status.code(), rb.status.code());
    let files = dir_bytes(&a);
    let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(names, ["histograms.csv", "report.txt", "summary.csv"]);
    assert_eq!(files, dir_bytes(&b));
    let report = std::fs::read_to_string(a.join("report.txt")).unwrap();
    assert!(report.contains("energy_drift") && report.contains("PASS"));
    // a different seed changes the results
    let c = tmp.path().join("c");
    run("simulate", &cfg, &c, &["--seed", "6", "--duration", "30"]);
    assert_ne!(std::fs::read(a.join("summary.csv")).unwrap(), std::fs::read(c.join("summary.csv")).unwrap());
}

#[test]
fn specular_vertical_lines_keep_zero_horizontal_speed() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("simulate", &configs().join("vertical_lines.toml"), tmp.path(), &["--duration", "50"]);
    // the degenerate orbit never equilibrates, so the comparison rows fail
    assert_eq!(out.status.code(), Some(3));
    let t = rows(&tmp.path().join("summary.csv"));
    assert_eq!(column(&t, "max_horizontal_speed")[0].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn sample_writes_requested_states() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", &format!("{REFERENCE}[run]\nsamples = 25\n[mcmc]\nburn_in = 2000\n"));
    let out = run("sample", &cfg, tmp.path(), &["--seed", "3", "--n", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let t = rows(&tmp.path().join("states.csv"));
    assert_eq!(t.len(), 26);
    // time plus (position, velocity) of 12 particles and the ball in d = 2
    assert_eq!(t[0].len(), 1 + 13 * 4);
}

#[test]
fn validate_subset_and_forced_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let text = format!("{REFERENCE}[run]\nseed = 9\n[validate]\ncriteria = [3, 5]\n");
    let cfg = write_config(tmp.path(), "c.toml", &text);
    let ok = tmp.path().join("ok");
    assert_eq!(run("validate", &cfg, &ok, &[]).status.code(), Some(0));
    let t = rows(&ok.join("validation.csv"));
    assert!(column(&t, "criterion_passed").iter().all(|v| v == "true"));
    let mut ids = column(&t, "criterion");
    ids.dedup();
    assert_eq!(ids, ["3", "5"]);

    let cfg = write_config(tmp.path(), "tiny.toml", &format!("{text}tolerance_scale = 1e-30\n"));
    let bad = tmp.path().join("bad");
    assert_eq!(run("validate", &cfg, &bad, &[]).status.code(), Some(3));
    let t = rows(&bad.join("validation.csv"));
    assert!(column(&t, "check_passed").iter().any(|v| v == "false"));
}

#[test]
fn validate_default_config_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run("validate", &configs().join("default.toml"), tmp.path(), &[]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("13 passed, 0 failed"));
}
