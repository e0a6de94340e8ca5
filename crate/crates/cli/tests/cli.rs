use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_affine-flow"));
    cmd.env_remove("AFFINE_FLOW_OUT_DIR");
    cmd
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn functionals(args: &[&str]) -> (i32, Option<Value>, String) {
    let out = bin().arg("functionals").args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).ok();
    (code(&out), json, stderr(&out))
}

fn write_config(dir: &Path, body: &str, extra: &str) -> std::path::PathBuf {
    let path = dir.join("experiment.toml");
    fs::write(
        &path,
        format!("config_version = 1\n{extra}\n[body]\n{body}\n[output]\ndir = \"out\"\nplot = \"trajectory.dat\"\n"),
    )
    .unwrap();
    path
}

fn simulate(config: &Path) -> Output {
    bin()
        .args(["simulate", "--config"])
        .arg(config)
        .output()
        .unwrap()
}

#[test]
fn unit_disk_functionals() {
    let (code, json, _) = functionals(&["--ellipse", "1,1"]);
    assert_eq!(code, 0);
    let j = json.unwrap();
    let close = |k: &str, v: f64| (j[k].as_f64().unwrap() - v).abs() <= 1e-9;
    assert!(close("A", PI));
    assert!(close("A_star", PI));
    assert!(close("omega1", 2.0 * PI));
    assert!(close("santalo", 1.0));
    assert!(close("aff_iso", 1.0));
    assert_eq!(j["t"].as_f64(), Some(0.0));
}

#[test]
fn ellipse_attains_santalo_equality() {
    let (code, json, _) = functionals(&["--ellipse", "2,0.5,0.3", "--grid", "512"]);
    assert_eq!(code, 0);
    assert!((json.unwrap()["santalo"].as_f64().unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn invalid_bodies_exit_2() {
    let (code, _, err) = functionals(&["--random", "1,8,0.5,3", "--no-halving"]);
    assert_eq!(code, 2);
    assert!(err.contains("not strictly convex"), "{err}");
    let (code, _, _) = functionals(&["--random", "1,8,0.5,3"]);
    assert_eq!(code, 0, "halving rescues the same spec");
    let (code, _, err) = functionals(&["--ellipse", "1,1", "--grid", "100"]);
    assert_eq!(code, 2);
    assert!(err.contains("power of two"), "{err}");
    let (code, _, _) = functionals(&["--ellipse", "1,x"]);
    assert_eq!(code, 2);
}

#[test]
fn simulate_disk_reports_extinction_time() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "kind = \"ellipse\"\na = 1\nb = 1", "record_every = 500");
    let out = simulate(&config);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert!((summary["T_est"].as_f64().unwrap() - 0.75).abs() <= 1e-3);
    assert!(summary["final_ellipticity"].as_f64().unwrap().abs() <= 1e-6);
    let csv = fs::read_to_string(dir.path().join("out/trajectory.csv")).unwrap();
    assert_eq!(
        csv.lines().next().unwrap(),
        "t,A,A_star,omega1,omega2,sigma_min,sigma_max,santalo,aff_iso,entropy,harnack_min,dt"
    );
    let plot = fs::read_to_string(dir.path().join("out/trajectory.dat")).unwrap();
    assert!(plot.starts_with("# t A A_star"));
    assert_eq!(plot.lines().count(), csv.lines().count());
}

#[test]
fn simulate_random_body_keeps_every_monitor_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "kind = \"random\"\nseed = 1",
        "record_every = 10\nmonitors = [\"harnack\"]\nrecenter = true",
    );
    let out = simulate(&config);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    let monitors = summary["monitors"].as_array().unwrap();
    assert_eq!(monitors.len(), 7);
    for m in monitors {
        let kind = m["verdict"]["kind"].as_str().unwrap();
        assert!(
            ["monotone_increasing", "monotone_decreasing", "bounded"].contains(&kind),
            "{m}"
        );
        for key in ["name", "tolerance", "verdict", "violations", "samples_ref"] {
            assert!(m.get(key).is_some());
        }
    }
    assert!(summary["shift"].is_array());
}

#[test]
fn malformed_config_exits_2_with_field_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "kind = \"ellipse\"\na = 1",
        "grid = 96\n[controller]\nsafety = -1",
    );
    let out = simulate(&config);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    for field in ["grid", "controller.safety", "body.b"] {
        assert!(err.contains(field), "{err}");
    }
    assert!(!dir.path().join("out").exists());

    let out = simulate(&dir.path().join("missing.toml"));
    assert_eq!(code(&out), 2);
}

#[test]
fn output_directory_can_be_overridden_and_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "kind = \"random\"\nseed = 5", "record_every = 200");
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let target = dir.path().join(run);
        let out = bin()
            .env("AFFINE_FLOW_OUT_DIR", &target)
            .args(["simulate", "--config"])
            .arg(&config)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        outputs.push((
            fs::read(target.join("trajectory.csv")).unwrap(),
            fs::read(target.join("summary.json")).unwrap(),
        ));
    }
    assert!(!dir.path().join("out").exists());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn verify_rejects_unknown_suites() {
    let out = bin().args(["verify", "everything"]).output().unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("exact-solutions"));
}

#[test]
fn verify_exact_solutions_passes() {
    let out = bin().args(["verify", "exact-solutions"]).output().unwrap();
    let table = String::from_utf8_lossy(&out.stdout);
    assert_eq!(code(&out), 0, "{table}");
    assert!(table.contains("unit disk extinction time"));
    assert!(table.contains("ellipse self-similarity"));
    assert!(!table.contains("FAIL"));
}
