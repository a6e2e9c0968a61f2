use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.scn"))
}

fn spraygeom(args: &[&str], file: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spraygeom")).args(args).arg(file).output().expect("binary runs")
}

fn temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spraygeom-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn passing_scenarios_exit_zero() {
    for name in ["flat_rotation", "curved_plane", "so3_free", "anchored", "negative_control"] {
        let out = spraygeom(&["check"], &scenario(name));
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.contains("0 not passing: PASS"), "{name}");
    }
}

#[test]
fn broken_structure_fails_and_skips_the_rest() {
    let out = spraygeom(&["check", "--format", "json"], &scenario("broken_structure"));
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["pass"], false);
    let checks = r["checks"].as_array().unwrap();
    let anchor = &checks[0];
    assert_eq!(anchor["group"], "structure");
    assert_eq!(anchor["verdict"], "fail");
    for c in &checks[2..] {
        assert_eq!(c["verdict"], "skipped", "{c}");
    }
}

#[test]
fn parse_errors_exit_two_with_position() {
    let p = temp("bad.scn", "[algebroid]\nn = 1\nm = 1\nrho[1][1] = \"1 +\"\n\n[spray]\n");
    let out = spraygeom(&["check"], &p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("column"), "{err}");

    let p = temp("unknown.scn", "[algebroid]\nn = 1\nm = 1\ncolour = 3\n");
    let out = spraygeom(&["validate"], &p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("colour"));

    let out = spraygeom(&["check"], Path::new("/nonexistent/file.scn"));
    assert_eq!(out.status.code(), Some(2));
    let out = spraygeom(&["check", "--format", "yaml"], &scenario("flat_rotation"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_are_reproducible() {
    let a = spraygeom(&["check", "--format", "json"], &scenario("so3_equivariant"));
    let b = spraygeom(&["check", "--format", "json"], &scenario("so3_equivariant"));
    assert_eq!(a.stdout, b.stdout);
    let r = json(&a);
    assert_eq!(r["seed"], 42);
    assert_eq!(r["points"], 100);
    assert_eq!(r["scenario_digest"].as_str().unwrap().len(), 64);
    assert!(r["engine"].as_str().unwrap().starts_with("spraygeom "));
    for c in r["checks"].as_array().unwrap() {
        for key in ["group", "name", "residual_max", "residual_mean", "points_evaluated", "points_skipped", "tol", "verdict"] {
            assert!(c.get(key).is_some(), "missing {key} in {c}");
        }
    }
}

#[test]
fn overrides_change_sampling_and_tolerance() {
    let out = spraygeom(&["check", "--format", "json", "--points", "7", "--seed", "3"], &scenario("flat_rotation"));
    let r = json(&out);
    assert_eq!(r["points"], 7);
    assert_eq!(r["seed"], 3);
    let first = &r["checks"][0];
    assert_eq!(first["points_evaluated"], 7);

    let other = spraygeom(&["check", "--format", "json", "--points", "7", "--seed", "4"], &scenario("curved_plane"));
    let same = spraygeom(&["check", "--format", "json", "--points", "7", "--seed", "3"], &scenario("curved_plane"));
    assert_ne!(json(&other)["checks"], json(&same)["checks"]);

    // Above the negative control's residual, the expected failure no longer fails.
    let out = spraygeom(&["check", "--format", "json", "--tol", "1e3"], &scenario("negative_control"));
    assert_eq!(out.status.code(), Some(1));
    let out = spraygeom(&["check", "--points", "0"], &scenario("flat_rotation"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_prints_components() {
    let p = temp("line.scn", "[algebroid]\nn = 1\nm = 1\nrho[1][1] = \"1\"\n\n[spray]\nS[1] = \"x1*y1^2\"\n");
    let out = Command::new(env!("CARGO_BIN_EXE_spraygeom"))
        .args(["eval"])
        .arg(&p)
        .args(["--tensor", "Berwald-coeffs", "--at", "x=2;y=3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let (label, value) = text.trim().split_once(" = ").unwrap();
    assert_eq!(label, "B[1][1]");
    // half the fibre derivative of x y^2 at (2, 3)
    assert!((value.parse::<f64>().unwrap() - 6.0).abs() < 1e-14);

    let out = Command::new(env!("CARGO_BIN_EXE_spraygeom"))
        .args(["eval"])
        .arg(scenario("flat_rotation"))
        .args(["--tensor", "K", "--at", "x=0.3,-1;y=1,2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l.ends_with("= 0e0")), "{lines:?}");

    let out = spraygeom(&["eval", "--tensor", "K", "--at", "x=1"], &scenario("flat_rotation"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_runs_structure_only() {
    let out = spraygeom(&["validate", "--format", "json"], &scenario("anchored"));
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks.iter().all(|c| c["group"] == "structure" && c["verdict"] == "pass"));
    let out = spraygeom(&["validate"], &scenario("broken_structure"));
    assert_eq!(out.status.code(), Some(1));
}
