//! End-to-end tests of the command-line interface: exit codes, CSV
//! shapes, determinism, and config validation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_accretive")
}

fn write_spec(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn lin1d_spec(dir: &Path) -> PathBuf {
    write_spec(
        dir,
        "lin1d.json",
        r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "diagonal", "fns": [{"type": "linear", "slope": 1.0}]},
            "x0": [1.0]
        }"#,
    )
}

fn constant_spec(dir: &Path) -> PathBuf {
    write_spec(
        dir,
        "constant.json",
        r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "constant", "q": [1.0, 0.0]},
            "x0": [0.5, -0.5],
            "sampling": {"seed": 7, "random_samples": 200}
        }"#,
    )
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn certify_plant_emits_rate_table() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lin1d_spec(dir.path());
    let out = run(&[
        "certify",
        "plant",
        "--spec",
        spec.to_str().unwrap(),
        "--eps",
        "0.5,0.25,0.1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("eps,phi1,phi2,phi3,phi4,Phi"));
    // provenance header echoes the inputs
    assert!(text.contains("# eps=[0.5, 0.25, 0.1]"));
    // three data rows with six '.'-decimal columns each, LF line endings
    let data: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("eps"))
        .collect();
    assert_eq!(data.len(), 3);
    for row in data {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 6);
        for c in cols {
            let val: f64 = c.parse().unwrap();
            assert!(val.is_finite() && val > 0.0);
        }
    }
    assert!(!text.contains('\r'));
}

#[test]
fn certify_reich_emits_rate_table() {
    let dir = tempfile::tempdir().unwrap();
    let spec = constant_spec(dir.path());
    let outdir = dir.path().join("out");
    let out = run(&[
        "certify",
        "reich",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("eps,phi_inf,phi2,Phi"));
    let written = std::fs::read_to_string(outdir.join("reich_rates.csv")).unwrap();
    assert_eq!(written, text);
}

#[test]
fn verify_plant_main_passes_and_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lin1d_spec(dir.path());
    let outdir = dir.path().join("reports");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--claim",
        "plant_main",
        "--eps",
        "0.5,0.1",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(outdir.join("verify_plant_main.csv")).unwrap();
    assert!(csv.contains("claim,instance,epsilon"));
    let json = std::fs::read_to_string(outdir.join("verify_plant_main.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    let reports = parsed.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["pass"], serde_json::Value::Bool(true));
        assert_eq!(r["claim"], "plant_main");
    }
}

#[test]
fn verify_reich_main_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = constant_spec(dir.path());
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--claim",
        "reich_main",
        "--eps",
        "1,0.5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_negative_controls_exit_zero_when_they_fail() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lin1d_spec(dir.path());
    let outdir = dir.path().join("neg");
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--claim",
        "negative_controls",
        "--out",
        outdir.to_str().unwrap(),
    ]);
    // controls failing is the expected outcome => overall success
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let json = std::fs::read_to_string(outdir.join("verify_negative_controls.json")).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
    for r in parsed.as_array().unwrap() {
        assert_eq!(r["negative_control"], serde_json::Value::Bool(true));
        assert_eq!(r["pass"], serde_json::Value::Bool(false));
    }
}

#[test]
fn axioms_command_passes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = constant_spec(dir.path());
    let out = run(&["axioms", "--spec", spec.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("duality_pairing"));
    assert!(text.contains("semigroup_law"));
    // the negative controls ride along and record their failures
    assert!(text.contains("negative_control_non_accretive"));
    let control_row = text
        .lines()
        .find(|l| l.contains("negative_control_non_accretive"))
        .unwrap();
    assert!(control_row.ends_with(",false,true"));
}

#[test]
fn evolve_emits_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let spec = constant_spec(dir.path());
    let out = run(&[
        "evolve",
        "--spec",
        spec.to_str().unwrap(),
        "--t-max",
        "2",
        "--delta",
        "1e-4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(text.contains("t,x0,x1,n_used,delta_requested"));
    assert!(text.contains("# t_max=2"));
    assert!(text.contains("# delta=0.0001"));
    // S(t)x = x - t q for the constant operator; check the last row
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert_eq!(cols[0].parse::<f64>().unwrap(), 2.0);
    assert!((cols[1].parse::<f64>().unwrap() - (-1.5)).abs() < 1e-6);
    assert!((cols[2].parse::<f64>().unwrap() - (-0.5)).abs() < 1e-6);
}

#[test]
fn spec_output_dir_applies_without_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let outdir = dir.path().join("from_spec");
    let spec = write_spec(
        dir.path(),
        "with_output.json",
        &format!(
            r#"{{
                "version": 1,
                "space": {{"norm": "euclidean"}},
                "operator": {{"kind": "constant", "q": [1.0, 0.0]}},
                "x0": [0.5, -0.5],
                "output": {{"dir": "{}"}}
            }}"#,
            outdir.display()
        ),
    );
    let out = run(&["certify", "reich", "--spec", spec.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(outdir.join("reich_rates.csv").exists());
}

#[test]
fn malformed_spec_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_spec(
        dir.path(),
        "bad.json",
        r#"{"version": 1, "space": {"norm": "euclidean"}, "typo_field": 3}"#,
    );
    let out = run(&["axioms", "--spec", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_claim_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lin1d_spec(dir.path());
    let out = run(&[
        "verify",
        "--spec",
        spec.to_str().unwrap(),
        "--claim",
        "no_such_claim",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reich_intermediates_pass() {
    let dir = tempfile::tempdir().unwrap();
    let spec = constant_spec(dir.path());
    for (claim, eps) in [
        ("reich_phi_inf", "1,0.5"),
        ("reich_res_cauchy", "1"),
        ("reich_escape", "5"),
    ] {
        let out = run(&[
            "verify",
            "--spec",
            spec.to_str().unwrap(),
            "--claim",
            claim,
            "--eps",
            eps,
        ]);
        assert!(
            out.status.success(),
            "{claim}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn certify_reich_rejects_oversized_d_lower() {
    let dir = tempfile::tempdir().unwrap();
    // the range infimum of this instance is ‖q‖ = 1; d_lower = 2 is unsound
    let spec = write_spec(
        dir.path(),
        "bad_d.json",
        r#"{
            "version": 1,
            "space": {"norm": "euclidean"},
            "operator": {"kind": "constant", "q": [1.0, 0.0]},
            "x0": [0.5, -0.5],
            "rates": {"d_lower": 2.0}
        }"#,
    );
    let out = run(&["certify", "reich", "--spec", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_is_deterministic_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = lin1d_spec(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let res = run(&[
            "verify",
            "--spec",
            spec.to_str().unwrap(),
            "--claim",
            "res_cauchy",
            "--eps",
            "0.25",
            "--seed",
            "123",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(res.status.success());
    }
    let ja = std::fs::read_to_string(a.join("verify_res_cauchy.json")).unwrap();
    let jb = std::fs::read_to_string(b.join("verify_res_cauchy.json")).unwrap();
    assert_eq!(ja, jb);
}
