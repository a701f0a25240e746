//! End-to-end tests of the binary: exit codes, JSON stability, error paths.

use std::path::PathBuf;
use std::process::{Command, Output};

fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name)
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bigbracket"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn example_specs_have_documented_exit_codes() {
    let pass = run_cli(&["run", spec_path("tangent_courant.bbk").to_str().unwrap()]);
    assert_eq!(pass.status.code(), Some(0), "{}", String::from_utf8_lossy(&pass.stdout));

    let fail = run_cli(&["run", spec_path("nonclosed_background.bbk").to_str().unwrap()]);
    assert_eq!(fail.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&fail.stdout);
    assert!(stdout.contains("{mu,phi}"), "defect line names the failing component: {}", stdout);

    let cube = run_cli(&["run", spec_path("cube.bbk").to_str().unwrap()]);
    assert_eq!(cube.status.code(), Some(0), "{}", String::from_utf8_lossy(&cube.stdout));
}

#[test]
fn json_reports_are_byte_stable_under_a_fixed_seed() {
    let spec = spec_path("tangent_courant.bbk");
    let args = ["run", spec.to_str().unwrap(), "--json", "--seed", "11"];
    let first = run_cli(&args);
    let second = run_cli(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "JSON must be byte-identical across runs");

    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["schema"], "bigbracket-report/1");
    assert_eq!(report["seed"], 11);
    assert_eq!(report["exit_code"], 0);
    assert!(report["checks"].as_array().unwrap().len() >= 4);
    // No timing field unless requested.
    assert!(report["checks"][0].get("timing_ms").is_none());
}

#[test]
fn parse_errors_exit_with_code_two() {
    let dir = tempdir();
    let bad = dir.join("bad.bbk");
    std::fs::write(&bad, "[problem]\nn = 1\nd = 1\n[bindings]\ntheta = \"p1*xi9\"\n").unwrap();
    let out = run_cli(&["check-courant", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("out of range"), "{}", err);

    let missing = run_cli(&["check-courant", dir.join("absent.bbk").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn precondition_failures_exit_with_code_three() {
    let dir = tempdir();
    let spec = dir.join("torsion.bbk");
    // The zero endomorphism has J^2 = 0, so lambda = 1 is a precondition
    // failure for the torsion command.
    std::fs::write(
        &spec,
        "[problem]\nn = 1\nd = 1\n[bindings]\ntheta = \"p1*xi1\"\nj = \"0\"\n[checks]\ntorsion --lambda 1\n",
    )
    .unwrap();
    let out = run_cli(&["run", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn single_check_subcommands_accept_inline_expressions() {
    let spec = spec_path("tangent_courant.bbk");
    let out = run_cli(&[
        "dorfman",
        spec.to_str().unwrap(),
        "--u",
        "th1",
        "--v",
        "x1*th1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("-> th1"), "{}", stdout);

    // twist by the bound bivector keeps the structure Courant.
    let twist = run_cli(&["twist", spec.to_str().unwrap(), "--pi", "pi"]);
    assert_eq!(twist.status.code(), Some(0));
}

#[test]
fn timings_flag_adds_the_field() {
    let spec = spec_path("tangent_courant.bbk");
    let out = run_cli(&["run", spec.to_str().unwrap(), "--json", "--timings"]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["checks"][0].get("timing_ms").is_some());
}

#[test]
fn remaining_subcommands_run_against_a_spec() {
    let dir = tempdir();
    let spec = dir.join("ops.bbk");
    std::fs::write(
        &spec,
        r#"
[problem]
n = 2
d = 2

[bindings]
theta = "p1*xi1 + p2*xi2"
pi    = "x1 th1*th2"
nswap = "-th2*xi1 - th1*xi2"
"#,
    )
    .unwrap();
    let spec = spec.to_str().unwrap();

    for args in [
        vec!["to-linf", spec],
        vec!["deform", spec, "--j", "nswap"],
        vec!["torsion", spec, "--j", "nswap", "--lambda", "1"],
        vec!["twist", spec, "--pi", "pi"],
        vec!["twist", spec, "--omega", "xi1*xi2"],
        vec!["twist-linf", spec, "--pi", "pi"],
        vec!["check-nijenhuis", spec, "--j", "nswap", "--lambda", "1"],
        vec!["check-linf", spec, "--max-n", "4"],
        vec!["verify-face", spec, "--face", "courant-twist-deform", "--j", "nswap"],
    ] {
        let out = run_cli(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{:?}: {}{}",
            args,
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        );
    }

    // The swap is torsion-free on the tangent structure; its deformation
    // must land in the mu slot only.
    let out = run_cli(&["deform", spec, "--j", "nswap"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("->"), "{}", stdout);
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bigbracket-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
