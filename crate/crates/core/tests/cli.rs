mod common;

use common::{fixtures_dir, gerbecalc, manifest, stderr, stdout};
use gerbecalc::io::{datum_from_str, datum_to_string, witness_from_str};
use std::process::Command;

#[test]
fn fixture_suite_exit_codes() {
    let cases = manifest();
    assert!(cases.len() >= 12);
    for case in cases {
        let out = gerbecalc(&case.args);
        assert_eq!(out.status.code(), Some(case.expected), "{:?}\n{}{}", case.args, stdout(&out), stderr(&out));
    }
}

#[test]
fn demo_prints_level_nerve_and_charge() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = gerbecalc(["demo", "monopole", "--m", "12", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("level: 0"));
    assert!(text.contains("nerve: 2, 1"));
    assert!(text.lines().any(|l| l == "charge: 1.000000000"), "{text}");
    let written = std::fs::read_to_string(&path).unwrap();
    let h = datum_from_str(&written).unwrap();
    assert_eq!(datum_to_string(&h), written);

    let out = gerbecalc(["demo", "minus1", "--m", "12"]);
    let text = stdout(&out);
    assert!(text.contains("level: -1") && text.contains("charge: 1.000000000"), "{text}");
}

#[test]
fn demo_rejects_bad_resolution_and_bad_flags() {
    let out = gerbecalc(["demo", "monopole", "--m", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("resolution"));
    assert_eq!(gerbecalc(["demo", "dyon"]).status.code(), Some(2));
    assert_eq!(gerbecalc(["demo", "monopole", "--m", "twelve"]).status.code(), Some(2));
    assert_eq!(gerbecalc(["frobnicate"]).status.code(), Some(2));
    assert_eq!(gerbecalc(Vec::<&str>::new()).status.code(), Some(2));
    assert_eq!(gerbecalc(["--help"]).status.code(), Some(0));
}

#[test]
fn validate_reports_the_corrupted_residual() {
    let out = gerbecalc(["validate", fixtures_dir().join("monopole_corrupt.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("3.000e-1"), "{text}");
    assert!(text.contains("FAIL"));
}

#[test]
fn tolerance_comes_from_flag_then_environment() {
    let file = fixtures_dir().join("monopole_corrupt.json");
    let file = file.to_str().unwrap();
    assert_eq!(gerbecalc(["validate", file, "--tol", "0.5"]).status.code(), Some(0));
    let bin = env!("CARGO_BIN_EXE_gerbecalc");
    let run = |tol: &str, extra: &[&str]| {
        Command::new(bin).args(["validate", file]).args(extra).env("GERBECALC_TOL", tol).output().unwrap()
    };
    assert_eq!(run("0.5", &[]).status.code(), Some(0));
    assert_eq!(run("0.5", &["--tol", "1e-9"]).status.code(), Some(1));
    assert_eq!(run("1e-3", &[]).status.code(), Some(1));
    assert_eq!(run("loose", &[]).status.code(), Some(2));
    assert_eq!(gerbecalc(["validate", file, "--tol", "-1"]).status.code(), Some(2));
}

#[test]
fn charge_prints_nine_decimals() {
    let dir = fixtures_dir();
    let out = gerbecalc(["charge", dir.join("gerbopole.json").to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "1.000000000");
    let out = gerbecalc(["charge", dir.join("monopole_trivial.json").to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "0.000000000");
    let out = gerbecalc(["charge", dir.join("minus1_antiwinding.json").to_str().unwrap()]);
    assert_eq!(stdout(&out).trim(), "-1.000000000");
}

#[test]
fn charge_rejects_wrong_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let h = gerbecalc::builders::build_monopole(6).unwrap();
    let wrong = gerbecalc::deligne::GerbeDatum::trivial(1, h.cover().clone()).unwrap();
    let path = dir.path().join("wrong.json");
    std::fs::write(&path, datum_to_string(&wrong)).unwrap();
    let out = gerbecalc(["charge", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("dimension"));
}

#[test]
fn equiv_writes_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let w = dir.path().join("w.json");
    gerbecalc(["demo", "monopole", "--m", "12", "--out", a.to_str().unwrap()]);
    let out =
        gerbecalc(["demo", "monopole", "--m", "12", "--perturb-gauge", "--seed", "9", "--out", b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = gerbecalc(["equiv", a.to_str().unwrap(), b.to_str().unwrap(), "--out", w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("EQUIVALENT (residual "));

    let h1 = datum_from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    let h2 = datum_from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    let f = witness_from_str(&std::fs::read_to_string(&w).unwrap(), h1.cover().complex()).unwrap();
    let moved = h1.gauge_transform(&f).unwrap();
    assert!(gerbecalc::deligne::gauge_equivalent(&moved, &h2, 1e-8).unwrap().residual < 1e-8);

    let same = gerbecalc(["equiv", a.to_str().unwrap(), a.to_str().unwrap(), "--out", w.to_str().unwrap()]);
    assert_eq!(same.status.code(), Some(0));
    let f = witness_from_str(&std::fs::read_to_string(&w).unwrap(), h1.cover().complex()).unwrap();
    assert!(f.total().sup_norm() < 1e-12);
}

#[test]
fn equiv_monopole_vs_trivial_is_not_found() {
    let dir = fixtures_dir();
    let out = gerbecalc([
        "equiv",
        dir.join("monopole.json").to_str().unwrap(),
        dir.join("monopole_trivial.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("NOT-FOUND (residual "));
}

#[test]
fn selfcheck_default_and_vacuous_runs() {
    let out = gerbecalc(["selfcheck"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l == "100/100 passed"));
    let out = gerbecalc(["selfcheck", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn selfcheck_catches_a_broken_sign_rule() {
    let out = gerbecalc(["selfcheck", "--trials", "10", "--break-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("0/10 passed"));
    assert!(text.contains("counterexample trial 0"));
}

#[test]
fn runs_are_deterministic() {
    let a = gerbecalc(["demo", "gerbopole", "--m", "6", "--perturb-gauge", "--seed", "3"]);
    let b = gerbecalc(["demo", "gerbopole", "--m", "6", "--perturb-gauge", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let a = gerbecalc(["selfcheck", "--seed", "5", "--trials", "20"]);
    let b = gerbecalc(["selfcheck", "--seed", "5", "--trials", "20"]);
    assert_eq!(a.stdout, b.stdout);
}
