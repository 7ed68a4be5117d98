//! Golden-file tests for the CLI reports, exit-code contract, and
//! round-trip of the printed formats. Golden files hold canonicalized JSON
//! (timing stripped); regenerate with `REGEN_GOLDEN=1` after an intentional
//! change.

mod common;

use std::path::PathBuf;

use common::{canonical_report, fixture, run_cli};
use trivector::{parse_trivector, write_trivector, FieldSpec, MPoly};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check_golden(name: &str, canonical: &str) {
    let path = golden_dir().join(name);
    if std::env::var("REGEN_GOLDEN").is_ok() {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, canonical).unwrap();
        eprintln!("wrote {}", path.display());
        return;
    }
    let shipped = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing golden {}: {e}", path.display()));
    assert_eq!(shipped, canonical, "golden {name} drifted");
}

#[test]
fn golden_coble_cubic_gamma_star_f7() {
    let out = run_cli(&["coble-cubic", &fixture("gamma_star.txt"), "--field", "Fp:7"]);
    assert!(out.status.success());
    check_golden("coble_cubic_gamma_star_f7.json", &canonical_report(&out.stdout));
}

#[test]
fn golden_instability_unstable_f2() {
    let out = run_cli(&["instability", &fixture("unstable_f2.txt"), "--q", "2"]);
    assert!(out.status.success());
    check_golden("instability_unstable_f2.json", &canonical_report(&out.stdout));
}

#[test]
fn golden_hyperdisc2_alpha() {
    let out = run_cli(&["hyperdisc2", &fixture("alpha.txt")]);
    assert!(out.status.success());
    check_golden("hyperdisc2_alpha.json", &canonical_report(&out.stdout));
}

#[test]
fn golden_verlinde_short() {
    let out = run_cli(&["verlinde", "--max-d", "12"]);
    assert!(out.status.success());
    check_golden("verlinde_12.json", &canonical_report(&out.stdout));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("PASS"));
}

#[test]
fn golden_scan_gamma2_star_f2() {
    let out = run_cli(&["scan", &fixture("gamma2_star.txt"), "--p", "2"]);
    assert!(out.status.success());
    check_golden("scan_gamma2_star_f2.json", &canonical_report(&out.stdout));
}

#[test]
fn exit_code_contract() {
    // 2: parse error, naming the offending line
    let dir = std::env::temp_dir().join("trivector-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "field Fp:7\ndim 9\n3 2 1 4\n").unwrap();
    let out = run_cli(&["coble-cubic", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "stderr should name the line: {err}");

    // 2: missing file
    let out = run_cli(&["coble-cubic", "/nonexistent/file.txt"]);
    assert_eq!(out.status.code(), Some(2));

    // 3: degenerate trivector
    let out = run_cli(&["coble-cubic", &fixture("degenerate_e123.txt")]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degenerate"));

    // 0: success
    let out = run_cli(&["verlinde", "--max-d", "3"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn printed_trivector_and_cubic_round_trip() {
    // fixture files re-parse to equal objects through the writer
    for name in ["gamma_star.txt", "gamma2_star.txt", "unstable_f2.txt"] {
        let text = std::fs::read_to_string(
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name),
        )
        .unwrap();
        let g = parse_trivector(&text).unwrap();
        assert_eq!(parse_trivector(&write_trivector(&g)).unwrap(), g);
    }

    // the cubic printed by the CLI re-parses to an equal polynomial
    let out = run_cli(&["coble-cubic", &fixture("gamma_star.txt"), "--field", "Fp:7"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let printed = v["results"]["cubic"].as_str().unwrap();
    let f7 = FieldSpec::prime(7).unwrap();
    let parsed = MPoly::parse(f7, 9, printed).unwrap();
    assert_eq!(parsed.to_string(), printed);
    assert_eq!(parsed.total_degree(), Some(3));
}

#[test]
fn field_override_changes_interpretation() {
    let out7 = run_cli(&["comul-rank", &fixture("gamma_star.txt"), "--field", "Fp:7"]);
    let outq = run_cli(&["comul-rank", &fixture("gamma_star.txt")]);
    assert!(out7.status.success() && outq.status.success());
    let v7: serde_json::Value = serde_json::from_slice(&out7.stdout).unwrap();
    let vq: serde_json::Value = serde_json::from_slice(&outq.stdout).unwrap();
    assert_eq!(v7["field"], "Fp:7");
    assert_eq!(vq["field"], "Q");
    assert_eq!(v7["results"]["comul_rank"], 9);
    assert_eq!(vq["results"]["comul_rank"], 9);
}
