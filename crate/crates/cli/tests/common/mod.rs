//! Helpers shared by the CLI test suites: run the binary, canonicalize
//! reports for byte comparison (the `timing_ms` field is excluded from the
//! determinism contract).

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn repo_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> String {
    repo_root().join("fixtures").join(name).to_string_lossy().into_owned()
}

pub fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trivector"))
        .args(args)
        .current_dir(repo_root())
        .output()
        .expect("binary runs")
}

/// Parse a report and strip the timing field; serialization re-sorts keys,
/// so the result is canonical.
pub fn canonical_report(stdout: &[u8]) -> String {
    let mut v: serde_json::Value =
        serde_json::from_slice(stdout).expect("stdout is a JSON report");
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing_ms");
    }
    serde_json::to_string_pretty(&v).unwrap()
}
