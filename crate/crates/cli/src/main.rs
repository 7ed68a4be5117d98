//! JSON-report front end for the trivector toolkit.
//!
//! Every command reads a trivector text file (except `verlinde`), runs one
//! pipeline stage, and prints a single JSON report to stdout. Reports are
//! byte-reproducible for fixed inputs and settings, except for the
//! `timing_ms` field. Diagnostics go to stderr. Exit codes: 0 success,
//! 2 parse/input error, 3 degenerate input, 4 internal invariant violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use trivector::coble::{self, CobleSystem};
use trivector::stability::{self, StabilityVerdict};
use trivector::verlinde;
use trivector::{parse_trivector, Error, FieldScalar, FieldSpec, Multivector};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "trivector", version, about = "Exact computations with alternating trilinear forms", long_about = None)]
struct Cli {
    /// Seed recorded in the report; reserved for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extract the Coble cubic of a trivector on k^9 (canonical form).
    #[command(name = "coble-cubic")]
    CobleCubic {
        file: PathBuf,
        /// Reinterpret the file in this field (`Q` or `Fp:<prime>`).
        #[arg(long)]
        field: Option<String>,
    },
    /// Exhaustively classify P^8(F_p) by rank and cubic vanishing.
    Scan {
        file: PathBuf,
        /// Prime to scan over (2, 3, 5, or 7; 7 visits 6.7M points).
        #[arg(long)]
        p: u64,
        /// Worker threads; the report is identical for any value.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Duality certificates at the first N smooth points of the cubic.
    Duality {
        file: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Brute-force instability search for a trivector on k^8 over F_q.
    Instability {
        file: PathBuf,
        /// 2 (97,155 subspaces) or 3 (25,095,280 subspaces).
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Characteristic-2 hyperdiscriminant of a trivector on k^8
    /// (the input is reduced mod 2).
    Hyperdisc2 { file: PathBuf },
    /// Infinitesimal stabilizer dimension of a trivector on k^8.
    Stabdim {
        file: PathBuf,
        #[arg(long)]
        field: Option<String>,
    },
    /// Rank of the comultiplication map of a trivector on k^9.
    #[command(name = "comul-rank")]
    ComulRank {
        file: PathBuf,
        #[arg(long)]
        field: Option<String>,
    },
    /// Hilbert-series check of the Verlinde polynomial for d = 0..max-d.
    Verlinde {
        #[arg(long, default_value_t = 60)]
        max_d: i64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok((command, digest, field, results)) => {
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": command,
                "input_digest": digest,
                "field": field,
                "seed": cli.seed,
                "results": results,
                "timing_ms": started.elapsed().as_millis() as u64,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let (kind, code) = classify(&e);
            let msg = json!({
                "schema_version": SCHEMA_VERSION,
                "error": { "kind": kind, "message": e.to_string() },
            });
            eprintln!("{}", serde_json::to_string_pretty(&msg).expect("error serializes"));
            ExitCode::from(code)
        }
    }
}

fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Parse { .. } => ("parse", 2),
        Error::Unsupported(_)
        | Error::Shape(_)
        | Error::SpecMismatch { .. }
        | Error::NotPrime(_)
        | Error::ModulusOutOfRange(_)
        | Error::WrongCharacteristic { .. }
        | Error::ZeroVector => ("input", 2),
        Error::DegenerateTrivector => ("degenerate", 3),
        Error::DivisionByZero | Error::NotDivisible { .. } | Error::Invariant(_) => {
            ("invariant", 4)
        }
    }
}

type RunOutput = (&'static str, Value, Value, Value);

fn run(cli: &Cli) -> Result<RunOutput, Error> {
    match &cli.cmd {
        Cmd::CobleCubic { file, field } => {
            let (g, digest) = load(file, field.as_deref())?;
            let sys = CobleSystem::new(&g)?;
            let results = json!({
                "cubic": sys.cubic().to_string(),
                "num_terms": sys.cubic().num_terms(),
                "pivot_index": sys.pivot_index(),
                "cross_checks": sys.cross_checks().to_vec(),
            });
            Ok(("coble-cubic", digest, json!(g.spec().to_string()), results))
        }
        Cmd::Scan { file, p, threads } => {
            let (g, digest) = load(file, None)?;
            let report = coble::scan_loci(&g, *p, *threads)?;
            let mm = |v: &Vec<[u64; 9]>| -> Value { json!(v.iter().map(|a| a.to_vec()).collect::<Vec<_>>()) };
            let results = json!({
                "p": report.p,
                "points_total": report.points_total,
                "points_y": report.points_y,
                "points_y_rank6": report.points_y_rank6,
                "points_x": report.points_x,
                "rank2_count": report.rank2_count,
                "sing_mismatches": mm(&report.sing_mismatches),
                "cubic_rank_mismatches": mm(&report.cubic_rank_mismatches),
            });
            Ok(("scan", digest, json!(format!("Fp:{p}")), results))
        }
        Cmd::Duality { file, p, count } => {
            let (g, digest) = load(file, None)?;
            let spec = FieldSpec::prime(*p)?;
            let sys = CobleSystem::new(&g.map_spec(spec)?)?;
            let points = sys.smooth_points(*count)?;
            let mut certs = Vec::new();
            let mut valid = 0u64;
            for y in &points {
                let c = sys.certificate(y)?;
                if c.valid() {
                    valid += 1;
                }
                certs.push(json!({
                    "point": scalars_json(&c.point),
                    "rank": c.rank_at_y,
                    "kernel": c.kernel.iter().map(|k| scalars_json(k.coords())).collect::<Vec<_>>(),
                    "gradient": scalars_json(&c.gradient),
                    "checks": {
                        "on_cubic": c.on_cubic,
                        "smooth": c.smooth,
                        "kernel_in_tangent": c.kernel_in_tangent,
                        "witness_vanishing": c.witness_vanishing,
                    },
                    "valid": c.valid(),
                }));
            }
            let results = json!({
                "p": p,
                "requested": count,
                "found": points.len(),
                "valid_count": valid,
                "certificates": certs,
            });
            Ok(("duality", digest, json!(spec.to_string()), results))
        }
        Cmd::Instability { file, q, threads } => {
            let (g, digest) = load(file, None)?;
            let spec = FieldSpec::prime(*q)?;
            let w = g.map_spec(spec)?;
            let verdict = stability::is_unstable_bruteforce(&w, *threads)?;
            let results = match verdict {
                StabilityVerdict::Unstable { witness } => {
                    let rows: Vec<Vec<Value>> = (0..witness.rows())
                        .map(|r| scalars_json(witness.row(r)))
                        .collect();
                    json!({
                        "q": q,
                        "status": "unstable",
                        "witness_rows": rows,
                        "subspaces_total": stability::subspace_count(*q),
                    })
                }
                StabilityVerdict::NoWitnessFound => json!({
                    "q": q,
                    "status": "no-witness-found",
                    "witness_rows": null,
                    "subspaces_total": stability::subspace_count(*q),
                }),
            };
            Ok(("instability", digest, json!(spec.to_string()), results))
        }
        Cmd::Hyperdisc2 { file } => {
            let (g, digest) = load(file, None)?;
            let spec = FieldSpec::prime(2)?;
            let w = g.map_spec(spec)?;
            let v = stability::hyperdisc2(&w)?;
            let results = json!({
                "hyperdisc2": v.residue().expect("F_2 value"),
            });
            Ok(("hyperdisc2", digest, json!(spec.to_string()), results))
        }
        Cmd::Stabdim { file, field } => {
            let (g, digest) = load(file, field.as_deref())?;
            let dim = stability::stabilizer_dim(&g)?;
            let results = json!({ "stabilizer_dim": dim });
            Ok(("stabdim", digest, json!(g.spec().to_string()), results))
        }
        Cmd::ComulRank { file, field } => {
            let (g, digest) = load(file, field.as_deref())?;
            let rank = coble::comul_rank(&g)?;
            let results = json!({ "comul_rank": rank });
            Ok(("comul-rank", digest, json!(g.spec().to_string()), results))
        }
        Cmd::Verlinde { max_d } => {
            let spec = verlinde::GradedRingSpec::verlinde();
            let mut rows = Vec::new();
            let mut all_match = true;
            for d in 0..=*max_d {
                let h = verlinde::hilbert_coefficient(&spec, d);
                let v = verlinde::verlinde_integer(d)?;
                if h != v {
                    all_match = false;
                }
                rows.push(json!([d, h.to_string(), v.to_string()]));
            }
            // human-readable table on stderr
            eprintln!("{:>4}  {:>16}", "d", "chi(O(d))");
            for d in 0..=*max_d {
                eprintln!("{:>4}  {:>16}", d, verlinde::hilbert_coefficient(&spec, d));
            }
            eprintln!("{}", if all_match { "PASS" } else { "FAIL" });
            let results = json!({
                "max_d": max_d,
                "rows": rows,
                "all_match": all_match,
                "status": if all_match { "PASS" } else { "FAIL" },
            });
            Ok(("verlinde", Value::Null, Value::Null, results))
        }
    }
}

fn scalars_json(v: &[FieldScalar]) -> Vec<Value> {
    v.iter()
        .map(|c| match c.residue() {
            Some(r) => json!(r),
            None => json!(c.to_string()),
        })
        .collect()
}

/// Read and parse a trivector file; `override_field` reinterprets the
/// coefficients in another field. Returns the multivector and the content
/// digest of the raw bytes.
fn load(path: &Path, override_field: Option<&str>) -> Result<(Multivector, Value), Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse {
        line: 0,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let digest: String = hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let text = String::from_utf8(bytes).map_err(|_| Error::Parse {
        line: 0,
        msg: "file is not valid UTF-8".into(),
    })?;
    let mut g = parse_trivector(&text)?;
    if let Some(tok) = override_field {
        g = g.map_spec(FieldSpec::parse_token(tok)?)?;
    }
    Ok((g, json!(format!("sha256:{digest}"))))
}
