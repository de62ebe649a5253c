//! `mswap verify` — structure, labeling, counts, and the overlap law.
//!
//! Checks print one PASS/FAIL line each; the exit code is zero exactly
//! when nothing failed. The count comparison is informational (valid
//! circuits may spend more gates than the reference construction), and
//! the law check is skipped when the circuit is too large to simulate.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use mswap_core::{
    direct_overlaps, exact_overlaps, extend_to_swap_test, haar_random, label_table,
    parse_circuit, predict_counts, rng_from, Circuit, Error, InputStates, Strategy,
    ANALYTIC_TOL, MAX_QUBITS,
};
use serde::Serialize;

use crate::output::{json_document, read_file, write_payload, Manifest};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Circuit file to verify.
    #[arg(long)]
    pub circuit: PathBuf,
    /// Seed for the random input states of the law check.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report to write in addition to the console lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
enum Status {
    Pass,
    Fail,
    Info,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
            Status::Skipped => "SKIPPED",
        };
        write!(f, "{word}")
    }
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    detail: String,
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    circuit: CircuitSummary,
    checks: Vec<Check>,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct CircuitSummary {
    m: usize,
    q: usize,
    d: usize,
    cswaps: usize,
    padded: usize,
    has_test_section: bool,
}

fn render_pairs(pairs: &[(usize, usize)]) -> String {
    pairs
        .iter()
        .map(|&(i, j)| format!("({}, {})", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Structure: every gate within bounds, layout fields consistent.
fn check_structure(circuit: &Circuit) -> Check {
    let violations = circuit.validate();
    if violations.is_empty() {
        let layout = &circuit.layout;
        Check {
            name: "structure",
            status: Status::Pass,
            detail: format!(
                "{} gates well-formed (m {}, q {}, d {}{})",
                circuit.gates.len(),
                layout.m,
                layout.q,
                layout.d,
                if layout.has_test_ancilla { ", test ancilla" } else { "" },
            ),
        }
    } else {
        let listed = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        Check {
            name: "structure",
            status: Status::Fail,
            detail: listed,
        }
    }
}

/// Labels: every unordered pair of real registers reachable.
fn check_labels(pairing: &Circuit) -> Check {
    match label_table(pairing) {
        Ok(table) => {
            let coverage = format!("coverage {}/{}", table.coverage(), table.total_real_pairs());
            if table.is_complete() {
                Check {
                    name: "labels",
                    status: Status::Pass,
                    detail: coverage,
                }
            } else {
                Check {
                    name: "labels",
                    status: Status::Fail,
                    detail: format!(
                        "{coverage}; missing {}",
                        render_pairs(&table.missing_pairs())
                    ),
                }
            }
        }
        Err(Error::EnumerationTooLarge { d, cap }) => Check {
            name: "labels",
            status: Status::Skipped,
            detail: format!("d = {d} ancillas exceed the enumeration cap of {cap}"),
        },
        Err(other) => Check {
            name: "labels",
            status: Status::Fail,
            detail: other.to_string(),
        },
    }
}

/// Counts: informational comparison against the reference construction.
fn check_counts(circuit: &Circuit) -> Check {
    let pairing = circuit.pairing_part();
    let actual_c = pairing.cswap_count();
    let actual_d = pairing.layout.d;
    let detail = match predict_counts(circuit.layout.m, &Strategy::MiddleSplit) {
        Ok(predicted) => format!(
            "{actual_c} CSWAPs, {actual_d} ancillas; middle split for m {} builds {}, {}",
            circuit.layout.m, predicted.c, predicted.d,
        ),
        Err(_) => format!("{actual_c} CSWAPs, {actual_d} ancillas"),
    };
    Check {
        name: "counts",
        status: Status::Info,
        detail,
    }
}

/// Law: exact overlaps read off the labels match the states themselves.
fn check_law(circuit: &Circuit, labels_ok: bool, seed: u64) -> Check {
    if !labels_ok {
        return Check {
            name: "law",
            status: Status::Skipped,
            detail: "needs a complete labeling".to_owned(),
        };
    }
    let full = if circuit.layout.has_test_ancilla {
        circuit.clone()
    } else {
        match extend_to_swap_test(circuit) {
            Ok(c) => c,
            Err(e) => {
                return Check {
                    name: "law",
                    status: Status::Fail,
                    detail: e.to_string(),
                }
            }
        }
    };
    let total = full.layout.total_qubits();
    if total > MAX_QUBITS {
        return Check {
            name: "law",
            status: Status::Skipped,
            detail: format!("needs {total} qubits, over the simulation cap of {MAX_QUBITS}"),
        };
    }
    let mut rng = rng_from(seed);
    let real_m = full.real_m();
    let mut states = haar_random(real_m, full.layout.q, &mut rng);
    for _ in real_m..full.layout.m {
        states.states.push(InputStates::zero_state(states.q));
    }
    let exact = match exact_overlaps(&full, &states) {
        Ok(exact) => exact,
        Err(e) => {
            return Check {
                name: "law",
                status: Status::Fail,
                detail: e.to_string(),
            }
        }
    };
    let truth = direct_overlaps(&states);
    let worst = exact
        .overlaps
        .iter()
        .map(|(pair, value)| (value - truth[pair]).abs())
        .fold(0.0f64, f64::max);
    if worst <= ANALYTIC_TOL {
        Check {
            name: "law",
            status: Status::Pass,
            detail: format!(
                "max deviation {worst:.1e} across {} pairs (seed {seed})",
                exact.overlaps.len(),
            ),
        }
    } else {
        Check {
            name: "law",
            status: Status::Fail,
            detail: format!(
                "overlaps deviate from the states by up to {worst:.3e} (tolerance {ANALYTIC_TOL:.0e})"
            ),
        }
    }
}

pub fn run(args: &VerifyArgs) -> Result<ExitCode> {
    let circuit_text = read_file(&args.circuit)?;
    let circuit = parse_circuit(&circuit_text)?;
    let pairing = circuit.pairing_part();

    let structure = check_structure(&circuit);
    let structure_ok = structure.status == Status::Pass;
    let mut checks = vec![structure];
    if structure_ok {
        let labels = check_labels(&pairing);
        let labels_ok = labels.status == Status::Pass;
        checks.push(labels);
        checks.push(check_counts(&circuit));
        checks.push(check_law(&circuit, labels_ok, args.seed));
    }

    for check in &checks {
        println!("{}: {} {}", check.name, check.status, check.detail);
    }
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    let summary = summary_line(&checks, passed, &circuit);
    println!("{summary}");

    if let Some(out) = &args.out {
        let report = VerifyReport {
            circuit: CircuitSummary {
                m: circuit.layout.m,
                q: circuit.layout.q,
                d: circuit.layout.d,
                cswaps: pairing.cswap_count(),
                padded: circuit.padded,
                has_test_section: circuit.has_test_section(),
            },
            checks,
            passed,
        };
        let manifest = Manifest::new("verify")
            .seed(args.seed)
            .input("circuit", &args.circuit, circuit_text.as_bytes());
        write_payload(Some(out), &json_document(&manifest, report)?)?;
    }

    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

/// `verify: PASS (coverage 6/6, counts 3/3)` — the one-line verdict.
fn summary_line(checks: &[Check], passed: bool, circuit: &Circuit) -> String {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let coverage = checks
        .iter()
        .find(|c| c.name == "labels")
        .and_then(|c| c.detail.strip_prefix("coverage "))
        .map(|rest| rest.split(';').next().unwrap_or(rest).trim().to_owned());
    let reference = predict_counts(circuit.layout.m, &Strategy::MiddleSplit).ok();
    match (coverage, reference) {
        (Some(cov), Some(pred)) => format!(
            "verify: {verdict} (coverage {cov}, counts {}/{})",
            circuit.pairing_part().cswap_count(),
            pred.c,
        ),
        _ => format!("verify: {verdict}"),
    }
}
