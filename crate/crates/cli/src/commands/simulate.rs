//! `mswap simulate` — exact outcome distribution and exact overlaps.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mswap_core::{
    ancilla_distribution, exact_overlaps, extend_to_swap_test, parse_circuit, run as run_circuit,
    BitString, Circuit,
};
use serde::Serialize;

use crate::output::{json_document, pair_one_based, read_file, write_payload, Manifest};
use crate::states::parse_states;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Circuit file to simulate.
    #[arg(long)]
    pub circuit: PathBuf,
    /// States file (JSON; see the states format).
    #[arg(long)]
    pub states: PathBuf,
    /// Result document to write (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct CircuitSummary {
    m: usize,
    q: usize,
    d: usize,
    cswaps: usize,
    padded: usize,
    /// Whether the swap-test section was appended before simulating.
    extended: bool,
}

#[derive(Debug, Serialize)]
struct OutcomeRow {
    test: u8,
    bits: String,
    p: f64,
}

#[derive(Debug, Serialize)]
struct OverlapRow {
    pair: [usize; 2],
    value: f64,
    padded: bool,
}

#[derive(Debug, Serialize)]
struct SimulateResult {
    circuit: CircuitSummary,
    p_test0: f64,
    distribution: Vec<OutcomeRow>,
    overlaps: Vec<OverlapRow>,
}

pub fn run(args: &SimulateArgs) -> Result<()> {
    let circuit_text = read_file(&args.circuit)?;
    let circuit = parse_circuit(&circuit_text)?;
    let states_text = read_file(&args.states)?;
    let states = parse_states(&states_text)?;

    let extended = !circuit.layout.has_test_ancilla;
    let full: Circuit = if extended {
        extend_to_swap_test(&circuit)?
    } else {
        circuit.clone()
    };
    let dist = ancilla_distribution(&run_circuit(&full, &states)?);
    let exact = exact_overlaps(&full, &states)?;

    let result = SimulateResult {
        circuit: CircuitSummary {
            m: circuit.layout.m,
            q: circuit.layout.q,
            d: circuit.layout.d,
            cswaps: circuit.cswap_count(),
            padded: circuit.padded,
            extended,
        },
        p_test0: dist.p_test0(),
        distribution: dist
            .probs
            .iter()
            .map(|(&(test, value), &p)| OutcomeRow {
                test,
                bits: BitString::new(value, dist.d)
                    .expect("distribution keys fit d bits")
                    .to_string(),
                p,
            })
            .collect(),
        overlaps: exact
            .overlaps
            .iter()
            .map(|(&pair, &value)| OverlapRow {
                pair: pair_one_based(pair),
                value,
                padded: exact.padded_pairs.contains(&pair),
            })
            .collect(),
    };

    let manifest = Manifest::new("simulate")
        .input("circuit", &args.circuit, circuit_text.as_bytes())
        .input("states", &args.states, states_text.as_bytes());
    write_payload(args.out.as_deref(), &json_document(&manifest, result)?)?;
    Ok(())
}
