//! `mswap estimate` — sampled overlap estimates and their error report.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mswap_core::{
    ancilla_distribution, derive_seed, estimate_overlaps, exact_overlaps, extend_to_swap_test,
    label_table, parse_circuit, rng_from, run as run_circuit, run_replications, sample_shots,
    BitString, Circuit,
};
use serde::Serialize;

use crate::output::{json_document, pair_one_based, read_file, write_payload, Manifest};
use crate::states::parse_states;

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Circuit file to sample.
    #[arg(long)]
    pub circuit: PathBuf,
    /// States file (JSON; see the states format).
    #[arg(long)]
    pub states: PathBuf,
    /// Shots per replication.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    /// Independent replications to average the squared error over.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    /// Master seed; replication k draws from a stream derived for k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Result document to write (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct PairRow {
    pair: [usize; 2],
    truth: f64,
    raw: f64,
    clamped: f64,
    was_clamped: bool,
    labels: Vec<String>,
    padded: bool,
}

#[derive(Debug, Serialize)]
struct EstimateResult {
    shots: u64,
    replications: usize,
    d: usize,
    pair_count: usize,
    /// The analytic ceiling `4^(d+1) / shots` on the expected squared error.
    bound: f64,
    /// Mean squared error norm across replications.
    mse: f64,
    within_bound: bool,
    /// Per-replication error norms, in replication order.
    norms: Vec<f64>,
    /// Per-pair estimates from the first replication, against exact truth.
    pairs: Vec<PairRow>,
}

pub fn run(args: &EstimateArgs) -> Result<()> {
    let circuit_text = read_file(&args.circuit)?;
    let circuit = parse_circuit(&circuit_text)?;
    let states_text = read_file(&args.states)?;
    let states = parse_states(&states_text)?;

    let report = run_replications(
        &circuit,
        &states,
        args.shots,
        args.reps as usize,
        args.seed,
    )?;

    // Reproduce replication 0 for the per-pair view: the same derived
    // stream, sampling, and pooled estimator as inside the replication loop.
    let full: Circuit = if circuit.layout.has_test_ancilla {
        circuit.clone()
    } else {
        extend_to_swap_test(&circuit)?
    };
    let table = label_table(&full.pairing_part())?;
    let dist = ancilla_distribution(&run_circuit(&full, &states)?);
    let mut rng = rng_from(derive_seed(args.seed, 0));
    let counts = sample_shots(&dist, args.shots, &mut rng)?;
    let estimate = estimate_overlaps(&counts, &table)?;
    let truth = exact_overlaps(&full, &states)?;

    let pairs = estimate
        .pairs
        .iter()
        .map(|(&pair, e)| PairRow {
            pair: pair_one_based(pair),
            truth: truth.overlaps[&pair],
            raw: e.raw,
            clamped: e.clamped,
            was_clamped: e.was_clamped,
            labels: e
                .labels
                .iter()
                .map(|&v| {
                    BitString::new(v, table.d())
                        .expect("labels fit d bits")
                        .to_string()
                })
                .collect(),
            padded: e.padded,
        })
        .collect();

    let result = EstimateResult {
        shots: report.shots,
        replications: report.replications,
        d: report.d,
        pair_count: report.pair_count,
        bound: report.bound,
        mse: report.mse,
        within_bound: report.mse <= report.bound,
        norms: report.norms,
        pairs,
    };

    let manifest = Manifest::new("estimate")
        .param("shots", args.shots)
        .param("reps", args.reps)
        .seed(args.seed)
        .input("circuit", &args.circuit, circuit_text.as_bytes())
        .input("states", &args.states, states_text.as_bytes());
    write_payload(args.out.as_deref(), &json_document(&manifest, result)?)?;
    Ok(())
}
