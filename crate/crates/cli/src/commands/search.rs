//! `mswap search` — genetic search for pairing circuits under a gate and
//! ancilla budget, with a success-rate summary and an aggregate cost trace.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mswap_core::{serialize_circuit, run_trials, GaConfig, GaResult};
use serde::Serialize;

use crate::output::{json_document, write_payload, Manifest};

/// Published experiment scale: population 10^6, 2*10^4 iterations.
const PAPER_POPULATION: usize = 1_000_000;
const PAPER_ITERATIONS: u64 = 20_000;

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Registers the circuit must pair.
    #[arg(long)]
    pub m: usize,
    /// CSWAP budget per chromosome.
    #[arg(long)]
    pub cswaps: usize,
    /// Ancilla budget.
    #[arg(long)]
    pub ancillas: usize,
    /// Population size.
    #[arg(long, default_value_t = 10_000)]
    pub pop: usize,
    /// Iteration budget per trial.
    #[arg(long, default_value_t = 100_000)]
    pub iters: u64,
    /// Probability of mutating each offspring.
    #[arg(long, default_value_t = 0.5)]
    pub mutation: f64,
    /// Independent trials.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed; trial t runs with a seed derived for t.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run at the published experiment scale (overrides --pop and --iters).
    #[arg(long)]
    pub paper_scale: bool,
    /// Trace stride in iterations (0 picks one yielding about 1000 points).
    #[arg(long, default_value_t = 0)]
    pub trace_every: u64,
    /// Also export the best chromosome found as a circuit file.
    #[arg(long)]
    pub circuit_out: Option<PathBuf>,
    /// Result document to write (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct ConfigEcho {
    m: usize,
    cswaps: usize,
    ancillas: usize,
    population: usize,
    iterations: u64,
    mutation: f64,
    trials: u64,
    paper_scale: bool,
}

#[derive(Debug, Serialize)]
struct GeneRow {
    ancilla: usize,
    x: usize,
    y: usize,
}

#[derive(Debug, Serialize)]
struct BestRow {
    trial: u64,
    seed: u64,
    cost: u32,
    /// CSWAPs of the best chromosome, 1-based like the circuit format.
    genes: Vec<GeneRow>,
}

#[derive(Debug, Serialize)]
struct TrialRow {
    trial: u64,
    seed: u64,
    best_cost: u32,
    iterations_run: u64,
    evaluations: u64,
    succeeded: bool,
}

/// Missed-overlap statistics across trials after a given iteration.
#[derive(Debug, Serialize)]
struct TracePoint {
    iteration: u64,
    mean: f64,
    q25: f64,
    q75: f64,
}

#[derive(Debug, Serialize)]
struct SearchResult {
    config: ConfigEcho,
    successes: u64,
    rate: f64,
    mean_success_iterations: Option<f64>,
    best: BestRow,
    trials: Vec<TrialRow>,
    trace: Vec<TracePoint>,
}

pub fn run(args: &SearchArgs) -> Result<()> {
    let (population, iterations) = if args.paper_scale {
        eprintln!(
            "warning: paper scale means population {PAPER_POPULATION} and \
             {PAPER_ITERATIONS} iterations per trial; expect hours of runtime \
             and several GB of memory"
        );
        (PAPER_POPULATION, PAPER_ITERATIONS)
    } else {
        (args.pop, args.iters)
    };
    let config = GaConfig {
        m: args.m,
        c: args.cswaps,
        d: args.ancillas,
        population,
        mutation_rate: args.mutation,
        iterations,
        seed: 0, // replaced per trial by the derived seed
    };
    let results = run_trials(&config, args.trials, args.seed)?;

    let successes = results.iter().filter(|r| r.succeeded()).count() as u64;
    let mean_success_iterations = if successes > 0 {
        Some(
            results
                .iter()
                .filter(|r| r.succeeded())
                .map(|r| r.iterations_run as f64)
                .sum::<f64>()
                / successes as f64,
        )
    } else {
        None
    };
    let best_trial = (0..results.len())
        .min_by_key(|&t| (results[t].best_cost, t))
        .expect("at least one trial ran");
    let best = &results[best_trial];

    let result = SearchResult {
        config: ConfigEcho {
            m: args.m,
            cswaps: args.cswaps,
            ancillas: args.ancillas,
            population,
            iterations,
            mutation: args.mutation,
            trials: args.trials,
            paper_scale: args.paper_scale,
        },
        successes,
        rate: successes as f64 / args.trials as f64,
        mean_success_iterations,
        best: BestRow {
            trial: best_trial as u64,
            seed: best.seed,
            cost: best.best_cost,
            genes: best
                .best
                .genes
                .iter()
                .map(|g| GeneRow {
                    ancilla: g.ancilla as usize + 1,
                    x: g.x as usize + 1,
                    y: g.y as usize + 1,
                })
                .collect(),
        },
        trials: results
            .iter()
            .enumerate()
            .map(|(t, r)| TrialRow {
                trial: t as u64,
                seed: r.seed,
                best_cost: r.best_cost,
                iterations_run: r.iterations_run,
                evaluations: r.evaluations,
                succeeded: r.succeeded(),
            })
            .collect(),
        trace: aggregate_trace(&results, args.trace_every),
    };

    let manifest = Manifest::new("search")
        .param("m", args.m)
        .param("cswaps", args.cswaps)
        .param("ancillas", args.ancillas)
        .param("pop", population)
        .param("iters", iterations)
        .param("mutation", args.mutation)
        .param("trials", args.trials)
        .param("paper_scale", args.paper_scale)
        .param("trace_every", args.trace_every)
        .seed(args.seed);
    write_payload(args.out.as_deref(), &json_document(&manifest, result)?)?;

    if let Some(path) = &args.circuit_out {
        let circuit = best.best.to_circuit(args.m, 1, args.ancillas)?;
        let payload = format!("{}{}", manifest.comment_block(), serialize_circuit(&circuit));
        write_payload(Some(path), &payload)?;
    }

    eprintln!(
        "m {} cswaps {} ancillas {}: {}/{} trials succeeded (best cost {})",
        args.m, args.cswaps, args.ancillas, successes, args.trials, best.best_cost,
    );
    Ok(())
}

/// Best-so-far cost of one trial after `iteration` (>= 1) steps. Trials
/// stop as soon as they succeed; from there on their best cost stays zero.
/// An empty trace means the initial population already succeeded.
fn cost_after(result: &GaResult, iteration: usize) -> f64 {
    debug_assert!(iteration >= 1);
    if iteration <= result.cost_trace.len() {
        result.cost_trace[iteration - 1] as f64
    } else if result.succeeded() {
        0.0
    } else {
        result.cost_trace.last().map_or(0.0, |&c| c as f64)
    }
}

/// Mean and quartiles of the missed-overlap count across trials, sampled
/// every `stride` iterations (plus the final iteration).
fn aggregate_trace(results: &[GaResult], stride: u64) -> Vec<TracePoint> {
    let max_len = results.iter().map(|r| r.cost_trace.len()).max().unwrap_or(0);
    if max_len == 0 {
        return Vec::new();
    }
    let stride = if stride == 0 {
        (max_len as u64).div_ceil(1000).max(1)
    } else {
        stride
    } as usize;
    let mut points = Vec::new();
    let mut iteration = stride;
    loop {
        let at = iteration.min(max_len);
        let mut values: Vec<f64> = results.iter().map(|r| cost_after(r, at)).collect();
        values.sort_by(f64::total_cmp);
        points.push(TracePoint {
            iteration: at as u64,
            mean: values.iter().sum::<f64>() / values.len() as f64,
            q25: quantile(&values, 0.25),
            q75: quantile(&values, 0.75),
        });
        if at == max_len {
            break;
        }
        iteration += stride;
    }
    points
}

/// Linear interpolation between order statistics of a sorted sample.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let rank = p * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mswap_core::Chromosome;

    fn result_with(trace: Vec<u32>, best_cost: u32) -> GaResult {
        GaResult {
            seed: 0,
            best: Chromosome { genes: Vec::new() },
            best_cost,
            iterations_run: trace.len() as u64,
            cost_trace: trace,
            evaluations: 0,
        }
    }

    #[test]
    fn quantiles_interpolate_between_order_statistics() {
        let values = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&values, 0.25), 0.75);
        assert_eq!(quantile(&values, 0.75), 2.25);
        assert_eq!(quantile(&values, 0.0), 0.0);
        assert_eq!(quantile(&values, 1.0), 3.0);
        assert_eq!(quantile(&[5.0], 0.25), 5.0);
    }

    #[test]
    fn early_successes_pad_the_trace_with_zero() {
        let fast = result_with(vec![2, 0], 0);
        let slow = result_with(vec![4, 4, 4, 2], 2);
        let trace = aggregate_trace(&[fast, slow], 1);
        assert_eq!(trace.len(), 4);
        assert_eq!(trace[0].mean, 3.0); // (2 + 4) / 2
        assert_eq!(trace[3].mean, 1.0); // (0 + 2) / 2
        assert_eq!(trace[3].iteration, 4);
    }

    #[test]
    fn strides_always_sample_the_final_iteration() {
        let r = result_with((0..10).rev().collect(), 0);
        let trace = aggregate_trace(&[r], 4);
        let iterations: Vec<u64> = trace.iter().map(|p| p.iteration).collect();
        assert_eq!(iterations, vec![4, 8, 10]);
    }

    #[test]
    fn instant_success_produces_an_empty_trace() {
        let r = result_with(Vec::new(), 0);
        assert!(aggregate_trace(&[r], 0).is_empty());
    }
}
