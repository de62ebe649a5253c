//! `mswap` — build, label, simulate, estimate, search, and verify
//! multi-state swap-test circuits.
//!
//! Every output file embeds a run manifest (command, resolved parameters,
//! seed, input digests, version, timestamp). Given the same manifest, every
//! command reproduces its output byte for byte, timestamp aside.

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod commands;
mod output;
mod states;

use commands::{build, estimate, labels, search, simulate, verify};

#[derive(Debug, Parser)]
#[command(name = "mswap", version, about = "Multi-state swap-test circuit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a pairing circuit (or a full swap test) for m input states.
    Build(build::BuildArgs),
    /// Enumerate the ancilla labeling of a pairing circuit.
    Labels(labels::LabelsArgs),
    /// Simulate a circuit exactly: outcome distribution and exact overlaps.
    Simulate(simulate::SimulateArgs),
    /// Estimate overlaps from sampled shots and report the error against truth.
    Estimate(estimate::EstimateArgs),
    /// Search for pairing circuits with a genetic algorithm.
    Search(search::SearchArgs),
    /// Check a circuit file: structure, labeling, counts, and the overlap law.
    Verify(verify::VerifyArgs),
}

/// Honors `MSWAP_THREADS` before any parallel work starts.
fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("MSWAP_THREADS") {
        let threads: usize = raw
            .parse()
            .with_context(|| format!("MSWAP_THREADS must be a thread count, got {raw:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    init_thread_pool()?;
    match &cli.command {
        Command::Build(args) => build::run(args).map(|()| ExitCode::SUCCESS),
        Command::Labels(args) => labels::run(args).map(|()| ExitCode::SUCCESS),
        Command::Simulate(args) => simulate::run(args).map(|()| ExitCode::SUCCESS),
        Command::Estimate(args) => estimate::run(args).map(|()| ExitCode::SUCCESS),
        Command::Search(args) => search::run(args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => verify::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
