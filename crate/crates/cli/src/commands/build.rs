//! `mswap build` — construct a pairing circuit or a full swap test.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mswap_core::{
    build_pairing, build_swap_test, predict_counts, serialize_circuit, Strategy,
};

use crate::output::{write_payload, Manifest};

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Number of input states.
    #[arg(long, value_parser = clap::value_parser!(usize))]
    pub m: usize,
    /// Qubits per input register.
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Split strategy: `middle`, `pad`, or `explicit:G1+G2`.
    #[arg(long, default_value = "middle")]
    pub strategy: String,
    /// Append the swap-test section (test ancilla, controlled swap of the
    /// first two registers, and the surrounding Hadamards).
    #[arg(long)]
    pub swap_test: bool,
    /// Circuit file to write (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &BuildArgs) -> Result<()> {
    let strategy: Strategy = args.strategy.parse()?;
    let circuit = if args.swap_test {
        build_swap_test(args.m, args.q, &strategy)?
    } else {
        build_pairing(args.m, args.q, &strategy)?
    };
    let manifest = Manifest::new("build")
        .param("m", args.m)
        .param("q", args.q)
        .param("strategy", strategy.to_string())
        .param("swap_test", args.swap_test);
    let payload = format!("{}{}", manifest.comment_block(), serialize_circuit(&circuit));
    write_payload(args.out.as_deref(), &payload)?;

    let predicted = predict_counts(args.m, &strategy)?;
    eprintln!(
        "m {} strategy {}: {} CSWAPs, {} ancillas (strategy predicts {}, {}){}",
        args.m,
        strategy,
        circuit.cswap_count(),
        circuit.layout.d,
        predicted.c,
        predicted.d,
        if args.swap_test { "; swap-test section appended" } else { "" },
    );
    Ok(())
}
