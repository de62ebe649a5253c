//! `mswap labels` — enumerate the ancilla labeling of a pairing circuit.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use mswap_core::{build_pairing, label_table, parse_circuit, LabelTable, Strategy};

use crate::output::{read_file, write_payload, Manifest};

/// Format tag of label listings.
pub const LABELS_FORMAT: &str = "mswap labels v1";

#[derive(Debug, Args)]
pub struct LabelsArgs {
    /// Circuit file to label (alternative: build one via --m).
    #[arg(long, conflicts_with = "m")]
    pub circuit: Option<PathBuf>,
    /// Number of input states for a freshly built circuit.
    #[arg(long, required_unless_present = "circuit")]
    pub m: Option<usize>,
    /// Split strategy for a freshly built circuit.
    #[arg(long, default_value = "middle", conflicts_with = "circuit")]
    pub strategy: String,
    /// Label listing to write (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &LabelsArgs) -> Result<()> {
    let (table, manifest) = match &args.circuit {
        Some(path) => {
            let text = read_file(path)?;
            let circuit = parse_circuit(&text)?;
            let table = label_table(&circuit.pairing_part())?;
            let manifest = Manifest::new("labels").input("circuit", path, text.as_bytes());
            (table, manifest)
        }
        None => {
            let m = args.m.expect("clap requires --m without --circuit");
            let strategy: Strategy = args.strategy.parse()?;
            let circuit = build_pairing(m, 1, &strategy)?;
            let table = label_table(&circuit)?;
            let manifest = Manifest::new("labels")
                .param("m", m)
                .param("strategy", strategy.to_string());
            (table, manifest)
        }
    };
    let payload = format!("{}{}", manifest.comment_block(), render_table(&table));
    write_payload(args.out.as_deref(), &payload)?;
    Ok(())
}

/// One line per bitstring, then coverage, completeness, and duplicates.
fn render_table(table: &LabelTable) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "{LABELS_FORMAT}");
    let _ = writeln!(text, "m {}", table.m());
    let _ = writeln!(text, "d {}", table.d());
    if table.real_m() < table.m() {
        let _ = writeln!(text, "real_m {}", table.real_m());
    }
    for (bits, pair) in table.iter() {
        let (i, j) = (pair.0.min(pair.1), pair.0.max(pair.1));
        let padded = if table.is_padded_pair((i, j)) { " [padded]" } else { "" };
        let _ = writeln!(text, "{bits} -> ({}, {}){padded}", i + 1, j + 1);
    }
    let _ = writeln!(text, "coverage {}/{}", table.coverage(), table.total_real_pairs());
    let _ = writeln!(text, "complete {}", if table.is_complete() { "yes" } else { "no" });
    for pair in table.missing_pairs() {
        let _ = writeln!(text, "missing ({}, {})", pair.0 + 1, pair.1 + 1);
    }
    for (pair, values) in table.duplicate_groups() {
        let _ = write!(text, "duplicate ({}, {}) <-", pair.0 + 1, pair.1 + 1);
        for &value in values {
            let _ = write!(text, " {}", mswap_core::BitString::new(value, table.d()).expect("table values fit d bits"));
        }
        let _ = writeln!(text);
    }
    text
}
