//! Error type shared by all modules of this crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building, parsing, analyzing, or
/// simulating a circuit.
///
/// Register, ancilla, and state indices are rendered 1-based in messages
/// (`r1`, `a1`, pair `(1,3)`), matching the text format and CLI output.
#[derive(Debug, Error)]
pub enum Error {
    /// A layout parameter is out of range; names the offending field.
    #[error("invalid layout: {field} {message}")]
    InvalidLayout {
        field: &'static str,
        message: String,
    },

    /// A gate does not fit its circuit's layout.
    #[error("invalid gate: {0}")]
    InvalidGate(String),

    /// A structurally broken circuit was passed where a valid one is required.
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    /// Text-format parse failure, with the 1-based source line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input state vectors are malformed (count, dimension, or norm).
    #[error("invalid input states: {0}")]
    InvalidStates(String),

    /// Label enumeration would exceed the exact-computation cap.
    #[error("enumeration too large: d={d} ancillas exceed the cap of {cap} (2^{cap} bitstrings)")]
    EnumerationTooLarge { d: usize, cap: usize },

    /// A bitstring of the wrong length was supplied for a circuit.
    #[error("bitstring has {got} bits but the circuit has {expected} pairing ancillas")]
    WrongBitLength { expected: usize, got: usize },

    /// Label analysis is only defined for pairing circuits.
    #[error("circuit contains test-ancilla gates; label analysis applies to the pairing part only")]
    TestGatesPresent,

    /// The circuit's label table does not reach every pair of inputs.
    #[error("incomplete labeling: {} pair(s) unreachable, first missing {}", missing.len(), fmt_pair(missing.first()))]
    IncompleteLabeling { missing: Vec<(usize, usize)> },

    /// Two labels of the same pair produced inconsistent overlap values.
    /// This indicates a broken circuit or simulator, never valid input.
    #[error("duplicate labels of pair ({},{}) disagree: spread {spread:.3e}", pair.0 + 1, pair.1 + 1)]
    DuplicateLabelMismatch { pair: (usize, usize), spread: f64 },

    /// Catch-all for out-of-range arguments (shot counts, tolerances, config).
    #[error("{0}")]
    InvalidArgument(String),
}

fn fmt_pair(pair: Option<&(usize, usize)>) -> String {
    match pair {
        Some(&(i, j)) => format!("({},{})", i + 1, j + 1),
        None => "-".to_owned(),
    }
}
