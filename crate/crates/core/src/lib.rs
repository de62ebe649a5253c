//! Pairing circuits for multi-state swap tests: construction, exact
//! simulation, overlap estimation, and evolutionary search.
//!
//! The standard two-state swap test reads the squared overlap of two
//! states off one ancilla. This crate implements its generalization to
//! `m` input registers: a *pairing unitary* built from `O(m)` CSWAPs over
//! `O(log m)` shared ancillas routes a different pair of inputs into the
//! first two registers for every ancilla bitstring, and a single standard
//! test tail then measures all `m(m-1)/2` pairwise overlaps at once.
//!
//! The crate is organized around that pipeline:
//!
//! - [`circuit`]: gate set, register/ancilla layout, and the basis-index
//!   convention every other module relies on.
//! - [`pairing`]: recursive construction of pairing circuits with exact
//!   CSWAP/ancilla counts, plus the swap-test tail.
//! - [`permlab`]: which pair of inputs each ancilla bitstring selects —
//!   the label table — by exact permutation enumeration.
//! - [`simvec`]: dense statevector simulation and exact per-pair overlap
//!   readout; the arbiter for every analytic claim.
//! - [`estimate`]: finite-shot sampling, the pooled overlap estimator,
//!   and its `4^(d+1)/N` mean-squared-error guarantee.
//! - [`evolve`]: steady-state genetic search for pairing circuits of a
//!   given CSWAP budget.
//! - [`format`]: a line-oriented text format for circuits.
//! - [`rng`]: seeding helpers giving every experiment a reproducible,
//!   thread-count-independent random stream.
//!
//! Indices in every public API are 0-based; rendered text (errors, the
//! circuit format, tables) is 1-based, matching the way the circuits are
//! usually drawn.

pub mod circuit;
pub mod error;
pub mod estimate;
pub mod evolve;
pub mod format;
pub mod pairing;
pub mod permlab;
pub mod rng;
pub mod simvec;

pub use circuit::{Circuit, Gate, Layout, Violation};
pub use error::{Error, Result};
pub use estimate::{
    estimate_overlaps, error_norm, run_replications, sample_bound, sample_shots,
    OverlapEstimate, PairEstimate, ReplicationReport, ShotCounts,
};
pub use evolve::{
    chromosome_from_circuit, cost, run_ga, run_trials, success_rate, Chromosome, GaConfig,
    GaResult, Gene, SuccessReport, TrialSummary,
};
pub use format::{parse_circuit, serialize_circuit, CIRCUIT_FORMAT};
pub use pairing::{
    build_pairing, build_swap_test, extend_to_swap_test, predict_counts, CountPrediction,
    Strategy,
};
pub use permlab::{
    coverage, is_complete, label_table, permutation_for, BitString, LabelTable, Permutation,
    ENUMERATION_CAP,
};
pub use simvec::{
    ancilla_distribution, direct_overlaps, exact_overlaps, haar_random, prepare_input, run,
    AncillaDistribution, ExactOverlaps, InputStates, StateVector, ANALYTIC_TOL, MAX_QUBITS,
    NORM_TOL,
};
pub use rng::{derive_seed, rng_from};
