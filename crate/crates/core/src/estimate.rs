//! Finite-shot sampling and the pooled maximum-likelihood overlap
//! estimator, with its mean-squared-error guarantee.
//!
//! A run of `N` shots measures the test ancilla and the pairing ancillas.
//! For a pair P labeled by the set of bitstrings L(P), the pooled
//! estimator is
//!
//! ```text
//! est(P) = 2^(d+1) / |L(P)| * (sum of n(0,b) over b in L(P)) / N - 1
//! ```
//!
//! which is unbiased with `Var <= 4^(d+1) / (|L(P)| * N)` per pair, giving
//!
//! ```text
//! E || truth - est ||_2^2  <=  4^(d+1) / N
//! ```
//!
//! summed over all pairs of a complete labeling. Inverting that bound,
//! [`sample_bound`] returns the shot count guaranteeing a target error.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::pairing::extend_to_swap_test;
use crate::permlab::{label_table, LabelTable};
use crate::rng::{derive_seed, rng_from};
use crate::simvec::{
    ancilla_distribution, overlaps_from_distribution, run, AncillaDistribution, InputStates,
};

/// Measured outcome counts from a finite number of shots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShotCounts {
    pub d: usize,
    pub shots: u64,
    /// (test bit, bitstring value) to count; zero entries included.
    pub counts: BTreeMap<(u8, u64), u64>,
}

impl ShotCounts {
    /// Count for one outcome (0 for absent keys).
    pub fn count(&self, test: u8, bits: u64) -> u64 {
        self.counts.get(&(test, bits)).copied().unwrap_or(0)
    }
}

/// Draws `shots` multinomial samples from an exact outcome distribution.
///
/// Decomposed into conditional binomials in key order (ascending test
/// bit, then bitstring value); the draw sequence is deterministic for a
/// given distribution, shot count, and generator state.
pub fn sample_shots(
    dist: &AncillaDistribution,
    shots: u64,
    rng: &mut impl Rng,
) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".to_owned()));
    }
    let mut counts = BTreeMap::new();
    let mut rest = shots;
    let mut rest_p = 1.0f64;
    let last = dist.probs.len() - 1;
    for (idx, (&key, &p)) in dist.probs.iter().enumerate() {
        let n = if idx == last {
            rest
        } else if rest == 0 || rest_p <= 0.0 {
            0
        } else {
            let ratio = (p / rest_p).clamp(0.0, 1.0);
            Binomial::new(rest, ratio)
                .expect("ratio clamped to [0, 1]")
                .sample(rng)
        };
        counts.insert(key, n);
        rest -= n;
        rest_p -= p;
    }
    Ok(ShotCounts {
        d: dist.d,
        shots,
        counts,
    })
}

/// One pair's estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairEstimate {
    /// The unbiased pooled estimate (can fall outside [0, 1]).
    pub raw: f64,
    /// `raw` clamped into [0, 1], the physically meaningful range.
    pub clamped: f64,
    pub was_clamped: bool,
    /// The labels pooled for this pair.
    pub labels: Vec<u64>,
    /// Whether the pair touches a padding register.
    pub padded: bool,
}

/// All pairwise estimates from one set of shot counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub d: usize,
    pub shots: u64,
    pub pairs: BTreeMap<(usize, usize), PairEstimate>,
}

impl OverlapEstimate {
    /// Pair to raw estimate.
    pub fn raw_map(&self) -> BTreeMap<(usize, usize), f64> {
        self.pairs.iter().map(|(&p, e)| (p, e.raw)).collect()
    }

    /// Pair to clamped estimate.
    pub fn clamped_map(&self) -> BTreeMap<(usize, usize), f64> {
        self.pairs.iter().map(|(&p, e)| (p, e.clamped)).collect()
    }
}

/// Applies the pooled estimator to shot counts under a label table.
///
/// The labeling must be complete — with unlabeled pairs there is nothing
/// to pin their estimates to and the run cannot be interpreted.
pub fn estimate_overlaps(counts: &ShotCounts, table: &LabelTable) -> Result<OverlapEstimate> {
    if counts.d != table.d() {
        return Err(Error::InvalidArgument(format!(
            "counts carry {} ancilla bits but the label table has {}",
            counts.d,
            table.d()
        )));
    }
    let missing = table.missing_pairs();
    if !missing.is_empty() {
        return Err(Error::IncompleteLabeling { missing });
    }
    let scale = (2.0f64).powi(counts.d as i32 + 1);
    let shots = counts.shots as f64;
    let mut pairs = BTreeMap::new();
    for (&pair, labels) in table.labels() {
        let hits: u64 = labels.iter().map(|&b| counts.count(0, b)).sum();
        let raw = scale * (hits as f64 / shots) / labels.len() as f64 - 1.0;
        let clamped = raw.clamp(0.0, 1.0);
        pairs.insert(
            pair,
            PairEstimate {
                raw,
                clamped,
                was_clamped: clamped != raw,
                labels: labels.clone(),
                padded: table.is_padded_pair(pair),
            },
        );
    }
    Ok(OverlapEstimate {
        d: counts.d,
        shots: counts.shots,
        pairs,
    })
}

/// Euclidean norm of (truth - raw estimate) over all pairs.
///
/// The two maps must cover exactly the same pairs.
pub fn error_norm(
    estimate: &OverlapEstimate,
    truth: &BTreeMap<(usize, usize), f64>,
) -> Result<f64> {
    if estimate.pairs.len() != truth.len()
        || !estimate.pairs.keys().eq(truth.keys())
    {
        return Err(Error::InvalidArgument(
            "estimate and truth cover different pair sets".to_owned(),
        ));
    }
    let sq: f64 = estimate
        .pairs
        .iter()
        .map(|(pair, e)| {
            let diff = truth[pair] - e.raw;
            diff * diff
        })
        .sum();
    Ok(sq.sqrt())
}

/// Shots needed to guarantee `E || truth - est ||_2^2 <= eps^2`:
/// the ceiling of `4^(d+1) / eps^2`.
pub fn sample_bound(d: usize, eps: f64) -> Result<u64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "target error must be positive, got {eps}"
        )));
    }
    let n = ((4.0f64).powi(d as i32 + 1) / (eps * eps)).ceil();
    if !n.is_finite() || n > 9.0e18 {
        return Err(Error::InvalidArgument(format!(
            "sample bound overflows for d = {d}, eps = {eps}"
        )));
    }
    Ok(n as u64)
}

/// A repeated-sampling experiment against exact ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub replications: usize,
    pub shots: u64,
    pub d: usize,
    pub pair_count: usize,
    /// Per-replication error norms, in replication order.
    pub norms: Vec<f64>,
    /// Mean squared error norm.
    pub mse: f64,
    /// The theoretical ceiling `4^(d+1) / shots`.
    pub bound: f64,
}

/// Simulates once, then samples and estimates `replications` times.
///
/// Replication `k` uses an independent stream derived from the master
/// seed, so results are reproducible and independent of thread count.
pub fn run_replications(
    circuit: &Circuit,
    states: &InputStates,
    shots: u64,
    replications: usize,
    master_seed: u64,
) -> Result<ReplicationReport> {
    if replications == 0 {
        return Err(Error::InvalidArgument(
            "replication count must be positive".to_owned(),
        ));
    }
    let full = if circuit.layout.has_test_ancilla {
        circuit.clone()
    } else {
        extend_to_swap_test(circuit)?
    };
    let table = label_table(&full.pairing_part())?;
    let missing = table.missing_pairs();
    if !missing.is_empty() {
        return Err(Error::IncompleteLabeling { missing });
    }
    let dist = ancilla_distribution(&run(&full, states)?);
    let truth = overlaps_from_distribution(&dist, &table)?.overlaps;

    let norms = (0..replications)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_from(derive_seed(master_seed, k as u64));
            let counts = sample_shots(&dist, shots, &mut rng)?;
            let estimate = estimate_overlaps(&counts, &table)?;
            error_norm(&estimate, &truth)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mse = norms.iter().map(|n| n * n).sum::<f64>() / norms.len() as f64;
    let d = table.d();
    Ok(ReplicationReport {
        replications,
        shots,
        d,
        pair_count: truth.len(),
        norms,
        mse,
        bound: (4.0f64).powi(d as i32 + 1) / shots as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{build_pairing, build_swap_test, Strategy};
    use crate::simvec::{direct_overlaps, haar_random};

    #[test]
    fn sample_bound_matches_hand_computed_values() {
        assert_eq!(sample_bound(0, 0.1).unwrap(), 400);
        assert_eq!(sample_bound(3, 0.1).unwrap(), 25_600);
        assert_eq!(sample_bound(0, 1.0).unwrap(), 4);
        assert_eq!(sample_bound(1, 0.2).unwrap(), 400);
        assert!(sample_bound(3, 0.0).is_err());
        assert!(sample_bound(3, -0.5).is_err());
        // Quadrupling per extra ancilla.
        for d in 0..10 {
            assert_eq!(
                sample_bound(d + 1, 0.25).unwrap(),
                4 * sample_bound(d, 0.25).unwrap()
            );
        }
    }

    #[test]
    fn pooled_estimator_on_hand_counts() {
        // Two states, d = 0: 750 of 1000 shots on (test=0).
        let circuit = build_pairing(2, 1, &Strategy::MiddleSplit).unwrap();
        let table = label_table(&circuit).unwrap();
        let counts = ShotCounts {
            d: 0,
            shots: 1000,
            counts: BTreeMap::from([((0, 0), 750), ((1, 0), 250)]),
        };
        let est = estimate_overlaps(&counts, &table).unwrap();
        let pair = &est.pairs[&(0, 1)];
        assert!((pair.raw - 0.5).abs() < 1e-12);
        assert!(!pair.was_clamped);

        // 400 of 1000 gives a negative raw value, clamped to zero.
        let counts = ShotCounts {
            d: 0,
            shots: 1000,
            counts: BTreeMap::from([((0, 0), 400), ((1, 0), 600)]),
        };
        let est = estimate_overlaps(&counts, &table).unwrap();
        let pair = &est.pairs[&(0, 1)];
        assert!((pair.raw - (-0.2)).abs() < 1e-12);
        assert_eq!(pair.clamped, 0.0);
        assert!(pair.was_clamped);
    }

    #[test]
    fn estimation_requires_a_complete_labeling() {
        use crate::circuit::{Circuit, Gate, Layout};
        let mut c = Circuit::new(Layout::new(3, 1, 1, false).unwrap());
        c.append(Gate::H { a: 0 }).unwrap();
        c.append(Gate::CSwap { a: 0, x: 0, y: 2 }).unwrap();
        let table = label_table(&c).unwrap();
        let counts = ShotCounts {
            d: 1,
            shots: 100,
            counts: BTreeMap::from([((0, 0), 50), ((0, 1), 20), ((1, 0), 10), ((1, 1), 20)]),
        };
        assert!(matches!(
            estimate_overlaps(&counts, &table),
            Err(Error::IncompleteLabeling { .. })
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_conserves_shots() {
        let circuit = build_swap_test(4, 1, &Strategy::MiddleSplit).unwrap();
        let mut rng = rng_from(41);
        let states = haar_random(4, 1, &mut rng);
        let dist = ancilla_distribution(&run(&circuit, &states).unwrap());

        let a = sample_shots(&dist, 10_000, &mut rng_from(7)).unwrap();
        let b = sample_shots(&dist, 10_000, &mut rng_from(7)).unwrap();
        let c = sample_shots(&dist, 10_000, &mut rng_from(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.counts.values().sum::<u64>(), 10_000);
        assert_eq!(a.counts.len(), dist.probs.len());
    }

    #[test]
    fn sampled_frequencies_converge_to_the_distribution() {
        let circuit = build_swap_test(4, 1, &Strategy::MiddleSplit).unwrap();
        let states = InputStates::basis(1, &[1, 1, 1, 1]).unwrap();
        let dist = ancilla_distribution(&run(&circuit, &states).unwrap());
        let counts = sample_shots(&dist, 200_000, &mut rng_from(3)).unwrap();
        for (&key, &p) in &dist.probs {
            let freq = counts.counts[&key] as f64 / 200_000.0;
            assert!(
                (freq - p).abs() < 5e-3,
                "key {key:?}: freq {freq} vs p {p}"
            );
        }
    }

    #[test]
    fn the_estimator_is_unbiased_on_average() {
        let circuit = build_swap_test(2, 1, &Strategy::MiddleSplit).unwrap();
        let mut rng = rng_from(17);
        let states = haar_random(2, 1, &mut rng);
        let truth = direct_overlaps(&states)[&(0, 1)];
        let table = label_table(&circuit.pairing_part()).unwrap();
        let dist = ancilla_distribution(&run(&circuit, &states).unwrap());

        let reps = 300;
        let mut mean = 0.0;
        for k in 0..reps {
            let mut rng = rng_from(derive_seed(99, k));
            let counts = sample_shots(&dist, 4000, &mut rng).unwrap();
            mean += estimate_overlaps(&counts, &table).unwrap().pairs[&(0, 1)].raw;
        }
        mean /= f64::from(reps as u32);
        // Std of the mean is below 1e-3 here; 5e-3 is a comfortable margin.
        assert!(
            (mean - truth).abs() < 5e-3,
            "mean {mean} vs truth {truth}"
        );
    }

    #[test]
    fn replications_respect_the_error_bound() {
        let circuit = build_swap_test(4, 1, &Strategy::MiddleSplit).unwrap();
        let mut rng = rng_from(29);
        let states = haar_random(4, 1, &mut rng);
        let report = run_replications(&circuit, &states, 5000, 50, 1234).unwrap();
        assert_eq!(report.norms.len(), 50);
        assert_eq!(report.pair_count, 6);
        assert!((report.bound - 256.0 / 5000.0).abs() < 1e-12);
        assert!(report.mse > 0.0);
        assert!(
            report.mse <= report.bound,
            "mse {} above bound {}",
            report.mse,
            report.bound
        );
        // Reproducible: same master seed, same norms.
        let again = run_replications(&circuit, &states, 5000, 50, 1234).unwrap();
        assert_eq!(report, again);
        let other = run_replications(&circuit, &states, 5000, 50, 1235).unwrap();
        assert_ne!(report.norms, other.norms);
    }

    #[test]
    fn error_norm_rejects_mismatched_pair_sets() {
        let est = OverlapEstimate {
            d: 0,
            shots: 10,
            pairs: BTreeMap::from([(
                (0, 1),
                PairEstimate {
                    raw: 0.5,
                    clamped: 0.5,
                    was_clamped: false,
                    labels: vec![0],
                    padded: false,
                },
            )]),
        };
        let truth = BTreeMap::from([((0, 1), 0.5), ((0, 2), 0.1)]);
        assert!(error_norm(&est, &truth).is_err());
        let truth = BTreeMap::from([((0, 1), 0.4)]);
        assert!((error_norm(&est, &truth).unwrap() - 0.1).abs() < 1e-12);
    }
}
