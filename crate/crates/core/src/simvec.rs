//! Exact dense statevector simulation.
//!
//! Works directly on the basis ordering fixed in [`crate::circuit`]: one
//! complex amplitude per basis index, Hadamards as in-place butterflies,
//! CSWAPs as index permutations (a basis index with the control bit set has
//! its two q-bit register fields exchanged). Everything is double
//! precision and exact up to rounding; nothing is sampled here.
//!
//! The simulator is the arbiter for the measurement law of the swap test.
//! For a complete pairing circuit with `d` ancillas followed by the test
//! section, conditioning on the pairing ancillas reading `b` with the
//! label table putting inputs (i, j) there:
//!
//! ```text
//! p(test=0, b) + p(test=1, b) = 1 / 2^d
//! p(test=0, b) - p(test=1, b) = |<phi_i|phi_j>|^2 / 2^d
//! ```
//!
//! equivalently `|<phi_i|phi_j>|^2 = 2^(d+1) * p(test=0, b) - 1`, which is
//! how [`exact_overlaps`] reads overlaps off the distribution. Note the
//! `2^(d+1)`: the branch probabilities must sum to 1 over both test
//! outcomes and all `2^d` labels, which pins the normalization.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, Layout};
use crate::error::{Error, Result};
use crate::pairing::extend_to_swap_test;
use crate::permlab::{label_table, LabelTable};

/// Tolerance for analytic identities checked on simulated values.
pub const ANALYTIC_TOL: f64 = 1e-10;

/// Tolerance for state norms.
pub const NORM_TOL: f64 = 1e-9;

/// Simulation refuses layouts above this many qubits (1 GiB of amplitudes).
pub const MAX_QUBITS: usize = 26;

/// A dense statevector over a layout's full qubit set.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub layout: Layout,
    /// `2^total_qubits` amplitudes, basis index per the layout contract.
    pub amps: Vec<Complex64>,
}

impl StateVector {
    /// Sum of squared magnitudes (should be 1 within [`NORM_TOL`]).
    pub fn norm_sqr(&self) -> f64 {
        chunked_norm_sqr(&self.amps)
    }
}

/// The `m` input states, each a `2^q`-dimensional unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct InputStates {
    pub q: usize,
    pub states: Vec<Vec<Complex64>>,
}

impl InputStates {
    /// Validates dimensions and norms.
    pub fn new(q: usize, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidStates("no states given".to_owned()));
        }
        let dim = 1usize << q;
        for (i, s) in states.iter().enumerate() {
            if s.len() != dim {
                return Err(Error::InvalidStates(format!(
                    "state {} has dimension {}, expected 2^{q} = {dim}",
                    i + 1,
                    s.len()
                )));
            }
            let norm = chunked_norm_sqr(s).sqrt();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidStates(format!(
                    "state {} not normalized: |norm - 1| = {:.3e}",
                    i + 1,
                    (norm - 1.0).abs()
                )));
            }
        }
        Ok(InputStates { q, states })
    }

    /// Computational basis states `|xs[0]>, |xs[1]>, ...`.
    pub fn basis(q: usize, xs: &[usize]) -> Result<Self> {
        let dim = 1usize << q;
        let states = xs
            .iter()
            .map(|&x| {
                if x >= dim {
                    return Err(Error::InvalidStates(format!(
                        "basis index {x} out of range for q = {q}"
                    )));
                }
                let mut v = vec![Complex64::ZERO; dim];
                v[x] = Complex64::ONE;
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        InputStates::new(q, states)
    }

    /// The all-zeros state `|0...0>` of one register.
    pub fn zero_state(q: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::ZERO; 1 << q];
        v[0] = Complex64::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// `m` Haar-random pure states on `q` qubits (normalized complex Gaussians).
pub fn haar_random(m: usize, q: usize, rng: &mut impl Rng) -> InputStates {
    let dim = 1usize << q;
    let states = (0..m)
        .map(|_| {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let norm = chunked_norm_sqr(&v).sqrt();
            for a in &mut v {
                *a /= norm;
            }
            v
        })
        .collect();
    InputStates { q, states }
}

/// Tensor product of the inputs with all ancillas (and the test qubit, if
/// present) in |0>. Register 1 is the most significant register block.
pub fn prepare_input(states: &InputStates, layout: &Layout) -> Result<StateVector> {
    if states.q != layout.q {
        return Err(Error::InvalidStates(format!(
            "states have q = {}, layout has q = {}",
            states.q, layout.q
        )));
    }
    if states.len() != layout.m {
        return Err(Error::InvalidStates(format!(
            "got {} states for {} registers",
            states.len(),
            layout.m
        )));
    }
    let total = layout.total_qubits();
    if total > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "layout needs {total} qubits, exceeding the simulation cap of {MAX_QUBITS}"
        )));
    }

    let mut block: Vec<Complex64> = vec![Complex64::ONE];
    for s in &states.states {
        let mut next = Vec::with_capacity(block.len() * s.len());
        for &a in &block {
            for &b in s {
                next.push(a * b);
            }
        }
        block = next;
    }

    let mut amps = vec![Complex64::ZERO; 1usize << total];
    amps[..block.len()].copy_from_slice(&block);
    Ok(StateVector {
        layout: *layout,
        amps,
    })
}

/// Applies one gate in place.
pub fn apply_gate(sv: &mut StateVector, gate: &Gate) -> Result<()> {
    gate.check(&sv.layout)?;
    match *gate {
        Gate::H { a } => hadamard(&mut sv.amps, sv.layout.ancilla_bit(a)),
        Gate::HTest => hadamard(&mut sv.amps, sv.layout.test_bit()),
        Gate::CSwap { a, x, y } => {
            let ctrl = sv.layout.ancilla_bit(a);
            cswap(&mut sv.amps, &sv.layout, ctrl, x, y);
        }
        Gate::CSwapTest { x, y } => {
            let ctrl = sv.layout.test_bit();
            cswap(&mut sv.amps, &sv.layout, ctrl, x, y);
        }
    }
    Ok(())
}

/// In-place Hadamard butterfly on one qubit.
fn hadamard(amps: &mut [Complex64], bit: usize) {
    let mask = 1usize << bit;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..amps.len() {
        if i & mask == 0 {
            let a = amps[i];
            let b = amps[i | mask];
            amps[i] = (a + b) * s;
            amps[i | mask] = (a - b) * s;
        }
    }
}

/// Swaps the register-`x` and register-`y` fields of every basis index
/// whose control bit is set. Pure index permutation.
fn cswap(amps: &mut [Complex64], layout: &Layout, ctrl_bit: usize, x: usize, y: usize) {
    let sx = layout.register_low_bit(x);
    let sy = layout.register_low_bit(y);
    let field = (1usize << layout.q) - 1;
    let cmask = 1usize << ctrl_bit;
    for i in 0..amps.len() {
        if i & cmask != 0 {
            let diff = ((i >> sx) ^ (i >> sy)) & field;
            if diff != 0 {
                let j = i ^ (diff << sx) ^ (diff << sy);
                if j > i {
                    amps.swap(i, j);
                }
            }
        }
    }
}

/// Runs a circuit on input states.
///
/// The states must either match the layout's register count exactly, or
/// match the circuit's *real* register count, in which case the declared
/// padding registers are filled with `|0...0>`.
pub fn run(circuit: &Circuit, states: &InputStates) -> Result<StateVector> {
    circuit.check()?;
    let padded_states;
    let states = if states.len() == circuit.layout.m {
        states
    } else if states.len() == circuit.real_m() {
        let mut all = states.states.clone();
        all.resize(circuit.layout.m, InputStates::zero_state(states.q));
        padded_states = InputStates {
            q: states.q,
            states: all,
        };
        &padded_states
    } else {
        return Err(Error::InvalidStates(format!(
            "got {} states; circuit takes {} (or {} with padding filled in)",
            states.len(),
            circuit.real_m(),
            circuit.layout.m
        )));
    };

    let mut sv = prepare_input(states, &circuit.layout)?;
    for gate in &circuit.gates {
        apply_gate(&mut sv, gate)?;
    }
    debug_assert!((sv.norm_sqr() - 1.0).abs() < NORM_TOL);
    Ok(sv)
}

/// Exact joint distribution of (test ancilla, pairing ancillas), register
/// qubits traced out.
#[derive(Debug, Clone, PartialEq)]
pub struct AncillaDistribution {
    /// Pairing-ancilla count; `2^d` bitstring values per test outcome.
    pub d: usize,
    /// Whether a test-ancilla bit is part of the keys (otherwise all keys
    /// carry test bit 0).
    pub has_test: bool,
    /// (test bit, bitstring value) to probability; zero entries included.
    pub probs: BTreeMap<(u8, u64), f64>,
}

impl AncillaDistribution {
    /// Probability of one outcome (0.0 for impossible keys).
    pub fn p(&self, test: u8, bits: u64) -> f64 {
        self.probs.get(&(test, bits)).copied().unwrap_or(0.0)
    }

    /// Sum over all outcomes (1 within [`NORM_TOL`] for a valid state).
    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Marginal probability of the test ancilla reading 0.
    pub fn p_test0(&self) -> f64 {
        self.probs
            .iter()
            .filter(|((t, _), _)| *t == 0)
            .map(|(_, p)| p)
            .sum()
    }
}

/// Marginalizes a statevector over the register qubits.
pub fn ancilla_distribution(sv: &StateVector) -> AncillaDistribution {
    let layout = &sv.layout;
    let low_bits = layout.m * layout.q;
    let d = layout.d;
    let high_bits = d + usize::from(layout.has_test_ancilla);
    let block_len = 1usize << low_bits;
    let bits_mask = (1u64 << d) - 1; // d < MAX_QUBITS, no overflow

    let mut probs = BTreeMap::new();
    for h in 0..(1usize << high_bits) {
        let block = &sv.amps[h * block_len..(h + 1) * block_len];
        let key = ((h as u64 >> d) as u8, h as u64 & bits_mask);
        probs.insert(key, chunked_norm_sqr(block));
    }
    AncillaDistribution {
        d,
        has_test: layout.has_test_ancilla,
        probs,
    }
}

/// Two-level summation: keeps the absolute error of big marginals far
/// below [`ANALYTIC_TOL`] even for millions of amplitudes.
fn chunked_norm_sqr(amps: &[Complex64]) -> f64 {
    amps.chunks(1024)
        .map(|chunk| chunk.iter().map(Complex64::norm_sqr).sum::<f64>())
        .sum()
}

/// Per-pair overlaps read exactly off a swap-test circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOverlaps {
    /// Unordered pair (i < j, 0-based) to `|<phi_i|phi_j>|^2`.
    pub overlaps: BTreeMap<(usize, usize), f64>,
    /// The subset of pairs that touch padding registers.
    pub padded_pairs: BTreeSet<(usize, usize)>,
}

/// Computes every pairwise overlap from one exact simulation.
///
/// Accepts either a full swap-test circuit or a bare pairing circuit (the
/// test section is added automatically). The circuit's labeling must be
/// complete; the overlap of each pair is read off its labels via
/// `2^(d+1) * p(0, b) - 1`, and duplicate labels must agree within
/// [`ANALYTIC_TOL`] — a disagreement means the circuit does not implement
/// a swap test and is reported as an error.
pub fn exact_overlaps(circuit: &Circuit, states: &InputStates) -> Result<ExactOverlaps> {
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
    let sv = run(&full, states)?;
    let dist = ancilla_distribution(&sv);
    overlaps_from_distribution(&dist, &table)
}

/// Shared inversion step: distribution + label table -> per-pair overlaps.
pub(crate) fn overlaps_from_distribution(
    dist: &AncillaDistribution,
    table: &LabelTable,
) -> Result<ExactOverlaps> {
    let scale = (2.0f64).powi(table.d() as i32 + 1);
    let mut overlaps = BTreeMap::new();
    let mut padded_pairs = BTreeSet::new();
    for (&pair, labels) in table.labels() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &b in labels {
            let value = scale * dist.p(0, b) - 1.0;
            lo = lo.min(value);
            hi = hi.max(value);
            sum += value;
        }
        if hi - lo > ANALYTIC_TOL {
            return Err(Error::DuplicateLabelMismatch {
                pair,
                spread: hi - lo,
            });
        }
        overlaps.insert(pair, sum / labels.len() as f64);
        if table.is_padded_pair(pair) {
            padded_pairs.insert(pair);
        }
    }
    Ok(ExactOverlaps {
        overlaps,
        padded_pairs,
    })
}

/// The direct oracle: `|<phi_i|phi_j>|^2` straight from the vectors.
pub fn direct_overlaps(states: &InputStates) -> BTreeMap<(usize, usize), f64> {
    let m = states.len();
    let mut out = BTreeMap::new();
    for i in 0..m {
        for j in (i + 1)..m {
            let inner: Complex64 = states.states[i]
                .iter()
                .zip(&states.states[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            out.insert((i, j), inner.norm_sqr());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{build_pairing, build_swap_test, Strategy};
    use crate::rng::rng_from;

    fn assert_close(a: f64, b: f64, what: &str) {
        assert!((a - b).abs() <= ANALYTIC_TOL, "{what}: {a} vs {b}");
    }

    #[test]
    fn prepare_input_places_basis_products_at_single_indices() {
        // m=2, q=1, both |0>: amplitude 1 at global index 0.
        let layout = Layout::new(2, 1, 0, true).unwrap();
        let states = InputStates::basis(1, &[0, 0]).unwrap();
        let sv = prepare_input(&states, &layout).unwrap();
        assert_eq!(sv.amps.len(), 8);
        assert_close(sv.amps[0].re, 1.0, "all-zeros amplitude");
        assert_close(sv.norm_sqr(), 1.0, "norm");

        // m=4, q=1, |1,0,1,1>: register 1 is the most significant bit.
        let layout = Layout::new(4, 1, 0, false).unwrap();
        let states = InputStates::basis(1, &[1, 0, 1, 1]).unwrap();
        let sv = prepare_input(&states, &layout).unwrap();
        let expected = 0b1011;
        for (i, a) in sv.amps.iter().enumerate() {
            assert_close(a.norm_sqr(), f64::from(u8::from(i == expected)), "amp");
        }
    }

    #[test]
    fn prepare_input_rejects_bad_states() {
        let layout = Layout::new(2, 1, 0, false).unwrap();
        let wrong_count = InputStates::basis(1, &[0]).unwrap();
        assert!(prepare_input(&wrong_count, &layout).is_err());

        let wrong_q = InputStates::basis(2, &[0, 0]).unwrap();
        assert!(prepare_input(&wrong_q, &layout).is_err());

        let unnormalized = InputStates::new(
            1,
            vec![vec![Complex64::new(0.5, 0.0), Complex64::ZERO]; 2],
        );
        assert!(matches!(unnormalized, Err(Error::InvalidStates(msg)) if msg.contains("normalized")));
    }

    #[test]
    fn hadamard_and_cswap_act_as_defined() {
        // H on the single ancilla of a basis product.
        let layout = Layout::new(2, 1, 1, false).unwrap();
        let states = InputStates::basis(1, &[0, 1]).unwrap();
        let mut sv = prepare_input(&states, &layout).unwrap();
        apply_gate(&mut sv, &Gate::H { a: 0 }).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Register block value is 0b01; ancilla contributes bit 2.
        assert_close(sv.amps[0b001].re, s, "ancilla 0 branch");
        assert_close(sv.amps[0b101].re, s, "ancilla 1 branch");

        // CSWAP moves only the control-1 branch: r1<->r2 there.
        apply_gate(&mut sv, &Gate::CSwap { a: 0, x: 0, y: 1 }).unwrap();
        assert_close(sv.amps[0b001].re, s, "control-0 branch untouched");
        assert_close(sv.amps[0b110].re, s, "control-1 branch swapped");
        assert_close(sv.amps[0b101].norm_sqr(), 0.0, "old branch emptied");
    }

    #[test]
    fn two_state_test_reproduces_the_textbook_probabilities() {
        let circuit = build_swap_test(2, 1, &Strategy::MiddleSplit).unwrap();

        // Identical states: p0 = 1.
        let same = InputStates::basis(1, &[1, 1]).unwrap();
        let dist = ancilla_distribution(&run(&circuit, &same).unwrap());
        assert_close(dist.p(0, 0), 1.0, "identical p0");
        assert_close(dist.p(1, 0), 0.0, "identical p1");

        // Orthogonal states: p0 = 1/2.
        let ortho = InputStates::basis(1, &[0, 1]).unwrap();
        let dist = ancilla_distribution(&run(&circuit, &ortho).unwrap());
        assert_close(dist.p(0, 0), 0.5, "orthogonal p0");
        assert_close(dist.p_test0(), 0.5, "orthogonal marginal");

        // Haar states: p0 = (1 + overlap) / 2.
        let mut rng = rng_from(11);
        for _ in 0..10 {
            let states = haar_random(2, 1, &mut rng);
            let overlap = direct_overlaps(&states)[&(0, 1)];
            let dist = ancilla_distribution(&run(&circuit, &states).unwrap());
            assert_close(dist.p(0, 0), (1.0 + overlap) / 2.0, "haar p0");
            assert_close(dist.total(), 1.0, "haar total");
        }
    }

    #[test]
    fn identical_inputs_spread_the_law_uniformly() {
        // Four identical states: every (0, bits) entry is exactly
        // 1/2^(d+1) * (1 + 1) = 1/8, every (1, bits) entry 0.
        let circuit = build_swap_test(4, 1, &Strategy::MiddleSplit).unwrap();
        let states = InputStates::basis(1, &[1, 1, 1, 1]).unwrap();
        let dist = ancilla_distribution(&run(&circuit, &states).unwrap());
        assert_eq!(dist.probs.len(), 16);
        for bits in 0..8 {
            assert_close(dist.p(0, bits), 0.125, "p0 entry");
            assert_close(dist.p(1, bits), 0.0, "p1 entry");
        }
    }

    #[test]
    fn the_measurement_law_holds_per_label_with_shared_ancillas() {
        // m=5 exercises the odd split (3+2) with ancilla sharing.
        let circuit = build_swap_test(5, 1, &Strategy::MiddleSplit).unwrap();
        let d = circuit.layout.d;
        let table = label_table(&circuit.pairing_part()).unwrap();
        let mut rng = rng_from(23);
        for _ in 0..5 {
            let states = haar_random(5, 1, &mut rng);
            let truth = direct_overlaps(&states);
            let dist = ancilla_distribution(&run(&circuit, &states).unwrap());
            let unit = (0.5f64).powi(d as i32);
            for bits in 0..(1u64 << d) {
                let (i, j) = table.pair_at(bits);
                let pair = (i.min(j), i.max(j));
                assert_close(dist.p(0, bits) + dist.p(1, bits), unit, "sum law");
                assert_close(
                    dist.p(0, bits) - dist.p(1, bits),
                    truth[&pair] * unit,
                    "difference law",
                );
            }
        }
    }

    #[test]
    fn exact_overlaps_match_the_direct_oracle() {
        let circuit = build_swap_test(8, 1, &Strategy::MiddleSplit).unwrap();
        let mut rng = rng_from(5);
        let states = haar_random(8, 1, &mut rng);
        let truth = direct_overlaps(&states);
        let got = exact_overlaps(&circuit, &states).unwrap();
        assert_eq!(got.overlaps.len(), 28);
        assert!(got.padded_pairs.is_empty());
        for (pair, &value) in &got.overlaps {
            assert_close(value, truth[pair], "overlap");
        }

        // The pairing circuit alone works too (test section auto-added).
        let pairing = build_pairing(8, 1, &Strategy::MiddleSplit).unwrap();
        let again = exact_overlaps(&pairing, &states).unwrap();
        assert_eq!(again, got);
    }

    #[test]
    fn exact_overlaps_extremes() {
        let circuit = build_swap_test(4, 2, &Strategy::MiddleSplit).unwrap();
        let same = InputStates::basis(2, &[3, 3, 3, 3]).unwrap();
        for &v in exact_overlaps(&circuit, &same).unwrap().overlaps.values() {
            assert_close(v, 1.0, "identical overlap");
        }
        let ortho = InputStates::basis(2, &[0, 1, 2, 3]).unwrap();
        for &v in exact_overlaps(&circuit, &ortho).unwrap().overlaps.values() {
            assert_close(v, 0.0, "orthogonal overlap");
        }
    }

    #[test]
    fn padding_is_simulated_and_flagged() {
        let circuit = build_swap_test(3, 1, &Strategy::PadToPowerOfTwo).unwrap();
        assert_eq!(circuit.layout.m, 4);
        let mut rng = rng_from(9);
        let states = haar_random(3, 1, &mut rng);
        let got = exact_overlaps(&circuit, &states).unwrap();
        assert_eq!(got.overlaps.len(), 6);
        assert_eq!(
            got.padded_pairs,
            BTreeSet::from([(0, 3), (1, 3), (2, 3)])
        );
        // Padded-pair overlaps are against |0>: |<phi_i|0>|^2.
        for i in 0..3 {
            let expected = states.states[i][0].norm_sqr();
            assert_close(got.overlaps[&(i, 3)], expected, "padded overlap");
        }
        // Passing all four states explicitly is equivalent.
        let mut all = states.states.clone();
        all.push(vec![Complex64::ONE, Complex64::ZERO]);
        let explicit = InputStates::new(1, all).unwrap();
        assert_eq!(exact_overlaps(&circuit, &explicit).unwrap(), got);
        // A count matching neither real nor padded m is rejected.
        let five = haar_random(5, 1, &mut rng);
        assert!(run(&circuit, &five).is_err());
    }

    #[test]
    fn incomplete_circuits_are_reported_with_missing_pairs() {
        // A three-register circuit with a single CSWAP misses pair {1,3}.
        let mut c = Circuit::new(Layout::new(3, 1, 1, false).unwrap());
        c.append(Gate::H { a: 0 }).unwrap();
        c.append(Gate::CSwap { a: 0, x: 0, y: 2 }).unwrap();
        let states = InputStates::basis(1, &[0, 0, 0]).unwrap();
        match exact_overlaps(&c, &states) {
            Err(Error::IncompleteLabeling { missing }) => {
                assert_eq!(missing, vec![(0, 2)])
            }
            other => panic!("expected incomplete labeling, got {other:?}"),
        }
    }

    #[test]
    fn oversized_layouts_are_refused() {
        let layout = Layout::new(2, 14, 0, false).unwrap(); // 28 qubits
        let states = InputStates::basis(14, &[0, 0]).unwrap();
        assert!(matches!(
            prepare_input(&states, &layout),
            Err(Error::InvalidArgument(msg)) if msg.contains("cap")
        ));
    }
}
