//! Classical label analysis of pairing circuits.
//!
//! Conditioned on the pairing ancillas reading a basis bitstring `b`, a
//! pairing circuit acts on the registers as a plain permutation: every
//! CSWAP whose control bit is 1 contributes the transposition of its two
//! targets, composed in gate order. Hadamards only create the superposition
//! over branches and are ignored here. This module enumerates those
//! permutations to answer the questions that matter downstream: which pair
//! of inputs does branch `b` park on registers 1 and 2 (the *label table*),
//! how many distinct pairs are reached (*coverage*), and is every pair
//! reached (*completeness*)?
//!
//! Bitstring convention: bit `k` of a label value corresponds to ancilla
//! `a_(k+1)`, so `a_1` is least significant. [`BitString`] prints the most
//! significant end first, i.e. `a_d ... a_1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};

/// Enumeration refuses circuits with more pairing ancillas than this:
/// coverage must stay an exact computation, never a sampled one.
pub const ENUMERATION_CAP: usize = 24;

/// A fixed-length ancilla bitstring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    value: u64,
    len: usize,
}

impl BitString {
    /// Builds a bitstring of `len` bits from its integer value.
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len > 64 {
            return Err(Error::InvalidArgument(format!(
                "bitstring length {len} exceeds 64"
            )));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(BitString { value, len })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Bit for ancilla index `k` (0-based, so `k = 0` is `a_1`).
    pub fn bit(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.value >> k) & 1 == 1
    }
}

impl fmt::Display for BitString {
    /// Prints `a_d ... a_1`; the empty bitstring prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return write!(f, "-");
        }
        for k in (0..self.len).rev() {
            write!(f, "{}", u8::from(self.bit(k)))?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    /// Parses the [`fmt::Display`] form: `a_d ... a_1`, or `-` for empty.
    fn from_str(s: &str) -> Result<Self> {
        if s == "-" {
            return BitString::new(0, 0);
        }
        let mut value = 0u64;
        let mut len = 0usize;
        for ch in s.chars() {
            let bit = match ch {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "invalid bitstring character {ch:?}"
                    )))
                }
            };
            if len == 64 {
                return Err(Error::InvalidArgument(
                    "bitstring longer than 64 bits".to_owned(),
                ));
            }
            value = (value << 1) | bit;
            len += 1;
        }
        BitString::new(value, len)
    }
}

/// Which input sits in which register after one branch of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// `map[r]` is the 0-based input index currently held by register `r`.
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(m: usize) -> Self {
        Permutation {
            map: (0..m).collect(),
        }
    }

    /// Register contents, 0-based input indices.
    pub fn contents(&self) -> &[usize] {
        &self.map
    }

    /// Register contents as 1-based input indices (display form).
    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|i| i + 1).collect()
    }

    fn swap(&mut self, x: usize, y: usize) {
        self.map.swap(x, y);
    }
}

/// Extracts the `(ancilla, x, y)` triples of a pairing circuit's CSWAPs,
/// rejecting circuits that contain test-section gates.
fn pairing_swaps(circuit: &Circuit) -> Result<Vec<(usize, usize, usize)>> {
    let mut swaps = Vec::new();
    for gate in &circuit.gates {
        match *gate {
            Gate::H { .. } => {}
            Gate::CSwap { a, x, y } => swaps.push((a, x, y)),
            Gate::CSwapTest { .. } | Gate::HTest => return Err(Error::TestGatesPresent),
        }
    }
    Ok(swaps)
}

/// The register permutation of one ancilla branch.
///
/// Composes, in gate order, the transposition of each CSWAP whose control
/// bit in `bits` is 1. Hadamards are ignored (classical conditioning).
pub fn permutation_for(circuit: &Circuit, bits: BitString) -> Result<Permutation> {
    circuit.check()?;
    if bits.len() != circuit.layout.d {
        return Err(Error::WrongBitLength {
            expected: circuit.layout.d,
            got: bits.len(),
        });
    }
    let swaps = pairing_swaps(circuit)?;
    let mut perm = Permutation::identity(circuit.layout.m);
    for (a, x, y) in swaps {
        if bits.bit(a) {
            perm.swap(x, y);
        }
    }
    Ok(perm)
}

/// The full branch-to-pair map of a pairing circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    m: usize,
    real_m: usize,
    d: usize,
    /// Indexed by bitstring value: ordered (register 1, register 2) contents.
    entries: Vec<(u32, u32)>,
    /// Unordered pair (i < j, 0-based) to the ascending label values that
    /// reach it.
    labels: BTreeMap<(usize, usize), Vec<u64>>,
}

impl LabelTable {
    /// Number of registers, including padding.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of registers carrying caller states.
    pub fn real_m(&self) -> usize {
        self.real_m
    }

    /// Pairing-ancilla count; the table has `2^d` entries.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Ordered contents of registers 1 and 2 in branch `bits` (0-based).
    pub fn pair_at(&self, bits: u64) -> (usize, usize) {
        let (i, j) = self.entries[bits as usize];
        (i as usize, j as usize)
    }

    /// All `(bitstring, ordered pair)` entries in ascending value order.
    pub fn iter(&self) -> impl Iterator<Item = (BitString, (usize, usize))> + '_ {
        self.entries.iter().enumerate().map(move |(v, &(i, j))| {
            let bits = BitString::new(v as u64, self.d).expect("entry index fits d bits");
            (bits, (i as usize, j as usize))
        })
    }

    /// Unordered pair (i < j) to ascending label values.
    pub fn labels(&self) -> &BTreeMap<(usize, usize), Vec<u64>> {
        &self.labels
    }

    /// Pairs reached by two or more labels.
    pub fn duplicate_groups(&self) -> impl Iterator<Item = ((usize, usize), &[u64])> {
        self.labels
            .iter()
            .filter(|(_, v)| v.len() > 1)
            .map(|(&p, v)| (p, v.as_slice()))
    }

    /// True if the pair touches a padding register.
    pub fn is_padded_pair(&self, pair: (usize, usize)) -> bool {
        pair.0 >= self.real_m || pair.1 >= self.real_m
    }

    /// Number of distinct unordered *real* pairs reached (padding excluded).
    pub fn coverage(&self) -> usize {
        self.labels
            .keys()
            .filter(|&&p| !self.is_padded_pair(p))
            .count()
    }

    /// Real pairs a complete table must reach: `real_m (real_m - 1) / 2`.
    pub fn total_real_pairs(&self) -> usize {
        self.real_m * (self.real_m - 1) / 2
    }

    /// True iff every real pair is reached by at least one label.
    pub fn is_complete(&self) -> bool {
        self.coverage() == self.total_real_pairs()
    }

    /// Real pairs no label reaches, ascending.
    pub fn missing_pairs(&self) -> Vec<(usize, usize)> {
        let mut missing = Vec::new();
        for i in 0..self.real_m {
            for j in (i + 1)..self.real_m {
                if !self.labels.contains_key(&(i, j)) {
                    missing.push((i, j));
                }
            }
        }
        missing
    }
}

/// Enumerates all `2^d` branches of a pairing circuit.
///
/// Fails on circuits with test-section gates and on `d` beyond
/// [`ENUMERATION_CAP`].
pub fn label_table(circuit: &Circuit) -> Result<LabelTable> {
    circuit.check()?;
    let d = circuit.layout.d;
    if d > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            d,
            cap: ENUMERATION_CAP,
        });
    }
    let swaps = pairing_swaps(circuit)?;
    let m = circuit.layout.m;

    let mut entries = Vec::with_capacity(1usize << d);
    let mut labels: BTreeMap<(usize, usize), Vec<u64>> = BTreeMap::new();
    let mut perm: Vec<usize> = (0..m).collect();
    for bits in 0..(1u64 << d) {
        for (r, slot) in perm.iter_mut().enumerate() {
            *slot = r;
        }
        for &(a, x, y) in &swaps {
            if (bits >> a) & 1 == 1 {
                perm.swap(x, y);
            }
        }
        let (i, j) = (perm[0], perm[1]);
        entries.push((i as u32, j as u32));
        let key = (i.min(j), i.max(j));
        labels.entry(key).or_default().push(bits);
    }

    Ok(LabelTable {
        m,
        real_m: circuit.real_m(),
        d,
        entries,
        labels,
    })
}

/// Number of distinct unordered real pairs the circuit's labels reach.
pub fn coverage(circuit: &Circuit) -> Result<usize> {
    Ok(label_table(circuit)?.coverage())
}

/// True iff the circuit labels every unordered pair of real inputs.
pub fn is_complete(circuit: &Circuit) -> Result<bool> {
    Ok(label_table(circuit)?.is_complete())
}
