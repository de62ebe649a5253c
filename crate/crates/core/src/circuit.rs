//! Circuit intermediate representation: qubit layout, gates, validation.
//!
//! A circuit acts on `m` state registers of `q` qubits each, `d` pairing
//! ancillas, and optionally one test ancilla. The global basis ordering is
//! fixed once and for all so that bitstring labels are reproducible:
//!
//! ```text
//! | test | a_d ... a_1 | register 1 | register 2 | ... | register m |
//!   MSB                                                          LSB
//! ```
//!
//! Counting bit positions from the least significant end of a basis index:
//! register `r` (1-based) occupies bits `[(m-r)q, (m-r+1)q)`, pairing
//! ancilla `a_k` sits at bit `mq + (k-1)` (so `a_1` is the lowest ancilla
//! bit), and the test ancilla, when present, at bit `mq + d`.
//!
//! All indices in this API are 0-based. The text format and every
//! user-facing message use the 1-based names `r1`, `a1`, ... shown above.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Register and ancilla geometry of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Layout {
    /// Number of state registers (at least 2).
    pub m: usize,
    /// Qubits per state register (at least 1).
    pub q: usize,
    /// Number of pairing ancillas.
    pub d: usize,
    /// Whether one test ancilla sits above the pairing block.
    pub has_test_ancilla: bool,
}

impl Layout {
    /// Builds a layout, rejecting out-of-range parameters.
    pub fn new(m: usize, q: usize, d: usize, has_test_ancilla: bool) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidLayout {
                field: "m",
                message: format!("must be at least 2, got {m}"),
            });
        }
        if q < 1 {
            return Err(Error::InvalidLayout {
                field: "q",
                message: "must be at least 1, got 0".to_owned(),
            });
        }
        Ok(Layout {
            m,
            q,
            d,
            has_test_ancilla,
        })
    }

    /// Total qubit count: `m*q + d` plus the test ancilla if present.
    pub fn total_qubits(&self) -> usize {
        self.m * self.q + self.d + usize::from(self.has_test_ancilla)
    }

    /// Lowest bit position of register `r` (0-based register index).
    ///
    /// Register 0 is the *most* significant register block.
    pub fn register_low_bit(&self, r: usize) -> usize {
        debug_assert!(r < self.m);
        (self.m - 1 - r) * self.q
    }

    /// Bit position of pairing ancilla `a` (0-based; `a = 0` is `a_1`).
    pub fn ancilla_bit(&self, a: usize) -> usize {
        debug_assert!(a < self.d);
        self.m * self.q + a
    }

    /// Bit position of the test ancilla.
    pub fn test_bit(&self) -> usize {
        debug_assert!(self.has_test_ancilla);
        self.m * self.q + self.d
    }

    /// Number of unordered register pairs, `m(m-1)/2`.
    pub fn pair_count(&self) -> usize {
        self.m * (self.m - 1) / 2
    }

    fn check_fields(&self) -> Result<()> {
        // Re-validate on use: fields are public and may have been edited.
        Self::new(self.m, self.q, self.d, self.has_test_ancilla).map(|_| ())
    }
}

/// A single gate. Register and ancilla indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    /// Hadamard on pairing ancilla `a`.
    H { a: usize },
    /// Swap registers `x` and `y` when pairing ancilla `a` is |1>.
    CSwap { a: usize, x: usize, y: usize },
    /// Swap registers `x` and `y` when the test ancilla is |1>.
    CSwapTest { x: usize, y: usize },
    /// Hadamard on the test ancilla.
    HTest,
}

impl Gate {
    /// True for the two gates that act on the test ancilla.
    pub fn is_test_gate(&self) -> bool {
        matches!(self, Gate::CSwapTest { .. } | Gate::HTest)
    }

    /// Checks this gate against a layout.
    pub fn check(&self, layout: &Layout) -> Result<()> {
        let reg = |r: usize, what: &str| -> Result<()> {
            if r >= layout.m {
                Err(Error::InvalidGate(format!(
                    "{what} register r{} out of range (m = {})",
                    r + 1,
                    layout.m
                )))
            } else {
                Ok(())
            }
        };
        match *self {
            Gate::H { a } => {
                if a >= layout.d {
                    return Err(Error::InvalidGate(format!(
                        "ancilla a{} out of range (d = {})",
                        a + 1,
                        layout.d
                    )));
                }
            }
            Gate::CSwap { a, x, y } => {
                if a >= layout.d {
                    return Err(Error::InvalidGate(format!(
                        "control ancilla a{} out of range (d = {})",
                        a + 1,
                        layout.d
                    )));
                }
                reg(x, "target")?;
                reg(y, "target")?;
                if x == y {
                    return Err(Error::InvalidGate(format!("equal targets r{}", x + 1)));
                }
            }
            Gate::CSwapTest { x, y } => {
                if !layout.has_test_ancilla {
                    return Err(Error::InvalidGate(
                        "CSWAPT requires a test ancilla".to_owned(),
                    ));
                }
                reg(x, "target")?;
                reg(y, "target")?;
                if x == y {
                    return Err(Error::InvalidGate(format!("equal targets r{}", x + 1)));
                }
            }
            Gate::HTest => {
                if !layout.has_test_ancilla {
                    return Err(Error::InvalidGate(
                        "HT requires a test ancilla".to_owned(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A structural problem reported by [`Circuit::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Index into `gates`, or `None` for layout-level problems.
    pub gate: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.gate {
            Some(i) => write!(f, "gate {}: {}", i + 1, self.message),
            None => write!(f, "layout: {}", self.message),
        }
    }
}

/// An ordered gate sequence over a fixed layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub layout: Layout,
    pub gates: Vec<Gate>,
    /// Trailing registers that hold |0...0> padding instead of caller
    /// states. Always 0 except for circuits built by the padding strategy.
    pub padded: usize,
}

impl Circuit {
    /// Empty circuit (the identity) over a layout.
    pub fn new(layout: Layout) -> Self {
        Circuit {
            layout,
            gates: Vec::new(),
            padded: 0,
        }
    }

    /// Appends one gate, rejecting it if it does not fit the layout.
    pub fn append(&mut self, gate: Gate) -> Result<()> {
        gate.check(&self.layout)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Number of registers carrying caller states (excludes padding).
    pub fn real_m(&self) -> usize {
        self.layout.m - self.padded
    }

    /// Number of pairing CSWAP gates (test-section gates not included).
    pub fn cswap_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::CSwap { .. }))
            .count()
    }

    /// True if the circuit contains any test-ancilla gate.
    pub fn has_test_section(&self) -> bool {
        self.gates.iter().any(Gate::is_test_gate)
    }

    /// The pairing part: same registers and ancillas, test ancilla and
    /// test-section gates dropped.
    pub fn pairing_part(&self) -> Circuit {
        Circuit {
            layout: Layout {
                has_test_ancilla: false,
                ..self.layout
            },
            gates: self
                .gates
                .iter()
                .copied()
                .filter(|g| !g.is_test_gate())
                .collect(),
            padded: self.padded,
        }
    }

    /// Exhaustive structural check; an empty list means the circuit is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(e) = self.layout.check_fields() {
            out.push(Violation {
                gate: None,
                message: e.to_string(),
            });
        }
        if self.padded + 2 > self.layout.m {
            out.push(Violation {
                gate: None,
                message: format!(
                    "padding {} leaves fewer than two real registers (m = {})",
                    self.padded, self.layout.m
                ),
            });
        }
        for (i, gate) in self.gates.iter().enumerate() {
            if let Err(e) = gate.check(&self.layout) {
                out.push(Violation {
                    gate: Some(i),
                    message: e.to_string(),
                });
            }
        }
        out
    }

    /// Like [`Circuit::validate`] but returns the first problem as an error.
    pub fn check(&self) -> Result<()> {
        match self.validate().into_iter().next() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidCircuit(v.to_string())),
        }
    }
}
