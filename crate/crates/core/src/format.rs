//! Plain-text circuit format.
//!
//! ```text
//! # comments and blank lines are allowed anywhere
//! mswap circuit v1
//! m 4
//! q 1
//! d 3
//! test 1
//! padded 0
//! H a1
//! H a2
//! H a3
//! CSWAP a1 r1 r3
//! CSWAP a2 r1 r4
//! CSWAP a3 r2 r3
//! HT
//! CSWAPT r1 r2
//! HT
//! ```
//!
//! The five header lines are required, in that order, before any gate.
//! Registers (`r1`...) and ancillas (`a1`...) are 1-based on disk; `a1` is
//! the least significant bit of printed label bitstrings. A `#` starts a
//! comment that runs to the end of the line. Serialization followed by
//! parsing reproduces the circuit exactly, gate for gate.

use crate::circuit::{Circuit, Gate, Layout};
use crate::error::{Error, Result};

/// First significant line of every circuit file.
pub const CIRCUIT_FORMAT: &str = "mswap circuit v1";

/// Renders a circuit in the text format (no trailing comment block).
pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str(CIRCUIT_FORMAT);
    out.push('\n');
    let l = &circuit.layout;
    out.push_str(&format!("m {}\n", l.m));
    out.push_str(&format!("q {}\n", l.q));
    out.push_str(&format!("d {}\n", l.d));
    out.push_str(&format!("test {}\n", u8::from(l.has_test_ancilla)));
    out.push_str(&format!("padded {}\n", circuit.padded));
    for gate in &circuit.gates {
        match *gate {
            Gate::H { a } => out.push_str(&format!("H a{}\n", a + 1)),
            Gate::CSwap { a, x, y } => {
                out.push_str(&format!("CSWAP a{} r{} r{}\n", a + 1, x + 1, y + 1))
            }
            Gate::CSwapTest { x, y } => {
                out.push_str(&format!("CSWAPT r{} r{}\n", x + 1, y + 1))
            }
            Gate::HTest => out.push_str("HT\n"),
        }
    }
    out
}

/// Parses the text format, reporting errors with their 1-based line number.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = significant_lines(text);

    let (line, version) = lines
        .next()
        .ok_or_else(|| err(1, "empty file, expected format line"))?;
    if version != CIRCUIT_FORMAT {
        return Err(err(
            line,
            format!("unsupported format line {version:?}, expected {CIRCUIT_FORMAT:?}"),
        ));
    }

    let mut header = |key: &str| -> Result<(usize, usize)> {
        let (line, text) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing header line {key:?}")))?;
        let value = text
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| err(line, format!("expected {key:?} header, got {text:?}")))?
            .trim();
        let value = value
            .parse::<usize>()
            .map_err(|_| err(line, format!("bad {key} value {value:?}")))?;
        Ok((line, value))
    };
    let m = header("m")?.1;
    let q = header("q")?.1;
    let d = header("d")?.1;
    let (test_line, test) = header("test")?;
    if test > 1 {
        return Err(err(test_line, format!("test must be 0 or 1, got {test}")));
    }
    let (padded_line, padded) = header("padded")?;

    let layout = Layout::new(m, q, d, test == 1).map_err(|e| err(test_line, e.to_string()))?;
    let mut circuit = Circuit::new(layout);
    circuit.padded = padded;
    if padded + 2 > m {
        return Err(err(
            padded_line,
            format!("padding {padded} leaves fewer than two real registers (m = {m})"),
        ));
    }

    for (line, text) in lines {
        let gate = parse_gate(line, text)?;
        circuit
            .append(gate)
            .map_err(|e| err(line, e.to_string()))?;
    }
    Ok(circuit)
}

/// Lines with comments and surrounding whitespace stripped, skipping empty
/// ones, each tagged with its 1-based line number.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let stripped = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if stripped.is_empty() {
            None
        } else {
            Some((i + 1, stripped))
        }
    })
}

fn parse_gate(line: usize, text: &str) -> Result<Gate> {
    let mut parts = text.split_whitespace();
    let name = parts.next().expect("significant lines are nonempty");
    let gate = match name {
        "H" => Gate::H {
            a: index(line, parts.next(), 'a')?,
        },
        "CSWAP" => Gate::CSwap {
            a: index(line, parts.next(), 'a')?,
            x: index(line, parts.next(), 'r')?,
            y: index(line, parts.next(), 'r')?,
        },
        "CSWAPT" => Gate::CSwapTest {
            x: index(line, parts.next(), 'r')?,
            y: index(line, parts.next(), 'r')?,
        },
        "HT" => Gate::HTest,
        other => return Err(err(line, format!("unknown gate {other:?}"))),
    };
    if let Some(extra) = parts.next() {
        return Err(err(line, format!("unexpected trailing token {extra:?}")));
    }
    Ok(gate)
}

/// Parses a 1-based `a<N>` / `r<N>` operand into a 0-based index.
fn index(line: usize, token: Option<&str>, prefix: char) -> Result<usize> {
    let token = token.ok_or_else(|| err(line, format!("missing {prefix}<N> operand")))?;
    let number = token
        .strip_prefix(prefix)
        .and_then(|rest| rest.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            err(
                line,
                format!("bad operand {token:?}, expected {prefix}<N> with N >= 1"),
            )
        })?;
    Ok(number - 1)
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairing::{build_swap_test, Strategy};

    #[test]
    fn round_trips_the_eight_state_swap_test() {
        let circuit = build_swap_test(8, 1, &Strategy::MiddleSplit).unwrap();
        let text = serialize_circuit(&circuit);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, circuit);
        assert!(text.starts_with("mswap circuit v1\nm 8\nq 1\nd 6\ntest 1\npadded 0\n"));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "\
# leading comment
mswap circuit v1

m 2
q 1   # register width
d 0
test 1
padded 0
HT
CSWAPT r1 r2
HT
# trailing comment
";
        let circuit = parse_circuit(text).unwrap();
        assert_eq!(circuit.gates.len(), 3);
        assert_eq!(circuit.gates[1], Gate::CSwapTest { x: 0, y: 1 });
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_gate = "mswap circuit v1\nm 2\nq 1\nd 1\ntest 0\npadded 0\nH b1\n";
        match parse_circuit(bad_gate) {
            Err(Error::Parse { line: 7, message }) => assert!(message.contains("bad operand")),
            other => panic!("expected parse error on line 7, got {other:?}"),
        }

        let out_of_range = "mswap circuit v1\nm 2\nq 1\nd 1\ntest 0\npadded 0\nCSWAP a1 r1 r3\n";
        match parse_circuit(out_of_range) {
            Err(Error::Parse { line: 7, message }) => {
                assert!(message.contains("out of range"), "{message}")
            }
            other => panic!("expected parse error on line 7, got {other:?}"),
        }

        let bad_version = "mswap circuit v2\nm 2\n";
        assert!(matches!(
            parse_circuit(bad_version),
            Err(Error::Parse { line: 1, .. })
        ));

        let missing_header = "mswap circuit v1\nm 2\nq 1\ntest 0\n";
        assert!(parse_circuit(missing_header).is_err());

        let trailing = "mswap circuit v1\nm 2\nq 1\nd 0\ntest 1\npadded 0\nHT x\n";
        assert!(matches!(
            parse_circuit(trailing),
            Err(Error::Parse { line: 7, .. })
        ));
    }

    #[test]
    fn one_based_indices_on_disk_map_to_zero_based_in_memory() {
        let text = "mswap circuit v1\nm 4\nq 2\nd 3\ntest 0\npadded 1\nH a3\nCSWAP a1 r2 r4\n";
        let circuit = parse_circuit(text).unwrap();
        assert_eq!(circuit.padded, 1);
        assert_eq!(circuit.gates[0], Gate::H { a: 2 });
        assert_eq!(circuit.gates[1], Gate::CSwap { a: 0, x: 1, y: 3 });
        // r0 / a0 are invalid on disk.
        let zero = "mswap circuit v1\nm 2\nq 1\nd 1\ntest 0\npadded 0\nH a0\n";
        assert!(parse_circuit(zero).is_err());
    }
}
