//! Line-based circuit text format.
//!
//! ```text
//! qubits 2
//! input 2        # optional, defaults to 0
//! h 1
//! cz 0 1
//! ```
//!
//! Gates: `h q`, `x q`, `z q`, `ry theta q`, `cx c t`, `cz a b`,
//! `mcx c1 .. ck t`. A `# label GROV` comment carries the category tag.

use std::fmt::Write as _;

use super::{Category, Circuit};
use crate::error::{Error, Result};
use crate::statevector::Gate;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: line[..s].chars().count() + 1,
        });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::CircuitParse {
        line,
        column,
        message: message.into(),
    }
}

fn int(tok: &Token<'_>, line: usize) -> Result<usize> {
    tok.text
        .parse()
        .map_err(|_| err(line, tok.column, format!("expected a nonnegative integer, found {:?}", tok.text)))
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut num_qubits: Option<usize> = None;
    let mut input = 0;
    let mut label = Category::Custom;
    let mut gates: Vec<(usize, usize, Gate)> = Vec::new();
    let mut seen_gate = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(&raw[p + 1..])),
            None => (raw, None),
        };
        if let Some(comment) = comment {
            let words: Vec<&str> = comment.split_whitespace().collect();
            if let ["label", tag] = words.as_slice() {
                label = tag
                    .parse()
                    .map_err(|_| err(line_no, 1, format!("unknown label {tag:?}")))?;
            }
        }
        let toks = tokens(body);
        let Some(head) = toks.first() else { continue };
        let args = &toks[1..];
        let arity = |want: usize| -> Result<()> {
            if args.len() != want {
                Err(err(
                    line_no,
                    head.column,
                    format!("{} takes {want} argument(s), found {}", head.text, args.len()),
                ))
            } else {
                Ok(())
            }
        };

        if num_qubits.is_none() {
            if head.text != "qubits" {
                return Err(err(line_no, head.column, "expected `qubits <n>` before anything else"));
            }
            arity(1)?;
            let n = int(&args[0], line_no)?;
            if n == 0 || n > crate::statevector::MAX_QUBITS {
                return Err(err(line_no, args[0].column, format!("qubit count {n} out of range")));
            }
            num_qubits = Some(n);
            continue;
        }

        let gate = match head.text {
            "qubits" => return Err(err(line_no, head.column, "duplicate `qubits` line")),
            "input" => {
                if seen_gate {
                    return Err(err(line_no, head.column, "`input` must precede all gates"));
                }
                arity(1)?;
                input = int(&args[0], line_no)?;
                continue;
            }
            "h" | "x" | "z" => {
                arity(1)?;
                let q = int(&args[0], line_no)?;
                match head.text {
                    "h" => Gate::H(q),
                    "x" => Gate::X(q),
                    _ => Gate::Z(q),
                }
            }
            "ry" => {
                arity(2)?;
                let theta: f64 = args[0]
                    .text
                    .parse()
                    .ok()
                    .filter(|t: &f64| t.is_finite())
                    .ok_or_else(|| err(line_no, args[0].column, format!("malformed angle {:?}", args[0].text)))?;
                Gate::Ry {
                    theta,
                    qubit: int(&args[1], line_no)?,
                }
            }
            "cx" | "cz" => {
                arity(2)?;
                let a = int(&args[0], line_no)?;
                let b = int(&args[1], line_no)?;
                if head.text == "cx" {
                    Gate::Cnot { control: a, target: b }
                } else {
                    Gate::Cz(a, b)
                }
            }
            "mcx" => {
                if args.len() < 2 {
                    return Err(err(line_no, head.column, "mcx takes at least 2 arguments"));
                }
                let mut qs = args.iter().map(|t| int(t, line_no)).collect::<Result<Vec<_>>>()?;
                let target = qs.pop().expect("checked length");
                Gate::Mcx { controls: qs, target }
            }
            other => return Err(err(line_no, head.column, format!("unknown gate {other:?}"))),
        };
        seen_gate = true;
        gates.push((line_no, head.column, gate));
    }

    let n = num_qubits.ok_or_else(|| err(1, 1, "missing `qubits <n>` line"))?;
    let mut circuit = Circuit::new(n, input, label).map_err(|e| match e {
        Error::IndexOutOfRange { index, .. } => err(1, 1, format!("input {index} out of range")),
        other => other,
    })?;
    for (line, column, gate) in gates {
        circuit.push(gate).map_err(|e| match e {
            Error::QubitOutOfRange { qubit, .. } => err(line, column, format!("qubit {qubit} out of range")),
            other => err(line, column, other.to_string()),
        })?;
    }
    Ok(circuit)
}

/// Formats with 17 significant digits in plain decimal notation.
fn format_angle(theta: f64) -> String {
    if theta == 0.0 {
        return "0".into();
    }
    let exponent = theta.abs().log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    format!("{theta:.decimals$}")
}

pub fn serialize_circuit(circuit: &Circuit) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", circuit.num_qubits());
    let _ = writeln!(out, "input {}", circuit.input_index());
    for g in circuit.gates() {
        match g {
            Gate::Ry { theta, qubit } => {
                let _ = writeln!(out, "ry {} {qubit}", format_angle(*theta));
            }
            other => {
                out.push_str(other.name());
                for q in other.qubits() {
                    let _ = write!(out, " {q}");
                }
                out.push('\n');
            }
        }
    }
    if circuit.label() != Category::Custom {
        let _ = writeln!(out, "# label {}", circuit.label());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::programs::{gen_grover, gen_quantum_walk, gen_ring_graph_state, GroverIterations, GroverSpec};
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let c = parse_circuit("qubits 2\ninput 2\nh 1\ncz 0 1").unwrap();
        assert_eq!(c.num_qubits(), 2);
        assert_eq!(c.input_index(), 2);
        assert_eq!(c.gates(), &[Gate::H(1), Gate::Cz(0, 1)]);
        assert_eq!(c.label(), Category::Custom);
    }

    #[test]
    fn out_of_range_qubit_reports_line() {
        let e = parse_circuit("qubits 2\nh 5").unwrap_err();
        assert_eq!(
            e,
            Error::CircuitParse {
                line: 2,
                column: 1,
                message: "qubit 5 out of range".into()
            }
        );
    }

    #[test]
    fn error_cases() {
        let cases = [
            ("qubits 2\nfoo 1", 2, 1),
            ("qubits 2\ncz 1", 2, 1),
            ("qubits 2\nry abc 0", 2, 4),
            ("qubits 2\n  x -1", 2, 5),
            ("h 0", 1, 1),
            ("qubits 2\nh 0\ninput 1", 3, 1),
        ];
        for (text, line, column) in cases {
            match parse_circuit(text) {
                Err(Error::CircuitParse { line: l, column: c, .. }) => {
                    assert_eq!((l, c), (line, column), "{text:?}")
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse_circuit("# nothing").is_err());
        assert!(parse_circuit("qubits 2\ninput 4").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_circuit("# header\nqubits 3 # three\n\nmcx 0 1 2 # toffoli\n").unwrap();
        assert_eq!(c.gates(), &[Gate::Mcx { controls: vec![0, 1], target: 2 }]);
    }

    #[test]
    fn generated_round_trip() {
        let circuits = [
            gen_ring_graph_state(3).unwrap(),
            gen_grover(&GroverSpec::new(3, [0, 5], GroverIterations::Fixed(2))).unwrap(),
            gen_quantum_walk(2, 3).unwrap(),
        ];
        for c in circuits {
            assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c);
        }
    }

    #[test]
    fn angle_format_has_17_digits() {
        assert_eq!(format_angle(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_angle(0.001), "0.0010000000000000000");
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (1usize..6).prop_flat_map(|n| {
            let gate = prop_oneof![
                (0..n).prop_map(Gate::H),
                (0..n).prop_map(Gate::X),
                (0..n).prop_map(Gate::Z),
                (0..n, -10.0f64..10.0).prop_map(|(qubit, theta)| Gate::Ry { theta, qubit }),
                (0..n, 0..n).prop_map(|(a, b)| Gate::Cnot { control: a, target: b }),
                (0..n, 0..n).prop_map(|(a, b)| Gate::Cz(a, b)),
                proptest::collection::vec(0..n, 2..5).prop_map(|mut qs| {
                    let target = qs.pop().unwrap();
                    Gate::Mcx { controls: qs, target }
                }),
            ];
            (Just(n), 0..1usize << n, proptest::collection::vec(gate, 0..30))
        })
        .prop_map(|(n, input, gates)| {
            let valid = gates.into_iter().filter(|g| g.validate(n).is_ok()).collect();
            Circuit::with_gates(n, input, Category::Custom, valid).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip(c in arb_circuit()) {
            prop_assert_eq!(parse_circuit(&serialize_circuit(&c)).unwrap(), c);
        }
    }
}
