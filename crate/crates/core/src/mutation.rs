//! Single-gate faults appended after the program, before measurement.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::programs::Circuit;
use crate::statevector::Gate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MutationOp {
    X,
    Z,
    Ry,
}

impl MutationOp {
    pub const ALL: [MutationOp; 3] = [MutationOp::X, MutationOp::Z, MutationOp::Ry];

    pub fn symbol(&self) -> &'static str {
        match self {
            MutationOp::X => "x",
            MutationOp::Z => "z",
            MutationOp::Ry => "ry",
        }
    }
}

impl fmt::Display for MutationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutationOp::X => "X",
            MutationOp::Z => "Z",
            MutationOp::Ry => "RY",
        })
    }
}

impl FromStr for MutationOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(MutationOp::X),
            "z" => Ok(MutationOp::Z),
            "ry" => Ok(MutationOp::Ry),
            _ => Err(Error::InvalidArgument(format!("unknown mutation operator {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mutant {
    pub operator: MutationOp,
    pub qubit: usize,
    /// Rotation angle, only set for `Ry`.
    pub theta: Option<f64>,
    pub id: String,
}

impl Mutant {
    pub fn new(operator: MutationOp, index: usize, qubit: usize, theta: Option<f64>) -> Result<Self> {
        match (operator, theta) {
            (MutationOp::Ry, Some(t)) if t > 0.0 && t < TAU => {}
            (MutationOp::Ry, _) => {
                return Err(Error::InvalidArgument("ry mutants need theta in (0, 2pi)".into()));
            }
            (_, Some(_)) => return Err(Error::InvalidArgument("only ry mutants take an angle".into())),
            _ => {}
        }
        let mut id = format!("{}{index}-q{qubit}", operator.symbol());
        if let Some(t) = theta {
            id.push_str(&format!("-t{t:.6}"));
        }
        Ok(Mutant {
            operator,
            qubit,
            theta,
            id,
        })
    }

    pub fn gate(&self) -> Gate {
        match self.operator {
            MutationOp::X => Gate::X(self.qubit),
            MutationOp::Z => Gate::Z(self.qubit),
            MutationOp::Ry => Gate::Ry {
                theta: self.theta.expect("ry mutant has an angle"),
                qubit: self.qubit,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MutantSuite {
    pub program_id: String,
    pub mutants: Vec<Mutant>,
}

impl MutantSuite {
    pub fn count(&self, op: MutationOp) -> usize {
        self.mutants.iter().filter(|m| m.operator == op).count()
    }
}

/// Draws `per_op` mutants for each operator, qubits uniform in `[0, n)` and
/// Ry angles uniform in `(0, 2pi)` and pairwise distinct.
pub fn generate_suite<R: Rng + ?Sized>(
    program_id: &str,
    circuit: &Circuit,
    per_op: usize,
    rng: &mut R,
) -> Result<MutantSuite> {
    if per_op == 0 {
        return Err(Error::InvalidArgument("per_op must be at least 1".into()));
    }
    let n = circuit.num_qubits();
    let mut mutants = Vec::with_capacity(3 * per_op);
    let mut thetas: Vec<f64> = Vec::with_capacity(per_op);
    for op in MutationOp::ALL {
        for index in 0..per_op {
            let qubit = rng.random_range(0..n);
            let theta = match op {
                MutationOp::Ry => loop {
                    let t = rng.random_range(0.0..TAU);
                    if t > 0.0 && !thetas.contains(&t) {
                        thetas.push(t);
                        break Some(t);
                    }
                },
                _ => None,
            };
            mutants.push(Mutant::new(op, index, qubit, theta)?);
        }
    }
    Ok(MutantSuite {
        program_id: program_id.to_string(),
        mutants,
    })
}

/// Copy of `circuit` with the mutant's gate appended last.
pub fn apply_mutant(circuit: &Circuit, mutant: &Mutant) -> Result<Circuit> {
    let mut out = circuit.clone();
    out.push(mutant.gate())?;
    Ok(out)
}

pub fn mutation_score(killed: usize, total: usize) -> Result<f64> {
    if total == 0 {
        return Err(Error::InvalidArgument("mutation score of an empty suite".into()));
    }
    if killed > total {
        return Err(Error::InvalidArgument(format!("{killed} killed out of {total}")));
    }
    Ok(100.0 * killed as f64 / total as f64)
}
