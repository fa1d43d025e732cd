//! Study-subject circuits: Grover search, ring graph states and discrete
//! quantum walks, plus simulation to a final statevector.

mod text;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::{Gate, Statevector};

pub use text::{parse_circuit, serialize_circuit};

/// Amplitude magnitude outside the marked set at which AUTO Grover stops.
pub const GROVER_RESIDUAL: f64 = 1e-4;

/// AUTO Grover gives up after this many multiples of the analytic optimum.
pub const GROVER_CAP_FACTOR: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "GROV")]
    Grov,
    #[serde(rename = "GS")]
    Gs,
    #[serde(rename = "QWALK")]
    Qwalk,
    #[serde(rename = "CUSTOM")]
    Custom,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Grov => "GROV",
            Category::Gs => "GS",
            Category::Qwalk => "QWALK",
            Category::Custom => "CUSTOM",
        })
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "GROV" => Ok(Category::Grov),
            "GS" => Ok(Category::Gs),
            "QWALK" => Ok(Category::Qwalk),
            "CUSTOM" => Ok(Category::Custom),
            other => Err(Error::InvalidArgument(format!("unknown category {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    input_index: usize,
    label: Category,
}

impl Circuit {
    pub fn new(num_qubits: usize, input_index: usize, label: Category) -> Result<Self> {
        Statevector::basis_state(num_qubits, input_index)?;
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
            input_index,
            label,
        })
    }

    pub fn with_gates(
        num_qubits: usize,
        input_index: usize,
        label: Category,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        let mut c = Circuit::new(num_qubits, input_index, label)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn input_index(&self) -> usize {
        self.input_index
    }

    pub fn label(&self) -> Category {
        self.label
    }

    pub fn set_label(&mut self, label: Category) {
        self.label = label;
    }

    /// Layered depth: each gate sits one layer above the latest gate sharing
    /// any of its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits];
        for g in &self.gates {
            let qs = g.qubits();
            let top = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = top;
            }
        }
        level.into_iter().max().unwrap_or(0)
    }
}

/// Runs the circuit on its input basis state.
pub fn simulate(circuit: &Circuit) -> Result<Statevector> {
    let mut s = Statevector::basis_state(circuit.num_qubits, circuit.input_index)?;
    for g in &circuit.gates {
        s.apply_gate_in_place(g)?;
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroverIterations {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroverSpec {
    pub num_qubits: usize,
    pub marked: BTreeSet<usize>,
    pub iterations: GroverIterations,
}

impl GroverSpec {
    pub fn new(num_qubits: usize, marked: impl IntoIterator<Item = usize>, iterations: GroverIterations) -> Self {
        GroverSpec {
            num_qubits,
            marked: marked.into_iter().collect(),
            iterations,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 || self.num_qubits > crate::statevector::MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "grover needs 2..={} qubits, got {}",
                crate::statevector::MAX_QUBITS,
                self.num_qubits
            )));
        }
        let n_states = 1usize << self.num_qubits;
        if let Some(&m) = self.marked.iter().find(|&&m| m >= n_states) {
            return Err(Error::IndexOutOfRange {
                index: m,
                num_qubits: self.num_qubits,
            });
        }
        optimal_grover_iterations(n_states, self.marked.len()).map(|_| ())
    }
}

/// `round(pi/4 sqrt(N/M))`, at least 1. Requires `1 <= M < N/2`.
pub fn optimal_grover_iterations(search_space: usize, marked: usize) -> Result<usize> {
    if marked == 0 || 2 * marked >= search_space {
        return Err(Error::InvalidArgument(format!(
            "marked count {marked} must satisfy 1 <= M < N/2 for N = {search_space}"
        )));
    }
    let k = (PI / 4.0 * (search_space as f64 / marked as f64).sqrt()).round() as usize;
    Ok(k.max(1))
}

/// Phase flip of the all-ones basis state on every qubit.
fn all_ones_phase(n: usize, gates: &mut Vec<Gate>) {
    let last = n - 1;
    gates.push(Gate::H(last));
    gates.push(Gate::Mcx {
        controls: (0..last).collect(),
        target: last,
    });
    gates.push(Gate::H(last));
}

fn grover_oracle(n: usize, marked: &BTreeSet<usize>) -> Vec<Gate> {
    let mut gates = Vec::new();
    for &m in marked {
        let zeros: Vec<usize> = (0..n).filter(|&q| (m >> (n - 1 - q)) & 1 == 0).collect();
        gates.extend(zeros.iter().map(|&q| Gate::X(q)));
        all_ones_phase(n, &mut gates);
        gates.extend(zeros.iter().map(|&q| Gate::X(q)));
    }
    gates
}

fn grover_diffusion(n: usize) -> Vec<Gate> {
    let mut gates: Vec<Gate> = (0..n).map(Gate::H).collect();
    gates.extend((0..n).map(Gate::X));
    all_ones_phase(n, &mut gates);
    gates.extend((0..n).map(Gate::X));
    gates.extend((0..n).map(Gate::H));
    gates
}

fn grover_residual(state: &Statevector, marked: &BTreeSet<usize>) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(j, _)| !marked.contains(j))
        .map(|(_, a)| a.norm())
        .fold(0.0, f64::max)
}

/// Grover search amplifying the marked set from the uniform superposition.
///
/// With [`GroverIterations::Auto`] iterations continue until every amplitude
/// outside the marked set is below [`GROVER_RESIDUAL`]. If that never happens
/// within `GROVER_CAP_FACTOR` times the analytic optimum, the iteration count
/// with the smallest residual is used.
pub fn gen_grover(spec: &GroverSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.num_qubits;
    let oracle = grover_oracle(n, &spec.marked);
    let diffusion = grover_diffusion(n);

    let iterations = match spec.iterations {
        GroverIterations::Fixed(k) => k,
        GroverIterations::Auto => {
            let cap = GROVER_CAP_FACTOR * optimal_grover_iterations(1 << n, spec.marked.len())?;
            let mut state = Statevector::basis_state(n, 0)?;
            for q in 0..n {
                state.apply_gate_in_place(&Gate::H(q))?;
            }
            let mut best = (usize::MAX, f64::INFINITY);
            for k in 1..=cap {
                for g in oracle.iter().chain(&diffusion) {
                    state.apply_gate_in_place(g)?;
                }
                let residual = grover_residual(&state, &spec.marked);
                if residual < best.1 {
                    best = (k, residual);
                }
                if residual < GROVER_RESIDUAL {
                    break;
                }
            }
            best.0
        }
    };

    let mut gates: Vec<Gate> = (0..n).map(Gate::H).collect();
    for _ in 0..iterations {
        gates.extend(oracle.iter().cloned());
        gates.extend(diffusion.iter().cloned());
    }
    Circuit::with_gates(n, 0, Category::Grov, gates)
}

/// Graph state of the ring `(0,1), (1,2), ..., (n-1,0)`.
pub fn gen_ring_graph_state(num_qubits: usize) -> Result<Circuit> {
    if num_qubits < 3 {
        return Err(Error::InvalidArgument(format!(
            "a ring graph needs at least 3 qubits, got {num_qubits}"
        )));
    }
    let mut gates: Vec<Gate> = (0..num_qubits).map(Gate::H).collect();
    gates.extend((0..num_qubits).map(|a| Gate::Cz(a, (a + 1) % num_qubits)));
    Circuit::with_gates(num_qubits, 0, Category::Gs, gates)
}

/// Gates adding one (mod `2^p`) to the position register when the coin is 1.
/// Position qubit `p - 1` is the least significant bit.
fn controlled_increment(positions: usize, coin: usize) -> Vec<Gate> {
    (0..positions)
        .map(|q| {
            let mut controls = vec![coin];
            controls.extend(q + 1..positions);
            if controls.len() == 1 {
                Gate::Cnot { control: coin, target: q }
            } else {
                Gate::Mcx { controls, target: q }
            }
        })
        .collect()
}

/// Discrete-time Hadamard walk on a cycle of `2^p` positions; the coin is the
/// last qubit.
pub fn gen_quantum_walk(position_qubits: usize, steps: usize) -> Result<Circuit> {
    if position_qubits < 2 {
        return Err(Error::InvalidArgument(format!(
            "quantum walk needs at least 2 position qubits, got {position_qubits}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("quantum walk needs at least one step".into()));
    }
    let coin = position_qubits;
    let increment = controlled_increment(position_qubits, coin);
    let mut gates = Vec::new();
    for _ in 0..steps {
        gates.push(Gate::H(coin));
        gates.extend(increment.iter().cloned());
        // decrement on coin = 0 is the inverse increment under a flipped coin
        gates.push(Gate::X(coin));
        gates.extend(increment.iter().rev().cloned());
        gates.push(Gate::X(coin));
    }
    Circuit::with_gates(position_qubits + 1, 0, Category::Qwalk, gates)
}
