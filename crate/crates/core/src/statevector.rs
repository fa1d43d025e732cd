//! Dense n-qubit statevectors.
//!
//! Basis index `j` encodes `|j_0 j_1 ... j_{n-1}>` with qubit 0 as the most
//! significant bit, so for `n = 3` the index 2 is `|010>`. This is the reverse
//! of Qiskit's little-endian convention.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Amplitude magnitude below which a basis state is treated as absent.
pub const DEFAULT_RANK_EPS: f64 = 1e-6;

/// Tolerance for the normalization invariant.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Z(usize),
    Ry { theta: f64, qubit: usize },
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
    Mcx { controls: Vec<usize>, target: usize },
}

impl Gate {
    /// All qubits the gate touches; for controlled gates the target is last.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::Ry { qubit: q, .. } => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) => vec![*a, *b],
            Gate::Mcx { controls, target } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::Z(_) => "z",
            Gate::Ry { .. } => "ry",
            Gate::Cnot { .. } => "cx",
            Gate::Cz(..) => "cz",
            Gate::Mcx { .. } => "mcx",
        }
    }

    /// Checks arity, range and distinctness of the gate's qubits.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Gate::Mcx { controls, .. } = self {
            if controls.is_empty() {
                return Err(Error::InvalidGate("mcx needs at least one control".into()));
            }
        }
        if let Gate::Ry { theta, .. } = self {
            if !theta.is_finite() {
                return Err(Error::InvalidGate(format!("ry angle {theta} is not finite")));
            }
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits,
                });
            }
            if qs[..i].contains(&q) {
                return Err(Error::InvalidGate(format!(
                    "{} uses qubit {q} more than once",
                    self.name()
                )));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::Ry { theta, qubit } => write!(f, "ry({theta}) {qubit}"),
            _ => {
                write!(f, "{}", self.name())?;
                for q in self.qubits() {
                    write!(f, " {q}")?;
                }
                Ok(())
            }
        }
    }
}

/// Probabilities of each computational basis state.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0 + NORM_TOLERANCE).contains(p)) {
            return Err(Error::InvalidState("probability outside [0, 1]".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Distribution(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total variation distance to another distribution of the same size.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(Error::InvalidState("a state needs at least one qubit".into()));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            num_qubits,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

impl Statevector {
    /// The computational basis state `|j>`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes that are already normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "squared norm is {norm}, expected 1"
            )));
        }
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    /// Builds a state from real, not necessarily normalized, amplitudes.
    pub fn from_real_unnormalized(values: &[f64]) -> Result<Self> {
        let num_qubits = qubits_for_len(values.len())?;
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        let amplitudes = values
            .iter()
            .map(|v| Complex64::new(v / norm, 0.0))
            .collect();
        Ok(Statevector {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_gate(&self, gate: &Gate) -> Result<Statevector> {
        let mut out = self.clone();
        out.apply_gate_in_place(gate)?;
        Ok(out)
    }

    pub fn apply_gate_in_place(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        match *gate {
            Gate::H(q) => self.hadamard(q),
            Gate::X(q) => {
                let stride = self.stride(q);
                self.for_each_pair(stride, |amps, i, j| amps.swap(i, j));
            }
            Gate::Z(q) => {
                let stride = self.stride(q);
                for (i, a) in self.amplitudes.iter_mut().enumerate() {
                    if i & stride != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Ry { theta, qubit } => {
                let (s, c) = (theta / 2.0).sin_cos();
                let stride = self.stride(qubit);
                self.for_each_pair(stride, |amps, i, j| {
                    let (a0, a1) = (amps[i], amps[j]);
                    amps[i] = a0 * c - a1 * s;
                    amps[j] = a0 * s + a1 * c;
                });
            }
            Gate::Cnot { control, target } => {
                self.controlled_x(self.stride(control), self.stride(target));
            }
            Gate::Cz(a, b) => {
                let mask = self.stride(a) | self.stride(b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Mcx {
                ref controls,
                target,
            } => {
                let mask = controls.iter().fold(0, |m, &c| m | self.stride(c));
                self.controlled_x(mask, self.stride(target));
            }
        }
        Ok(())
    }

    /// Applies H to every qubit whose flag is set.
    pub(crate) fn hadamard_on(&mut self, flags: &[bool]) {
        for (q, &on) in flags.iter().enumerate() {
            if on {
                self.hadamard(q);
            }
        }
    }

    pub fn probabilities(&self) -> Distribution {
        Distribution(self.amplitudes.iter().map(|a| a.norm_sqr()).collect())
    }

    /// Draws one computational-basis outcome with probability `|a_j|^2`.
    pub fn measure_once<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last_nonzero = 0;
        for (j, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = j;
                acc += p;
                if u < acc {
                    return j;
                }
            }
        }
        // rounding left the cumulative sum slightly below 1
        last_nonzero
    }

    /// Precomputes the cumulative distribution for repeated draws. Each draw
    /// returns exactly what `measure_once` would for the same generator state.
    pub fn sampler(&self) -> Sampler {
        let mut indices = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (j, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                acc += p;
                indices.push(j);
                cumulative.push(acc);
            }
        }
        Sampler { indices, cumulative }
    }

    /// Number of basis states with amplitude magnitude above `eps`.
    pub fn rank(&self, eps: f64) -> usize {
        self.amplitudes.iter().filter(|a| a.norm() > eps).count()
    }

    /// Indices with amplitude magnitude above `eps`, ascending.
    pub fn support(&self, eps: f64) -> Vec<usize> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > eps)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn approx_eq(&self, other: &Statevector, tol: f64) -> bool {
        self.num_qubits == other.num_qubits
            && self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// `|<self|other>|`, which is 1 for states equal up to a global phase.
    pub fn overlap(&self, other: &Statevector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm()
    }

    #[inline]
    fn stride(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn for_each_pair<F: FnMut(&mut [Complex64], usize, usize)>(&mut self, stride: usize, mut f: F) {
        let dim = self.amplitudes.len();
        let mut base = 0;
        while base < dim {
            for i in base..base + stride {
                f(&mut self.amplitudes, i, i + stride);
            }
            base += 2 * stride;
        }
    }

    fn hadamard(&mut self, qubit: usize) {
        let stride = self.stride(qubit);
        self.for_each_pair(stride, |amps, i, j| {
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = (a0 + a1) * FRAC_1_SQRT_2;
            amps[j] = (a0 - a1) * FRAC_1_SQRT_2;
        });
    }

    fn controlled_x(&mut self, control_mask: usize, target_stride: usize) {
        for i in 0..self.amplitudes.len() {
            if i & control_mask == control_mask && i & target_stride == 0 {
                self.amplitudes.swap(i, i | target_stride);
            }
        }
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "amplitude count {len} is not a power of two >= 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    check_qubit_count(n)?;
    Ok(n)
}

/// Inverse-CDF sampler over the nonzero probabilities of a state.
#[derive(Debug, Clone)]
pub struct Sampler {
    indices: Vec<usize>,
    cumulative: Vec<f64>,
}

impl Sampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let k = self.cumulative.partition_point(|&c| c <= u);
        self.indices[k.min(self.indices.len() - 1)]
    }
}
