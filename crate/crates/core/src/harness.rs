//! Basis-dependent test cases, projective-measurement sampling, and the
//! wrong-output (WOO) and probability-distribution (PDO) oracles.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::{apply_basis_transform, BasisMask};
use crate::error::{Error, Result};
use crate::programs::Circuit;
use crate::statevector::{Distribution, Gate, Statevector, DEFAULT_RANK_EPS};
use crate::stats::chi_square_gof;

/// Significance level used by the PDO unless configured otherwise.
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Shots per basis state of the specification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaPolicy {
    gamma: usize,
}

impl GammaPolicy {
    pub fn new(gamma: usize) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::InvalidArgument("gamma must be >= 1".into()));
        }
        Ok(GammaPolicy { gamma })
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }
}

impl Default for GammaPolicy {
    fn default() -> Self {
        GammaPolicy { gamma: 10 }
    }
}

/// `N_E = gamma * N_ps`.
pub fn sample_size(policy: GammaPolicy, rank: usize) -> usize {
    policy.gamma * rank
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub input_index: usize,
    pub mask: BasisMask,
    pub theoretical: Distribution,
    /// Basis indices of the transformed specification, ascending.
    pub outputs: Vec<usize>,
}

impl TestCase {
    pub fn contains(&self, index: usize) -> bool {
        self.outputs.binary_search(&index).is_ok()
    }
}

pub fn build_test_case(default_ps: &Statevector, mask: &BasisMask, input_index: usize) -> Result<TestCase> {
    let reduced = apply_basis_transform(default_ps, mask)?;
    let outputs = reduced.support(DEFAULT_RANK_EPS);
    if outputs.is_empty() {
        return Err(Error::InvalidState("specification has no basis states".into()));
    }
    Ok(TestCase {
        input_index,
        mask: mask.clone(),
        theoretical: reduced.probabilities(),
        outputs,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleDistribution {
    pub counts: Vec<u64>,
    pub total: u64,
}

impl SampleDistribution {
    pub fn new(dim: usize) -> Self {
        SampleDistribution {
            counts: vec![0; dim],
            total: 0,
        }
    }

    pub fn record(&mut self, index: usize) {
        self.counts[index] += 1;
        self.total += 1;
    }

    /// Relative frequencies `C_m / N_E`.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total.max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    /// Every shot re-simulates the program; use when runtimes are measured.
    Timed,
    /// Simulates once and draws all shots from the cached final state.
    Cached,
}

/// Runs `shots` single-shot executions of `sut` measured in `mask`, calling
/// `observe` with each outcome. Every shot consumes exactly one draw from a
/// generator seeded with `seed`, so outcomes do not depend on the mode.
fn run_shots(
    sut: &Circuit,
    mask: &BasisMask,
    shots: usize,
    seed: u64,
    mode: ExecutionMode,
    mut observe: impl FnMut(usize),
) -> Result<()> {
    if mask.num_qubits() != sut.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: sut.num_qubits(),
            actual: mask.num_qubits(),
        });
    }
    let mut program: Vec<Gate> = sut.gates().to_vec();
    program.extend(mask.hadamard_qubits().into_iter().map(Gate::H));
    let execute = || -> Result<Statevector> {
        let mut s = Statevector::basis_state(sut.num_qubits(), sut.input_index())?;
        for g in &program {
            s.apply_gate_in_place(g)?;
        }
        Ok(s)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        ExecutionMode::Cached => {
            let sampler = execute()?.sampler();
            for _ in 0..shots {
                observe(sampler.sample(&mut rng));
            }
        }
        ExecutionMode::Timed => {
            for _ in 0..shots {
                observe(execute()?.measure_once(&mut rng));
            }
        }
    }
    Ok(())
}

/// Samples `shots` executions and returns the counts with the wall time spent.
pub fn execute_and_sample(
    sut: &Circuit,
    mask: &BasisMask,
    shots: usize,
    seed: u64,
    mode: ExecutionMode,
) -> Result<(SampleDistribution, Duration)> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is required".into()));
    }
    let start = Instant::now();
    let mut sample = SampleDistribution::new(1 << sut.num_qubits());
    run_shots(sut, mask, shots, seed, mode, |j| sample.record(j))?;
    Ok((sample, start.elapsed()))
}

/// Wrong-output oracle: fails when the outcome is not a basis state of the
/// specification.
pub fn woo(observed: usize, tc: &TestCase) -> bool {
    !tc.contains(observed)
}

/// Probability-distribution oracle: Pearson chi-square goodness of fit over
/// the specification's outputs only. Outcomes outside the outputs are left to
/// the WOO. Returns `(failed, p_value)`; with a single output bin, or no
/// in-set outcomes at all, the test is vacuous and passes with `p = 1`.
pub fn pdo(tc: &TestCase, sample: &SampleDistribution, alpha: f64) -> Result<(bool, f64)> {
    let p = pdo_p_value(tc, sample, alpha)?.unwrap_or(1.0);
    Ok((p < alpha, p))
}

fn pdo_p_value(tc: &TestCase, sample: &SampleDistribution, alpha: f64) -> Result<Option<f64>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0, 1)")));
    }
    if sample.total == 0 {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    if sample.counts.len() != tc.theoretical.len() {
        return Err(Error::InvalidArgument("sample and specification sizes differ".into()));
    }
    if tc.outputs.len() < 2 {
        return Ok(None);
    }
    let observed: Vec<u64> = tc.outputs.iter().map(|&j| sample.counts[j]).collect();
    if observed.iter().all(|&c| c == 0) {
        return Ok(None);
    }
    let expected: Vec<f64> = tc.outputs.iter().map(|&j| tc.theoretical.probs()[j]).collect();
    Ok(Some(chi_square_gof(&observed, &expected)?.p_value))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestVerdict {
    pub woo_failed: bool,
    pub pdo_failed: bool,
    pub p_value: Option<f64>,
    pub runtime: Duration,
    pub shots: usize,
}

impl TestVerdict {
    pub fn failed(&self) -> bool {
        self.woo_failed || self.pdo_failed
    }
}

/// Executes `N_E = gamma * |outputs|` shots, applies the WOO to every shot
/// and the PDO to the whole sample. All shots always run.
pub fn run_test(
    sut: &Circuit,
    tc: &TestCase,
    policy: GammaPolicy,
    alpha: f64,
    seed: u64,
    mode: ExecutionMode,
) -> Result<TestVerdict> {
    if tc.theoretical.len() != 1 << sut.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: sut.num_qubits(),
            actual: tc.mask.num_qubits(),
        });
    }
    let shots = sample_size(policy, tc.outputs.len());
    let start = Instant::now();
    let mut sample = SampleDistribution::new(1 << sut.num_qubits());
    let mut woo_failed = false;
    run_shots(sut, &tc.mask, shots, seed, mode, |j| {
        woo_failed |= woo(j, tc);
        sample.record(j);
    })?;
    let p_value = pdo_p_value(tc, &sample, alpha)?;
    let pdo_failed = p_value.is_some_and(|p| p < alpha);
    let runtime = start.elapsed();
    Ok(TestVerdict {
        woo_failed,
        pdo_failed,
        p_value,
        runtime,
        shots,
    })
}
