//! Mixed Hadamard bases and the searches that reduce a specification's rank.
//!
//! A [`BasisMask`] selects which qubits get a Hadamard just before a
//! computational-basis measurement. In shorthand each qubit is written as
//! `1` (identity) or `h` (Hadamard), qubit 0 leftmost.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::statevector::{Statevector, DEFAULT_RANK_EPS};

/// Largest register `exhaustive_reduce` will enumerate.
pub const EXHAUSTIVE_QUBIT_LIMIT: usize = 20;

// below this dimension rank evaluations are cheaper than spawning rayon tasks
const PARALLEL_DIM: usize = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisMask {
    bits: Vec<bool>,
}

impl BasisMask {
    pub fn identity(num_qubits: usize) -> Self {
        BasisMask {
            bits: vec![false; num_qubits],
        }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BasisMask { bits }
    }

    /// Mask whose bit for qubit 0 is the most significant bit of `index`.
    pub fn from_index(num_qubits: usize, index: usize) -> Self {
        let bits = (0..num_qubits)
            .map(|q| (index >> (num_qubits - 1 - q)) & 1 == 1)
            .collect();
        BasisMask { bits }
    }

    pub fn index(&self) -> usize {
        self.bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::MaskParse {
                text: text.into(),
                reason: "empty mask".into(),
            });
        }
        let bits = text
            .chars()
            .enumerate()
            .map(|(i, ch)| match ch {
                '1' => Ok(false),
                'h' => Ok(true),
                other => Err(Error::MaskParse {
                    text: text.into(),
                    reason: format!("illegal character {other:?} at position {i}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BasisMask { bits })
    }

    pub fn num_qubits(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn has_hadamard(&self, qubit: usize) -> bool {
        self.bits.get(qubit).copied().unwrap_or(false)
    }

    pub fn hadamard_qubits(&self) -> Vec<usize> {
        (0..self.bits.len()).filter(|&q| self.bits[q]).collect()
    }

    fn with(&self, qubit: usize, value: bool) -> Self {
        let mut bits = self.bits.clone();
        bits[qubit] = value;
        BasisMask { bits }
    }
}

impl fmt::Display for BasisMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "h" } else { "1" })?;
        }
        Ok(())
    }
}

impl FromStr for BasisMask {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisMask::parse(s)
    }
}

/// Applies one Hadamard per set bit of `mask`.
pub fn apply_basis_transform(state: &Statevector, mask: &BasisMask) -> Result<Statevector> {
    if mask.num_qubits() != state.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.num_qubits(),
            actual: mask.num_qubits(),
        });
    }
    let mut out = state.clone();
    out.hadamard_on(mask.bits());
    Ok(out)
}

fn rank_under(state: &Statevector, mask: &BasisMask) -> usize {
    let mut s = state.clone();
    s.hadamard_on(mask.bits());
    s.rank(DEFAULT_RANK_EPS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionResult {
    pub mask: BasisMask,
    pub reduced_rank: usize,
    pub default_rank: usize,
    /// Rank evaluations of candidate bases (the search's own objective calls).
    pub objective_calls: usize,
    /// All rank evaluations, including the one of the untransformed state
    /// when the search computes it separately.
    pub rank_evaluations: usize,
    /// Qubits in the order the greedy search fixed them; empty for the
    /// other searches.
    pub fixed_order: Vec<usize>,
    pub wall_time: Duration,
}

impl ReductionResult {
    pub fn reduction_rate(&self) -> f64 {
        reduction_rate(self.default_rank, self.reduced_rank).unwrap_or(0.0)
    }
}

/// Greedy reduction: each round tries one extra Hadamard on every qubit still
/// in the search space, fixes a uniformly random rank-minimizing one, and stops
/// as soon as a round brings no strict improvement.
pub fn greedy_reduce<R: Rng + ?Sized>(default_ps: &Statevector, rng: &mut R) -> ReductionResult {
    let start = Instant::now();
    let n = default_ps.num_qubits();
    let default_rank = default_ps.rank(DEFAULT_RANK_EPS);

    let mut mask = BasisMask::identity(n);
    let mut min_previous = default_rank;
    let mut search_space: Vec<usize> = (0..n).collect();
    let mut calls = 0;
    let mut fixed_order = Vec::new();

    while !search_space.is_empty() {
        let candidates: Vec<BasisMask> = search_space.iter().map(|&j| mask.with(j, true)).collect();
        let ranks: Vec<usize> = if default_ps.dim() >= PARALLEL_DIM {
            candidates.par_iter().map(|m| rank_under(default_ps, m)).collect()
        } else {
            candidates.iter().map(|m| rank_under(default_ps, m)).collect()
        };
        calls += ranks.len();

        let min_current = *ranks.iter().min().expect("search space is nonempty");
        if min_current >= min_previous {
            break;
        }
        let minima: Vec<usize> = (0..ranks.len()).filter(|&i| ranks[i] == min_current).collect();
        let pick = minima[rng.random_range(0..minima.len())];
        let qubit = search_space.remove(pick);
        fixed_order.push(qubit);
        mask = mask.with(qubit, true);
        min_previous = min_current;
    }

    ReductionResult {
        mask,
        reduced_rank: min_previous,
        default_rank,
        objective_calls: calls,
        rank_evaluations: calls + 1,
        fixed_order,
        wall_time: start.elapsed(),
    }
}

/// Random baseline: evaluates `budget` masks drawn without replacement from
/// all `2^n` (all of them if the budget is larger) and keeps the first-seen
/// minimum. The untransformed state wins when no sampled mask beats it.
pub fn random_reduce<R: Rng + ?Sized>(
    default_ps: &Statevector,
    budget: usize,
    rng: &mut R,
) -> Result<ReductionResult> {
    if budget == 0 {
        return Err(Error::InvalidArgument("random search budget must be >= 1".into()));
    }
    let start = Instant::now();
    let n = default_ps.num_qubits();
    let space = 1usize << n;
    let default_rank = default_ps.rank(DEFAULT_RANK_EPS);
    let draws = budget.min(space);
    let picks = rand::seq::index::sample(rng, space, draws).into_vec();

    let masks: Vec<BasisMask> = picks.iter().map(|&i| BasisMask::from_index(n, i)).collect();
    let ranks: Vec<usize> = if default_ps.dim() >= PARALLEL_DIM {
        masks.par_iter().map(|m| rank_under(default_ps, m)).collect()
    } else {
        masks.iter().map(|m| rank_under(default_ps, m)).collect()
    };

    let mut best = (BasisMask::identity(n), default_rank);
    let mut best_sampled: Option<usize> = None;
    for (i, &r) in ranks.iter().enumerate() {
        if best_sampled.is_none_or(|b| r < ranks[b]) {
            best_sampled = Some(i);
        }
    }
    if let Some(i) = best_sampled {
        if ranks[i] <= default_rank {
            best = (masks[i].clone(), ranks[i]);
        }
    }

    Ok(ReductionResult {
        mask: best.0,
        reduced_rank: best.1,
        default_rank,
        objective_calls: draws,
        rank_evaluations: draws + 1,
        fixed_order: Vec::new(),
        wall_time: start.elapsed(),
    })
}

/// Enumerates every mask; ties go to the lexicographically smallest shorthand.
pub fn exhaustive_reduce(default_ps: &Statevector) -> Result<ReductionResult> {
    let n = default_ps.num_qubits();
    if n > EXHAUSTIVE_QUBIT_LIMIT {
        return Err(Error::TooManyQubits {
            num_qubits: n,
            limit: EXHAUSTIVE_QUBIT_LIMIT,
        });
    }
    let start = Instant::now();
    let space = 1usize << n;
    let rank_of = |i: usize| rank_under(default_ps, &BasisMask::from_index(n, i));
    let ranks: Vec<usize> = if default_ps.dim() >= PARALLEL_DIM {
        (0..space).into_par_iter().map(rank_of).collect()
    } else {
        (0..space).map(rank_of).collect()
    };
    // index order equals lexicographic shorthand order since '1' < 'h'
    let (best, &rank) = ranks
        .iter()
        .enumerate()
        .min_by_key(|&(i, r)| (*r, i))
        .expect("mask space is nonempty");
    Ok(ReductionResult {
        mask: BasisMask::from_index(n, best),
        reduced_rank: rank,
        default_rank: ranks[0],
        objective_calls: space,
        rank_evaluations: space,
        fixed_order: Vec::new(),
        wall_time: start.elapsed(),
    })
}

/// Percentage by which the rank shrank: `100 (1 - reduced / default)`.
pub fn reduction_rate(default_rank: usize, reduced_rank: usize) -> Result<f64> {
    if default_rank == 0 {
        return Err(Error::InvalidArgument("default rank must be >= 1".into()));
    }
    if reduced_rank == 0 {
        return Err(Error::InvalidArgument("reduced rank must be >= 1".into()));
    }
    Ok(100.0 * (1.0 - reduced_rank as f64 / default_rank as f64))
}

/// Upper bound on greedy objective calls, `n (n + 1) / 2`.
pub fn theoretical_max_calls(num_qubits: usize) -> usize {
    num_qubits * (num_qubits + 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn running_example() -> Statevector {
        Statevector::from_real_unnormalized(&[1.0, 1.0, 1.0, -1.0, 1.0, 1.0, -1.0, 1.0]).unwrap()
    }

    /// Minimum rank over all masks, computed with a matrix-free brute force
    /// that builds each transformed state from the single-qubit H formula.
    fn brute_force_min_rank(state: &Statevector) -> usize {
        let n = state.num_qubits();
        let dim = 1 << n;
        let mut best = usize::MAX;
        for m in 0..dim {
            // <out|H^m|in> = prod over masked qubits of (+-1/sqrt2), identity elsewhere
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (o, slot) in out.iter_mut().enumerate() {
                for (i, a) in state.amplitudes().iter().enumerate() {
                    if (o ^ i) & !m != 0 {
                        continue;
                    }
                    let sign = if (o & i & m).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    let scale = (0.5f64).powf(m.count_ones() as f64 / 2.0);
                    *slot += a * sign * scale;
                }
            }
            best = best.min(out.iter().filter(|a| a.norm() > DEFAULT_RANK_EPS).count());
        }
        best
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(BasisMask::parse("1h").unwrap().bits(), &[false, true]);
        assert!(BasisMask::parse("111").unwrap().is_identity());
        assert!(BasisMask::parse("hx1").is_err());
        assert!(BasisMask::parse("").is_err());
        for s in ["h", "1h1", "hh1h"] {
            assert_eq!(BasisMask::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(BasisMask::from_index(3, 0b101).to_string(), "h1h");
        assert_eq!(BasisMask::parse("h1h").unwrap().index(), 5);
    }

    #[test]
    fn transform_examples() {
        let s = running_example();
        let t = apply_basis_transform(&s, &BasisMask::parse("h11").unwrap()).unwrap();
        let expect = Statevector::from_real_unnormalized(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, -1.0]).unwrap();
        assert!(t.approx_eq(&expect, 1e-12));
        assert!(apply_basis_transform(&s, &BasisMask::identity(3)).unwrap().approx_eq(&s, 0.0));

        let phi = Statevector::from_real_unnormalized(&[-1.0, 1.0, 1.0, 1.0]).unwrap();
        let t = apply_basis_transform(&phi, &BasisMask::parse("1h").unwrap()).unwrap();
        let expect = Statevector::from_real_unnormalized(&[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!(t.approx_eq(&expect, 1e-12));

        assert!(matches!(
            apply_basis_transform(&phi, &BasisMask::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn greedy_first_round_ranks() {
        let s = running_example();
        let ranks: Vec<usize> = (0..3)
            .map(|q| rank_under(&s, &BasisMask::identity(3).with(q, true)))
            .collect();
        assert_eq!(ranks, vec![4, 4, 4]);
    }

    #[test]
    fn greedy_on_running_example() {
        let s = running_example();
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = greedy_reduce(&s, &mut rng);
            assert!(r.reduced_rank == 2 || r.reduced_rank == 4);
            if r.reduced_rank == 4 {
                assert_eq!(r.mask.to_string(), "1h1");
            }
            assert!(r.objective_calls <= theoretical_max_calls(3));
        }
    }

    #[test]
    fn greedy_trivial_single_qubit() {
        let s = Statevector::basis_state(1, 0).unwrap();
        let r = greedy_reduce(&s, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(r.mask.is_identity());
        assert_eq!(r.reduced_rank, 1);
        assert_eq!(r.objective_calls, 1);
        assert_eq!(r.rank_evaluations, 2);
    }

    #[test]
    fn random_full_budget_is_global_min() {
        let s = running_example();
        let r = random_reduce(&s, 8, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert_eq!(r.reduced_rank, brute_force_min_rank(&s));
        assert_eq!(r.reduced_rank, 2);
        let a = random_reduce(&s, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let b = random_reduce(&s, 3, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        assert_eq!((a.mask, a.reduced_rank), (b.mask, b.reduced_rank));
        assert!(random_reduce(&s, 0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn random_single_identity_draw_keeps_rank() {
        let s = running_example();
        // find a seed whose single draw is the identity mask
        let seed = (0..1000u64)
            .find(|&seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rand::seq::index::sample(&mut rng, 8, 1).index(0) == 0
            })
            .unwrap();
        let r = random_reduce(&s, 1, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(r.mask.is_identity());
        assert_eq!(r.reduced_rank, 8);
        assert_eq!(r.objective_calls, 1);
    }

    #[test]
    fn exhaustive_examples() {
        let r = exhaustive_reduce(&running_example()).unwrap();
        assert_eq!((r.reduced_rank, r.mask.to_string()), (2, "h1h".to_string()));
        assert_eq!(r.objective_calls, 8);

        let r = exhaustive_reduce(&Statevector::basis_state(2, 0).unwrap()).unwrap();
        assert_eq!(r.reduced_rank, 1);
        assert!(r.mask.is_identity());
    }

    #[test]
    fn exhaustive_guard() {
        let big = Statevector::basis_state(21, 0).unwrap();
        assert!(matches!(exhaustive_reduce(&big), Err(Error::TooManyQubits { .. })));
    }

    #[test]
    fn rates_and_bounds() {
        assert_eq!(reduction_rate(8, 2).unwrap(), 75.0);
        assert_eq!(reduction_rate(8, 8).unwrap(), 0.0);
        assert_eq!(reduction_rate(16384, 4).unwrap(), 99.9755859375);
        assert!(reduction_rate(0, 1).is_err());
        assert_eq!(theoretical_max_calls(1), 1);
        assert_eq!(theoretical_max_calls(3), 6);
        assert_eq!(theoretical_max_calls(16), 136);
    }

    fn real_uniform(n: usize, seed: u64) -> Statevector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..1 << n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Statevector::from_real_unnormalized(&v).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn transform_is_involution(n in 1usize..=8, seed: u64, m: usize) {
            let s = real_uniform(n, seed);
            let mask = BasisMask::from_index(n, m % (1 << n));
            let t = apply_basis_transform(&s, &mask).unwrap();
            prop_assert!((t.norm_sqr() - 1.0).abs() < 1e-9);
            let back = apply_basis_transform(&t, &mask).unwrap();
            prop_assert!(back.approx_eq(&s, 1e-9));
        }

        #[test]
        fn greedy_consistency(n in 1usize..=7, seed: u64) {
            let s = real_uniform(n, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = greedy_reduce(&s, &mut rng);
            let e = exhaustive_reduce(&s).unwrap();
            prop_assert_eq!(g.reduced_rank, rank_under(&s, &g.mask));
            prop_assert!(g.objective_calls <= theoretical_max_calls(n));
            prop_assert!(e.reduced_rank <= g.reduced_rank);
            prop_assert!(g.reduced_rank <= g.default_rank);
            prop_assert_eq!(e.reduced_rank, brute_force_min_rank(&s));
            let r = random_reduce(&s, 1 << n, &mut rng).unwrap();
            prop_assert_eq!(r.reduced_rank, e.reduced_rank);
        }
    }
}
