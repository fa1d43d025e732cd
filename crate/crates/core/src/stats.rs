//! Nonparametric tests and effect sizes used to evaluate the experiments.
//!
//! Ties get midranks everywhere. P-values come from the exact permutation
//! distribution when the samples are small enough to enumerate and from the
//! usual normal, t or chi-square approximations otherwise.

use std::fmt;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Mann-Whitney is exact up to this many pooled observations.
pub const MWU_EXACT_MAX_POOLED: usize = 20;

/// Spearman is exact up to this many pairs (9! permutations).
pub const SPEARMAN_EXACT_MAX_PAIRS: usize = 9;

/// Kruskal-Wallis with three groups is exact up to this group size.
pub const KRUSKAL_EXACT_MAX_GROUP: usize = 8;

/// Midranks (1-based) of `values` and the tie term `sum(t^3 - t)`.
pub fn midranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

fn check_finite(name: &str, xs: &[f64]) -> Result<()> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("{name} contains non-finite values")));
    }
    Ok(())
}

fn normal_two_sided(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * n.sf(z.abs())).min(1.0)
}

/// Upper tail of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    if statistic <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).expect("dof > 0").sf(statistic)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit of `observed` counts against `expected`
/// probabilities (rescaled to sum to one over the given bins).
pub fn chi_square_gof(observed: &[u64], expected: &[f64]) -> Result<ChiSquare> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::InvalidArgument("observed and expected bins differ".into()));
    }
    check_finite("expected", expected)?;
    if expected.iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidArgument("expected probabilities must be positive".into()));
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("no observations".into()));
    }
    let mass: f64 = expected.iter().sum();
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = total as f64 * p / mass;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() - 1;
    Ok(ChiSquare {
        statistic,
        dof,
        p_value: chi_square_sf(statistic, dof),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `U` of the first sample: wins plus half the ties against the second.
    pub u: f64,
    pub p_value: f64,
    pub exact: bool,
}

/// Two-sided Mann-Whitney U test.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<MannWhitney> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidArgument("mann-whitney needs at least 2 values per sample".into()));
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let r1: f64 = ranks[..n1].iter().sum();
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    if ties == (n * n * n - n) as f64 {
        // every value identical
        return Ok(MannWhitney { u, p_value: 1.0, exact: true });
    }
    if n <= MWU_EXACT_MAX_POOLED {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let p_value = exact_rank_sum_p(&doubled, n1, (2.0 * r1).round() as usize);
        return Ok(MannWhitney { u, p_value, exact: true });
    }
    let mean = (n1 * n2) as f64 / 2.0;
    let var = (n1 * n2) as f64 / 12.0 * ((n + 1) as f64 - ties / (n * (n - 1)) as f64);
    let z = (u - mean) / var.sqrt();
    Ok(MannWhitney {
        u,
        p_value: normal_two_sided(z),
        exact: false,
    })
}

/// Two-sided permutation p-value of a rank sum: the fraction of size-`k`
/// subsets whose (doubled) rank sum is at least as far from its mean.
fn exact_rank_sum_p(doubled_ranks: &[usize], k: usize, observed: usize) -> f64 {
    let max_sum: usize = doubled_ranks.iter().sum();
    // ways[c][s]: subsets of size c with doubled rank sum s
    let mut ways = vec![vec![0f64; max_sum + 1]; k + 1];
    ways[0][0] = 1.0;
    for &r in doubled_ranks {
        for c in (1..=k).rev() {
            for s in (r..=max_sum).rev() {
                let add = ways[c - 1][s - r];
                if add != 0.0 {
                    ways[c][s] += add;
                }
            }
        }
    }
    let n = doubled_ranks.len();
    // mean doubled rank sum is k (n + 1)
    let mean = (k * (n + 1)) as i64;
    let dist = (observed as i64 - mean).abs();
    let total: f64 = ways[k].iter().sum();
    let extreme: f64 = ways[k]
        .iter()
        .enumerate()
        .filter(|&(s, _)| (s as i64 - mean).abs() >= dist)
        .map(|(_, w)| w)
        .sum();
    (extreme / total).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Magnitude {
    Negligible,
    Small,
    Medium,
    Large,
}

impl Magnitude {
    pub fn code(&self) -> &'static str {
        match self {
            Magnitude::Negligible => "N",
            Magnitude::Small => "S",
            Magnitude::Medium => "M",
            Magnitude::Large => "L",
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectSize {
    pub a12: f64,
    pub scaled: f64,
    pub magnitude: Magnitude,
}

impl EffectSize {
    pub fn from_a12(a12: f64) -> Self {
        let scaled = 2.0 * (a12 - 0.5);
        let m = scaled.abs();
        let magnitude = if m < 0.147 {
            Magnitude::Negligible
        } else if m <= 0.33 {
            Magnitude::Small
        } else if m < 0.474 {
            Magnitude::Medium
        } else {
            Magnitude::Large
        };
        EffectSize { a12, scaled, magnitude }
    }
}

/// Vargha-Delaney A12: probability that a value from `a` exceeds one from `b`,
/// counting ties as one half. Computed from the rank sum of `a`.
pub fn vargha_delaney(a: &[f64], b: &[f64]) -> Result<EffectSize> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("vargha-delaney needs nonempty samples".into()));
    }
    check_finite("a", a)?;
    check_finite("b", b)?;
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, _) = midranks(&pooled);
    let r1: f64 = ranks[..a.len()].iter().sum();
    let a12 = (r1 / n1 - (n1 + 1.0) / 2.0) / n2;
    Ok(EffectSize::from_a12(a12))
}

/// Significance in the reporting sense: `p <= alpha` and a non-negligible effect.
pub fn is_significant(p_value: f64, effect: &EffectSize, alpha: f64) -> bool {
    p_value <= alpha && effect.magnitude != Magnitude::Negligible
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KruskalWallis {
    pub h: f64,
    pub dof: usize,
    pub p_value: f64,
    pub exact: bool,
}

/// Kruskal-Wallis H test for three or more groups.
pub fn kruskal_wallis(groups: &[&[f64]]) -> Result<KruskalWallis> {
    if groups.len() < 3 {
        return Err(Error::InvalidArgument(
            "kruskal-wallis needs at least 3 groups; use mann_whitney_u for two".into(),
        ));
    }
    h_test(groups)
}

/// The H test for any `k >= 2` groups. With two groups and large samples it
/// coincides with the squared normal score of the Mann-Whitney test.
pub fn h_test(groups: &[&[f64]]) -> Result<KruskalWallis> {
    if groups.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 groups".into()));
    }
    if groups.iter().any(|g| g.len() < 2) {
        return Err(Error::InvalidArgument("every group needs at least 2 values".into()));
    }
    for g in groups {
        check_finite("group", g)?;
    }
    let sizes: Vec<usize> = groups.iter().map(|g| g.len()).collect();
    let n: usize = sizes.iter().sum();
    let dof = groups.len() - 1;
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let (ranks, ties) = midranks(&pooled);
    let correction = 1.0 - ties / ((n * n * n - n) as f64);
    if correction <= 0.0 {
        return Ok(KruskalWallis {
            h: 0.0,
            dof,
            p_value: 1.0,
            exact: true,
        });
    }
    let mut sums = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for &size in &sizes {
        sums.push(ranks[offset..offset + size].iter().sum::<f64>());
        offset += size;
    }
    let h = h_from_sums(&sums, &sizes, n) / correction;

    if groups.len() == 3 && sizes.iter().all(|&s| s <= KRUSKAL_EXACT_MAX_GROUP) {
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let p_value = exact_three_group_p(&doubled, &sizes, h * correction);
        return Ok(KruskalWallis { h, dof, p_value, exact: true });
    }
    Ok(KruskalWallis {
        h,
        dof,
        p_value: chi_square_sf(h, dof),
        exact: false,
    })
}

fn h_from_sums(sums: &[f64], sizes: &[usize], n: usize) -> f64 {
    let nf = n as f64;
    let s: f64 = sums.iter().zip(sizes).map(|(r, &m)| r * r / m as f64).sum();
    12.0 / (nf * (nf + 1.0)) * s - 3.0 * (nf + 1.0)
}

/// Permutation p-value of the uncorrected H over all assignments of the pooled
/// ranks to three groups of the given sizes. The tie correction is the same
/// for every assignment, so it does not change the ordering.
fn exact_three_group_p(doubled: &[usize], sizes: &[usize], observed_h: f64) -> f64 {
    let (n1, n2) = (sizes[0], sizes[1]);
    let n = doubled.len();
    let mut sorted = doubled.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let max1: usize = sorted[..n1].iter().sum();
    let max2: usize = sorted[..n2].iter().sum();
    let (w1, w2) = (max1 + 1, max2 + 1);
    let idx = |c1: usize, c2: usize, s1: usize, s2: usize| ((c1 * (n2 + 1) + c2) * w1 + s1) * w2 + s2;
    let mut ways = vec![0f64; (n1 + 1) * (n2 + 1) * w1 * w2];
    ways[idx(0, 0, 0, 0)] = 1.0;
    let mut reach1 = 0;
    let mut reach2 = 0;
    for &r in doubled {
        reach1 = (reach1 + r).min(max1);
        reach2 = (reach2 + r).min(max2);
        for c1 in (0..=n1).rev() {
            for c2 in (0..=n2).rev() {
                if c1 == 0 && c2 == 0 {
                    continue;
                }
                for s1 in (0..=reach1).rev() {
                    for s2 in (0..=reach2).rev() {
                        let mut add = 0.0;
                        if c1 > 0 && s1 >= r {
                            add += ways[idx(c1 - 1, c2, s1 - r, s2)];
                        }
                        if c2 > 0 && s2 >= r {
                            add += ways[idx(c1, c2 - 1, s1, s2 - r)];
                        }
                        if add != 0.0 {
                            ways[idx(c1, c2, s1, s2)] += add;
                        }
                    }
                }
            }
        }
    }
    let total_doubled: usize = doubled.iter().sum();
    let sizes3 = [n1, n2, n - n1 - n2];
    let mut total = 0.0;
    let mut extreme = 0.0;
    for s1 in 0..w1 {
        for s2 in 0..w2 {
            let w = ways[idx(n1, n2, s1, s2)];
            if w == 0.0 || s1 + s2 > total_doubled {
                continue;
            }
            let s3 = total_doubled - s1 - s2;
            let sums = [s1 as f64 / 2.0, s2 as f64 / 2.0, s3 as f64 / 2.0];
            let h = h_from_sums(&sums, &sizes3, n);
            total += w;
            if h >= observed_h - 1e-9 {
                extreme += w;
            }
        }
    }
    (extreme / total).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMagnitude {
    Negligible,
    Weak,
    Moderate,
    Strong,
    VeryStrong,
}

impl CorrelationMagnitude {
    pub fn from_coefficient(r: f64) -> Self {
        let m = r.abs();
        if m < 0.10 {
            CorrelationMagnitude::Negligible
        } else if m < 0.40 {
            CorrelationMagnitude::Weak
        } else if m < 0.70 {
            CorrelationMagnitude::Moderate
        } else if m < 0.90 {
            CorrelationMagnitude::Strong
        } else {
            CorrelationMagnitude::VeryStrong
        }
    }
}

impl fmt::Display for CorrelationMagnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorrelationMagnitude::Negligible => "Negligible",
            CorrelationMagnitude::Weak => "Weak",
            CorrelationMagnitude::Moderate => "Moderate",
            CorrelationMagnitude::Strong => "Strong",
            CorrelationMagnitude::VeryStrong => "VeryStrong",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub r_s: f64,
    pub p_value: f64,
    pub magnitude: CorrelationMagnitude,
    /// Direction of the relationship; `false` for negative coefficients.
    pub positive: bool,
    pub exact: bool,
}

impl CorrelationResult {
    pub fn label(&self) -> String {
        if self.positive || self.magnitude == CorrelationMagnitude::Negligible {
            self.magnitude.to_string()
        } else {
            format!("{}(-)", self.magnitude)
        }
    }
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation. Zero rank variance in either argument yields
/// `r_s = 0` with `p = 1`.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::InvalidArgument("spearman needs two samples of equal length >= 3".into()));
    }
    check_finite("x", x)?;
    check_finite("y", y)?;
    let (rx, _) = midranks(x);
    let (ry, _) = midranks(y);
    let Some(r_s) = pearson(&rx, &ry) else {
        return Ok(CorrelationResult {
            r_s: 0.0,
            p_value: 1.0,
            magnitude: CorrelationMagnitude::Negligible,
            positive: true,
            exact: true,
        });
    };
    let n = x.len();
    let (p_value, exact) = if n <= SPEARMAN_EXACT_MAX_PAIRS {
        (exact_spearman_p(&rx, &ry, r_s), true)
    } else if r_s.abs() >= 1.0 {
        (0.0, false)
    } else {
        let dof = (n - 2) as f64;
        let t = r_s * (dof / (1.0 - r_s * r_s)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, dof).expect("dof > 0");
        ((2.0 * dist.sf(t.abs())).min(1.0), false)
    };
    Ok(CorrelationResult {
        r_s,
        p_value,
        magnitude: CorrelationMagnitude::from_coefficient(r_s),
        positive: r_s >= 0.0,
        exact,
    })
}

/// Fraction of the `n!` pairings whose |r_s| reaches the observed one.
fn exact_spearman_p(rx: &[f64], ry: &[f64], observed: f64) -> f64 {
    let n = rx.len();
    let mean = (n as f64 + 1.0) / 2.0;
    let cx: Vec<f64> = rx.iter().map(|r| r - mean).collect();
    let mut cy: Vec<f64> = ry.iter().map(|r| r - mean).collect();
    let sxx: f64 = cx.iter().map(|v| v * v).sum();
    let syy: f64 = cy.iter().map(|v| v * v).sum();
    let denom = (sxx * syy).sqrt();
    let threshold = observed.abs() - 1e-12;

    let mut hits = 0u64;
    let mut total = 0u64;
    let mut visit = |perm: &[f64]| {
        let r: f64 = cx.iter().zip(perm).map(|(a, b)| a * b).sum::<f64>() / denom;
        total += 1;
        if r.abs() >= threshold {
            hits += 1;
        }
    };
    // Heap's algorithm
    let mut c = vec![0usize; n];
    visit(&cy);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                cy.swap(0, i);
            } else {
                cy.swap(c[i], i);
            }
            visit(&cy);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

/// Signed runtime ratio: `+t_def/t_red` when the reduced test is faster,
/// otherwise `-t_red/t_def` (ties count as a slowdown of 1).
pub fn speedup_slowdown(t_default: f64, t_reduced: f64) -> Result<f64> {
    if !(t_default > 0.0 && t_reduced > 0.0) || !t_default.is_finite() || !t_reduced.is_finite() {
        return Err(Error::InvalidArgument("runtimes must be positive".into()));
    }
    Ok(if t_default > t_reduced {
        t_default / t_reduced
    } else {
        -t_reduced / t_default
    })
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Lower median of a slice.
pub fn lower_median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(a: usize, b: usize) -> Vec<f64> {
        (a..=b).map(|v| v as f64).collect()
    }

    #[test]
    fn midranks_with_ties() {
        let (r, t) = midranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![3.5, 1.0, 3.5, 2.0]);
        assert_eq!(t, 6.0);
    }

    #[test]
    fn mwu_examples() {
        let a = seq(1, 30);
        assert!(mann_whitney_u(&a, &a).unwrap().p_value >= 0.99);
        let hi = vec![10.0; 30];
        let lo = vec![0.0; 30];
        let r = mann_whitney_u(&hi, &lo).unwrap();
        assert!(r.p_value < 1e-6, "{}", r.p_value);
        assert_eq!(r.u, 900.0);
        // exhaustive: the 10 ways to pick 2 of the pooled ranks put
        // the observed sum well inside the distribution
        let r = mann_whitney_u(&[1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.p_value > 0.05);
        assert!(r.exact);
        assert_eq!(mann_whitney_u(&[4.0, 4.0], &[4.0, 4.0]).unwrap().p_value, 1.0);
        assert!(mann_whitney_u(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn mwu_exact_small_no_ties() {
        // a = {4,5}, b = {1,2,3}: rank sum 9 is the maximum; 1 of 10 subsets
        // is that extreme on each side, so p = 2/10
        let r = mann_whitney_u(&[4.0, 5.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r.p_value - 0.2).abs() < 1e-12);
    }

    #[test]
    fn a12_examples() {
        let e = vargha_delaney(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((e.a12 - 0.5).abs() < 1e-12);
        assert_eq!(e.magnitude, Magnitude::Negligible);
        let e = vargha_delaney(&[5.0, 6.0], &[1.0, 2.0]).unwrap();
        assert_eq!(e.a12, 1.0);
        assert_eq!(e.magnitude, Magnitude::Large);
        let e = vargha_delaney(&[1.0, 2.0], &[2.0, 3.0]).unwrap();
        assert!((e.a12 - 0.125).abs() < 1e-12);
        assert!((e.scaled + 0.75).abs() < 1e-12);
        assert_eq!(e.magnitude, Magnitude::Large);
    }

    #[test]
    fn magnitude_bins() {
        let m = |a12| EffectSize::from_a12(a12).magnitude;
        assert_eq!(m(0.5 + 0.146 / 2.0), Magnitude::Negligible);
        assert_eq!(m(0.5 + 0.147 / 2.0), Magnitude::Small);
        assert_eq!(m(0.5 + 0.32 / 2.0), Magnitude::Small);
        assert_eq!(m(0.5 + 0.4 / 2.0), Magnitude::Medium);
        assert_eq!(m(0.5 + 0.474 / 2.0), Magnitude::Large);
        assert_eq!(m(0.5 - 0.474 / 2.0), Magnitude::Large);
    }

    #[test]
    fn kruskal_examples() {
        let g = [5.0, 5.0, 5.0];
        assert_eq!(kruskal_wallis(&[&g, &g, &g]).unwrap().p_value, 1.0);
        let (a, b, c) = (seq(1, 30), seq(101, 130), seq(201, 230));
        let r = kruskal_wallis(&[&a, &b, &c]).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-6);
        assert!(kruskal_wallis(&[&a, &b]).is_err());
    }

    #[test]
    fn kruskal_calibration() {
        let mut accept = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let groups: Vec<Vec<f64>> = (0..3).map(|_| (0..20).map(|_| rng.random::<f64>()).collect()).collect();
            let refs: Vec<&[f64]> = groups.iter().map(|g| g.as_slice()).collect();
            if kruskal_wallis(&refs).unwrap().p_value > 0.05 {
                accept += 1;
            }
        }
        assert!(accept >= 90, "{accept}");
    }

    #[test]
    fn kruskal_exact_small() {
        // groups {1},{2},{3} are too small; use sizes 2,2,2 with perfect
        // separation: 6!/(2!2!2!) = 90 assignments, 6 of them (group
        // permutations of the separated split) reach the maximal H
        let r = kruskal_wallis(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]).unwrap();
        assert!(r.exact);
        assert!((r.p_value - 6.0 / 90.0).abs() < 1e-12);
    }

    #[test]
    fn two_group_h_agrees_with_mwu() {
        let mut agree = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let shift = rng.random::<f64>() * 0.6;
            let a: Vec<f64> = (0..30).map(|_| rng.random::<f64>()).collect();
            let b: Vec<f64> = (0..30).map(|_| rng.random::<f64>() + shift).collect();
            let h = h_test(&[&a, &b]).unwrap().p_value <= 0.05;
            let m = mann_whitney_u(&a, &b).unwrap().p_value <= 0.05;
            agree += (h == m) as usize;
        }
        assert!(agree >= 95, "{agree}");
    }

    #[test]
    fn spearman_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let r = spearman(&x, &[2.0, 4.0, 8.0, 16.0, 32.0]).unwrap();
        assert!((r.r_s - 1.0).abs() < 1e-12);
        assert_eq!(r.magnitude, CorrelationMagnitude::VeryStrong);
        let r = spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        assert!((r.r_s + 1.0).abs() < 1e-12);
        assert_eq!(r.label(), "VeryStrong(-)");
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r.r_s - 0.8).abs() < 1e-12);
        assert_eq!(r.magnitude, CorrelationMagnitude::Strong);
        let r = spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.r_s, r.p_value), (0.0, 1.0));
        assert!(spearman(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn correlation_bins() {
        let m = CorrelationMagnitude::from_coefficient;
        assert_eq!(m(0.05), CorrelationMagnitude::Negligible);
        assert_eq!(m(0.10), CorrelationMagnitude::Weak);
        assert_eq!(m(0.395), CorrelationMagnitude::Weak);
        assert_eq!(m(-0.5), CorrelationMagnitude::Moderate);
        assert_eq!(m(0.89), CorrelationMagnitude::Strong);
        assert_eq!(m(0.9), CorrelationMagnitude::VeryStrong);
    }

    #[test]
    fn speedup_examples() {
        assert!((speedup_slowdown(169.9, 11.8).unwrap() - 14.398_305).abs() < 1e-5);
        assert_eq!(speedup_slowdown(1.0, 1.0).unwrap(), -1.0);
        assert_eq!(speedup_slowdown(2.0, 4.0).unwrap(), -2.0);
        assert!(speedup_slowdown(0.0, 1.0).is_err());
    }

    #[test]
    fn chi_square_examples() {
        let r = chi_square_gof(&[7, 12, 11, 10], &[0.25; 4]).unwrap();
        assert!((r.statistic - 1.4).abs() < 1e-12);
        assert_eq!(r.dof, 3);
        assert!((r.p_value - 0.705_534_7).abs() < 1e-6);
        let r = chi_square_gof(&[40, 0, 0, 0], &[0.25; 4]).unwrap();
        assert!((r.statistic - 120.0).abs() < 1e-9);
        assert!(r.p_value < 1e-20);
    }

    fn small_sample() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec((0i32..6).prop_map(f64::from), 2..12)
    }

    proptest! {
        #[test]
        fn a12_complement(a in small_sample(), b in small_sample()) {
            let ab = vargha_delaney(&a, &b).unwrap().a12;
            let ba = vargha_delaney(&b, &a).unwrap().a12;
            prop_assert!((ab + ba - 1.0).abs() < 1e-12);
        }

        #[test]
        fn a12_monotone_invariant(a in small_sample(), b in small_sample()) {
            let f = |v: &Vec<f64>| v.iter().map(|x| (x * 0.7).exp() + 3.0).collect::<Vec<_>>();
            let before = vargha_delaney(&a, &b).unwrap().a12;
            let after = vargha_delaney(&f(&a), &f(&b)).unwrap().a12;
            prop_assert!((before - after).abs() < 1e-12);
        }

        #[test]
        fn mwu_symmetric(a in small_sample(), b in small_sample()) {
            let ab = mann_whitney_u(&a, &b).unwrap().p_value;
            let ba = mann_whitney_u(&b, &a).unwrap().p_value;
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn spearman_self_and_monotone(
            xz in (3usize..15).prop_flat_map(|n| (
                proptest::collection::vec(-50.0f64..50.0, n),
                proptest::collection::vec(-50.0f64..50.0, n),
            ))
        ) {
            let (x, z) = xz;
            prop_assume!(x.iter().any(|v| *v != x[0]));
            let r = spearman(&x, &x).unwrap();
            prop_assert!((r.r_s - 1.0).abs() < 1e-12);
            let y: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
            let before = spearman(&x, &z).unwrap();
            let after = spearman(&y, &z).unwrap();
            prop_assert!((before.r_s - after.r_s).abs() < 1e-12);
            prop_assert!((before.p_value - after.p_value).abs() < 1e-12);
        }
    }
}
