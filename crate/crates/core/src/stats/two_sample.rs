//! Mann-Whitney U and two-sample Kolmogorov-Smirnov tests, two-sided.
//!
//! Small samples get exact permutation p-values: a subset-sum recursion over
//! midranks for U (exact under ties), and direct enumeration of group
//! assignments for KS. Larger samples use the usual asymptotic forms.

use serde::{Deserialize, Serialize};

use super::special::{kolmogorov_sf, normal_sf};
use crate::{Error, Execution, Result};

/// Exact U p-values when `n_a * n_b` is at most this.
pub const MWU_EXACT_MAX_PRODUCT: usize = 400;
/// Exact KS p-values when `n_a + n_b` is at most this.
pub const KS_EXACT_MAX_TOTAL: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub exact: bool,
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Invalid("NaN in sample".into()));
    }
    Ok(())
}

/// Doubled midranks (so they are integers) of the pooled sample `a ++ b`,
/// plus the tie-group sizes.
fn doubled_midranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j share the average rank (i+1+j)/2
        let doubled = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            ranks[k] = doubled;
        }
        ties.push((j - i) as u64);
        i = j;
    }
    (ranks, ties)
}

/// Two-sided Mann-Whitney U test. The reported statistic is `U_a`, the number
/// of (a, b) pairs with `a > b` plus half the ties.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> Result<TestResult> {
    check_samples(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let (ranks, ties) = doubled_midranks(a, b);
    let r2_a: u64 = ranks[..na].iter().sum();
    // U_a = R_a - na(na+1)/2, all doubled
    let u2 = r2_a - (na * (na + 1)) as u64;
    let u = u2 as f64 / 2.0;
    let mean = (na * nb) as f64 / 2.0;

    let exact = na * nb <= MWU_EXACT_MAX_PRODUCT;
    let p_value = if exact {
        // enumerate subsets of the smaller group; the two-sided p is the same
        if na <= nb {
            exact_rank_sum_p(&ranks, na, r2_a)
        } else {
            let total: u64 = ranks.iter().sum();
            exact_rank_sum_p(&ranks, nb, total - r2_a)
        }
    } else {
        let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>()
            / (n as f64 * (n as f64 - 1.0));
        let var = (na * nb) as f64 / 12.0 * ((n + 1) as f64 - tie_term);
        if var <= 0.0 {
            1.0
        } else {
            let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
            (2.0 * normal_sf(z)).min(1.0)
        }
    };
    Ok(TestResult {
        method: "mann-whitney-u".into(),
        statistic: u,
        p_value,
        n_a: na,
        n_b: nb,
        exact,
    })
}

/// `P(|R − E R| ≥ |r_obs − E R|)` over all equally likely choices of `na`
/// pooled observations, where `R` is the (doubled) rank sum of the chosen set.
fn exact_rank_sum_p(ranks: &[u64], na: usize, r_obs: u64) -> f64 {
    let mut desc = ranks.to_vec();
    desc.sort_unstable_by(|x, y| y.cmp(x));
    let max_sum = desc[..na].iter().sum::<u64>() as usize;
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways = vec![vec![0u128; max_sum + 1]; na + 1];
    ways[0][0] = 1;
    for (seen, &r) in ranks.iter().enumerate() {
        let r = r as usize;
        for k in (1..=na.min(seen + 1)).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let prev = &lower[k - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                if prev[s - r] != 0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    // E[R] doubled is na * (n + 1)
    let n = ranks.len() as i128;
    let mean = na as i128 * (n + 1);
    let obs_dev = (r_obs as i128 - mean).abs();
    let mut hit = 0u128;
    let mut all = 0u128;
    for (s, &w) in ways[na].iter().enumerate() {
        if w == 0 {
            continue;
        }
        all += w;
        if (s as i128 - mean).abs() >= obs_dev {
            hit += w;
        }
    }
    hit as f64 / all as f64
}

/// `max |F_a − F_b| · na · nb` over the pooled sorted values, given which
/// sorted positions belong to `a`. Ties are stepped over as a block.
fn ks_scaled_distance(sorted: &[f64], in_a: impl Fn(usize) -> bool, na: usize, nb: usize) -> u64 {
    let (mut ia, mut ib) = (0i64, 0i64);
    let mut best = 0i64;
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        while i < sorted.len() && sorted[i] == v {
            if in_a(i) {
                ia += 1;
            } else {
                ib += 1;
            }
            i += 1;
        }
        best = best.max((ia * nb as i64 - ib * na as i64).abs());
    }
    best as u64
}

/// Two-sample KS statistic `D = sup |ECDF_a − ECDF_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut tagged: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let sorted: Vec<f64> = tagged.iter().map(|t| t.0).collect();
    let scaled = ks_scaled_distance(&sorted, |i| tagged[i].1, a.len(), b.len());
    scaled as f64 / (a.len() * b.len()) as f64
}

/// Two-sided two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64], exec: Execution) -> Result<TestResult> {
    check_samples(a, b)?;
    let (na, nb) = (a.len(), b.len());
    let n = na + nb;
    let mut tagged: Vec<(f64, bool)> = a
        .iter()
        .map(|&x| (x, true))
        .chain(b.iter().map(|&x| (x, false)))
        .collect();
    tagged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let sorted: Vec<f64> = tagged.iter().map(|t| t.0).collect();
    let observed = ks_scaled_distance(&sorted, |i| tagged[i].1, na, nb);
    let d = observed as f64 / (na * nb) as f64;

    let exact = n <= KS_EXACT_MAX_TOTAL;
    let p_value = if exact {
        // every size-na subset of sorted positions, as a bitmask
        let blocks = 1usize << n.saturating_sub(12);
        let per_block = (1u64 << n) / blocks as u64;
        let counts = exec.map_range(blocks, |blk| {
            let (mut hit, mut all) = (0u64, 0u64);
            let start = blk as u64 * per_block;
            for mask in start..start + per_block {
                if mask.count_ones() as usize != na {
                    continue;
                }
                all += 1;
                if ks_scaled_distance(&sorted, |i| mask >> i & 1 == 1, na, nb) >= observed {
                    hit += 1;
                }
            }
            (hit, all)
        });
        let (hit, all) = counts
            .into_iter()
            .fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
        hit as f64 / all as f64
    } else {
        let en = (na * nb) as f64 / n as f64;
        kolmogorov_sf(en.sqrt() * d)
    };
    Ok(TestResult {
        method: "kolmogorov-smirnov".into(),
        statistic: d,
        p_value,
        n_a: na,
        n_b: nb,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// U by direct pair counting.
    fn pair_count_u(a: &[f64], b: &[f64]) -> f64 {
        let mut u = 0.0;
        for x in a {
            for y in b {
                if x > y {
                    u += 1.0;
                } else if x == y {
                    u += 0.5;
                }
            }
        }
        u
    }

    /// Exact two-sided p by listing every relabelling of the pooled sample.
    fn enumerate_u_p(a: &[f64], b: &[f64]) -> f64 {
        let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
        let n = pooled.len();
        let mean = (a.len() * b.len()) as f64 / 2.0;
        let obs = (pair_count_u(a, b) - mean).abs();
        let (mut hit, mut all) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != a.len() {
                continue;
            }
            let (ga, gb): (Vec<f64>, Vec<f64>) =
                (0..n).fold((vec![], vec![]), |(mut x, mut y), i| {
                    if mask >> i & 1 == 1 {
                        x.push(pooled[i])
                    } else {
                        y.push(pooled[i])
                    }
                    (x, y)
                });
            all += 1;
            if (pair_count_u(&ga, &gb) - mean).abs() >= obs - 1e-9 {
                hit += 1;
            }
        }
        hit as f64 / all as f64
    }

    #[test]
    fn u_extremes() {
        let r = mann_whitney_u(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!(r.exact);
        assert!((r.p_value - 0.1).abs() < 1e-12);
        let same = mann_whitney_u(&[1.0, 2.0, 2.0, 5.0], &[2.0, 5.0, 1.0, 2.0]).unwrap();
        assert_eq!(same.statistic, 8.0);
        assert!((same.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_small_enumeration() {
        let (a, b) = ([1.0, 3.0], [2.0, 4.0]);
        let r = mann_whitney_u(&a, &b).unwrap();
        // relabellings of {1,2,3,4}: U_a over the six 2-subsets = 0,1,2,2,3,4
        assert_eq!(r.statistic, 1.0);
        assert!((r.p_value - 4.0 / 6.0).abs() < 1e-12);
        assert!((r.p_value - enumerate_u_p(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn u_asymptotic_sanity() {
        let a: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..40).map(|i| i as f64 + 0.5).collect();
        let r = mann_whitney_u(&a, &b).unwrap();
        assert!(!r.exact);
        assert!(r.p_value > 0.8);
        let far: Vec<f64> = (0..40).map(|i| i as f64 + 100.0).collect();
        assert!(mann_whitney_u(&a, &far).unwrap().p_value < 1e-10);
        let flat = mann_whitney_u(&[1.0; 30], &[1.0; 30]).unwrap();
        assert_eq!(flat.p_value, 1.0);
    }

    #[test]
    fn ks_basics() {
        let r = ks_two_sample(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], Execution::Parallel).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        let r = ks_two_sample(&[1.0, 2.0], &[5.0, 6.0, 7.0], Execution::Parallel).unwrap();
        assert_eq!(r.statistic, 1.0);
        // only the two fully separated splits reach D = 1: 2 / C(5,2)
        assert!((r.p_value - 0.2).abs() < 1e-12);
        let r = ks_two_sample(&[1.0, 2.0], &[1.5, 2.5], Execution::Sequential).unwrap();
        assert_eq!(r.statistic, 0.5);
        // D over the six 2-subsets of {1,1.5,2,2.5}: 1,0.5,0.5,0.5,0.5,1
        assert!((r.p_value - 1.0).abs() < 1e-12);
        assert!(matches!(
            ks_two_sample(&[], &[1.0], Execution::Sequential),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            mann_whitney_u(&[1.0], &[]),
            Err(Error::EmptySample)
        ));
    }

    #[test]
    fn ks_large_uses_asymptotics() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.618).fract()).collect();
        let b: Vec<f64> = (0..150).map(|i| (i as f64 * 0.414).fract() + 0.3).collect();
        let r = ks_two_sample(&a, &b, Execution::Parallel).unwrap();
        assert!(!r.exact);
        assert!(r.p_value < 1e-6);
        assert!((r.statistic - ks_statistic(&a, &b)).abs() < 1e-15);
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec((0i32..8).prop_map(f64::from), 1..7)
    }

    proptest! {
        #[test]
        fn u_matches_enumeration(a in sample(), b in sample()) {
            let r = mann_whitney_u(&a, &b).unwrap();
            prop_assert_eq!(r.statistic, pair_count_u(&a, &b));
            prop_assert!((r.p_value - enumerate_u_p(&a, &b)).abs() < 1e-12);
            let swapped = mann_whitney_u(&b, &a).unwrap();
            prop_assert_eq!(r.statistic + swapped.statistic, (a.len() * b.len()) as f64);
            prop_assert!((r.p_value - swapped.p_value).abs() < 1e-12);
        }

        #[test]
        fn ks_invariants(a in sample(), b in sample()) {
            let r = ks_two_sample(&a, &b, Execution::Parallel).unwrap();
            prop_assert!((0.0..=1.0).contains(&r.statistic));
            prop_assert!((0.0..=1.0).contains(&r.p_value));
            let swapped = ks_two_sample(&b, &a, Execution::Sequential).unwrap();
            prop_assert_eq!(r.statistic, swapped.statistic);
            prop_assert!((r.p_value - swapped.p_value).abs() < 1e-12);
            let ta: Vec<f64> = a.iter().map(|x| (x * 0.7).exp() - 3.0).collect();
            let tb: Vec<f64> = b.iter().map(|x| (x * 0.7).exp() - 3.0).collect();
            prop_assert_eq!(ks_statistic(&ta, &tb), r.statistic);
            prop_assert_eq!(ks_statistic(&a, &a), 0.0);
        }
    }
}
