//! Two-sample tests: Welch's unequal-variance t-test and the Wilcoxon rank
//! sum test (exact permutation distribution or tie-corrected normal
//! approximation).
//!
//! Every result carries both one-sided tails and the two-sided p-value.
//! `p_greater` tests "sample a tends to be larger than sample b".

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{normal_cdf, normal_sf, student_t_sf};

/// Largest pooled sample size handled by exact rank-sum enumeration.
pub const EXACT_MAX_TOTAL: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Welch,
    Wilcoxon,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "welch" => Ok(Method::Welch),
            "wilcoxon" | "rank_sum" => Ok(Method::Wilcoxon),
            other => Err(format!("unknown test `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

impl Alternative {
    pub const ALL: [Alternative; 3] = [Alternative::TwoSided, Alternative::Greater, Alternative::Less];
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::TwoSided => "two_sided",
            Alternative::Greater => "one_sided_greater",
            Alternative::Less => "one_sided_less",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankSumMode {
    /// Exact when the pooled size is at most [`EXACT_MAX_TOTAL`].
    #[default]
    Auto,
    Exact,
    NormalApprox,
}

impl FromStr for RankSumMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "auto" => Ok(RankSumMode::Auto),
            "exact" => Ok(RankSumMode::Exact),
            "normal" | "normal_approx" => Ok(RankSumMode::NormalApprox),
            other => Err(format!("unknown rank-sum mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub method: Method,
    /// Welch: t. Wilcoxon: rank sum of sample a (midranks).
    pub statistic: f64,
    /// Welch-Satterthwaite degrees of freedom; `None` for Wilcoxon.
    pub degrees_of_freedom: Option<f64>,
    pub p_greater: f64,
    pub p_less: f64,
    pub p_two_sided: f64,
    /// The rank-sum mode actually used; `None` for Welch.
    pub rank_sum_mode: Option<RankSumMode>,
}

impl TestResult {
    pub fn p_value(&self, alternative: Alternative) -> f64 {
        match alternative {
            Alternative::TwoSided => self.p_two_sided,
            Alternative::Greater => self.p_greater,
            Alternative::Less => self.p_less,
        }
    }

    /// The upper-tail one-sided p-value.
    pub fn p_one_sided(&self) -> f64 {
        self.p_greater
    }
}

fn two_sided(p_greater: f64, p_less: f64) -> f64 {
    (2.0 * p_greater.min(p_less)).min(1.0)
}

fn mean_and_variance(sample: &[f64]) -> (f64, f64) {
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let ss: f64 = sample.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, ss / (n - 1.0))
}

/// Welch's two-sample t-test with sample (n - 1) variances.
pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64]) -> Result<TestResult> {
    for s in [sample_a, sample_b] {
        if s.len() < 2 {
            return Err(Error::InsufficientSamples {
                needed: 2,
                got: s.len(),
            });
        }
    }
    let (na, nb) = (sample_a.len() as f64, sample_b.len() as f64);
    let (mean_a, var_a) = mean_and_variance(sample_a);
    let (mean_b, var_b) = mean_and_variance(sample_b);
    let (qa, qb) = (var_a / na, var_b / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        let detail = if mean_a == mean_b {
            "both samples are constant with equal means"
        } else {
            "both samples are constant"
        };
        return Err(Error::DegenerateSample(detail.to_string()));
    }
    let t = (mean_a - mean_b) / se2.sqrt();
    let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let p_greater = student_t_sf(t, df);
    let p_less = student_t_sf(-t, df);
    Ok(TestResult {
        method: Method::Welch,
        statistic: t,
        degrees_of_freedom: Some(df),
        p_greater,
        p_less,
        p_two_sided: two_sided(p_greater, p_less),
        rank_sum_mode: None,
    })
}

/// Midranks (1-based) of the pooled samples, doubled so they are integers.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&i, &j| pooled[i].total_cmp(&pooled[j]));
    let mut ranks = vec![0u64; pooled.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && pooled[order[end]] == pooled[order[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1 ..= end; doubled mean is start+1+end
        let doubled = (start + 1 + end) as u64;
        for &idx in &order[start..end] {
            ranks[idx] = doubled;
        }
        start = end;
    }
    ranks
}

/// Sizes of the tie groups in `pooled`.
fn tie_groups(pooled: &[f64]) -> Vec<usize> {
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted
        .chunk_by(|x, y| x == y)
        .map(<[f64]>::len)
        .collect()
}

/// Wilcoxon rank sum test on the rank sum of `sample_a`.
pub fn wilcoxon_rank_sum(sample_a: &[f64], sample_b: &[f64], mode: RankSumMode) -> Result<TestResult> {
    for s in [sample_a, sample_b] {
        if s.is_empty() {
            return Err(Error::InsufficientSamples { needed: 1, got: 0 });
        }
    }
    if sample_a.iter().chain(sample_b).any(|v| v.is_nan()) {
        return Err(Error::InvalidArgument("samples contain NaN".into()));
    }
    let total = sample_a.len() + sample_b.len();
    let mode = match mode {
        RankSumMode::Auto if total <= EXACT_MAX_TOTAL => RankSumMode::Exact,
        RankSumMode::Auto => RankSumMode::NormalApprox,
        RankSumMode::Exact if total > EXACT_MAX_TOTAL => {
            return Err(Error::TooLarge {
                operation: "exact rank-sum test",
                detail: format!("pooled size {total} exceeds {EXACT_MAX_TOTAL}"),
            })
        }
        other => other,
    };

    let pooled: Vec<f64> = sample_a.iter().chain(sample_b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let doubled_sum: u64 = ranks[..sample_a.len()].iter().sum();
    let statistic = doubled_sum as f64 / 2.0;

    let (p_greater, p_less) = match mode {
        RankSumMode::Exact => exact_tails(&ranks, sample_a.len(), doubled_sum),
        _ => normal_tails(&pooled, sample_a.len(), sample_b.len(), statistic),
    };
    Ok(TestResult {
        method: Method::Wilcoxon,
        statistic,
        degrees_of_freedom: None,
        p_greater,
        p_less,
        p_two_sided: two_sided(p_greater, p_less),
        rank_sum_mode: Some(mode),
    })
}

/// Tail probabilities of the rank sum over all `C(N, n_a)` equally likely
/// assignments of the pooled ranks to sample a, counted by dynamic
/// programming over (subset size, doubled rank sum).
fn exact_tails(doubled_ranks: &[u64], n_a: usize, observed: u64) -> (f64, f64) {
    let max_sum: u64 = doubled_ranks.iter().sum();
    let width = max_sum as usize + 1;
    // counts[k * width + s] = number of k-subsets with doubled rank sum s
    let mut counts = vec![0u64; (n_a + 1) * width];
    counts[0] = 1;
    for &r in doubled_ranks {
        let r = r as usize;
        for k in (1..=n_a).rev() {
            for s in (r..width).rev() {
                let from = counts[(k - 1) * width + s - r];
                if from != 0 {
                    counts[k * width + s] += from;
                }
            }
        }
    }
    let row = &counts[n_a * width..];
    let all: u64 = row.iter().sum();
    let observed = observed as usize;
    let upper: u64 = row[observed..].iter().sum();
    let lower: u64 = row[..=observed].iter().sum();
    (upper as f64 / all as f64, lower as f64 / all as f64)
}

fn normal_tails(pooled: &[f64], n_a: usize, n_b: usize, rank_sum: f64) -> (f64, f64) {
    let n = (n_a + n_b) as f64;
    let (na, nb) = (n_a as f64, n_b as f64);
    let mean = na * (n + 1.0) / 2.0;
    let tie_term: f64 = tie_groups(pooled)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = if n > 1.0 {
        na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if variance <= 0.0 {
        return (1.0, 1.0);
    }
    let sd = variance.sqrt();
    let p_greater = normal_sf((rank_sum - mean - 0.5) / sd).min(1.0);
    let p_less = normal_cdf((rank_sum - mean + 0.5) / sd).min(1.0);
    (p_greater, p_less)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_samples() {
        let a = [1.0, 4.0, 2.0, 8.0];
        let r = welch_t_test(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_two_sided, 1.0);
        assert_eq!(r.p_greater, 0.5);
    }

    #[test]
    fn welch_against_reference() {
        // scipy.stats.ttest_ind([1,2,3,4,5], [2,4,6,8,10,12], equal_var=False)
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [2.0, 4.0, 6.0, 8.0, 10.0, 12.0];
        let r = welch_t_test(&a, &b).unwrap();
        assert!((r.statistic - -2.376_354_103_144_018_3).abs() < 1e-12);
        assert!((r.degrees_of_freedom.unwrap() - 6.972_255_729_794_934).abs() < 1e-9);
        assert!((r.p_two_sided - 0.049_284_338_206_730_49).abs() < 1e-10);
    }

    #[test]
    fn welch_errors() {
        assert!(matches!(
            welch_t_test(&[1.0], &[1.0, 2.0]),
            Err(Error::InsufficientSamples { .. })
        ));
        assert!(matches!(
            welch_t_test(&[3.0, 3.0], &[3.0, 3.0, 3.0]),
            Err(Error::DegenerateSample(_))
        ));
        // one constant sample is fine
        let r = welch_t_test(&[3.0, 3.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((r.degrees_of_freedom.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exchangeable_rank_sum() {
        let r = wilcoxon_rank_sum(&[1.0, 2.0], &[1.0, 2.0], RankSumMode::Exact).unwrap();
        assert_eq!(r.p_two_sided, 1.0);
        let r = wilcoxon_rank_sum(&[1.0, 2.0], &[1.0, 2.0], RankSumMode::NormalApprox).unwrap();
        assert_eq!(r.p_two_sided, 1.0);
    }

    #[test]
    fn midranks_with_ties() {
        assert_eq!(doubled_midranks(&[1.0, 2.0, 2.0, 4.0]), vec![2, 5, 5, 8]);
        assert_eq!(tie_groups(&[3.0, 1.0, 3.0, 3.0]), vec![1, 3]);
    }

    #[test]
    fn exact_fully_separated() {
        // a holds the 3 largest of 6: P(W >= 15) = 1 / C(6, 3)
        let r = wilcoxon_rank_sum(&[4.0, 5.0, 6.0], &[1.0, 2.0, 3.0], RankSumMode::Exact).unwrap();
        assert_eq!(r.statistic, 15.0);
        assert!((r.p_greater - 0.05).abs() < 1e-15);
        assert_eq!(r.p_less, 1.0);
        assert!((r.p_two_sided - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rank_sum_against_reference() {
        // scipy.stats.mannwhitneyu(a, b, method="asymptotic").pvalue
        let a = [1.1, 2.3, 3.2, 4.8, 5.5, 6.1, 7.4, 8.0];
        let b = [5.9, 6.6, 7.9, 8.8, 9.1, 10.2, 11.5, 12.0];
        let r = wilcoxon_rank_sum(&a, &b, RankSumMode::NormalApprox).unwrap();
        assert_eq!(r.statistic, 42.0);
        assert!((r.p_two_sided - 0.007_405_533_340_500_268).abs() < 1e-10);
        // scipy.stats.mannwhitneyu(a, b, method="exact").pvalue (no ties)
        let r = wilcoxon_rank_sum(&a, &b, RankSumMode::Exact).unwrap();
        assert!((r.p_two_sided - 0.004_662_004_662_004_662).abs() < 1e-12);
    }

    #[test]
    fn exact_guard() {
        let a = vec![1.0; 13];
        let b = vec![2.0; 12];
        assert!(matches!(
            wilcoxon_rank_sum(&a, &b, RankSumMode::Exact),
            Err(Error::TooLarge { .. })
        ));
        let r = wilcoxon_rank_sum(&a, &b, RankSumMode::Auto).unwrap();
        assert_eq!(r.rank_sum_mode, Some(RankSumMode::NormalApprox));
    }

    fn sample(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-50.0f64..50.0, len)
    }

    proptest! {
        #[test]
        fn welch_swap_and_df_bounds(a in sample(2..15), b in sample(2..15)) {
            let ab = welch_t_test(&a, &b).unwrap();
            let ba = welch_t_test(&b, &a).unwrap();
            prop_assert_eq!(ab.statistic, -ba.statistic);
            prop_assert_eq!(ab.p_two_sided, ba.p_two_sided);
            let df = ab.degrees_of_freedom.unwrap();
            let lo = (a.len().min(b.len()) - 1) as f64;
            let hi = (a.len() + b.len() - 2) as f64;
            prop_assert!(df >= lo - 1e-9 && df <= hi + 1e-9);
            prop_assert!(ab.p_two_sided > 0.0 && ab.p_two_sided <= 1.0);
        }

        #[test]
        fn welch_shift_and_scale(a in sample(2..15), b in sample(2..15), shift in -100.0f64..100.0, scale in 0.1f64..10.0) {
            let base = welch_t_test(&a, &b).unwrap();
            let shifted = welch_t_test(
                &a.iter().map(|x| x + shift).collect::<Vec<_>>(),
                &b.iter().map(|x| x + shift).collect::<Vec<_>>(),
            ).unwrap();
            let scaled = welch_t_test(
                &a.iter().map(|x| x * scale).collect::<Vec<_>>(),
                &b.iter().map(|x| x * scale).collect::<Vec<_>>(),
            ).unwrap();
            let tol = 1e-8 * base.statistic.abs().max(1.0);
            prop_assert!((base.statistic - shifted.statistic).abs() <= tol);
            prop_assert!((base.statistic.abs() - scaled.statistic.abs()).abs() <= tol);
            prop_assert!((base.p_two_sided - shifted.p_two_sided).abs() <= 1e-8);
        }

        #[test]
        fn rank_sum_monotone_invariance(a in sample(1..9), b in sample(1..9)) {
            let base = wilcoxon_rank_sum(&a, &b, RankSumMode::Exact).unwrap();
            let f = |x: &f64| x * x * x + x;
            let ta: Vec<f64> = a.iter().map(f).collect();
            let tb: Vec<f64> = b.iter().map(f).collect();
            let t = wilcoxon_rank_sum(&ta, &tb, RankSumMode::Exact).unwrap();
            prop_assert_eq!(base.p_two_sided, t.p_two_sided);
            prop_assert_eq!(base.p_greater, t.p_greater);
            prop_assert_eq!(base.statistic, t.statistic);
        }
    }
}
