//! Two-group data model, pooled-variance t statistic, and the frequentist
//! two-sided p-value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("empty sample: at least one observation is required")]
    Empty,
    #[error("non-finite observation {value} at position {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("need at least 3 observations across both groups, got {total}")]
    InsufficientData { total: usize },
    #[error("pooled variance is zero (the data are constant), so t is undefined")]
    DegenerateVariance,
    #[error("{0}")]
    Invalid(String),
}

/// Per-group count, mean, and unbiased sample variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl SampleSummary {
    /// Builds a summary from already-computed statistics, validating the
    /// type invariants (n >= 1, finite mean, finite variance >= 0).
    pub fn new(n: usize, mean: f64, variance: f64) -> Result<Self, SampleError> {
        if n < 1 {
            return Err(SampleError::Empty);
        }
        if !mean.is_finite() {
            return Err(SampleError::Invalid(format!(
                "mean must be finite, got {mean}"
            )));
        }
        if !variance.is_finite() || variance < 0.0 {
            return Err(SampleError::Invalid(format!(
                "variance must be finite and >= 0, got {variance}"
            )));
        }
        Ok(Self { n, mean, variance })
    }
}

/// Two-pass mean and unbiased (n-1 divisor) variance. A single observation
/// has variance 0.
pub fn summarize(observations: &[f64]) -> Result<SampleSummary, SampleError> {
    if observations.is_empty() {
        return Err(SampleError::Empty);
    }
    for (index, &value) in observations.iter().enumerate() {
        if !value.is_finite() {
            return Err(SampleError::NonFinite { index, value });
        }
    }
    let n = observations.len();
    let mean = observations.iter().sum::<f64>() / n as f64;
    let variance = if n == 1 {
        0.0
    } else {
        observations.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / (n - 1) as f64
    };
    Ok(SampleSummary { n, mean, variance })
}

/// Pooled two-sample t statistic together with the design quantities every
/// downstream Bayes factor needs.
///
/// `s_p2` is `None` when the test was reconstructed from a published t
/// statistic and group sizes, where the pooled variance is unknowable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSampleTest {
    /// Pooled-variance t statistic.
    pub t: f64,
    /// Degrees of freedom, n1 + n2 - 2.
    pub v: u64,
    /// Effective sample size (1/n1 + 1/n2)^-1.
    pub n_delta: f64,
    /// Pooled variance estimate, when raw summaries were available.
    pub s_p2: Option<f64>,
}

impl TwoSampleTest {
    /// Reconstructs a test from a known t statistic and the group sizes.
    pub fn from_t(t: f64, n1: usize, n2: usize) -> Result<Self, SampleError> {
        if n1 < 1 || n2 < 1 {
            return Err(SampleError::Empty);
        }
        if n1 + n2 < 3 {
            return Err(SampleError::InsufficientData { total: n1 + n2 });
        }
        Self::from_statistic(t, (n1 + n2 - 2) as u64, effective_sample_size(n1, n2))
    }

    /// Builds a test directly from (t, v, n_delta); used for curve sweeps
    /// where no group-level data exist.
    pub fn from_statistic(t: f64, v: u64, n_delta: f64) -> Result<Self, SampleError> {
        if !t.is_finite() {
            return Err(SampleError::Invalid(format!("t must be finite, got {t}")));
        }
        if v < 1 {
            return Err(SampleError::InsufficientData { total: v as usize + 2 });
        }
        if !(n_delta > 0.0) || !n_delta.is_finite() {
            return Err(SampleError::Invalid(format!(
                "n_delta must be positive and finite, got {n_delta}"
            )));
        }
        Ok(Self {
            t,
            v,
            n_delta,
            s_p2: None,
        })
    }
}

pub fn effective_sample_size(n1: usize, n2: usize) -> f64 {
    (n1 as f64 * n2 as f64) / (n1 + n2) as f64
}

/// Pooled-variance t statistic from two group summaries.
pub fn pooled_t(s1: &SampleSummary, s2: &SampleSummary) -> Result<TwoSampleTest, SampleError> {
    let total = s1.n + s2.n;
    if total < 3 {
        return Err(SampleError::InsufficientData { total });
    }
    let v = (total - 2) as u64;
    let s_p2 =
        ((s1.n - 1) as f64 * s1.variance + (s2.n - 1) as f64 * s2.variance) / v as f64;
    if s_p2 <= 0.0 {
        return Err(SampleError::DegenerateVariance);
    }
    let n_delta = effective_sample_size(s1.n, s2.n);
    let t = (s1.mean - s2.mean) / (s_p2 / n_delta).sqrt();
    if !t.is_finite() {
        return Err(SampleError::Invalid(format!("t is not finite: {t}")));
    }
    Ok(TwoSampleTest {
        t,
        v,
        n_delta,
        s_p2: Some(s_p2),
    })
}

/// Two-sided p-value and the alpha-level decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequentistResult {
    pub p_value: f64,
    pub alpha: f64,
    pub reject_h0: bool,
}

/// p = 2 P(T_v >= |t|), computed as I_{v/(v+t^2)}(v/2, 1/2).
pub fn two_sided_p_value(
    test: &TwoSampleTest,
    alpha: f64,
) -> Result<FrequentistResult, SampleError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SampleError::Invalid(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let v = test.v as f64;
    let x = v / (v + test.t * test.t);
    let p_value = numerics::regularized_incomplete_beta(x, v / 2.0, 0.5)
        .expect("arguments are inside the incomplete beta domain");
    Ok(FrequentistResult {
        p_value,
        alpha,
        reject_h0: p_value < alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn summarize_hand_examples() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.n, 3);
        assert_abs_diff_eq!(s.mean, 2.0);
        assert_abs_diff_eq!(s.variance, 1.0);

        let single = summarize(&[5.0]).unwrap();
        assert_eq!(single.n, 1);
        assert_abs_diff_eq!(single.mean, 5.0);
        assert_abs_diff_eq!(single.variance, 0.0);

        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.n, 4);
        assert_abs_diff_eq!(s.mean, 2.5);
        assert_relative_eq!(s.variance, 5.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn summarize_rejects_bad_input() {
        assert!(matches!(summarize(&[]), Err(SampleError::Empty)));
        assert!(matches!(
            summarize(&[1.0, f64::NAN]),
            Err(SampleError::NonFinite { index: 1, .. })
        ));
        assert!(matches!(
            summarize(&[f64::INFINITY]),
            Err(SampleError::NonFinite { index: 0, .. })
        ));
    }

    #[test]
    fn pooled_t_identical_groups() {
        let s = summarize(&[1.0, 2.0, 3.0]).unwrap();
        let test = pooled_t(&s, &s).unwrap();
        assert_abs_diff_eq!(test.t, 0.0);
        assert_eq!(test.v, 4);
        assert_abs_diff_eq!(test.n_delta, 1.5);
    }

    #[test]
    fn pooled_t_hand_computed() {
        let s1 = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let s2 = summarize(&[3.0, 4.0, 5.0, 6.0]).unwrap();
        let test = pooled_t(&s1, &s2).unwrap();
        // t = -2 sqrt(6/5)
        assert_relative_eq!(test.t, -2.190890230020664, max_relative = 1e-12);
        assert_eq!(test.v, 6);
        assert_abs_diff_eq!(test.n_delta, 2.0);
        assert_relative_eq!(test.s_p2.unwrap(), 5.0 / 3.0, max_relative = 1e-15);
    }

    #[test]
    fn effective_sample_size_for_unbalanced_design() {
        let test = TwoSampleTest::from_t(1.634, 10, 11).unwrap();
        assert_eq!(test.v, 19);
        assert_relative_eq!(test.n_delta, 110.0 / 21.0, max_relative = 1e-15);
        assert!(test.s_p2.is_none());
    }

    #[test]
    fn pooled_t_error_paths() {
        let one = summarize(&[1.0]).unwrap();
        let other = summarize(&[2.0]).unwrap();
        assert!(matches!(
            pooled_t(&one, &other),
            Err(SampleError::InsufficientData { total: 2 })
        ));

        let flat1 = summarize(&[4.0, 4.0]).unwrap();
        let flat2 = summarize(&[4.0, 4.0]).unwrap();
        assert!(matches!(
            pooled_t(&flat1, &flat2),
            Err(SampleError::DegenerateVariance)
        ));

        // One-point groups are fine as long as the pooled variance is positive.
        let pair = summarize(&[1.0, 3.0]).unwrap();
        let point = summarize(&[2.0]).unwrap();
        let test = pooled_t(&pair, &point).unwrap();
        assert_eq!(test.v, 1);
        assert!(test.t.is_finite());
    }

    #[test]
    fn p_value_reference_case() {
        let test = TwoSampleTest::from_t(1.634, 10, 11).unwrap();
        let res = two_sided_p_value(&test, 0.05).unwrap();
        assert_abs_diff_eq!(res.p_value, 0.1187197112351747, epsilon = 1e-12);
        assert!(!res.reject_h0);
    }

    #[test]
    fn p_value_extremes() {
        let zero = TwoSampleTest::from_t(0.0, 5, 5).unwrap();
        assert_eq!(two_sided_p_value(&zero, 0.05).unwrap().p_value, 1.0);

        for t in [1e6, -1e6] {
            let test = TwoSampleTest::from_t(t, 10, 11).unwrap();
            let res = two_sided_p_value(&test, 0.05).unwrap();
            assert!(res.p_value < 1e-12, "p = {}", res.p_value);
            assert!(res.reject_h0);
        }
    }

    #[test]
    fn p_value_alpha_validation() {
        let test = TwoSampleTest::from_t(1.0, 5, 5).unwrap();
        assert!(two_sided_p_value(&test, 0.0).is_err());
        assert!(two_sided_p_value(&test, 1.0).is_err());
    }

    #[test]
    fn p_value_even_and_decreasing_in_magnitude() {
        let mut prev = 1.0;
        for i in 0..=40 {
            let t = i as f64 * 0.25;
            let plus = two_sided_p_value(&TwoSampleTest::from_t(t, 8, 9).unwrap(), 0.05)
                .unwrap()
                .p_value;
            let minus = two_sided_p_value(&TwoSampleTest::from_t(-t, 8, 9).unwrap(), 0.05)
                .unwrap()
                .p_value;
            assert_eq!(plus, minus);
            if i > 0 {
                assert!(plus < prev, "p not strictly decreasing at t = {t}");
            }
            prev = plus;
        }
    }

    #[test]
    fn swap_negates_t_exactly() {
        let s1 = summarize(&[1.0, 2.5, 3.0, 7.5]).unwrap();
        let s2 = summarize(&[0.5, 2.0, 2.0]).unwrap();
        let fwd = pooled_t(&s1, &s2).unwrap();
        let rev = pooled_t(&s2, &s1).unwrap();
        assert_eq!(fwd.t, -rev.t);
        assert_eq!(fwd.v, rev.v);
        assert_eq!(fwd.n_delta, rev.n_delta);
        assert_eq!(fwd.s_p2, rev.s_p2);
    }

    fn group_strategy() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, 2..8)
    }

    proptest! {
        #[test]
        fn location_invariance(g1 in group_strategy(), g2 in group_strategy(), c in -100.0f64..100.0) {
            let s1 = summarize(&g1).unwrap();
            let s2 = summarize(&g2).unwrap();
            prop_assume!(pooled_t(&s1, &s2).is_ok());
            let base = pooled_t(&s1, &s2).unwrap();

            let g1c: Vec<f64> = g1.iter().map(|y| y + c).collect();
            let g2c: Vec<f64> = g2.iter().map(|y| y + c).collect();
            let shifted = pooled_t(&summarize(&g1c).unwrap(), &summarize(&g2c).unwrap()).unwrap();
            prop_assert!((shifted.t - base.t).abs() <= 1e-12 * base.t.abs().max(1.0));
        }

        #[test]
        fn scale_invariance(g1 in group_strategy(), g2 in group_strategy(), c in 0.001f64..1000.0) {
            let s1 = summarize(&g1).unwrap();
            let s2 = summarize(&g2).unwrap();
            prop_assume!(pooled_t(&s1, &s2).is_ok());
            let base = pooled_t(&s1, &s2).unwrap();

            let g1c: Vec<f64> = g1.iter().map(|y| y * c).collect();
            let g2c: Vec<f64> = g2.iter().map(|y| y * c).collect();
            let scaled = pooled_t(&summarize(&g1c).unwrap(), &summarize(&g2c).unwrap()).unwrap();
            prop_assert!((scaled.t - base.t).abs() <= 1e-12 * base.t.abs().max(1.0));
        }

        #[test]
        fn antisymmetry(g1 in group_strategy(), g2 in group_strategy()) {
            let s1 = summarize(&g1).unwrap();
            let s2 = summarize(&g2).unwrap();
            prop_assume!(pooled_t(&s1, &s2).is_ok());
            let fwd = pooled_t(&s1, &s2).unwrap();
            let rev = pooled_t(&s2, &s1).unwrap();
            prop_assert_eq!(fwd.t, -rev.t);
            prop_assert_eq!(fwd.v, rev.v);
            prop_assert_eq!(fwd.n_delta, rev.n_delta);
        }
    }
}
