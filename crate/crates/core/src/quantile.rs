//! Samples, order statistics and the stochastic-rounding quantile estimator.
//!
//! Indexes in the public API are 1-based: `order_stat(1)` is the minimum and
//! `order_stat(n)` the maximum.
//!
//! The estimator selects a single order statistic rather than interpolating.
//! For level `q` and sample size `n` it targets the fractional rank
//! `q (n + 1)`. An integral rank is used as is. Otherwise the rank is rounded
//! up with probability equal to its fractional part and down with the
//! complementary probability. The result is always an observed value.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{uniform, RandomSource};

/// A quantile level strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QuantileQuery(f64);

impl QuantileQuery {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q < 1.0 {
            Ok(Self(q))
        } else {
            Err(Error::InvalidQuantile(q))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for QuantileQuery {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<QuantileQuery> for f64 {
    fn from(q: QuantileQuery) -> f64 {
        q.0
    }
}

/// A non-empty, NaN-free sample in non-decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    /// Sorts `raw` (stable with respect to equal values).
    pub fn from_unsorted(mut raw: Vec<f64>) -> Result<Self> {
        check_values(&raw)?;
        raw.sort_by(f64::total_cmp);
        Ok(Self { values: raw })
    }

    /// Wraps values that are already in non-decreasing order.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        if let Some(k) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::Unsorted(k + 1));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The `index`-th smallest value (1-based).
    ///
    /// # Panics
    ///
    /// If `index` is 0 or greater than the sample size.
    #[inline]
    pub fn order_stat(&self, index: usize) -> f64 {
        assert!(
            index >= 1 && index <= self.values.len(),
            "order statistic {index} outside [1, {}]",
            self.values.len()
        );
        self.values[index - 1]
    }

    /// Same sample with `f` applied to every value; `f` must be monotone
    /// non-decreasing.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_sorted(self.values.iter().map(|&v| f(v)).collect())
    }
}

fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(k) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::NanValue(k + 1));
    }
    Ok(())
}

/// Sorts a raw sample into a [`SortedSample`].
pub fn sort_sample(raw: Vec<f64>) -> Result<SortedSample> {
    SortedSample::from_unsorted(raw)
}

/// The fractional target rank `q (n + 1)` split into floor and remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TargetRank {
    pub(crate) floor: u64,
    /// Fractional part in `[0, 1)`; exactly 0 when the rank is integral.
    pub(crate) frac: f64,
}

impl TargetRank {
    #[inline]
    pub(crate) fn new(q: f64, n: u64) -> Self {
        let x = q * (n + 1) as f64;
        let floor = x.floor();
        let frac = x - floor;
        // q itself carries representation error, so ranks such as 0.7 * 10
        // land a few ulps off the integer.
        let tol = 4.0 * f64::EPSILON * x.max(1.0);
        if frac <= tol {
            Self { floor: floor as u64, frac: 0.0 }
        } else if 1.0 - frac <= tol {
            Self { floor: floor as u64 + 1, frac: 0.0 }
        } else {
            Self { floor: floor as u64, frac }
        }
    }

    /// Candidate ranks with their probabilities, clamped into `[1, n]`.
    pub(crate) fn branches(self, n: u64) -> impl Iterator<Item = (u64, f64)> {
        let clamp = move |k: u64| k.clamp(1, n);
        let (first, second) = if self.frac == 0.0 {
            ((clamp(self.floor), 1.0), None)
        } else {
            (
                (clamp(self.floor + 1), self.frac),
                Some((clamp(self.floor), 1.0 - self.frac)),
            )
        };
        std::iter::once(first).chain(second)
    }

    /// Draws the rank; consumes one uniform only when the rank is fractional.
    #[inline]
    pub(crate) fn draw<R: RngCore + ?Sized>(self, n: u64, rng: &mut R) -> u64 {
        let k = if self.frac == 0.0 {
            self.floor
        } else if uniform(rng) < self.frac {
            self.floor + 1
        } else {
            self.floor
        };
        k.clamp(1, n)
    }
}

/// Samples the order-statistic index `g[q, n]` used by the estimator.
///
/// Ranks that fall outside `[1, n]` (possible only for `q` very close to 0
/// or 1 relative to `n`) are clamped to the nearest valid index.
pub fn g_index<R: RngCore + ?Sized>(q: QuantileQuery, n: usize, rng: &mut R) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidSampleSize);
    }
    Ok(TargetRank::new(q.value(), n as u64).draw(n as u64, rng) as usize)
}

/// The stochastic-rounding sample quantile: one order statistic of `sample`.
pub fn quantile_estimate(sample: &SortedSample, q: QuantileQuery, rng: &RandomSource) -> f64 {
    let mut rng = rng.rng();
    quantile_estimate_with(sample, q, &mut rng)
}

/// As [`quantile_estimate`], drawing from an existing generator.
pub fn quantile_estimate_with<R: RngCore + ?Sized>(
    sample: &SortedSample,
    q: QuantileQuery,
    rng: &mut R,
) -> f64 {
    let n = sample.len() as u64;
    sample.order_stat(TargetRank::new(q.value(), n).draw(n, rng) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> QuantileQuery {
        QuantileQuery::new(v).unwrap()
    }

    #[test]
    fn rejects_boundary_levels() {
        for bad in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(QuantileQuery::new(bad).is_err(), "{bad}");
        }
        assert!(serde_json::from_str::<QuantileQuery>("1.0").is_err());
        assert_eq!(serde_json::from_str::<QuantileQuery>("0.25").unwrap(), q(0.25));
    }

    #[test]
    fn integral_rank_is_deterministic() {
        let mut rng = RandomSource::new(0).rng();
        for _ in 0..1000 {
            assert_eq!(g_index(q(0.5), 9, &mut rng).unwrap(), 5);
        }
        // 0.7 * 10 is 7.000000000000001 in binary floating point
        for _ in 0..1000 {
            assert_eq!(g_index(q(0.7), 9, &mut rng).unwrap(), 7);
        }
    }

    #[test]
    fn integral_rank_consumes_no_randomness() {
        let mut a = RandomSource::new(5).rng();
        let b = a.clone();
        g_index(q(0.5), 9, &mut a).unwrap();
        assert_eq!(a, b);
        g_index(q(0.5), 10, &mut a).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn g_index_rejects_empty() {
        let mut rng = RandomSource::new(0).rng();
        assert!(matches!(g_index(q(0.5), 0, &mut rng), Err(Error::InvalidSampleSize)));
    }

    fn frequency_of(qv: f64, n: usize, value: usize, draws: usize, seed: u64) -> f64 {
        let mut rng = RandomSource::new(seed).rng();
        let hits = (0..draws)
            .filter(|_| g_index(q(qv), n, &mut rng).unwrap() == value)
            .count();
        hits as f64 / draws as f64
    }

    #[test]
    fn median_of_ten_splits_evenly() {
        let draws = 200_000;
        let mut rng = RandomSource::new(1).rng();
        let mut counts = [0usize; 11];
        for _ in 0..draws {
            counts[g_index(q(0.5), 10, &mut rng).unwrap()] += 1;
        }
        assert_eq!(counts[5] + counts[6], draws);
        let p = counts[6] as f64 / draws as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / draws as f64).sqrt());
    }

    #[test]
    fn tenth_percentile_of_ten_rounds_up_with_probability_point_one() {
        // q (n + 1) = 1.1 so the ceiling (2) has probability 0.1
        let draws = 1_000_000;
        let p_two = frequency_of(0.1, 10, 2, draws, 2);
        let p_one = frequency_of(0.1, 10, 1, draws, 2);
        assert!((p_one + p_two - 1.0).abs() < 1e-12);
        let sigma = (0.1 * 0.9 / draws as f64).sqrt();
        assert!((p_two - 0.1).abs() < 3.0 * sigma, "p_two = {p_two}");
    }

    #[test]
    fn ceiling_frequency_passes_chi_square() {
        // q (n + 1) = 0.3 * 21 = 6.3, so P(7) = 0.3, P(6) = 0.7
        let draws = 100_000;
        let mut rng = RandomSource::new(4).rng();
        let up = (0..draws)
            .filter(|_| g_index(q(0.3), 20, &mut rng).unwrap() == 7)
            .count() as f64;
        let down = draws as f64 - up;
        let (eu, ed) = (0.3 * draws as f64, 0.7 * draws as f64);
        let chi2 = (up - eu).powi(2) / eu + (down - ed).powi(2) / ed;
        // 99.9th percentile of chi-square with one degree of freedom
        assert!(chi2 < 10.83, "chi2 = {chi2}");
    }

    #[test]
    fn extreme_ranks_are_clamped() {
        let mut rng = RandomSource::new(8).rng();
        for _ in 0..1000 {
            // 0.99 * 3 = 2.97 -> ceil 3 or floor 2
            let hi = g_index(q(0.99), 2, &mut rng).unwrap();
            assert!((1..=2).contains(&hi));
            // 0.01 * 3 = 0.03 -> floor 0 clamps to 1
            assert_eq!(g_index(q(0.01), 2, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn estimate_of_integral_median() {
        let sample = sort_sample((1..=9).rev().map(f64::from).collect()).unwrap();
        assert_eq!(quantile_estimate(&sample, q(0.5), &RandomSource::new(0)), 5.0);
    }

    #[test]
    fn estimate_of_two_points_is_either_point() {
        let sample = sort_sample(vec![20.0, 10.0]).unwrap();
        let mut rng = RandomSource::new(3).rng();
        let draws = 100_000;
        let tens = (0..draws)
            .map(|_| quantile_estimate_with(&sample, q(0.5), &mut rng))
            .inspect(|v| assert!(*v == 10.0 || *v == 20.0))
            .filter(|v| *v == 10.0)
            .count();
        let p = tens as f64 / draws as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / draws as f64).sqrt());
    }

    #[test]
    fn sort_sample_edge_cases() {
        assert_eq!(sort_sample(vec![3.0, 1.0, 2.0]).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(sort_sample(vec![5.0]).unwrap().values(), &[5.0]);
        assert!(matches!(sort_sample(vec![]), Err(Error::EmptySample)));
        assert!(matches!(sort_sample(vec![1.0, f64::NAN]), Err(Error::NanValue(2))));

        let sorted: Vec<f64> = (0..1_000_000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(sort_sample(sorted.clone()).unwrap().values(), sorted.as_slice());
    }

    #[test]
    fn from_sorted_rejects_disorder() {
        assert!(matches!(
            SortedSample::from_sorted(vec![1.0, 3.0, 2.0]),
            Err(Error::Unsorted(2))
        ));
        assert!(SortedSample::from_sorted(vec![1.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn target_rank_branches_sum_to_one() {
        for (qv, n) in [(0.5, 9u64), (0.5, 10), (0.1, 10), (0.99, 2), (0.01, 2)] {
            let total: f64 = TargetRank::new(qv, n).branches(n).map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-15);
            assert!(TargetRank::new(qv, n).branches(n).all(|(k, _)| (1..=n).contains(&k)));
        }
    }
}
