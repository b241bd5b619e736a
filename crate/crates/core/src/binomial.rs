//! Binomial pmf/cdf tables and exact sampling by inversion.
//!
//! The pmf is built in log space by the ratio recurrence
//! `p(k+1) / p(k) = (m - k) / (k + 1) * p / (1 - p)` walking outward from the
//! mode, then normalized with its own sum. No factorials are evaluated, so
//! nothing overflows for large trial counts, and the walk stops once terms
//! drop below `1e-304` of the mode. Everything outside the stored window is
//! treated as zero.

use rand::RngCore;

use crate::rng::uniform;

/// Window cut-off, relative to the mode, in natural log units (about 1e-304).
const LOG_CUTOFF: f64 = -700.0;

/// pmf, cdf and survival function of `Bin(trials, p)` over the window of
/// non-negligible mass.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    trials: u64,
    p: f64,
    lo: u64,
    pmf: Vec<f64>,
    /// `cdf[j] = P(X <= lo + j)`
    cdf: Vec<f64>,
    /// `sf[j] = P(X >= lo + j)`, accumulated from the top for tail accuracy
    sf: Vec<f64>,
}

impl BinomialTable {
    /// # Panics
    ///
    /// If `p` is not strictly inside `(0, 1)`.
    pub fn new(trials: u64, p: f64) -> Self {
        assert!(p > 0.0 && p < 1.0, "binomial probability {p} outside (0, 1)");
        let mode = (((trials + 1) as f64 * p).floor() as u64).min(trials);
        let log_odds = (p / (1.0 - p)).ln();

        let mut upper = Vec::new();
        let mut log_p = 0.0;
        let mut k = mode;
        while k < trials {
            log_p += ((trials - k) as f64 / (k + 1) as f64).ln() + log_odds;
            if log_p < LOG_CUTOFF {
                break;
            }
            upper.push(log_p);
            k += 1;
        }

        let mut lower = Vec::new();
        let mut log_p = 0.0;
        let mut k = mode;
        while k > 0 {
            log_p += (k as f64 / (trials - k + 1) as f64).ln() - log_odds;
            if log_p < LOG_CUTOFF {
                break;
            }
            lower.push(log_p);
            k -= 1;
        }

        let lo = mode - lower.len() as u64;
        let mut pmf: Vec<f64> = lower
            .iter()
            .rev()
            .chain(std::iter::once(&0.0))
            .chain(upper.iter())
            .map(|&l| l.exp())
            .collect();
        let total: f64 = pmf.iter().sum();
        pmf.iter_mut().for_each(|v| *v /= total);

        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &v in &pmf {
            acc += v;
            cdf.push(acc.min(1.0));
        }
        let mut sf = vec![0.0; pmf.len()];
        let mut acc = 0.0;
        for (j, &v) in pmf.iter().enumerate().rev() {
            acc += v;
            sf[j] = acc.min(1.0);
        }

        Self { trials, p, lo, pmf, cdf, sf }
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn probability(&self) -> f64 {
        self.p
    }

    /// Smallest value with stored (non-negligible) mass.
    pub fn window_lo(&self) -> u64 {
        self.lo
    }

    /// Largest value with stored (non-negligible) mass.
    pub fn window_hi(&self) -> u64 {
        self.lo + self.pmf.len() as u64 - 1
    }

    pub fn pmf(&self, k: u64) -> f64 {
        self.offset(k).map_or(0.0, |j| self.pmf[j])
    }

    /// `P(X <= k)`.
    pub fn cdf(&self, k: u64) -> f64 {
        if k < self.lo {
            0.0
        } else {
            self.cdf.get((k - self.lo) as usize).copied().unwrap_or(1.0)
        }
    }

    /// `P(X >= k)`.
    pub fn sf(&self, k: u64) -> f64 {
        if k < self.lo {
            1.0
        } else {
            self.sf.get((k - self.lo) as usize).copied().unwrap_or(0.0)
        }
    }

    /// Largest `k` with `P(X <= k) <= p`, or 0 when there is none.
    pub fn lower_quantile(&self, p: f64) -> u64 {
        // cdf is non-decreasing; count entries <= p
        let below = self.cdf.partition_point(|&c| c <= p) as u64;
        if below > 0 {
            self.lo + below - 1
        } else {
            // everything under the window has mass < 1e-304 <= p
            self.lo.saturating_sub(1)
        }
    }

    /// Smallest `k` with `P(X >= k) <= tail`, or `trials` when there is none.
    pub fn upper_quantile(&self, tail: f64) -> u64 {
        // sf is non-increasing; count entries > tail
        let above = self.sf.partition_point(|&s| s > tail) as u64;
        (self.lo + above).min(self.trials)
    }

    /// Exact draw by inversion of the tabulated cdf.
    #[inline]
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = uniform(rng);
        let j = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        self.lo + j as u64
    }

    /// Mean of the tabulated distribution.
    pub fn mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(j, &v)| (self.lo + j as u64) as f64 * v)
            .sum()
    }

    fn offset(&self, k: u64) -> Option<usize> {
        (k >= self.lo && k <= self.window_hi()).then(|| (k - self.lo) as usize)
    }
}
