//! Distribution of the original-sample index that a Poisson bootstrap
//! replicate reports as its quantile estimate.
//!
//! Three constructions are provided:
//!
//! * [`exact_index_pmf`]: the law of total probability over the bootstrap
//!   size `S ~ Poisson(N)`. Given `S = n` and a selected rank `k`, the
//!   original index `i` is reported exactly when fewer than `k` resampled
//!   draws fall strictly below it and at most `n - k` fall strictly above.
//!   The counts below / at / above `i` are multinomial with probabilities
//!   `((i-1)/N, 1/N, (N-i)/N)`.
//! * [`binomial_index_pmf`]: the `Bin(N + 1, q)` approximation.
//! * [`simulate_index_pmf`]: brute-force Poisson bootstrap tallies.
//!
//! [`max_abs_pmf_diff`] compares any two of them over the union of supports.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::BinomialTable;
use crate::error::{Error, Result};
use crate::quantile::{QuantileQuery, TargetRank};
use crate::rng::{RandomSource, UnitPoisson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfKind {
    Exact,
    Binomial,
    Empirical,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmfDiagnostics {
    /// Bootstrap replicates redrawn because every frequency was zero.
    pub empty_redraws: u64,
}

/// A pmf over the contiguous integer support `[support_lo, support_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexPmf {
    pub kind: PmfKind,
    pub support_lo: i64,
    pub support_hi: i64,
    pub probs: Vec<f64>,
    pub normalized: bool,
    pub diagnostics: PmfDiagnostics,
}

/// Which tail a conservative index quantile bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Lower,
    Upper,
}

impl IndexPmf {
    fn new(kind: PmfKind, support_lo: i64, probs: Vec<f64>, normalized: bool) -> Self {
        let support_hi = support_lo + probs.len() as i64 - 1;
        Self {
            kind,
            support_lo,
            support_hi,
            probs,
            normalized,
            diagnostics: PmfDiagnostics::default(),
        }
    }

    /// Probability of index `i`; zero outside the support.
    pub fn prob(&self, i: i64) -> f64 {
        if i < self.support_lo || i > self.support_hi {
            0.0
        } else {
            self.probs[(i - self.support_lo) as usize]
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .zip(self.support_lo..)
            .map(|(p, i)| p * i as f64)
            .sum::<f64>()
            / self.total_mass()
    }

    /// Rescaled copy whose probabilities sum to one.
    pub fn normalize(&self) -> Self {
        let total = self.total_mass();
        Self {
            probs: self.probs.iter().map(|p| p / total).collect(),
            normalized: true,
            ..self.clone()
        }
    }

    /// Conservative discrete quantile of the index.
    ///
    /// Lower tail: the largest `i` with `P(psi <= i) <= p`, or the support
    /// minimum. Upper tail: the smallest `i` with `P(psi >= i) <= 1 - p`, or
    /// the support maximum. Both are clamped into `[1, n_sample]`.
    pub fn conservative_index(&self, p: f64, tail: Tail, n_sample: usize) -> usize {
        let i = match tail {
            Tail::Lower => {
                let mut acc = 0.0;
                let mut best = self.support_lo;
                for (prob, i) in self.probs.iter().zip(self.support_lo..) {
                    acc += prob;
                    if acc <= p {
                        best = i;
                    } else {
                        break;
                    }
                }
                best
            }
            Tail::Upper => {
                let tail_mass = 1.0 - p;
                let mut acc = 0.0;
                let mut best = self.support_hi;
                for (j, prob) in self.probs.iter().enumerate().rev() {
                    acc += prob;
                    if acc <= tail_mass {
                        best = self.support_lo + j as i64;
                    } else {
                        break;
                    }
                }
                best
            }
        };
        i.clamp(1, n_sample as i64) as usize
    }
}

/// Controls for [`exact_index_pmf`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactPmfConfig {
    /// Poisson mass of the bootstrap size allowed outside the summation window.
    pub poisson_tail_mass: f64,
    /// Largest sample size accepted; cost grows roughly cubically.
    pub max_n_supported: usize,
}

impl Default for ExactPmfConfig {
    fn default() -> Self {
        Self { poisson_tail_mass: 1e-12, max_n_supported: 300 }
    }
}

impl ExactPmfConfig {
    fn validate(&self) -> Result<()> {
        if !(self.poisson_tail_mass > 0.0 && self.poisson_tail_mass < 1e-6) {
            return Err(Error::InvalidConfig(format!(
                "poisson_tail_mass must lie in (0, 1e-6), got {}",
                self.poisson_tail_mass
            )));
        }
        Ok(())
    }
}

/// Raw and normalized exact pmfs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactIndexPmf {
    /// Sums to one minus `P(S = 0)` minus the truncated Poisson tail.
    pub raw: IndexPmf,
    pub normalized: IndexPmf,
    /// Bootstrap sizes summed over.
    pub size_window: (u64, u64),
}

/// Smallest window around `n_sample` holding Poisson(`n_sample`) mass of at
/// least `1 - tail`, with the log pmf at each size in the window.
///
/// The pmf is built relative to the centre and normalized over a wide
/// window whose edge terms are below 1e-20, which avoids the rounding of a
/// log-factorial at the centre.
fn poisson_window(n_sample: usize, tail: f64) -> (u64, Vec<f64>) {
    const EDGE: f64 = -46.0; // ln(1e-20)
    let log_mean = (n_sample as f64).ln();
    let center = n_sample as u64;

    let mut below = Vec::new();
    let (mut k, mut log_p) = (center, 0.0);
    while k > 0 && log_p > EDGE {
        log_p += (k as f64).ln() - log_mean;
        k -= 1;
        below.push(log_p);
    }
    let mut above = Vec::new();
    let (mut k, mut log_p) = (center, 0.0);
    while log_p > EDGE {
        k += 1;
        log_p += log_mean - (k as f64).ln();
        above.push(log_p);
    }
    let log_total = below
        .iter()
        .chain(&above)
        .map(|l| l.exp())
        .sum::<f64>()
        .ln_1p();

    // greedy growth from the centre towards the heavier neighbour
    let (mut take_below, mut take_above) = (0usize, 0usize);
    let mut mass = (-log_total).exp();
    while mass < 1.0 - tail {
        let down = below.get(take_below).copied().unwrap_or(f64::NEG_INFINITY);
        let up = above.get(take_above).copied().unwrap_or(f64::NEG_INFINITY);
        if up == f64::NEG_INFINITY && down == f64::NEG_INFINITY {
            break;
        }
        if up >= down {
            take_above += 1;
            mass += (up - log_total).exp();
        } else {
            take_below += 1;
            mass += (down - log_total).exp();
        }
    }
    let logs = below[..take_below]
        .iter()
        .rev()
        .chain(std::iter::once(&0.0))
        .chain(&above[..take_above])
        .map(|l| l - log_total)
        .collect();
    (center - take_below as u64, logs)
}

/// Exact pmf of the bootstrap quantile index over `[1, n_sample]`.
///
/// For every bootstrap size `n` in the Poisson window and every rank `k`
/// the estimator can select at that size (weight 1 for an integral
/// `q (n + 1)`, else `r` for the ceiling and `1 - r` for the floor, clamped
/// into `[1, n]`), index `i` is selected when `X_below <= k - 1` and
/// `X_above <= n - k`. Conditional on `S = n` that probability is
///
/// `sum_{a = 0}^{k - 1} Bin(n, (i-1)/N)(a) * P(Bin(n - a, (N-i)/(N-i+1)) <= n - k)`
///
/// and both factors are tabulated per index with Pascal-style recurrences,
/// which stay stable for the degenerate categories at `i = 1` and `i = N`.
pub fn exact_index_pmf(n_sample: usize, q: QuantileQuery, cfg: &ExactPmfConfig) -> Result<ExactIndexPmf> {
    cfg.validate()?;
    if n_sample == 0 {
        return Err(Error::InvalidSampleSize);
    }
    if n_sample > cfg.max_n_supported {
        return Err(Error::SampleTooLarge { n: n_sample, max: cfg.max_n_supported });
    }

    let (size_lo, log_sizes) = poisson_window(n_sample, cfg.poisson_tail_mass);
    let size_hi = size_lo + log_sizes.len() as u64 - 1;
    let max_size = size_hi as usize;

    // (size, weight, [(rank, rank weight)]) for every size with a valid index
    let sizes: Vec<(usize, f64, Vec<(usize, f64)>)> = (size_lo..=size_hi)
        .zip(&log_sizes)
        .filter(|(n, _)| *n >= 1)
        .map(|(n, &log_p)| {
            let ranks = TargetRank::new(q.value(), n)
                .branches(n)
                .map(|(k, w)| (k as usize, w))
                .collect();
            (n as usize, log_p.exp(), ranks)
        })
        .collect();

    let big_n = n_sample as f64;
    let probs: Vec<f64> = (1..=n_sample)
        .into_par_iter()
        .map(|i| {
            let below = BinomialRows::pmf((i - 1) as f64 / big_n, max_size);
            let rest = (n_sample - i) as f64;
            let above = BinomialRows::cdf(rest / (rest + 1.0), max_size);
            sizes
                .iter()
                .map(|(n, p_size, ranks)| {
                    let n = *n;
                    let conditional: f64 = ranks
                        .iter()
                        .map(|&(k, w)| {
                            let s: f64 = (0..k.min(n + 1))
                                .map(|a| below.get(n, a) * above.get(n - a, n - k))
                                .sum();
                            w * s
                        })
                        .sum();
                    p_size * conditional
                })
                .sum()
        })
        .collect();

    let raw = IndexPmf::new(PmfKind::Exact, 1, probs, false);
    let normalized = raw.normalize();
    Ok(ExactIndexPmf { raw, normalized, size_window: (size_lo, size_hi) })
}

/// Triangular table of `Bin(m, p)` pmf or cdf values for `m = 0..=max`.
struct BinomialRows {
    rows: Vec<Vec<f64>>,
}

impl BinomialRows {
    /// `rows[m][a] = P(Bin(m, p) = a)` for `a in 0..=m`.
    fn pmf(p: f64, max: usize) -> Self {
        let mut rows = Vec::with_capacity(max + 1);
        rows.push(vec![1.0]);
        for m in 1..=max {
            let prev: &Vec<f64> = &rows[m - 1];
            let row = (0..=m)
                .map(|a| {
                    let stay = if a < m { (1.0 - p) * prev[a] } else { 0.0 };
                    let step = if a > 0 { p * prev[a - 1] } else { 0.0 };
                    stay + step
                })
                .collect();
            rows.push(row);
        }
        Self { rows }
    }

    /// `rows[m][c] = P(Bin(m, p) <= c)` for `c in 0..=m`.
    fn cdf(p: f64, max: usize) -> Self {
        let mut rows = Vec::with_capacity(max + 1);
        rows.push(vec![1.0]);
        for m in 1..=max {
            let prev: &Vec<f64> = &rows[m - 1];
            let at = |c: usize| if c >= m - 1 { 1.0 } else { prev[c] };
            let row = (0..=m)
                .map(|c| {
                    let step = if c > 0 { p * at(c - 1) } else { 0.0 };
                    step + (1.0 - p) * at(c)
                })
                .collect();
            rows.push(row);
        }
        Self { rows }
    }

    #[inline]
    fn get(&self, m: usize, j: usize) -> f64 {
        let row = &self.rows[m];
        if j < row.len() {
            row[j]
        } else {
            // only reachable for cdf rows, where mass above m is complete
            1.0
        }
    }
}

/// pmf of `Bin(n_sample + 1, q)` over `[0, n_sample + 1]`.
pub fn binomial_index_pmf(n_sample: usize, q: QuantileQuery) -> IndexPmf {
    let trials = n_sample as u64 + 1;
    let table = BinomialTable::new(trials, q.value());
    let probs = (0..=trials).map(|k| table.pmf(k)).collect();
    IndexPmf::new(PmfKind::Binomial, 0, probs, true)
}

/// Conservative index quantile of `Bin(n_sample + 1, q)`, clamped to
/// `[1, n_sample]`. See [`IndexPmf::conservative_index`] for the rule.
pub fn binomial_index_quantile(n_sample: usize, q: QuantileQuery, p: f64, tail: Tail) -> Result<usize> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    if n_sample == 0 {
        return Err(Error::InvalidSampleSize);
    }
    let table = BinomialTable::new(n_sample as u64 + 1, q.value());
    Ok(binomial_table_quantile(&table, p, tail, n_sample))
}

pub(crate) fn binomial_table_quantile(table: &BinomialTable, p: f64, tail: Tail, n_sample: usize) -> usize {
    let i = match tail {
        Tail::Lower => table.lower_quantile(p),
        Tail::Upper => table.upper_quantile(1.0 - p),
    };
    i.clamp(1, n_sample as u64) as usize
}

/// Replicates per random stream in brute-force simulations.
pub(crate) const REPLICATION_CHUNK: u64 = 4096;

/// Empirical index pmf from `replications` literal Poisson bootstrap draws.
///
/// Each replicate draws `N` Poisson(1) frequencies over the sorted sample,
/// selects the estimator's rank within the implied bootstrap sample and
/// records which original index holds that rank. Work is split into fixed
/// chunks with one stream each, so the tally does not depend on the thread
/// count.
pub fn simulate_index_pmf(
    n_sample: usize,
    q: QuantileQuery,
    replications: u64,
    rng: &RandomSource,
) -> Result<IndexPmf> {
    if n_sample == 0 {
        return Err(Error::InvalidSampleSize);
    }
    if replications == 0 {
        return Err(Error::TooFewReplications { min: 1, got: 0 });
    }
    let poisson = UnitPoisson::new();
    let chunks = replications.div_ceil(REPLICATION_CHUNK);
    let (counts, empty_redraws) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let reps = REPLICATION_CHUNK.min(replications - chunk * REPLICATION_CHUNK);
            let mut gen = rng.substream(chunk).rng();
            let mut counts = vec![0u64; n_sample];
            let mut freqs = vec![0u32; n_sample];
            let mut empty = 0u64;
            for _ in 0..reps {
                let size = loop {
                    let mut size = 0u64;
                    for f in freqs.iter_mut() {
                        *f = poisson.sample(&mut gen);
                        size += u64::from(*f);
                    }
                    if size > 0 {
                        break size;
                    }
                    empty += 1;
                };
                let rank = TargetRank::new(q.value(), size).draw(size, &mut gen);
                counts[rank_owner(&freqs, rank)] += 1;
            }
            (counts, empty)
        })
        .reduce(
            || (vec![0u64; n_sample], 0),
            |(mut a, ea), (b, eb)| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                (a, ea + eb)
            },
        );

    let total = replications as f64;
    let probs = counts.iter().map(|&c| c as f64 / total).collect();
    let mut pmf = IndexPmf::new(PmfKind::Empirical, 1, probs, true);
    pmf.diagnostics.empty_redraws = empty_redraws;
    Ok(pmf)
}

/// 0-based position of the original observation holding bootstrap rank
/// `rank` (1-based), given per-observation frequencies in sorted order.
#[inline]
pub(crate) fn rank_owner(freqs: &[u32], rank: u64) -> usize {
    let mut acc = 0u64;
    for (j, &f) in freqs.iter().enumerate() {
        acc += u64::from(f);
        if acc >= rank {
            return j;
        }
    }
    unreachable!("rank {rank} exceeds bootstrap size {acc}")
}

/// Largest absolute probability difference over the union of both supports.
pub fn max_abs_pmf_diff(a: &IndexPmf, b: &IndexPmf) -> f64 {
    let lo = a.support_lo.min(b.support_lo);
    let hi = a.support_hi.max(b.support_hi);
    (lo..=hi)
        .map(|i| (a.prob(i) - b.prob(i)).abs())
        .fold(0.0, f64::max)
}
