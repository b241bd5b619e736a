//! Bootstrap confidence intervals for a quantile and for a difference in
//! quantiles.
//!
//! | | one sample | two samples |
//! |---|---|---|
//! | classic | [`classic_ci_one_sample`] | [`classic_ci_two_sample`] |
//! | fast | [`fast_ci_one_sample`] | [`fast_ci_two_sample`] |
//!
//! The classic algorithms run the Poisson bootstrap literally: every
//! replicate draws one Poisson(1) frequency per observation and evaluates the
//! stochastic-rounding quantile of the implied bootstrap sample. Since
//! resampling never reorders observations, the estimate is located by a
//! cumulative-frequency scan over the sorted sample instead of by building
//! and sorting the bootstrap vector ([`ClassicMode::RankScan`]). The
//! materializing variant is kept for memory comparisons.
//!
//! The fast algorithms replace the replicate loop with the `Bin(N + 1, q)`
//! index distribution. For one sample the interval is read straight off two
//! order statistics; for two samples `B` index pairs are drawn and the
//! differences of the selected order statistics are summarized.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::BinomialTable;
use crate::error::{Error, Result};
use crate::io::{Table, TableReport};
use crate::index_dist::{binomial_table_quantile, rank_owner, Tail};
use crate::quantile::{QuantileQuery, SortedSample, TargetRank};
use crate::rng::{RandomSource, UnitPoisson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Classic,
    Fast,
}

/// How the classic algorithms locate the quantile in each replicate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicMode {
    /// Cumulative-frequency scan over the sorted sample.
    #[default]
    RankScan,
    /// Build each bootstrap vector and select from it.
    Materialize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiRequest {
    pub q: QuantileQuery,
    pub alpha: f64,
    /// Bootstrap replications; unused by [`fast_ci_one_sample`].
    pub b_replications: usize,
    pub method: CiMethod,
    pub seed: u64,
}

impl CiRequest {
    pub fn new(q: f64, alpha: f64, b_replications: usize, method: CiMethod, seed: u64) -> Result<Self> {
        let q = QuantileQuery::new(q)?;
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self { q, alpha, b_replications, method, seed })
    }

    fn require_replications(&self) -> Result<usize> {
        if self.b_replications < 1 {
            return Err(Error::TooFewReplications { min: 1, got: self.b_replications });
        }
        Ok(self.b_replications)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub method: CiMethod,
    pub q: f64,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    /// Order-statistic indexes `(i_L, i_U)`; fast one-sample only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indexes_used: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_used: Option<usize>,
    pub seed: u64,
}

impl ConfidenceInterval {
    pub fn nominal_level(&self) -> f64 {
        1.0 - self.alpha
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    fn from_request(req: &CiRequest, lower: f64, upper: f64) -> Self {
        Self {
            method: req.method,
            q: req.q.value(),
            alpha: req.alpha,
            lower,
            upper,
            indexes_used: None,
            b_used: None,
            seed: req.seed,
        }
    }
}

impl TableReport for ConfidenceInterval {
    fn to_table(&self) -> Table {
        let method = match self.method {
            CiMethod::Classic => "classic",
            CiMethod::Fast => "fast",
        };
        let mut t = Table::new(&["method", "q", "alpha", "lower", "upper", "B", "seed"]);
        t.push(vec![
            method.into(),
            self.q.to_string(),
            self.alpha.to_string(),
            self.lower.to_string(),
            self.upper.to_string(),
            self.b_used.map_or_else(|| "-".into(), |b| b.to_string()),
            self.seed.to_string(),
        ]);
        if let Some((lo, hi)) = self.indexes_used {
            t.title = Some(format!("order statistics {lo} and {hi}"));
        }
        t
    }
}

/// Treatment and control outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSampleData {
    pub treatment: SortedSample,
    pub control: SortedSample,
}

impl TwoSampleData {
    pub fn new(treatment: SortedSample, control: SortedSample) -> Self {
        Self { treatment, control }
    }
}

/// Lower and upper empirical quantiles of `estimates` with outward rounding.
///
/// After sorting, the lower endpoint has rank `max(1, floor((B+1) alpha/2))`
/// and the upper endpoint rank `min(B, ceil((B+1)(1 - alpha/2)))`. Both are
/// elements of the input. The slice is reordered in place.
pub fn conservative_empirical_quantiles(estimates: &mut [f64], alpha: f64) -> Result<(f64, f64)> {
    if estimates.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let b = estimates.len();
    let (lo_rank, hi_rank) = conservative_ranks(b, alpha);
    // two selections instead of a full sort
    let (_, &mut lower, right) = estimates.select_nth_unstable_by(lo_rank - 1, f64::total_cmp);
    let upper = if hi_rank == lo_rank {
        lower
    } else {
        *right.select_nth_unstable_by(hi_rank - lo_rank - 1, f64::total_cmp).1
    };
    Ok((lower, upper))
}

/// 1-based ranks used by [`conservative_empirical_quantiles`].
pub fn conservative_ranks(b: usize, alpha: f64) -> (usize, usize) {
    let scale = (b + 1) as f64;
    let lo = snapped(scale * alpha / 2.0).floor();
    let hi = snapped(scale * (1.0 - alpha / 2.0)).ceil();
    let lo = (lo as usize).max(1);
    let hi = (hi as usize).clamp(lo, b);
    (lo, hi)
}

/// Rounds values within a few ulps of an integer onto it, so products like
/// `200 * 0.05 / 2` are not pushed across a floor or ceiling by rounding.
fn snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 8.0 * f64::EPSILON * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Replicates per random stream in the classic algorithms.
const CLASSIC_CHUNK: usize = 256;

/// One Poisson bootstrap replicate of the quantile estimate.
struct Replicator<'a> {
    sample: &'a SortedSample,
    q: f64,
    poisson: &'a UnitPoisson,
    freqs: Vec<u32>,
}

impl<'a> Replicator<'a> {
    fn new(sample: &'a SortedSample, q: f64, poisson: &'a UnitPoisson) -> Self {
        Self {
            sample,
            q,
            poisson,
            freqs: vec![0; sample.len()],
        }
    }

    fn estimate<R: RngCore>(&mut self, mode: ClassicMode, rng: &mut R) -> f64 {
        let size = loop {
            let mut size = 0u64;
            for f in self.freqs.iter_mut() {
                *f = self.poisson.sample(rng);
                size += u64::from(*f);
            }
            // an empty bootstrap sample has no quantile; redraw it
            if size > 0 {
                break size;
            }
        };
        let rank = TargetRank::new(self.q, size).draw(size, rng);
        match mode {
            ClassicMode::RankScan => self.sample.values()[rank_owner(&self.freqs, rank)],
            ClassicMode::Materialize => {
                // a fresh vector per replicate, as a naive implementation would allocate
                let mut boot = Vec::with_capacity(size as usize);
                for (&v, &f) in self.sample.values().iter().zip(&self.freqs) {
                    boot.extend(std::iter::repeat_n(v, f as usize));
                }
                let k = rank as usize - 1;
                *boot.select_nth_unstable_by(k, f64::total_cmp).1
            }
        }
    }
}

/// Runs `b` replicates in fixed chunks with one stream per chunk; the output
/// order (and therefore every result) is independent of the thread count.
fn replicate<F>(b: usize, seed: u64, per_chunk: F) -> Vec<f64>
where
    F: Fn(usize, &mut crate::rng::StreamRng, &mut Vec<f64>) + Sync,
{
    let source = RandomSource::new(seed);
    let chunks = b.div_ceil(CLASSIC_CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let reps = CLASSIC_CHUNK.min(b - c * CLASSIC_CHUNK);
            let mut rng = source.substream(c as u64).rng();
            let mut out = Vec::with_capacity(reps);
            per_chunk(reps, &mut rng, &mut out);
            out
        })
        .collect();
    parts.concat()
}

/// Classic one-sample Poisson bootstrap interval.
pub fn classic_ci_one_sample(sample: &SortedSample, req: &CiRequest) -> Result<ConfidenceInterval> {
    classic_ci_one_sample_with(sample, req, ClassicMode::RankScan)
}

pub fn classic_ci_one_sample_with(
    sample: &SortedSample,
    req: &CiRequest,
    mode: ClassicMode,
) -> Result<ConfidenceInterval> {
    let b = req.require_replications()?;
    let poisson = UnitPoisson::new();
    let mut estimates = replicate(b, req.seed, |reps, rng, out| {
        let mut rep = Replicator::new(sample, req.q.value(), &poisson);
        out.extend((0..reps).map(|_| rep.estimate(mode, rng)));
    });
    let (lower, upper) = conservative_empirical_quantiles(&mut estimates, req.alpha)?;
    let mut ci = ConfidenceInterval::from_request(req, lower, upper);
    ci.method = CiMethod::Classic;
    ci.b_used = Some(b);
    Ok(ci)
}

/// Resampling-free one-sample interval: two order statistics chosen by
/// conservative quantiles of `Bin(N + 1, q)`. Uses no randomness.
pub fn fast_ci_one_sample(sample: &SortedSample, req: &CiRequest) -> Result<ConfidenceInterval> {
    let n = sample.len();
    let table = BinomialTable::new(n as u64 + 1, req.q.value());
    let a = binomial_table_quantile(&table, req.alpha / 2.0, Tail::Lower, n);
    let b = binomial_table_quantile(&table, 1.0 - req.alpha / 2.0, Tail::Upper, n);
    let (i_lower, i_upper) = (a.min(b), a.max(b));
    let mut ci = ConfidenceInterval::from_request(req, sample.order_stat(i_lower), sample.order_stat(i_upper));
    ci.method = CiMethod::Fast;
    ci.indexes_used = Some((i_lower, i_upper));
    Ok(ci)
}

/// Classic two-sample interval for `tau_t(q) - tau_c(q)`.
pub fn classic_ci_two_sample(data: &TwoSampleData, req: &CiRequest) -> Result<ConfidenceInterval> {
    classic_ci_two_sample_with(data, req, ClassicMode::RankScan)
}

pub fn classic_ci_two_sample_with(
    data: &TwoSampleData,
    req: &CiRequest,
    mode: ClassicMode,
) -> Result<ConfidenceInterval> {
    let b = req.require_replications()?;
    let poisson = UnitPoisson::new();
    let q = req.q.value();
    let mut estimates = replicate(b, req.seed, |reps, rng, out| {
        let mut treatment = Replicator::new(&data.treatment, q, &poisson);
        let mut control = Replicator::new(&data.control, q, &poisson);
        out.extend((0..reps).map(|_| {
            let t = treatment.estimate(mode, rng);
            let c = control.estimate(mode, rng);
            t - c
        }));
    });
    let (lower, upper) = conservative_empirical_quantiles(&mut estimates, req.alpha)?;
    let mut ci = ConfidenceInterval::from_request(req, lower, upper);
    ci.method = CiMethod::Classic;
    ci.b_used = Some(b);
    Ok(ci)
}

/// Index draws per random stream in [`fast_ci_two_sample`].
const FAST_CHUNK: usize = 8192;

/// Resampling-free two-sample interval: `B` independent index draws per arm
/// from `Bin(N + 1, q)`, clamped into `[1, N]`, differenced and summarized.
pub fn fast_ci_two_sample(data: &TwoSampleData, req: &CiRequest) -> Result<ConfidenceInterval> {
    let b = req.require_replications()?;
    let (t, c) = (&data.treatment, &data.control);
    let table_t = BinomialTable::new(t.len() as u64 + 1, req.q.value());
    let table_c = BinomialTable::new(c.len() as u64 + 1, req.q.value());
    let (n_t, n_c) = (t.len() as u64, c.len() as u64);

    let source = RandomSource::new(req.seed);
    let chunks = b.div_ceil(FAST_CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let reps = FAST_CHUNK.min(b - chunk * FAST_CHUNK);
            let mut rng = source.substream(chunk as u64).rng();
            (0..reps)
                .map(|_| {
                    let i_t = table_t.sample(&mut rng).clamp(1, n_t) as usize;
                    let i_c = table_c.sample(&mut rng).clamp(1, n_c) as usize;
                    t.order_stat(i_t) - c.order_stat(i_c)
                })
                .collect()
        })
        .collect();
    let mut diffs = parts.concat();

    let (lower, upper) = conservative_empirical_quantiles(&mut diffs, req.alpha)?;
    let mut ci = ConfidenceInterval::from_request(req, lower, upper);
    ci.method = CiMethod::Fast;
    ci.b_used = Some(b);
    Ok(ci)
}

/// Dispatches on `req.method`.
pub fn ci_one_sample(sample: &SortedSample, req: &CiRequest) -> Result<ConfidenceInterval> {
    match req.method {
        CiMethod::Classic => classic_ci_one_sample(sample, req),
        CiMethod::Fast => fast_ci_one_sample(sample, req),
    }
}

/// Dispatches on `req.method`.
pub fn ci_two_sample(data: &TwoSampleData, req: &CiRequest) -> Result<ConfidenceInterval> {
    match req.method {
        CiMethod::Classic => classic_ci_two_sample(data, req),
        CiMethod::Fast => fast_ci_two_sample(data, req),
    }
}
