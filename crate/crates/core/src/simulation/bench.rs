use std::time::{Duration, Instant};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::alloc::{AllocUsage, Scope};
use crate::ci::{classic_ci_two_sample_with, fast_ci_two_sample, CiMethod, CiRequest, ClassicMode, TwoSampleData};
use crate::error::{Error, Result};
use crate::io::{fixed, Table, TableReport};
use crate::quantile::{QuantileQuery, SortedSample};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub n_per_group: usize,
    pub b_replications: usize,
    pub evaluations: usize,
    pub seed: u64,
    pub q: QuantileQuery,
    pub alpha: f64,
    pub classic_mode: ClassicMode,
}

impl BenchConfig {
    pub const MIN_EVALUATIONS: usize = 10;

    /// Median, `alpha = 0.05`, rank-scan classic.
    pub fn new(n_per_group: usize, b_replications: usize, evaluations: usize, seed: u64) -> Self {
        Self {
            n_per_group,
            b_replications,
            evaluations,
            seed,
            q: QuantileQuery::new(0.5).expect("0.5 is a valid quantile"),
            alpha: 0.05,
            classic_mode: ClassicMode::RankScan,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_per_group == 0 {
            return Err(Error::InvalidSampleSize);
        }
        if self.evaluations < Self::MIN_EVALUATIONS {
            return Err(Error::InvalidConfig(format!(
                "evaluations must be at least {}, got {}",
                Self::MIN_EVALUATIONS,
                self.evaluations
            )));
        }
        if self.b_replications == 0 {
            return Err(Error::TooFewReplications { min: 1, got: 0 });
        }
        CiRequest::new(self.q.value(), self.alpha, self.b_replications, CiMethod::Fast, self.seed).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: CiMethod,
    pub min_ms: f64,
    pub median_ms: f64,
    pub max_ms: f64,
    /// Largest live-heap growth over any evaluation; needs the tracking allocator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_extra_bytes: Option<usize>,
    /// Largest cumulative allocation of any evaluation; needs the tracking allocator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocated_bytes: Option<usize>,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub threads: usize,
    /// Timings cover sorting both groups plus building the interval.
    pub includes_sort: bool,
    pub rows: Vec<BenchRow>,
    /// Classic median time over fast median time.
    pub speedup: f64,
}

/// Times the classic and fast two-sample intervals on the same pair of
/// standard normal samples.
///
/// Each evaluation starts from the unsorted data, so sorting is included in
/// both timings. Evaluations alternate between the methods. Memory columns
/// are filled only when [`crate::alloc::TrackingAllocator`] is the global
/// allocator.
pub fn bench_compare(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let base = RandomSource::new(cfg.seed);
    let draw = |id| -> Vec<f64> {
        let mut rng = base.substream(id).rng();
        (0..cfg.n_per_group).map(|_| StandardNormal.sample(&mut rng)).collect()
    };
    let (treatment, control) = (draw(0), draw(1));
    let req = |method| CiRequest {
        q: cfg.q,
        alpha: cfg.alpha,
        b_replications: cfg.b_replications,
        method,
        seed: cfg.seed,
    };
    let (classic_req, fast_req) = (req(CiMethod::Classic), req(CiMethod::Fast));

    let mut classic = Runs::default();
    let mut fast = Runs::default();
    for _ in 0..cfg.evaluations {
        classic.run(&treatment, &control, |d| classic_ci_two_sample_with(d, &classic_req, cfg.classic_mode))?;
        fast.run(&treatment, &control, |d| fast_ci_two_sample(d, &fast_req))?;
    }
    let (classic, fast) = (classic.summarize(CiMethod::Classic), fast.summarize(CiMethod::Fast));
    Ok(BenchReport {
        config: *cfg,
        threads: rayon::current_num_threads(),
        includes_sort: true,
        speedup: classic.median_ms / fast.median_ms,
        rows: vec![classic, fast],
    })
}

#[derive(Default)]
struct Runs {
    times: Vec<Duration>,
    memory: Vec<AllocUsage>,
    interval: (f64, f64),
}

impl Runs {
    fn run<F>(&mut self, treatment: &[f64], control: &[f64], ci: F) -> Result<()>
    where
        F: FnOnce(&TwoSampleData) -> Result<crate::ci::ConfidenceInterval>,
    {
        let (t, c) = (treatment.to_vec(), control.to_vec());
        let scope = Scope::start();
        let start = Instant::now();
        let data = TwoSampleData::new(SortedSample::from_unsorted(t)?, SortedSample::from_unsorted(c)?);
        let out = ci(&data)?;
        self.times.push(start.elapsed());
        drop(data);
        self.memory.extend(scope.finish());
        self.interval = (out.lower, out.upper);
        Ok(())
    }

    fn summarize(mut self, method: CiMethod) -> BenchRow {
        self.times.sort();
        let ms = |d: Duration| d.as_secs_f64() * 1e3;
        let n = self.times.len();
        let median = (ms(self.times[(n - 1) / 2]) + ms(self.times[n / 2])) / 2.0;
        BenchRow {
            method,
            min_ms: ms(self.times[0]),
            median_ms: median,
            max_ms: ms(self.times[n - 1]),
            peak_extra_bytes: self.memory.iter().map(|m| m.peak_extra_bytes).max(),
            allocated_bytes: self.memory.iter().map(|m| m.allocated_bytes).max(),
            lower: self.interval.0,
            upper: self.interval.1,
        }
    }
}

impl TableReport for BenchReport {
    fn to_table(&self) -> Table {
        let c = &self.config;
        let title = format!(
            "N={} per group, B={}, {} evaluations, {} thread(s), seed {}; speedup {:.1}x",
            c.n_per_group, c.b_replications, c.evaluations, self.threads, c.seed, self.speedup
        );
        let mut t = Table::new(&["method", "min_ms", "median_ms", "max_ms", "peak_extra_bytes", "allocated_bytes"])
            .titled(title);
        for row in &self.rows {
            let bytes = |b: Option<usize>| b.map_or_else(|| "n/a".to_string(), |b| b.to_string());
            t.push(vec![
                match row.method {
                    CiMethod::Classic => "classic".into(),
                    CiMethod::Fast => "fast".into(),
                },
                fixed(row.min_ms, 3),
                fixed(row.median_ms, 3),
                fixed(row.max_ms, 3),
                bytes(row.peak_extra_bytes),
                bytes(row.allocated_bytes),
            ]);
        }
        t
    }
}
