use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::normal::standard_normal_quantile;
use crate::ci::{fast_ci_one_sample, fast_ci_two_sample, CiMethod, CiRequest, TwoSampleData};
use crate::error::{Error, Result};
use crate::io::{fixed, Table, TableReport};
use crate::quantile::{QuantileQuery, SortedSample};
use crate::rng::{RandomSource, StreamRng};

/// How standard normal variates are produced; echoed in every report.
pub const NORMAL_GENERATOR: &str = "ziggurat (rand_distr::StandardNormal) on ChaCha8, stream per replication";

/// Data-generating process of a coverage study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dgp {
    StandardNormal,
    /// Every observation equals the value. A degenerate check: the interval
    /// collapses onto the truth.
    Constant(f64),
}

impl Dgp {
    fn fill(self, out: &mut Vec<f64>, n: usize, rng: &mut StreamRng) {
        out.clear();
        match self {
            Self::StandardNormal => out.extend((0..n).map(|_| -> f64 { StandardNormal.sample(rng) })),
            Self::Constant(c) => out.resize(n, c),
        }
    }

    fn quantile(self, q: f64) -> f64 {
        match self {
            Self::StandardNormal => standard_normal_quantile(q),
            Self::Constant(c) => c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    /// Interval for the `q`-quantile; the truth is the population quantile.
    OneSample,
    /// Interval for a difference in quantiles between two identically
    /// distributed groups; the truth is zero.
    TwoSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub n_per_group: usize,
    pub replications: usize,
    /// Index draws per interval; two-sample only.
    pub b_replications: usize,
    pub q_list: Vec<QuantileQuery>,
    pub alpha: f64,
    pub dgp: Dgp,
    pub mode: CoverageMode,
    pub seed: u64,
}

impl CoverageConfig {
    pub const MIN_REPLICATIONS: usize = 100;

    fn validate(&self) -> Result<()> {
        if self.n_per_group == 0 {
            return Err(Error::InvalidSampleSize);
        }
        if self.replications < Self::MIN_REPLICATIONS {
            return Err(Error::TooFewReplications { min: Self::MIN_REPLICATIONS, got: self.replications });
        }
        if self.q_list.is_empty() {
            return Err(Error::InvalidConfig("q_list is empty".into()));
        }
        if let Dgp::Constant(c) = self.dgp {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!("constant dgp value {c} is not finite")));
            }
        }
        CiRequest::new(0.5, self.alpha, self.b_replications, CiMethod::Fast, 0)?;
        if self.mode == CoverageMode::TwoSample && self.b_replications == 0 {
            return Err(Error::TooFewReplications { min: 1, got: 0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub q: f64,
    pub truth: f64,
    pub covered: usize,
    pub empirical_coverage: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub config: CoverageConfig,
    pub method: CiMethod,
    pub normal_generator: String,
    pub rows: Vec<CoverageRow>,
}

/// Fraction of replications whose fast interval contains the truth, per `q`.
///
/// Replication `r` draws its data (and, for two samples, the interval seeds)
/// from `RandomSource::new(seed).substream(r)`.
pub fn coverage_simulation(cfg: &CoverageConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    let base = RandomSource::new(cfg.seed);
    let n = cfg.n_per_group;
    let tallies = (0..cfg.replications)
        .into_par_iter()
        .map(|r| replicate(cfg, base.substream(r as u64), n))
        .try_reduce(
            || vec![0usize; cfg.q_list.len()],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;

    let rows = cfg
        .q_list
        .iter()
        .zip(tallies)
        .map(|(&q, covered)| {
            let truth = match cfg.mode {
                CoverageMode::OneSample => cfg.dgp.quantile(q.value()),
                CoverageMode::TwoSample => 0.0,
            };
            let r = cfg.replications as f64;
            let p = covered as f64 / r;
            let half = 1.96 * (p * (1.0 - p) / r).sqrt();
            CoverageRow {
                q: q.value(),
                truth,
                covered,
                empirical_coverage: p,
                ci_lower: (p - half).max(0.0),
                ci_upper: (p + half).min(1.0),
            }
        })
        .collect();

    Ok(CoverageReport {
        config: cfg.clone(),
        method: CiMethod::Fast,
        normal_generator: NORMAL_GENERATOR.to_string(),
        rows,
    })
}

/// Coverage indicators (0 or 1) of one replication, per `q`.
fn replicate(cfg: &CoverageConfig, source: RandomSource, n: usize) -> Result<Vec<usize>> {
    let mut rng = source.rng();
    let mut buf = Vec::with_capacity(n);
    cfg.dgp.fill(&mut buf, n, &mut rng);
    let first = SortedSample::from_unsorted(buf)?;
    match cfg.mode {
        CoverageMode::OneSample => cfg
            .q_list
            .iter()
            .map(|&q| {
                let req = CiRequest { q, alpha: cfg.alpha, b_replications: 0, method: CiMethod::Fast, seed: 0 };
                let ci = fast_ci_one_sample(&first, &req)?;
                Ok(usize::from(ci.contains(cfg.dgp.quantile(q.value()))))
            })
            .collect(),
        CoverageMode::TwoSample => {
            let mut buf = Vec::with_capacity(n);
            cfg.dgp.fill(&mut buf, n, &mut rng);
            let data = TwoSampleData::new(first, SortedSample::from_unsorted(buf)?);
            cfg.q_list
                .iter()
                .map(|&q| {
                    let req = CiRequest {
                        q,
                        alpha: cfg.alpha,
                        b_replications: cfg.b_replications,
                        method: CiMethod::Fast,
                        seed: rng.next_u64(),
                    };
                    let ci = fast_ci_two_sample(&data, &req)?;
                    Ok(usize::from(ci.contains(0.0)))
                })
                .collect()
        }
    }
}

impl TableReport for CoverageReport {
    fn to_table(&self) -> Table {
        let c = &self.config;
        let mode = match c.mode {
            CoverageMode::OneSample => "one-sample",
            CoverageMode::TwoSample => "two-sample",
        };
        let mut title = format!(
            "coverage ({mode}, fast): N={} R={} alpha={} seed={}",
            c.n_per_group, c.replications, c.alpha, c.seed
        );
        if c.mode == CoverageMode::TwoSample {
            title.push_str(&format!(" B={}", c.b_replications));
        }
        let mut t = Table::new(&["q", "truth", "coverage", "ci_lower", "ci_upper"]).titled(title);
        for row in &self.rows {
            t.push(vec![
                row.q.to_string(),
                fixed(row.truth, 6),
                fixed(row.empirical_coverage, 3),
                fixed(row.ci_lower, 3),
                fixed(row.ci_upper, 3),
            ]);
        }
        t
    }
}
