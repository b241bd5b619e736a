use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index_dist::{
    binomial_index_pmf, exact_index_pmf, max_abs_pmf_diff, simulate_index_pmf, ExactPmfConfig, IndexPmf,
};
use crate::io::{fixed, Table, TableReport};
use crate::quantile::QuantileQuery;
use crate::rng::RandomSource;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxCell {
    pub n: usize,
    pub q: f64,
    /// Sup-norm distance between the simulated index pmf and `Bin(N + 1, q)`.
    pub max_abs_diff: f64,
    pub empty_redraws: u64,
}

/// Grid of approximation errors, one cell per `(N, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxTable {
    pub replications: u64,
    pub seed: u64,
    pub stream: u64,
    pub n_list: Vec<usize>,
    pub q_list: Vec<f64>,
    /// Row-major: all `q` for the first `N`, then the next `N`.
    pub cells: Vec<ApproxCell>,
}

impl ApproxTable {
    pub fn get(&self, n: usize, q: f64) -> Option<&ApproxCell> {
        self.cells.iter().find(|c| c.n == n && c.q == q)
    }
}

/// Simulated-versus-binomial index pmf distance over an `N x q` grid.
///
/// Cell `k` in row-major order simulates on `rng.substream(k)`.
pub fn approximation_study(
    n_list: &[usize],
    q_list: &[QuantileQuery],
    replications: u64,
    rng: &RandomSource,
) -> Result<ApproxTable> {
    if n_list.is_empty() || q_list.is_empty() {
        return Err(Error::InvalidConfig("approximation grid needs at least one N and one q".into()));
    }
    let mut cells = Vec::with_capacity(n_list.len() * q_list.len());
    for &n in n_list {
        for &q in q_list {
            let source = rng.substream(cells.len() as u64);
            let empirical = simulate_index_pmf(n, q, replications, &source)?;
            cells.push(ApproxCell {
                n,
                q: q.value(),
                max_abs_diff: max_abs_pmf_diff(&empirical, &binomial_index_pmf(n, q)),
                empty_redraws: empirical.diagnostics.empty_redraws,
            });
        }
    }
    Ok(ApproxTable {
        replications,
        seed: rng.seed(),
        stream: rng.stream(),
        n_list: n_list.to_vec(),
        q_list: q_list.iter().map(|q| q.value()).collect(),
        cells,
    })
}

impl TableReport for ApproxTable {
    fn to_table(&self) -> Table {
        let title = format!(
            "max |simulated - Bin(N+1, q)| over indexes; {} replications, seed {}",
            self.replications, self.seed
        );
        let header: Vec<String> = std::iter::once("N".to_string())
            .chain(self.q_list.iter().map(|q| format!("q={q}")))
            .collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut t = Table::new(&header).titled(title);
        for (row, &n) in self.cells.chunks(self.q_list.len()).zip(&self.n_list) {
            let mut cells = vec![n.to_string()];
            cells.extend(row.iter().map(|c| fixed(c.max_abs_diff, 5)));
            t.push(cells);
        }
        t
    }
}

/// Simulated index pmf next to its binomial approximation and, optionally,
/// the exact pmf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDistReport {
    pub n: usize,
    pub q: f64,
    pub replications: u64,
    pub seed: u64,
    pub stream: u64,
    pub empirical: IndexPmf,
    pub binomial: IndexPmf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<IndexPmf>,
    pub max_abs_diff: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_max_abs_diff: Option<f64>,
}

/// Data for plotting the index distribution of one `(N, q)`.
///
/// With `with_exact`, the normalized exact pmf is added; this is limited to
/// the sample sizes [`ExactPmfConfig`] accepts.
pub fn index_distribution_study(
    n: usize,
    q: QuantileQuery,
    replications: u64,
    rng: &RandomSource,
    with_exact: bool,
) -> Result<IndexDistReport> {
    let exact = if with_exact {
        Some(exact_index_pmf(n, q, &ExactPmfConfig::default())?.normalized)
    } else {
        None
    };
    let empirical = simulate_index_pmf(n, q, replications, rng)?;
    let binomial = binomial_index_pmf(n, q);
    Ok(IndexDistReport {
        n,
        q: q.value(),
        replications,
        seed: rng.seed(),
        stream: rng.stream(),
        max_abs_diff: max_abs_pmf_diff(&empirical, &binomial),
        exact_max_abs_diff: exact.as_ref().map(|e| max_abs_pmf_diff(&empirical, e)),
        empirical,
        binomial,
        exact,
    })
}

/// Rows with less mass than this in every column are left out of the table.
const TABLE_MIN_PROB: f64 = 1e-6;

impl TableReport for IndexDistReport {
    fn to_table(&self) -> Table {
        let title = format!(
            "index pmf, N={} q={} replications={} seed={}; max abs diff {:.5}",
            self.n, self.q, self.replications, self.seed, self.max_abs_diff
        );
        let mut header = vec!["index", "empirical", "binomial"];
        if self.exact.is_some() {
            header.push("exact");
        }
        let mut t = Table::new(&header).titled(title);
        let lo = self.binomial.support_lo.min(self.empirical.support_lo);
        let hi = self.binomial.support_hi.max(self.empirical.support_hi);
        for i in lo..=hi {
            let mut probs = vec![self.empirical.prob(i), self.binomial.prob(i)];
            probs.extend(self.exact.as_ref().map(|e| e.prob(i)));
            if probs.iter().all(|&p| p < TABLE_MIN_PROB) {
                continue;
            }
            let mut row = vec![i.to_string()];
            row.extend(probs.iter().map(|&p| fixed(p, 6)));
            t.push(row);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qs(values: &[f64]) -> Vec<QuantileQuery> {
        values.iter().map(|&q| QuantileQuery::new(q).unwrap()).collect()
    }

    #[test]
    fn grid_shape_and_table() {
        let t = approximation_study(&[20, 40], &qs(&[0.1, 0.5]), 20_000, &RandomSource::new(1)).unwrap();
        assert_eq!(t.cells.len(), 4);
        assert_eq!((t.cells[1].n, t.cells[1].q), (20, 0.5));
        assert!(t.cells.iter().all(|c| c.max_abs_diff > 0.0 && c.max_abs_diff < 0.5));
        let text = t.to_table().render();
        assert!(text.lines().nth(1).unwrap().contains("q=0.5"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn cells_use_distinct_streams() {
        let t = approximation_study(&[30], &qs(&[0.3, 0.3]), 5_000, &RandomSource::new(2)).unwrap();
        assert_ne!(t.cells[0].max_abs_diff, t.cells[1].max_abs_diff);
    }

    #[test]
    fn empty_grid_is_rejected() {
        assert!(approximation_study(&[], &qs(&[0.5]), 10, &RandomSource::new(0)).is_err());
    }

    #[test]
    fn index_dist_report_with_exact() {
        let r = index_distribution_study(30, QuantileQuery::new(0.25).unwrap(), 50_000, &RandomSource::new(4), true)
            .unwrap();
        assert!(r.exact_max_abs_diff.unwrap() < 0.02);
        assert!(r.max_abs_diff < 0.05);
        let text = r.to_table().render();
        assert!(text.lines().nth(1).unwrap().ends_with("exact"));
        let json = serde_json::to_value(&r).unwrap();
        assert!(json.get("exact").is_some());
        let r = index_distribution_study(30, QuantileQuery::new(0.25).unwrap(), 1000, &RandomSource::new(4), false)
            .unwrap();
        assert!(serde_json::to_value(&r).unwrap().get("exact").is_none());
    }
}
