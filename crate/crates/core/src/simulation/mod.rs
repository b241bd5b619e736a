//! Monte Carlo studies: index-distribution approximation quality, interval
//! coverage and the classic-versus-fast benchmark.
//!
//! Every study derives one random stream per independent unit of work
//! (replication or grid cell) from a single seed, so reports are
//! bit-identical across runs and thread counts.

mod approx;
mod bench;
mod coverage;
mod normal;

pub use approx::{
    approximation_study, index_distribution_study, ApproxCell, ApproxTable, IndexDistReport,
};
pub use bench::{bench_compare, BenchConfig, BenchReport, BenchRow};
pub use coverage::{
    coverage_simulation, CoverageConfig, CoverageMode, CoverageReport, CoverageRow, Dgp, NORMAL_GENERATOR,
};
pub use normal::standard_normal_quantile;
