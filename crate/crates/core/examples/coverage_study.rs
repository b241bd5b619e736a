//! Empirical coverage of the fast one- and two-sample intervals under a
//! standard normal population, at a reduced scale.

use quantile_bootstrap::io::{render_report, ReportFormat};
use quantile_bootstrap::quantile::QuantileQuery;
use quantile_bootstrap::simulation::{coverage_simulation, CoverageConfig, CoverageMode, Dgp};

fn main() -> quantile_bootstrap::Result<()> {
    for mode in [CoverageMode::OneSample, CoverageMode::TwoSample] {
        let cfg = CoverageConfig {
            n_per_group: 2_000,
            replications: 500,
            b_replications: 5_000,
            q_list: [0.1, 0.25, 0.5].map(|q| QuantileQuery::new(q).unwrap()).to_vec(),
            alpha: 0.05,
            dgp: Dgp::StandardNormal,
            mode,
            seed: 8,
        };
        print!("{}", render_report(&coverage_simulation(&cfg)?, ReportFormat::Table)?);
        println!();
    }
    Ok(())
}
