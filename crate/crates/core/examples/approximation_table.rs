//! A small grid of simulated-versus-binomial index pmf distances. Pass
//! `--full` for the 10^6-replication grid (a few minutes).

use quantile_bootstrap::io::{render_report, ReportFormat};
use quantile_bootstrap::quantile::QuantileQuery;
use quantile_bootstrap::rng::RandomSource;
use quantile_bootstrap::simulation::approximation_study;

fn main() -> quantile_bootstrap::Result<()> {
    let full = std::env::args().any(|a| a == "--full");
    let (n_list, reps): (&[usize], u64) = if full {
        (&[100, 500, 2000, 10_000], 1_000_000)
    } else {
        (&[100, 500], 100_000)
    };
    let q_list = [0.01, 0.1, 0.25, 0.5].map(|q| QuantileQuery::new(q).unwrap());
    let table = approximation_study(n_list, &q_list, reps, &RandomSource::new(1))?;
    print!("{}", render_report(&table, ReportFormat::Table)?);
    Ok(())
}
