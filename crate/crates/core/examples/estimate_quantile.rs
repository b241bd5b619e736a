//! Point estimates with the stochastic-rounding quantile estimator.
//!
//! When q(N+1) is not an integer the estimator picks one of the two
//! neighbouring order statistics at random, so repeated calls with
//! different streams disagree slightly.

use quantile_bootstrap::quantile::{quantile_estimate, QuantileQuery, SortedSample};
use quantile_bootstrap::rng::RandomSource;

fn main() -> quantile_bootstrap::Result<()> {
    let latencies = vec![12.1, 9.8, 15.0, 11.2, 30.5, 10.4, 13.3, 9.9, 14.7, 12.8];
    let sample = SortedSample::from_unsorted(latencies)?;
    println!("sorted: {:?}", sample.values());

    for q in [0.1, 0.5, 0.9] {
        let query = QuantileQuery::new(q)?;
        let draws: Vec<f64> = (0..5)
            .map(|stream| quantile_estimate(&sample, query, &RandomSource::with_stream(7, stream)))
            .collect();
        println!("q={q}: rank q(N+1) = {:.1}, estimates over five streams {draws:?}", q * 11.0);
    }
    Ok(())
}
