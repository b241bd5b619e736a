//! Treatment-minus-control difference in medians and 95th percentiles.

use quantile_bootstrap::ci::{ci_two_sample, CiMethod, CiRequest, TwoSampleData};
use quantile_bootstrap::quantile::SortedSample;
use quantile_bootstrap::rng::RandomSource;
use rand_distr::{Distribution, LogNormal};

fn draw(source: RandomSource, mu: f64, n: usize) -> Vec<f64> {
    let dist = LogNormal::new(mu, 0.6).unwrap();
    let mut rng = source.rng();
    (0..n).map(|_| dist.sample(&mut rng)).collect()
}

fn main() -> quantile_bootstrap::Result<()> {
    let base = RandomSource::new(99);
    // treatment shifts the log scale by 5 percent
    let data = TwoSampleData::new(
        SortedSample::from_unsorted(draw(base.substream(0), 3.05, 20_000))?,
        SortedSample::from_unsorted(draw(base.substream(1), 3.0, 20_000))?,
    );

    for q in [0.5, 0.95] {
        let req = CiRequest::new(q, 0.05, 100_000, CiMethod::Fast, 3)?;
        let ci = ci_two_sample(&data, &req)?;
        let verdict = if ci.contains(0.0) { "not significant" } else { "significant" };
        println!("q={q}: [{:.3}, {:.3}] ({verdict})", ci.lower, ci.upper);
    }
    Ok(())
}
