//! Confidence interval for the 90th percentile of one sample, computed both
//! by resampling (classic) and from two order statistics (fast).

use quantile_bootstrap::ci::{ci_one_sample, CiMethod, CiRequest};
use quantile_bootstrap::quantile::SortedSample;
use quantile_bootstrap::rng::RandomSource;
use rand_distr::{Distribution, Exp};

fn main() -> quantile_bootstrap::Result<()> {
    let mut rng = RandomSource::new(2024).rng();
    let exp = Exp::new(0.5).unwrap();
    let raw: Vec<f64> = (0..5_000).map(|_| exp.sample(&mut rng)).collect();
    let sample = SortedSample::from_unsorted(raw)?;

    for method in [CiMethod::Fast, CiMethod::Classic] {
        let req = CiRequest::new(0.9, 0.05, 5_000, method, 11)?;
        let ci = ci_one_sample(&sample, &req)?;
        println!("{method:?}: [{:.4}, {:.4}] indexes {:?}", ci.lower, ci.upper, ci.indexes_used);
    }
    // population 90th percentile of Exp(rate 0.5)
    println!("truth: {:.4}", -(0.1f64).ln() / 0.5);
    Ok(())
}
