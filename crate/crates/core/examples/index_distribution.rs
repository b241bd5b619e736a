//! The index of the bootstrap quantile in the original sample: exact,
//! simulated and binomial-approximated pmfs for a small N.

use quantile_bootstrap::index_dist::{
    binomial_index_pmf, exact_index_pmf, max_abs_pmf_diff, simulate_index_pmf, ExactPmfConfig,
};
use quantile_bootstrap::quantile::QuantileQuery;
use quantile_bootstrap::rng::RandomSource;

fn main() -> quantile_bootstrap::Result<()> {
    let (n, q) = (20, QuantileQuery::new(0.25)?);
    let exact = exact_index_pmf(n, q, &ExactPmfConfig::default())?;
    let simulated = simulate_index_pmf(n, q, 200_000, &RandomSource::new(5))?;
    let binomial = binomial_index_pmf(n, q);

    println!("{:>5} {:>9} {:>9} {:>9}", "index", "exact", "simulated", "binomial");
    for i in 0..=(n as i64 + 1) {
        println!(
            "{i:>5} {:>9.5} {:>9.5} {:>9.5}",
            exact.normalized.prob(i),
            simulated.prob(i),
            binomial.prob(i)
        );
    }
    println!("raw exact mass {:.12}", exact.raw.total_mass());
    println!("max |exact - simulated|  = {:.5}", max_abs_pmf_diff(&exact.normalized, &simulated));
    println!("max |exact - binomial|   = {:.5}", max_abs_pmf_diff(&exact.normalized, &binomial));
    Ok(())
}
