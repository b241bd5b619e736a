//! Classic resampling against index draws on the same two samples, with
//! heap accounting from the tracking allocator.

use quantile_bootstrap::alloc::TrackingAllocator;
use quantile_bootstrap::ci::ClassicMode;
use quantile_bootstrap::io::{render_report, ReportFormat};
use quantile_bootstrap::simulation::{bench_compare, BenchConfig};

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

fn main() -> quantile_bootstrap::Result<()> {
    let mut cfg = BenchConfig::new(1_000, 10_000, 10, 9);
    for mode in [ClassicMode::RankScan, ClassicMode::Materialize] {
        cfg.classic_mode = mode;
        let report = bench_compare(&cfg)?;
        println!("classic mode: {mode:?}");
        print!("{}", render_report(&report, ReportFormat::Table)?);
        println!();
    }
    Ok(())
}
