use std::process::ExitCode;

use quantile_bootstrap::alloc::TrackingAllocator;

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

fn main() -> ExitCode {
    quantile_bootstrap::cli::main()
}
