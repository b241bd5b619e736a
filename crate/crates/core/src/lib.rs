//! Resampling-free Poisson bootstrap confidence intervals for quantiles and
//! differences in quantiles.
//!
//! Under the Poisson bootstrap the original-sample index of the order
//! statistic that becomes a replicate's quantile estimate is close to
//! `Bin(N + 1, q)`. Drawing that index directly replaces the `O(B N)`
//! resampling loop by `O(B)` work on the sorted sample, or by two order
//! statistics for a single-sample interval.
//!
//! ```
//! use quantile_bootstrap::ci::{ci_one_sample, CiMethod, CiRequest};
//! use quantile_bootstrap::quantile::SortedSample;
//!
//! let sample = SortedSample::from_unsorted((1..=100).map(f64::from).collect()).unwrap();
//! let req = CiRequest::new(0.5, 0.05, 0, CiMethod::Fast, 0).unwrap();
//! let ci = ci_one_sample(&sample, &req).unwrap();
//! assert!(ci.lower <= 50.5 && 50.5 <= ci.upper);
//! ```

pub mod alloc;
pub mod binomial;
pub mod ci;
pub mod cli;
pub mod error;
pub mod index_dist;
pub mod io;
pub mod quantile;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
