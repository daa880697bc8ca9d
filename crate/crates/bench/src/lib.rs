//! Benchmarks of the cryptographic cost of both neighbor discovery
//! protocols, plus the `ppsnd` command line front end.

pub mod run;
pub mod stats;

pub use run::{run_bench, run_sweep, summarize, BenchConfig, BenchError, BenchRecord, Role, SummaryRow};

/// Statistics over `f64` samples.
pub type Interval64 = stats::Interval<f64>;
/// Statistics over `f32` samples.
pub type Interval32 = stats::Interval<f32>;
