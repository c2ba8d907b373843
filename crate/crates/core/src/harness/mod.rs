//! Trace replay, verification, benchmarking and fuzz generation.

mod bench;
pub mod gen;
mod run;
mod trace;

pub use bench::{bench_csv, bench_trace, BenchRow};
pub use run::{
    format_solution, opt_command, ratio, run_trace, run_trace_with_hook, verify_trace, EventRecord, Mode, OptReport,
    RunReport, VerificationFailure,
};
pub use trace::{Trace, TraceEvent, TraceLine};
