//! End-to-end scenarios: charging runs, intensity sweeps, table reproduction
//! and the nuclear-versus-atomic comparison.
//!
//! Batch operations take a `jobs` width; `None` uses rayon's global pool.
//! Results are always gathered in input order, so output does not depend on
//! the number of workers.

mod compare;
mod scenario;
mod sweep;
mod tables;

pub use compare::{atomic_number, compare_from_summaries, compare_nuclear_vs_atomic, Comparison, ComparisonRow};
pub use scenario::{
    detect_stable_time, run_charging_scenario, summarize, ChargingRun, ChargingSummary, RunOptions, STABLE_BAND,
};
pub use sweep::{robustness_sweep, AxisSpec, SweepCell, SweepGrid};
pub use tables::{
    check_row, reproduce_performance_tables, FieldCheck, ReportRow, TableReport, Tolerance, STRONG_DECAY_ROWS,
};

use crate::error::{Error, Result};

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Usage("--jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("cannot start {n} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}
