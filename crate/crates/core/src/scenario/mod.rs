//! Scenario families, the Yamabe-threshold check and end-to-end runs.
//!
//! A run generates a family of conformal factors from a [`ScenarioConfig`],
//! normalizes volumes, and walks the analysis stages in order: heat
//! invariants, spectrum, concentration scan, distances against the limit
//! field, blowups and necks around bubble points, pinching, band energies on
//! cylinders. The [`RunReport`] records every per-member quantity, a case
//! classification and the asserted checks with the tolerances they used.

mod config;
mod family;
mod report;
mod runner;
mod threshold;

pub use config::{AnalysisConfig, CheckTolerances, FamilySpec, ScenarioConfig, SCHEMA_VERSION};
pub use family::{build_mesh, field_volume, gen_family, geometric_schedule, raw_family, Family};
pub use report::{
    dat_series, write_checks_csv, write_dat, write_per_k_csv, CaseClass, Check, PerK, Relation, RunReport, SequenceInfo,
    PER_K_COLUMNS,
};
pub use runner::{default_radii, run_scenario, scan_centers};
pub use threshold::{threshold_check, yamabe_constant, ThresholdReport};

use crate::error::{Error, Result};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "CONFLAB_THREADS";

/// Size the global thread pool from [`THREADS_ENV`] when it is set. Returns
/// the number of worker threads in use.
pub fn configure_threads() -> Result<usize> {
    if let Ok(raw) = std::env::var(THREADS_ENV) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
        // A pool that is already running keeps its size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(rayon::current_num_threads())
}
