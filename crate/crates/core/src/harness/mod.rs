//! Experiment orchestration: ensembles, coupling sweeps, exact reports
//! and their CSV / JSON-lines output.

pub mod config;
pub mod exact;
pub mod noise_profile;
pub mod output;
pub mod stats;
pub mod sweep;
pub mod table;

pub use config::HarnessConfig;
pub use exact::{exact_row, render_exact, run_exact, ExactRow};
pub use noise_profile::NoiseProfile;
pub use output::Format;
pub use stats::{stats, Stats};
pub use sweep::{
    default_theta_grid, default_theta_w_grid, run_sweep, run_theta_sweep, run_theta_w_sweep,
    FitKind, SweepCell, SweepConfig, SweepFit, SweepParameter, SweepRecord,
};
pub use table::{
    run_ensemble, run_table, run_table_with, EstimateSummary, Progress, TableConfig,
    DEFAULT_ITERATIONS,
};
