//! Seeded experiment grids, relative-regret tables and result files.

pub mod aggregate;
pub mod config;
pub mod io;
pub mod oracle;
pub mod runner;
pub mod verify;

pub use aggregate::{aggregate, RelativeEntry, RelativeTable, Setting, BASELINE};
pub use config::{Cell, ExperimentConfig, HorizonRule, SeedRange};
pub use oracle::brute_force_expected_regret;
pub use runner::{run_experiment, run_single, RunRecord};
