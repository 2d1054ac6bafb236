//! Experiment harness: configuration, single runs, parameter scans,
//! Husimi snapshots, disorder averaging and reproducible output files.

mod config;
mod experiments;
mod output;

pub use config::{ExperimentConfig, HusimiParams, ModeSpec, ResolvedConfig};
pub use experiments::{render_husimi, run_single, scan, HusimiArtifact, ScanRow};
pub use output::{read_series_table, write_series, RunManifest};
