//! Experiment runner: refinement studies over the built-in cases, rates
//! between consecutive rows, CSV tables and gnuplot snapshots.

mod config;
mod experiment;
mod output;

pub use config::{apply_overrides, parse_config_file, parse_rows, preset_delta, preset_rows, ExperimentConfig, RowSpec};
pub use experiment::{run_experiment, ConvergenceRow, ExperimentResult, Snapshot};
pub use output::{emit_csv, format_sci3, metadata, parse_csv, write_csv_file, write_snapshot, ParsedTable};
