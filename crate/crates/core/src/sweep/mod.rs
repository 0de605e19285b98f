//! Parameter sweeps, oracle campaigns and their CSV/JSON output.

pub mod config;
pub mod rows;
pub mod run;

pub use config::{ChannelSpec, CutSelection, GridSpec, NValues, OutputFormat, SweepConfig};
pub use rows::{write_csv, write_json, CsvRecord, SweepRow, SWEEP_COLUMNS};
pub use run::{
    run_analyze, run_sweep, run_threshold, run_verify, AnalyzeReport, ThresholdRow, VerifyReport,
};
