//! Batch front-end for `flillab`: config parsing and canonicalisation,
//! record files, run manifests and summary reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod report;
pub mod run;

pub use config::{canonical_json, config_digest, load_config, parse_config, parse_config_str};
pub use error::CliError;
pub use manifest::{verify_manifest, RunManifest};
pub use output::{emit_records, read_records, Format, CSV_HEADER};
pub use report::{report_files, write_summary, SUMMARY_HEADER};
pub use run::{run_experiment, RunOptions};
