use std::io::Write;
use std::path::PathBuf;

use flillab::experiments::{check_running_extrema, summarize, ExperimentId, ExperimentRecord, SummaryRow};
use serde::Serialize;

use crate::output::read_records;
use crate::CliError;

pub const SUMMARY_HEADER: &str =
    "experiment,n,seeds,median_raw,median_scaled,median_running_extremum,median_inner";

#[derive(Serialize)]
struct Row {
    experiment: ExperimentId,
    n: u64,
    seeds: usize,
    median_raw: f64,
    median_scaled: f64,
    median_running_extremum: f64,
    median_inner: Option<f64>,
}

/// Median-over-seeds table, one row per `(experiment, n)`.
pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SUMMARY_HEADER.split(',')).map_err(err)?;
    for r in rows {
        w.serialize(Row {
            experiment: r.experiment,
            n: r.n,
            seeds: r.seeds,
            median_raw: r.median_raw,
            median_scaled: r.median_scaled,
            median_running_extremum: r.median_running_extremum,
            median_inner: r.median_inner,
        })
        .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

/// Loads record files, rechecks their running extrema and summarises them.
pub fn report_files(paths: &[PathBuf]) -> Result<Vec<SummaryRow>, CliError> {
    let mut all: Vec<ExperimentRecord> = Vec::new();
    for p in paths {
        let records = read_records(p)?;
        check_running_extrema(&records)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", p.display())))?;
        all.extend(records);
    }
    Ok(summarize(&all))
}
