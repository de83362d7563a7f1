use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use flillab::experiments::{Diagnostics, ExperimentId, ExperimentRecord};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CSV_HEADER: &str = "experiment,n,seed,a_n,raw,scaled,running_extremum";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }

    fn from_path(path: &Path) -> Result<Self, CliError> {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => Ok(Format::Csv),
            Some("jsonl") => Ok(Format::Jsonl),
            _ => Err(CliError::Runtime(format!(
                "{}: expected a .csv or .jsonl file",
                path.display()
            ))),
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format '{s}' (csv or jsonl)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    experiment: ExperimentId,
    n: u64,
    seed: u64,
    a_n: Option<f64>,
    raw: f64,
    scaled: f64,
    running_extremum: f64,
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Writes records in `format`. CSV files carry only the columns of
/// [`CSV_HEADER`]; JSON lines carry every field.
pub fn write_records<W: Write>(records: &[ExperimentRecord], format: Format, out: W) -> Result<(), CliError> {
    if let Some(first) = records.first() {
        if records.iter().any(|r| r.experiment != first.experiment) {
            return Err(CliError::Runtime("records mix several experiments".into()));
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER.split(',')).map_err(csv_error)?;
            for r in records {
                w.serialize(CsvRow {
                    experiment: r.experiment,
                    n: r.n,
                    seed: r.seed,
                    a_n: r.a_n,
                    raw: r.raw,
                    scaled: r.scaled,
                    running_extremum: r.running_extremum,
                })
                .map_err(csv_error)?;
            }
            w.flush().map_err(|e| CliError::Runtime(e.to_string()))
        }
        Format::Jsonl => {
            let mut out = out;
            for r in records {
                let line = serde_json::to_string(r).map_err(|e| CliError::Runtime(e.to_string()))?;
                writeln!(out, "{line}").map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            out.flush().map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

pub fn emit_records(records: &[ExperimentRecord], format: Format, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(CliError::io(path))?;
    write_records(records, format, BufWriter::new(file))
}

pub fn records_from_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_error)?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(CliError::Runtime(format!("unexpected CSV header '{}'", header.join(","))));
    }
    rd.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(csv_error)?;
            Ok(ExperimentRecord {
                experiment: row.experiment,
                n: row.n,
                seed: row.seed,
                a_n: row.a_n,
                raw: row.raw,
                scaled: row.scaled,
                running_extremum: row.running_extremum,
                diagnostics: Diagnostics::default(),
            })
        })
        .collect()
}

pub fn records_from_jsonl<R: Read>(input: R) -> Result<Vec<ExperimentRecord>, CliError> {
    BufReader::new(input)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|(i, line)| {
            let line = line.map_err(|e| CliError::Runtime(e.to_string()))?;
            serde_json::from_str(&line).map_err(|e| CliError::Runtime(format!("line {}: {e}", i + 1)))
        })
        .collect()
}

/// Reads a `.csv` or `.jsonl` record file.
pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, CliError> {
    let format = Format::from_path(path)?;
    let file = File::open(path).map_err(CliError::io(path))?;
    match format {
        Format::Csv => records_from_csv(file),
        Format::Jsonl => records_from_jsonl(file),
    }
}
