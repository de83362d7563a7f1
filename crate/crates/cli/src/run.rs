use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use flillab::experiments::{self, summarize, ExperimentId, Outcome};
use serde_json::json;

use crate::config::{canonical_json, digest_bytes, load_config, validate, CANONICAL_CONFIG};
use crate::output::{emit_records, Format};
use crate::report::write_summary;
use crate::{CliError, RunManifest};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub experiment: ExperimentId,
    pub config: PathBuf,
    pub out: PathBuf,
    /// Replaces the seeds of the config file.
    pub seeds: Option<Vec<u64>>,
    pub format: Format,
    /// Size of the worker pool, recorded in the manifest.
    pub threads: usize,
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(path, text + "\n").map_err(CliError::io(path))
}

/// Runs one experiment and writes into `out`:
///
/// * `config.canonical.json`, the effective config with sorted keys;
/// * `records.csv` or `records.jsonl` and `summary.csv` for record-producing
///   experiments;
/// * `report.json` for Chung runs and Monte Carlo checks;
/// * `manifest.json`.
pub fn run_experiment(opts: &RunOptions) -> Result<RunManifest, CliError> {
    let mut config = load_config(&opts.config)?;
    if let Some(seeds) = &opts.seeds {
        config.seeds = seeds.clone();
    }
    if config.experiment != opts.experiment {
        return Err(CliError::Config(format!(
            "{} configures the {} experiment, not {}",
            opts.config.display(),
            config.experiment,
            opts.experiment
        )));
    }
    validate(&config)?;

    fs::create_dir_all(&opts.out).map_err(CliError::io(&opts.out))?;
    let canonical = canonical_json(&config)?;
    let config_path = opts.out.join(CANONICAL_CONFIG);
    fs::write(&config_path, &canonical).map_err(CliError::io(&config_path))?;

    let started = now();
    log::info!("running {} on seeds {:?}", config.experiment, config.seeds);
    let outcome = experiments::run(&config)?;
    let mut files = vec![CANONICAL_CONFIG.to_string()];
    let mut counts = BTreeMap::new();

    match &outcome {
        Outcome::Records {
            records,
            liminf_estimate,
            theoretical,
        } => {
            let name = format!("records.{}", opts.format.extension());
            emit_records(records, opts.format, &opts.out.join(&name))?;
            files.push(name);
            let summary_path = opts.out.join("summary.csv");
            let file = File::create(&summary_path).map_err(CliError::io(&summary_path))?;
            write_summary(&summarize(records), BufWriter::new(file))?;
            files.push("summary.csv".into());
            if liminf_estimate.is_some() {
                write_json(
                    &opts.out.join("report.json"),
                    &json!({
                        "experiment": config.experiment,
                        "aggregation": "median over seeds of the prefix-min at the largest n",
                        "liminf_estimate": liminf_estimate,
                        "theoretical": theoretical,
                    }),
                )?;
                files.push("report.json".into());
            }
            counts.insert(config.experiment.to_string(), records.len());
        }
        Outcome::Dkw { reports } => {
            let value = serde_json::to_value(reports).map_err(|e| CliError::Runtime(e.to_string()))?;
            write_json(&opts.out.join("report.json"), &value)?;
            files.push("report.json".into());
            counts.insert(config.experiment.to_string(), reports.len());
        }
        Outcome::Poissonization { reports } => {
            let value = serde_json::to_value(reports).map_err(|e| CliError::Runtime(e.to_string()))?;
            write_json(&opts.out.join("report.json"), &value)?;
            files.push("report.json".into());
            counts.insert(config.experiment.to_string(), reports.len());
        }
    }
    files.push(crate::manifest::MANIFEST.into());

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_digest: digest_bytes(canonical.as_bytes()),
        experiment: config.experiment.to_string(),
        seeds: config.seeds.clone(),
        threads: opts.threads,
        started,
        finished: now(),
        record_counts: counts,
        files,
    };
    manifest.write(&opts.out)?;
    if !outcome.passed() {
        return Err(CliError::Runtime(format!(
            "{} check failed; see {}",
            config.experiment,
            opts.out.join("report.json").display()
        )));
    }
    Ok(manifest)
}
