//! Desk-scale harnesses for the limit laws.
//!
//! Each experiment maps an [`ExperimentConfig`] to per-`(n, seed)`
//! [`ExperimentRecord`]s carrying a raw statistic, its rate-scaled version
//! and the running extremum along `n` for that seed. Almost-sure statements
//! concern single sample paths, so every seed is one nested path and
//! aggregation over seeds uses medians.
//!
//! Work fans out over `(n, seed)` pairs on the rayon pool. Every task draws
//! from its own keyed stream, so records are bit-identical for any thread
//! count.

mod checks;
mod chung;
mod clustering;
mod config;
mod increments;
mod record;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use checks::{
    chernoff_slack, poisson_chernoff_tail, run_dkw_check, run_dkw_config, run_poissonization_check,
    run_poissonization_config, DkwReport, DkwRow, PoissonizationReport,
};
pub use chung::{chung_seed, run_chung, ChungOutcome};
pub use clustering::{
    bahadur_kiefer_observation, flil_observation, local_observation, quantile_observation,
    run_bahadur_kiefer, run_flil_clustering, run_local_clustering, run_quantile_clustering,
};
pub use config::{
    ExperimentConfig, ExperimentId, Extremum, TargetSpec, DEFAULT_GRID_M, DEFAULT_REPS, DEFAULT_TOLERANCE,
    MIN_REPS,
};
pub use increments::{increments_observation, inner_coverage, run_increments_law, t0_grid, NET_CELLS};
pub use record::{
    apply_running_extrema, check_running_extrema, liminf_estimate, median, summarize, Diagnostics,
    ExperimentRecord, SummaryRow,
};

use crate::Result;

/// Statistic of one `(n, seed)` task.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub a_n: Option<f64>,
    pub raw: f64,
    pub scaled: f64,
    pub diagnostics: Diagnostics,
}

/// Runs `task(n, seed, index_of_n)` for every pair and assembles records
/// with running extrema, ordered by `(seed, n)`.
pub(crate) fn fan_out<F>(config: &ExperimentConfig, task: F) -> Result<Vec<ExperimentRecord>>
where
    F: Fn(u64, u64, usize) -> Result<Observation> + Sync,
{
    let indices = config.indices()?;
    let pairs: Vec<(u64, usize)> = config
        .seeds
        .iter()
        .flat_map(|&s| (0..indices.len()).map(move |j| (s, j)))
        .collect();
    let mut records: Vec<ExperimentRecord> = pairs
        .par_iter()
        .map(|&(seed, j)| {
            let n = indices[j];
            let o = task(n, seed, j)?;
            log::debug!("{} n = {n} seed = {seed}: raw = {}", config.experiment, o.raw);
            Ok(ExperimentRecord {
                experiment: config.experiment,
                n,
                seed,
                a_n: o.a_n,
                raw: o.raw,
                scaled: o.scaled,
                running_extremum: f64::NAN,
                diagnostics: o.diagnostics,
            })
        })
        .collect::<Result<_>>()?;
    apply_running_extrema(&mut records);
    Ok(records)
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Outcome {
    Records {
        records: Vec<ExperimentRecord>,
        /// Chung experiments only.
        liminf_estimate: Option<f64>,
        /// Closed-form Chung constant for interior targets.
        theoretical: Option<f64>,
    },
    Dkw {
        reports: Vec<DkwReport>,
    },
    Poissonization {
        reports: Vec<PoissonizationReport>,
    },
}

impl Outcome {
    pub fn records(&self) -> &[ExperimentRecord] {
        match self {
            Outcome::Records { records, .. } => records,
            _ => &[],
        }
    }

    /// Whether every Monte Carlo check passed (always true for records).
    pub fn passed(&self) -> bool {
        match self {
            Outcome::Records { .. } => true,
            Outcome::Dkw { reports } => reports.iter().all(|r| r.pass),
            Outcome::Poissonization { reports } => reports.iter().all(|r| r.pass),
        }
    }
}

/// Validates `config` and runs the selected experiment.
pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    config.validate()?;
    let plain = |records| Outcome::Records {
        records,
        liminf_estimate: None,
        theoretical: None,
    };
    Ok(match config.experiment {
        ExperimentId::Flil => plain(run_flil_clustering(config)?),
        ExperimentId::Quantile => plain(run_quantile_clustering(config)?),
        ExperimentId::Local => plain(run_local_clustering(config)?),
        ExperimentId::Increments => plain(run_increments_law(config)?),
        ExperimentId::BahadurKiefer => plain(run_bahadur_kiefer(config)?),
        ExperimentId::Chung => {
            let out = run_chung(config)?;
            Outcome::Records {
                records: out.records,
                liminf_estimate: Some(out.liminf_estimate),
                theoretical: out.theoretical,
            }
        }
        ExperimentId::Dkw => Outcome::Dkw {
            reports: run_dkw_config(config)?,
        },
        ExperimentId::Poissonization => Outcome::Poissonization {
            reports: run_poissonization_config(config)?,
        },
    })
}
