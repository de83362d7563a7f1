use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ExperimentId, Extremum};
use crate::{Error, Result};

/// Solver diagnostics attached to a record.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Energy `∫f′²` of the distance certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    /// Bisection steps of the distance solver.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Inner coverage statistic of the increments experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
}

/// One `(n, seed)` observation of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: ExperimentId,
    pub n: u64,
    pub seed: u64,
    pub a_n: Option<f64>,
    pub raw: f64,
    pub scaled: f64,
    /// Prefix extremum of `scaled` over this seed's records with index ≤ n.
    pub running_extremum: f64,
    #[serde(default)]
    pub diagnostics: Diagnostics,
}

/// Orders records by `(seed, n)` and fills in the running extrema.
pub fn apply_running_extrema(records: &mut [ExperimentRecord]) {
    records.sort_by_key(|r| (r.seed, r.n));
    let mut current: Option<(u64, f64)> = None;
    for r in records.iter_mut() {
        let ext = match current {
            Some((seed, acc)) if seed == r.seed => match r.experiment.extremum() {
                Extremum::Max => acc.max(r.scaled),
                Extremum::Min => acc.min(r.scaled),
            },
            _ => r.scaled,
        };
        r.running_extremum = ext;
        current = Some((r.seed, ext));
    }
}

/// Recomputes the running extrema and reports the first record whose stored
/// value differs.
pub fn check_running_extrema(records: &[ExperimentRecord]) -> Result<()> {
    let mut fresh = records.to_vec();
    apply_running_extrema(&mut fresh);
    let mut stored: Vec<&ExperimentRecord> = records.iter().collect();
    stored.sort_by_key(|r| (r.seed, r.n));
    for (a, b) in stored.iter().zip(&fresh) {
        if a.running_extremum.to_bits() != b.running_extremum.to_bits() {
            return Err(Error::invalid(format!(
                "running extremum of seed {} at n = {} is {}, expected {}",
                a.seed, a.n, a.running_extremum, b.running_extremum
            )));
        }
    }
    Ok(())
}

/// Median of the values; the mean of the two middle values for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

/// Medians over seeds at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: ExperimentId,
    pub n: u64,
    pub seeds: usize,
    pub median_raw: f64,
    pub median_scaled: f64,
    pub median_running_extremum: f64,
    pub median_inner: Option<f64>,
}

/// One row per `(experiment, n)`, in increasing order.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(ExperimentId, u64), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.experiment, r.n)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((experiment, n), rs)| {
            let col = |f: fn(&ExperimentRecord) -> f64| -> f64 {
                median(&rs.iter().map(|r| f(r)).collect::<Vec<_>>()).unwrap_or(f64::NAN)
            };
            let inner: Vec<f64> = rs.iter().filter_map(|r| r.diagnostics.inner).collect();
            SummaryRow {
                experiment,
                n,
                seeds: rs.len(),
                median_raw: col(|r| r.raw),
                median_scaled: col(|r| r.scaled),
                median_running_extremum: col(|r| r.running_extremum),
                median_inner: median(&inner),
            }
        })
        .collect()
}

/// Median over seeds of the running extremum at the largest `n`.
pub fn liminf_estimate(records: &[ExperimentRecord]) -> Option<f64> {
    let n_max = records.iter().map(|r| r.n).max()?;
    let last: Vec<f64> = records
        .iter()
        .filter(|r| r.n == n_max)
        .map(|r| r.running_extremum)
        .collect();
    median(&last)
}
