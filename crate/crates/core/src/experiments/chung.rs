use rayon::prelude::*;

use super::clustering::expect;
use super::record::{apply_running_extrema, liminf_estimate};
use super::{Diagnostics, ExperimentConfig, ExperimentId, ExperimentRecord};
use crate::gaussian::{chung_constant_interior, ChungTarget, RateFnSpec, TargetClass};
use crate::geometry::sup_norm_distance;
use crate::process::{local_empirical_process, Normalization};
use crate::{loglog, Grid, Result, UniformSample};

/// Records of a Chung-type experiment with the liminf estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChungOutcome {
    pub records: Vec<ExperimentRecord>,
    /// Median over seeds of the prefix-min at the largest `n`.
    pub liminf_estimate: f64,
    /// Closed-form constant for interior targets.
    pub theoretical: Option<f64>,
}

/// `∇(loglog n)·‖α_n(a_n ·)/√(2 a_n loglog n) − f‖` for every index of one
/// seed, from a single pass over the seed's stream.
pub fn chung_seed(
    target: &ChungTarget,
    rate: &RateFnSpec,
    indices: &[u64],
    bandwidths: &[f64],
    seed: u64,
    grid: &Grid,
) -> Result<Vec<ExperimentRecord>> {
    let samples = UniformSample::draw_windows(seed, indices, bandwidths)?;
    samples
        .iter()
        .zip(bandwidths)
        .map(|(s, &a)| {
            let g = local_empirical_process(s, a, grid, Normalization::Flil)?;
            let (raw, _) = sup_norm_distance(&g, &target.f);
            let scale = rate.eval(loglog(s.n() as f64))?;
            Ok(ExperimentRecord {
                experiment: ExperimentId::Chung,
                n: s.n(),
                seed,
                a_n: Some(a),
                raw,
                scaled: scale * raw,
                running_extremum: f64::NAN,
                diagnostics: Diagnostics::default(),
            })
        })
        .collect()
}

pub fn run_chung(config: &ExperimentConfig) -> Result<ChungOutcome> {
    expect(config, ExperimentId::Chung)?;
    let grid = config.grid()?;
    let (target, rate) = config.chung_target()?;
    let indices = config.indices()?;
    let bandwidths = config.bandwidths(&indices)?;
    let per_seed: Vec<Vec<ExperimentRecord>> = config
        .seeds
        .par_iter()
        .map(|&seed| chung_seed(&target, &rate, &indices, &bandwidths, seed, &grid))
        .collect::<Result<_>>()?;
    let mut records: Vec<ExperimentRecord> = per_seed.into_iter().flatten().collect();
    apply_running_extrema(&mut records);
    let liminf_estimate = liminf_estimate(&records).unwrap_or(f64::NAN);
    let theoretical = match target.class {
        TargetClass::Interior => Some(chung_constant_interior(
            &target.f,
            config.chi_convention.unwrap_or_default(),
        )?),
        TargetClass::BvBoundary => None,
    };
    Ok(ChungOutcome {
        records,
        liminf_estimate,
        theoretical,
    })
}
