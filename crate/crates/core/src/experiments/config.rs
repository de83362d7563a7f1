use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gaussian::{ChiConvention, ChungTarget, RateFnSpec, TargetClass};
use crate::geometry::{BallKind, BallSpec, SmoothPath};
use crate::process::{check_bandwidth_conditions, BandwidthSchedule, Grid, IndexSchedule, Regime};
use crate::{Error, Result};

/// Experiment identifiers as they appear in configs, CSV files and on the
/// command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    /// Clustering of `α_n / b_n` around `S₂`.
    Flil,
    /// Clustering of `β_n / b_n` around `S₂`.
    Quantile,
    /// Clustering of the normalised local empirical process around `S₁`.
    Local,
    /// Outer and inner coverage of `S₁` by normalised increments.
    Increments,
    /// Chung-type liminf of the local process around a target path.
    Chung,
    /// Scaled `‖α_n + β_n‖`.
    BahadurKiefer,
    Dkw,
    Poissonization,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 8] = [
        ExperimentId::Flil,
        ExperimentId::Quantile,
        ExperimentId::Local,
        ExperimentId::Increments,
        ExperimentId::Chung,
        ExperimentId::BahadurKiefer,
        ExperimentId::Dkw,
        ExperimentId::Poissonization,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Flil => "flil",
            ExperimentId::Quantile => "quantile",
            ExperimentId::Local => "local",
            ExperimentId::Increments => "increments",
            ExperimentId::Chung => "chung",
            ExperimentId::BahadurKiefer => "bahadur-kiefer",
            ExperimentId::Dkw => "dkw",
            ExperimentId::Poissonization => "poissonization",
        }
    }

    /// Running extremum kept per seed: prefix-min for Chung-type statistics,
    /// prefix-max otherwise.
    pub fn extremum(self) -> Extremum {
        match self {
            ExperimentId::Chung => Extremum::Min,
            _ => Extremum::Max,
        }
    }

    /// Whether the experiment yields per-(n, seed) records rather than a
    /// Monte Carlo report.
    pub fn has_records(self) -> bool {
        !matches!(self, ExperimentId::Dkw | ExperimentId::Poissonization)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<&str> = ExperimentId::ALL.iter().map(|id| id.as_str()).collect();
                Error::invalid(format!("unknown experiment '{s}' (known: {})", known.join(", ")))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// Target path of a Chung experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TargetSpec {
    Zero,
    /// `f(t) = slope·t`.
    Line { slope: f64 },
    /// Piecewise-linear through `(knots[i], values[i])`.
    Polyline { knots: Vec<f64>, values: Vec<f64> },
}

impl TargetSpec {
    pub fn path(&self) -> Result<SmoothPath> {
        match self {
            TargetSpec::Zero => Ok(SmoothPath::zero()),
            TargetSpec::Line { slope } => {
                if !slope.is_finite() {
                    return Err(Error::invalid("target slope must be finite"));
                }
                Ok(SmoothPath::line(*slope))
            }
            TargetSpec::Polyline { knots, values } => SmoothPath::new(knots.clone(), values.clone()),
        }
    }
}

/// One run of one experiment.
///
/// Fields that do not apply to the selected experiment must be left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default = "default_schedule")]
    pub schedule: IndexSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<BandwidthSchedule>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_grid_m")]
    pub grid_m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_class: Option<TargetClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<RateFnSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_convention: Option<ChiConvention>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Spacing of the `t0` grid of the increments experiment, in units of `a_n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0_step: Option<f64>,
    /// Thresholds of the DKW check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Threshold of the Poissonization check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Window `a` of the Poissonization check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reps: Option<u64>,
}

pub const DEFAULT_GRID_M: usize = Grid::DEFAULT_M;
pub const DEFAULT_TOLERANCE: f64 = crate::geometry::DEFAULT_TOLERANCE;
pub const DEFAULT_REPS: u64 = 100_000;
pub const MIN_REPS: u64 = 10_000;

fn default_schedule() -> IndexSchedule {
    IndexSchedule::Geometric {
        start: 1_000,
        ratio: 10.0,
        count: 4,
    }
}

fn default_grid_m() -> usize {
    DEFAULT_GRID_M
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

impl ExperimentConfig {
    /// Config with defaults for every optional field.
    pub fn new(experiment: ExperimentId, schedule: IndexSchedule, seeds: Vec<u64>) -> Self {
        ExperimentConfig {
            experiment,
            schedule,
            bandwidth: None,
            seeds,
            grid_m: DEFAULT_GRID_M,
            ball: None,
            target: None,
            target_class: None,
            rate: None,
            chi_convention: None,
            tolerance: DEFAULT_TOLERANCE,
            t0_step: None,
            lambdas: None,
            lambda: None,
            window: None,
            reps: None,
        }
    }

    pub fn indices(&self) -> Result<Vec<u64>> {
        self.schedule.indices()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_m)
    }

    /// Configured bandwidth, or `a_n = n^{−1/2}`.
    pub fn bandwidth_or_default(&self) -> BandwidthSchedule {
        self.bandwidth
            .clone()
            .unwrap_or(BandwidthSchedule::Power { theta: 0.5 })
    }

    /// Configured ball, or the unit ball the experiment is about.
    pub fn ball_or_default(&self) -> BallSpec {
        self.ball.unwrap_or(match self.experiment {
            ExperimentId::Local | ExperimentId::Increments => BallSpec::unit(BallKind::S1),
            _ => BallSpec::unit(BallKind::S2),
        })
    }

    pub fn reps_or_default(&self) -> u64 {
        self.reps.unwrap_or(DEFAULT_REPS)
    }

    /// The classified Chung target and its rate function.
    pub fn chung_target(&self) -> Result<(ChungTarget, RateFnSpec)> {
        let f = self.target.clone().unwrap_or(TargetSpec::Zero).path()?;
        let target = match self.target_class {
            Some(class) => ChungTarget::new(f, class)?,
            None => ChungTarget::classify(f)?,
        };
        let rate = match (target.class, &self.rate) {
            (TargetClass::Interior, None | Some(RateFnSpec::Interior)) => RateFnSpec::Interior,
            (TargetClass::Interior, Some(_)) => {
                return Err(Error::invalid("interior targets use the rate ∇(L) = L"));
            }
            (TargetClass::BvBoundary, None) => RateFnSpec::Bv,
            (TargetClass::BvBoundary, Some(RateFnSpec::Interior)) => {
                return Err(Error::invalid("boundary targets need a rate below ∇(L) = L"));
            }
            (TargetClass::BvBoundary, Some(r)) => r.clone(),
        };
        rate.validate()?;
        Ok((target, rate))
    }

    /// Checks the invariants shared by all experiments and the requirements
    /// of the selected one, including the bandwidth conditions of its limit
    /// law.
    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("seeds must be distinct"));
        }
        let indices = self.indices()?;
        if indices[0] < 3 {
            return Err(Error::invalid(format!(
                "sample sizes must be at least 3, got {}",
                indices[0]
            )));
        }
        self.grid()?;
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if let Some(ball) = &self.ball {
            ball.validate()?;
        }
        self.reject_unused()?;
        match self.experiment {
            ExperimentId::Flil | ExperimentId::Quantile => {
                if self.ball_or_default().kind != BallKind::S2 {
                    return Err(Error::invalid(format!(
                        "the {} experiment measures distances to S2",
                        self.experiment
                    )));
                }
            }
            ExperimentId::Local => {
                check_bandwidth_conditions(&self.bandwidth_or_default(), Regime::LocalEmpirical, None)?
                    .into_result()?;
                self.bandwidths(&indices)?;
            }
            ExperimentId::Increments => {
                let step = self
                    .t0_step
                    .ok_or_else(|| Error::invalid("the increments experiment needs t0-step"))?;
                if !(step > 0.0 && step.is_finite()) {
                    return Err(Error::invalid("t0-step must be positive"));
                }
                if self.grid_m % super::increments::NET_CELLS != 0 {
                    return Err(Error::invalid(format!(
                        "grid-m must be a multiple of {}",
                        super::increments::NET_CELLS
                    )));
                }
                if self.bandwidths(&indices)?.iter().any(|&a| a >= 1.0) {
                    return Err(Error::invalid("increment widths must be below 1"));
                }
            }
            ExperimentId::Chung => {
                let (_, rate) = self.chung_target()?;
                check_bandwidth_conditions(&self.bandwidth_or_default(), Regime::Chung, Some(rate.exponent()))?
                    .into_result()?;
                self.bandwidths(&indices)?;
            }
            ExperimentId::BahadurKiefer => {}
            ExperimentId::Dkw => {
                check_reps(self.reps_or_default())?;
                let lambdas = self
                    .lambdas
                    .as_ref()
                    .filter(|l| !l.is_empty())
                    .ok_or_else(|| Error::invalid("the DKW check needs lambdas"))?;
                if lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
                    return Err(Error::invalid("DKW thresholds must be nonnegative"));
                }
            }
            ExperimentId::Poissonization => {
                check_reps(self.reps_or_default())?;
                let lambda = self
                    .lambda
                    .ok_or_else(|| Error::invalid("the Poissonization check needs lambda"))?;
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::invalid("lambda must be positive"));
                }
                let a = self
                    .window
                    .ok_or_else(|| Error::invalid("the Poissonization check needs window"))?;
                if !(a > 0.0 && a < 1.0) {
                    return Err(Error::invalid(format!("window {a} not in (0, 1)")));
                }
            }
        }
        Ok(())
    }

    /// `a_n` for each index.
    pub fn bandwidths(&self, indices: &[u64]) -> Result<Vec<f64>> {
        let schedule = self.bandwidth_or_default();
        schedule.validate()?;
        indices.iter().map(|&n| schedule.a(n)).collect()
    }

    fn reject_unused(&self) -> Result<()> {
        use ExperimentId::*;
        let id = self.experiment;
        let unused = |name: &str, set: bool, users: &[ExperimentId]| -> Result<()> {
            if set && !users.contains(&id) {
                return Err(Error::invalid(format!("{name} does not apply to the {id} experiment")));
            }
            Ok(())
        };
        unused("bandwidth", self.bandwidth.is_some(), &[Local, Increments, Chung])?;
        unused("ball", self.ball.is_some(), &[Flil, Quantile, Local, Increments])?;
        unused("target", self.target.is_some(), &[Chung])?;
        unused("target-class", self.target_class.is_some(), &[Chung])?;
        unused("rate", self.rate.is_some(), &[Chung])?;
        unused("chi-convention", self.chi_convention.is_some(), &[Chung])?;
        unused("t0-step", self.t0_step.is_some(), &[Increments])?;
        unused("lambdas", self.lambdas.is_some(), &[Dkw])?;
        unused("lambda", self.lambda.is_some(), &[Poissonization])?;
        unused("window", self.window.is_some(), &[Poissonization])?;
        unused("reps", self.reps.is_some(), &[Dkw, Poissonization])
    }
}

pub(crate) fn check_reps(reps: u64) -> Result<()> {
    if reps < MIN_REPS {
        return Err(Error::invalid(format!(
            "{reps} replications requested, at least {MIN_REPS} required"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(id: ExperimentId) -> ExperimentConfig {
        ExperimentConfig::new(id, default_schedule(), vec![1, 2])
    }

    #[test]
    fn ids_round_trip_through_strings() {
        for id in ExperimentId::ALL {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("nope".parse::<ExperimentId>().is_err());
    }

    #[test]
    fn basic_invariants() {
        assert!(config(ExperimentId::Flil).validate().is_ok());
        let mut c = config(ExperimentId::Flil);
        c.seeds.clear();
        assert!(c.validate().is_err());
        let mut c = config(ExperimentId::Flil);
        c.seeds = vec![3, 3];
        assert!(c.validate().is_err());
        let mut c = config(ExperimentId::Flil);
        c.schedule = IndexSchedule::Explicit { values: vec![2, 10] };
        assert!(c.validate().is_err());
        let mut c = config(ExperimentId::Flil);
        c.ball = Some(BallSpec::unit(BallKind::S1));
        assert!(c.validate().is_err());
        let mut c = config(ExperimentId::Flil);
        c.lambda = Some(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn local_refuses_bandwidths_failing_the_conditions() {
        let mut c = config(ExperimentId::Local);
        assert!(c.validate().is_ok());
        c.bandwidth = Some(BandwidthSchedule::Power { theta: 1.0 });
        match c.validate() {
            Err(Error::BandwidthCondition { conditions }) => {
                assert!(conditions.iter().any(|s| s.contains("(log₂n)^(7/3)")), "{conditions:?}");
            }
            other => panic!("expected a condition error, got {other:?}"),
        }
    }

    #[test]
    fn chung_targets_and_rates() {
        let mut c = config(ExperimentId::Chung);
        assert!(c.validate().is_ok());
        assert_eq!(c.chung_target().unwrap().1, RateFnSpec::Interior);
        c.target = Some(TargetSpec::Line { slope: 1.0 });
        assert_eq!(c.chung_target().unwrap().1, RateFnSpec::Bv);
        c.target_class = Some(TargetClass::Interior);
        assert!(c.validate().is_err());
        c.target_class = None;
        c.rate = Some(RateFnSpec::Interior);
        assert!(c.validate().is_err());
    }

    #[test]
    fn checks_need_their_parameters() {
        let mut c = config(ExperimentId::Dkw);
        assert!(c.validate().is_err());
        c.lambdas = Some(vec![0.5, 1.0]);
        assert!(c.validate().is_ok());
        c.reps = Some(100);
        assert!(c.validate().is_err());
        let mut c = config(ExperimentId::Poissonization);
        c.lambda = Some(1.0);
        c.window = Some(0.01);
        assert!(c.validate().is_ok());
        c.window = Some(1.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn increments_need_a_t0_step() {
        let mut c = config(ExperimentId::Increments);
        assert!(c.validate().is_err());
        c.t0_step = Some(1.0);
        assert!(c.validate().is_ok());
        c.grid_m = 100;
        assert!(c.validate().is_err());
    }
}
