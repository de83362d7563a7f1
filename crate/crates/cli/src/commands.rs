use std::io::Write;

use clap::ValueEnum;
use flillab::gaussian::{
    exact_centered_small_ball, small_ball_cameron_martin, small_ball_naive, SmallBallEstimate, SupMode,
};
use flillab::geometry::{strassen_distance, BallKind, BallSpec};
use flillab::process::{
    centered_poisson_path, empirical_process, gaussian_path, increment_process, local_empirical_process,
    poissonized_empirical, quantile_process, GaussianKind, Normalization,
};
use flillab::{flil_norm, Grid, SmoothPath, Trajectory, UniformSample};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessKind {
    /// `α_n`.
    Empirical,
    /// `β_n`.
    Quantile,
    /// `α_n(a ·) / √(2a loglog n)`.
    Local,
    /// `(α_n(t0 + a ·) − α_n(t0)) / √(2a log(1/a))`.
    Increment,
    /// Poissonized empirical process with a Poisson(n) sample size.
    Poissonized,
    Wiener,
    Bridge,
    /// Centred Poisson path with intensity `n`.
    Poisson,
}

#[derive(Debug, Clone)]
pub struct PathSpec {
    pub process: ProcessKind,
    pub n: u64,
    pub seed: u64,
    pub a: Option<f64>,
    pub t0: f64,
    pub grid_m: usize,
    /// Divide empirical-type paths by `b_n = √(2 loglog n)`.
    pub flil: bool,
}

impl PathSpec {
    pub fn build(&self) -> Result<Trajectory, CliError> {
        let grid = Grid::new(self.grid_m)?;
        let need_a = || {
            self.a
                .ok_or_else(|| CliError::Config(format!("--a is required for {:?} paths", self.process)))
        };
        let scale = |g: Trajectory| -> Result<Trajectory, CliError> {
            if !self.flil {
                return Ok(g);
            }
            let b = flil_norm(self.n as f64);
            if b <= 0.0 {
                return Err(CliError::Config(format!("loglog({}) = 0", self.n)));
            }
            Ok(g.scaled(1.0 / b))
        };
        Ok(match self.process {
            ProcessKind::Empirical => scale(empirical_process(&UniformSample::draw(self.n, self.seed)?, &grid)?)?,
            ProcessKind::Quantile => scale(quantile_process(&UniformSample::draw(self.n, self.seed)?, &grid)?)?,
            ProcessKind::Poissonized => scale(poissonized_empirical(self.n, self.seed, &grid)?.path)?,
            ProcessKind::Local => {
                let a = need_a()?;
                let s = UniformSample::draw_window(self.n, self.seed, a)?;
                local_empirical_process(&s, a, &grid, Normalization::Flil)?
            }
            ProcessKind::Increment => {
                let a = need_a()?;
                increment_process(&UniformSample::draw(self.n, self.seed)?, self.t0, a, &grid)?
            }
            ProcessKind::Wiener => gaussian_path(GaussianKind::Wiener, &grid, self.seed),
            ProcessKind::Bridge => gaussian_path(GaussianKind::BrownianBridge, &grid, self.seed),
            ProcessKind::Poisson => centered_poisson_path(self.n as f64, &grid, self.seed)?,
        })
    }
}

/// `t,left,value,right` rows, one per knot.
pub fn write_trajectory<W: Write>(g: &Trajectory, out: W) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "left", "value", "right"]).map_err(err)?;
    for k in 0..g.len() {
        w.serialize((g.knots()[k], g.left()[k], g.values()[k], g.right()[k]))
            .map_err(err)?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BallArg {
    S1,
    S2,
}

impl From<BallArg> for BallKind {
    fn from(b: BallArg) -> Self {
        match b {
            BallArg::S1 => BallKind::S1,
            BallArg::S2 => BallKind::S2,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DistanceReport {
    pub ball: BallKind,
    pub radius: f64,
    pub epsilon: f64,
    pub lower: f64,
    pub rigorous_bound: f64,
    pub iterations: usize,
    pub certificate_energy: f64,
    pub path_sup: f64,
    pub knots: usize,
}

pub fn distance(spec: &PathSpec, ball: BallArg, radius: f64, tolerance: f64) -> Result<DistanceReport, CliError> {
    let g = spec.build()?;
    let ball = BallSpec::new(ball.into(), radius).map_err(|e| CliError::Config(e.to_string()))?;
    let d = strassen_distance(&g, ball, tolerance)?;
    Ok(DistanceReport {
        ball: ball.kind,
        radius,
        epsilon: d.epsilon,
        lower: d.lower,
        rigorous_bound: d.rigorous_bound,
        iterations: d.iterations,
        certificate_energy: d.certificate.energy(),
        path_sup: g.sup_abs(),
        knots: g.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Naive,
    CameronMartin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SupArg {
    Continuous,
    Grid,
}

#[derive(Debug, Clone)]
pub struct SmallBallSpec {
    pub method: MethodArg,
    /// Target `f(t) = slope·t`.
    pub slope: f64,
    pub t_scale: f64,
    pub epsilon: f64,
    pub reps: u64,
    pub seed: u64,
    pub grid_m: usize,
    pub sup: SupArg,
}

#[derive(Debug, Serialize)]
pub struct SmallBallReport {
    pub estimate: SmallBallEstimate,
    /// `P(‖W‖ ≤ Tε)` from the alternating series, for the centred case.
    pub exact: Option<f64>,
}

pub fn small_ball(spec: &SmallBallSpec) -> Result<SmallBallReport, CliError> {
    let grid = Grid::new(spec.grid_m)?;
    let f = SmoothPath::line(spec.slope);
    let mode = match spec.sup {
        SupArg::Continuous => SupMode::Continuous,
        SupArg::Grid => SupMode::Grid,
    };
    let estimate = match spec.method {
        MethodArg::Naive => small_ball_naive(&f, spec.t_scale, spec.epsilon, spec.reps, &grid, spec.seed, mode)?,
        MethodArg::CameronMartin => {
            small_ball_cameron_martin(&f, spec.t_scale, spec.epsilon, spec.reps, &grid, spec.seed, mode)?
        }
    };
    let exact = if spec.slope == 0.0 {
        Some(exact_centered_small_ball(spec.t_scale * spec.epsilon)?)
    } else {
        None
    };
    Ok(SmallBallReport { estimate, exact })
}
