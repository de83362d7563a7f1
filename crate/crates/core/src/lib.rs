//! Simulation laboratory for functional laws of the iterated logarithm.
//!
//! The crate is organised in four layers:
//!
//! * [`process`] seedable simulation of uniform samples, empirical,
//!   quantile, local and increment processes, Poissonized and Gaussian paths,
//!   plus the index and bandwidth schedules the limit laws are stated along.
//! * [`geometry`] exact sup-norm distances to the Strassen balls
//!   `c·S₁` (Wiener RKHS ball) and `c·S₂` (Brownian-bridge RKHS ball) via an
//!   energy-minimising taut string threaded through an ε-tube.
//! * [`gaussian`] small-ball estimators (naive and Cameron–Martin weighted),
//!   the exact centred small-ball series, Chung constants, rate functions and
//!   non-covering tail scans.
//! * [`experiments`] per-(n, seed) harnesses producing
//!   [`ExperimentRecord`](experiments::ExperimentRecord) streams.
//!
//! Every stochastic operation is a pure function of its inputs and a 64-bit
//! seed; see [`rng`].

pub mod error;
pub mod experiments;
pub mod gaussian;
pub mod geometry;
pub mod process;
pub mod rng;

pub use error::{Error, Result};
pub use geometry::{BallKind, BallSpec, DistanceResult, SmoothPath};
pub use process::{Grid, Interp, Trajectory, UniformSample};

/// Iterated logarithm `log(log(max(u, e)))`.
///
/// Vanishes for every `u ≤ e`, so normalisations built on it are only
/// meaningful for `u > e`.
pub fn loglog(u: f64) -> f64 {
    u.max(std::f64::consts::E).ln().ln().max(0.0)
}

/// The FLIL normaliser `b_n = sqrt(2 loglog n)`.
pub fn flil_norm(n: f64) -> f64 {
    (2.0 * loglog(n)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_clamps_below_e() {
        assert_eq!(loglog(0.5), 0.0);
        assert_eq!(loglog(2.0), 0.0);
        assert_eq!(loglog(std::f64::consts::E), 0.0);
        assert!((loglog(3.0) - 3f64.ln().ln()).abs() < 1e-15);
        assert!((loglog(1e6) - (1e6f64).ln().ln()).abs() < 1e-15);
    }

    #[test]
    fn flil_norm_matches_definition() {
        let n = 1e4;
        assert!((flil_norm(n) - (2.0 * n.ln().ln()).sqrt()).abs() < 1e-15);
    }
}
