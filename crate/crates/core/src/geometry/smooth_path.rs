use crate::process::{Grid, Trajectory};
use crate::{Error, Result};

/// Continuous piecewise-linear path with `f(0) = 0`, the candidate members
/// of the Strassen balls.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPath {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl SmoothPath {
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::invalid("smooth path needs matching knots and values"));
        }
        if knots[0] != 0.0 || knots[knots.len() - 1] != 1.0 {
            return Err(Error::invalid("knots must start at 0 and end at 1"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("path values must be finite"));
        }
        if values[0] != 0.0 {
            return Err(Error::invalid("smooth paths start at 0"));
        }
        Ok(SmoothPath { knots, values })
    }

    pub(crate) fn new_unchecked(knots: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        SmoothPath { knots, values }
    }

    /// Path with derivative `slopes[i]` on the `i`-th cell of `grid`.
    pub fn from_slopes(grid: &Grid, slopes: &[f64]) -> Result<Self> {
        if slopes.len() != grid.cells() {
            return Err(Error::invalid(format!(
                "expected {} slopes, got {}",
                grid.cells(),
                slopes.len()
            )));
        }
        let d = grid.delta();
        let mut values = Vec::with_capacity(slopes.len() + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for s in slopes {
            acc += s * d;
            values.push(acc);
        }
        Self::new(grid.points().collect(), values)
    }

    pub fn zero() -> Self {
        Self::line(0.0)
    }

    /// `t ↦ t`, the unit-norm element of S₁ with the largest endpoint.
    pub fn identity() -> Self {
        Self::line(1.0)
    }

    pub fn line(slope: f64) -> Self {
        SmoothPath {
            knots: vec![0.0, 1.0],
            values: vec![0.0, slope],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Slope on each piece.
    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| (v[1] - v[0]) / (x[1] - x[0]))
            .collect()
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        let k = self.knots.partition_point(|&x| x <= t);
        if k >= self.knots.len() {
            return self.values[self.knots.len() - 1];
        }
        let (x0, x1) = (self.knots[k - 1], self.knots[k]);
        let (y0, y1) = (self.values[k - 1], self.values[k]);
        y0 + (y1 - y0) * ((t - x0) / (x1 - x0))
    }

    /// `∫₀¹ f′²`.
    pub fn energy(&self) -> f64 {
        self.knots
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| {
                let dv = v[1] - v[0];
                dv * dv / (x[1] - x[0])
            })
            .sum()
    }

    /// Cameron–Martin norm `(∫₀¹ f′²)^{1/2}`.
    pub fn h_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        SmoothPath {
            knots: self.knots.clone(),
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Values at the points of `grid`.
    pub fn on_grid(&self, grid: &Grid) -> Vec<f64> {
        grid.points().map(|t| self.eval(t)).collect()
    }

    /// Linear interpolant of the path on `grid`; never increases the energy.
    pub fn resample(&self, grid: &Grid) -> Self {
        SmoothPath {
            knots: grid.points().collect(),
            values: self.on_grid(grid),
        }
    }

    pub fn to_trajectory(&self) -> Trajectory {
        Trajectory::linear(self.knots.clone(), self.values.clone())
            .expect("smooth path knots are valid")
    }
}
