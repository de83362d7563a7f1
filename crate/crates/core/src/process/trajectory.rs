//! Exact representation of the paths handled by the crate.
//!
//! A [`Trajectory`] is described by strictly increasing knots
//! `0 = x_0 < … < x_K = 1`. At every knot it stores the left limit, the value
//! and the right limit; between consecutive knots the path is affine, running
//! from `right[k]` to `left[k + 1]`. This covers every object the crate
//! simulates without discretisation error: empirical and quantile processes
//! are affine between their jumps, Gaussian paths are linear interpolants of
//! grid values, and Poisson paths are counts minus a linear compensator.
//!
//! Because every piece is affine, the supremum of `|g|` (or of `|g − f|` for a
//! continuous piecewise-affine `f`) over all of `[0, 1]` is attained at a knot,
//! as a value or a one-sided limit.

use serde::{Deserialize, Serialize};

use super::Grid;
use crate::{Error, Result};

/// Interpolation tag carried for bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interp {
    /// Path with jumps (empirical-type); values are right-continuous except
    /// where noted by the constructor.
    CadlagStep,
    /// Continuous piecewise-linear path.
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    interp: Interp,
    knots: Vec<f64>,
    left: Vec<f64>,
    value: Vec<f64>,
    right: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from raw knot data, validating every invariant.
    pub fn from_parts(
        interp: Interp,
        knots: Vec<f64>,
        left: Vec<f64>,
        value: Vec<f64>,
        right: Vec<f64>,
    ) -> Result<Self> {
        let k = knots.len();
        if k < 2 {
            return Err(Error::invalid("trajectory needs at least two knots"));
        }
        if left.len() != k || value.len() != k || right.len() != k {
            return Err(Error::invalid("knot arrays have different lengths"));
        }
        if knots[0] != 0.0 || knots[k - 1] != 1.0 {
            return Err(Error::invalid("knots must start at 0 and end at 1"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        if left.iter().chain(&value).chain(&right).any(|v| !v.is_finite()) {
            return Err(Error::invalid("trajectory values must be finite"));
        }
        Ok(Self::from_parts_unchecked(interp, knots, left, value, right))
    }

    pub(crate) fn from_parts_unchecked(
        interp: Interp,
        knots: Vec<f64>,
        left: Vec<f64>,
        value: Vec<f64>,
        right: Vec<f64>,
    ) -> Self {
        debug_assert!(knots.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(knots.first(), Some(&0.0));
        debug_assert_eq!(knots.last(), Some(&1.0));
        Trajectory {
            interp,
            knots,
            left,
            value,
            right,
        }
    }

    /// Continuous piecewise-linear path through `(knots[i], values[i])`.
    pub fn linear(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let left = values.clone();
        let right = values.clone();
        Self::from_parts(Interp::Linear, knots, left, values, right)
    }

    /// Linear interpolant of values given on a uniform grid.
    pub fn from_grid_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() + 1 {
            return Err(Error::invalid(format!(
                "expected {} grid values, got {}",
                grid.cells() + 1,
                values.len()
            )));
        }
        Self::linear(grid.points().collect(), values)
    }

    /// Linear path `t ↦ slope·t` on the given grid.
    pub fn ramp(grid: &Grid, slope: f64) -> Self {
        let values: Vec<f64> = grid.points().map(|t| slope * t).collect();
        Self::from_grid_values(grid, values).expect("grid-sized values")
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn values(&self) -> &[f64] {
        &self.value
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Knots at which the path is discontinuous, with their one-sided limits
    /// `(t, left, right)`.
    pub fn jump_points(&self) -> Vec<(f64, f64, f64)> {
        (0..self.len())
            .filter(|&k| self.left[k] != self.value[k] || self.value[k] != self.right[k])
            .map(|k| (self.knots[k], self.left[k], self.right[k]))
            .collect()
    }

    /// `(left, value, right)` at an arbitrary `t ∈ [0, 1]`.
    pub fn eval3(&self, t: f64) -> (f64, f64, f64) {
        let t = t.clamp(0.0, 1.0);
        let idx = self.knots.partition_point(|&x| x < t);
        if idx < self.len() && self.knots[idx] == t {
            return (self.left[idx], self.value[idx], self.right[idx]);
        }
        let v = self.interior(idx - 1, t);
        (v, v, v)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval3(t).1
    }

    fn interior(&self, k: usize, t: f64) -> f64 {
        let (x0, x1) = (self.knots[k], self.knots[k + 1]);
        let (y0, y1) = (self.right[k], self.left[k + 1]);
        y0 + (y1 - y0) * ((t - x0) / (x1 - x0))
    }

    /// Values at the points of a uniform grid (`m + 1` numbers).
    pub fn on_grid(&self, grid: &Grid) -> Vec<f64> {
        let pts: Vec<f64> = grid.points().collect();
        self.eval_sorted(&pts).1
    }

    /// Evaluates `(left, value, right)` at sorted points in one sweep.
    pub fn eval_sorted(&self, ts: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut l = Vec::with_capacity(ts.len());
        let mut v = Vec::with_capacity(ts.len());
        let mut r = Vec::with_capacity(ts.len());
        let mut k = 0usize;
        for &t in ts {
            while k + 1 < self.len() && self.knots[k + 1] <= t {
                k += 1;
            }
            if self.knots[k] == t {
                l.push(self.left[k]);
                v.push(self.value[k]);
                r.push(self.right[k]);
            } else {
                let y = self.interior(k, t);
                l.push(y);
                v.push(y);
                r.push(y);
            }
        }
        (l, v, r)
    }

    /// Exact `sup_{[0,1]} |g|`.
    pub fn sup_abs(&self) -> f64 {
        self.left
            .iter()
            .chain(&self.value)
            .chain(&self.right)
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Lower and upper envelopes at each knot: `min` and `max` of the three
    /// stored numbers.
    pub fn knot_envelopes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |k| {
            let (a, b, c) = (self.left[k], self.value[k], self.right[k]);
            (a.min(b).min(c), a.max(b).max(c))
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let s = |v: &[f64]| v.iter().map(|x| x * factor).collect::<Vec<_>>();
        Trajectory {
            interp: self.interp,
            knots: self.knots.clone(),
            left: s(&self.left),
            value: s(&self.value),
            right: s(&self.right),
        }
    }

    /// Pointwise combination `a·self + b·other` on the union of both knot
    /// sets; exact because both operands are affine between the merged knots.
    pub fn combine(&self, a: f64, other: &Trajectory, b: f64) -> Self {
        let knots = merge_knots(&self.knots, &other.knots);
        let (l1, v1, r1) = self.eval_sorted(&knots);
        let (l2, v2, r2) = other.eval_sorted(&knots);
        let mix = |x: Vec<f64>, y: Vec<f64>| {
            x.into_iter()
                .zip(y)
                .map(|(p, q)| a * p + b * q)
                .collect::<Vec<_>>()
        };
        let interp = if self.interp == Interp::Linear && other.interp == Interp::Linear {
            Interp::Linear
        } else {
            Interp::CadlagStep
        };
        Trajectory {
            interp,
            knots,
            left: mix(l1, l2),
            value: mix(v1, v2),
            right: mix(r1, r2),
        }
    }

    pub fn add(&self, other: &Trajectory) -> Self {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Trajectory) -> Self {
        self.combine(1.0, other, -1.0)
    }

    /// Exact `sup_{[0,1]} |self − other|`.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.sub(other).sup_abs()
    }
}

/// Sorted union of two strictly increasing knot vectors.
pub(crate) fn merge_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}
