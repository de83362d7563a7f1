use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform grid `t_i = i/m`, `i = 0..=m`, on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    m: usize,
}

impl Grid {
    /// Default resolution for Gaussian paths.
    pub const DEFAULT_M: usize = 2048;

    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("grid needs at least one cell"));
        }
        Ok(Grid { m })
    }

    pub fn cells(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// `i/m`, computed as a single correctly rounded division so that equal
    /// rationals on different grids compare equal.
    pub fn point(&self, i: usize) -> f64 {
        i as f64 / self.m as f64
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.m + 1).map(move |i| self.point(i))
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid { m: Self::DEFAULT_M }
    }
}
