use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rate function `∇(L)` scaling the Chung-type liminf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RateFnSpec {
    /// `∇(L) = L^{2/3}`, for targets on the unit sphere with `f′` of bounded
    /// variation.
    Bv,
    /// `∇(L) = L`, for targets strictly inside the unit ball.
    Interior,
    /// Tabulated `(L, ∇(L))`, interpolated log-linearly.
    Custom { table: Vec<(f64, f64)> },
}

impl RateFnSpec {
    /// Growth exponent `p` with `∇(L) ≍ L^p`; for tables, the log-log slope of
    /// the last segment.
    pub fn exponent(&self) -> f64 {
        match self {
            RateFnSpec::Bv => 2.0 / 3.0,
            RateFnSpec::Interior => 1.0,
            RateFnSpec::Custom { table } => {
                let k = table.len();
                if k < 2 {
                    return f64::NAN;
                }
                let (l0, v0) = table[k - 2];
                let (l1, v1) = table[k - 1];
                (v1 / v0).ln() / (l1 / l0).ln()
            }
        }
    }

    /// Positivity, monotonicity and `L^{2/3} ≲ ∇(L) ≲ L` on a log-spaced scan
    /// of the domain, the latter judged by the tail log-log slope.
    pub fn validate(&self) -> Result<()> {
        let RateFnSpec::Custom { table } = self else {
            return Ok(());
        };
        if table.len() < 2 {
            return Err(Error::invalid("rate table needs at least two points"));
        }
        if table.iter().any(|&(l, v)| !(l > 0.0 && v > 0.0 && l.is_finite() && v.is_finite())) {
            return Err(Error::invalid("rate table entries must be positive"));
        }
        if table.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::invalid("rate table abscissae must increase"));
        }
        let (lo, hi) = (table[0].0, table[table.len() - 1].0);
        let scan: Vec<f64> = (0..=64)
            .map(|i| lo * (hi / lo).powf(i as f64 / 64.0))
            .collect();
        let vals: Vec<f64> = scan.iter().map(|&l| self.eval(l)).collect::<Result<_>>()?;
        if vals.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("rate function must be nondecreasing"));
        }
        let p = self.exponent();
        if !(p <= 1.0 + 1e-9) {
            return Err(Error::invalid(format!(
                "limsup L^(-1)·∇(L) < ∞ fails: tail slope {p} > 1"
            )));
        }
        if !(p >= 2.0 / 3.0 - 1e-9) {
            return Err(Error::invalid(format!(
                "liminf L^(-2/3)·∇(L) > 0 fails: tail slope {p} < 2/3"
            )));
        }
        Ok(())
    }

    pub fn eval(&self, l: f64) -> Result<f64> {
        if !(l > 0.0) {
            return Err(Error::invalid(format!("rate argument {l} must be positive")));
        }
        match self {
            RateFnSpec::Bv => Ok(l.cbrt() * l.cbrt()),
            RateFnSpec::Interior => Ok(l),
            RateFnSpec::Custom { table } => {
                let (lo, hi) = (table[0].0, table[table.len() - 1].0);
                if l < lo || l > hi {
                    return Err(Error::invalid(format!(
                        "rate table covers [{lo}, {hi}], queried at {l}"
                    )));
                }
                let k = table.partition_point(|&(x, _)| x < l);
                if table[k].0 == l {
                    return Ok(table[k].1);
                }
                let ((l0, v0), (l1, v1)) = (table[k - 1], table[k]);
                let s = (l / l0).ln() / (l1 / l0).ln();
                Ok(v0 * (v1 / v0).powf(s))
            }
        }
    }
}

/// `∇(L)` for the given rate function.
pub fn rate_function(spec: &RateFnSpec, l: f64) -> Result<f64> {
    spec.eval(l)
}
