use serde::{Deserialize, Serialize};

use crate::geometry::SmoothPath;
use crate::{Error, Result};

/// How `‖f‖_H` enters the interior Chung constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiConvention {
    /// `π / (4√(1 − ‖f‖_H))`.
    #[default]
    Norm,
    /// `π / (4√(1 − ‖f‖_H²))`.
    SquaredNorm,
}

/// Chung constant for a target strictly inside the unit ball.
pub fn chung_constant_interior(f: &SmoothPath, convention: ChiConvention) -> Result<f64> {
    let h = f.h_norm();
    if !(h < 1.0) {
        return Err(Error::invalid(format!(
            "‖f‖_H = {h} is not inside the unit ball"
        )));
    }
    let gap = match convention {
        ChiConvention::Norm => 1.0 - h,
        ChiConvention::SquaredNorm => 1.0 - h * h,
    };
    Ok(std::f64::consts::PI / (4.0 * gap.sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetClass {
    /// `‖f‖_H < 1`.
    Interior,
    /// `‖f‖_H = 1` with `f′` of bounded variation.
    BvBoundary,
}

const CLASS_TOL: f64 = 1e-9;

/// A target path of a Chung-type experiment with its class.
#[derive(Debug, Clone, PartialEq)]
pub struct ChungTarget {
    pub f: SmoothPath,
    pub class: TargetClass,
}

impl ChungTarget {
    /// Checks `class` against `‖f‖_H`. Piecewise-linear paths always have a
    /// derivative of bounded variation.
    pub fn new(f: SmoothPath, class: TargetClass) -> Result<Self> {
        let h = f.h_norm();
        let ok = match class {
            TargetClass::Interior => h < 1.0 - CLASS_TOL,
            TargetClass::BvBoundary => (h - 1.0).abs() <= CLASS_TOL,
        };
        if !ok {
            return Err(Error::invalid(format!(
                "target with ‖f‖_H = {h} is not of class {class:?}"
            )));
        }
        Ok(ChungTarget { f, class })
    }

    pub fn classify(f: SmoothPath) -> Result<Self> {
        let h = f.h_norm();
        let class = if h < 1.0 - CLASS_TOL {
            TargetClass::Interior
        } else {
            TargetClass::BvBoundary
        };
        Self::new(f, class)
    }
}
