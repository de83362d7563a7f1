use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{min_energy_in_tube, BallKind};
use crate::process::{gaussian_path_with, GaussianKind, Grid};
use crate::rng::{self, tag};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub c: f64,
    pub p_hat: f64,
    pub std_err: f64,
    pub hits: u64,
    pub reps: u64,
}

/// Non-covering probabilities over a scan of radii with a fit of
/// `log p̂ ≈ offset + slope·(−c²/2 − c·u/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailScan {
    pub u: f64,
    pub estimates: Vec<TailEstimate>,
    /// Least-squares offset with the slope fixed at 1.
    pub offset: f64,
    /// Free least-squares fit; `None` with fewer than two usable radii.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
}

fn path_kind(kind: BallKind) -> GaussianKind {
    match kind {
        BallKind::S1 => GaussianKind::Wiener,
        BallKind::S2 => GaussianKind::BrownianBridge,
    }
}

/// Per path: `sup |path|` and the minimal energy in the `u`-tube (infinite
/// when the tube is empty).
fn path_statistics(kind: BallKind, u: f64, reps: u64, grid: &Grid, seed: u64) -> Result<Vec<(f64, f64)>> {
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(tag::CLUSTER_TAIL, seed, r);
            let g = gaussian_path_with(path_kind(kind), grid, &mut rng);
            let e = min_energy_in_tube(&g, u, kind)?.map_or(f64::INFINITY, |f| f.energy());
            Ok((g.sup_abs(), e))
        })
        .collect()
}

fn estimate(stats: &[(f64, f64)], c: f64, u: f64) -> TailEstimate {
    let hits = stats
        .iter()
        .filter(|&&(sup, e)| if c == 0.0 { sup > u } else { e > c * c })
        .count() as u64;
    let reps = stats.len() as u64;
    let p = hits as f64 / reps as f64;
    TailEstimate {
        c,
        p_hat: p,
        std_err: (p * (1.0 - p) / reps as f64).sqrt(),
        hits,
        reps,
    }
}

fn check(c: f64, u: f64, reps: u64) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) || !(u > 0.0 && u.is_finite()) {
        return Err(Error::invalid("need c ≥ 0 and u > 0"));
    }
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    Ok(())
}

/// Monte Carlo estimate of `P(path ∉ c·S + u·B₀)` for Wiener paths (`S1`) or
/// Brownian bridges (`S2`).
pub fn gaussian_cluster_tail(
    kind: BallKind,
    c: f64,
    u: f64,
    reps: u64,
    grid: &Grid,
    seed: u64,
) -> Result<TailEstimate> {
    check(c, u, reps)?;
    let stats = path_statistics(kind, u, reps, grid, seed)?;
    Ok(estimate(&stats, c, u))
}

/// [`gaussian_cluster_tail`] for several radii on the same paths, with the
/// tail-shape fit.
pub fn cluster_tail_scan(
    kind: BallKind,
    cs: &[f64],
    u: f64,
    reps: u64,
    grid: &Grid,
    seed: u64,
) -> Result<TailScan> {
    for &c in cs {
        check(c, u, reps)?;
    }
    let stats = path_statistics(kind, u, reps, grid, seed)?;
    let estimates: Vec<TailEstimate> = cs.iter().map(|&c| estimate(&stats, c, u)).collect();
    let pts: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.p_hat > 0.0)
        .map(|e| (-0.5 * e.c * e.c - 0.5 * e.c * u, e.p_hat.ln()))
        .collect();
    let k = pts.len() as f64;
    let offset = if pts.is_empty() {
        f64::NAN
    } else {
        pts.iter().map(|(x, y)| y - x).sum::<f64>() / k
    };
    let (slope, intercept) = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx > 0.0 {
            let b = sxy / sxx;
            (Some(b), Some(my - b * mx))
        } else {
            (None, None)
        }
    } else {
        (None, None)
    };
    Ok(TailScan {
        u,
        estimates,
        offset,
        slope,
        intercept,
    })
}
