//! Small-ball probabilities `P(sup_{[0,1]} |W/T − f| ≤ ε)`.
//!
//! Both Monte Carlo estimators simulate `W` at the points of the grid merged
//! with the knots of `f`. By default the supremum is taken over the whole of
//! `[0, 1]`: given its endpoints, `W − T f` is a Brownian bridge on each cell,
//! and the probability that it stays in the strip is known in closed form.
//! One uniform per path then decides the event with exactly the continuous
//! probability.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::SmoothPath;
use crate::process::Grid;
use crate::rng::{self, tag};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallBallMethod {
    Naive,
    CameronMartin,
    ExactSeries,
}

/// Where the supremum is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupMode {
    /// Over all of `[0, 1]`, via the per-cell bridge crossing probability.
    #[default]
    Continuous,
    /// Over the simulation points only; biased upwards.
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmallBallEstimate {
    pub p_hat: f64,
    pub log_p: f64,
    pub std_err: f64,
    pub method: SmallBallMethod,
    pub reps: u64,
    pub grid_m: usize,
    /// Paths inside the ball.
    pub hits: u64,
    /// Fewer than ten hits: `p_hat` and `std_err` are unreliable.
    pub low_count: bool,
    /// Largest log-weight among hits (Cameron–Martin only).
    pub max_log_weight: Option<f64>,
}

/// Probability that a Brownian bridge of duration `h` from `x` to `y` stays
/// in `(0, w)`.
pub fn bridge_stay_probability(x: f64, y: f64, w: f64, h: f64) -> f64 {
    if !(x > 0.0 && x < w && y > 0.0 && y < w) {
        return 0.0;
    }
    let low = 2.0 * x * y / h;
    let high = 2.0 * (w - x) * (w - y) / h;
    if low > 40.0 && high > 40.0 {
        return 1.0;
    }
    if h > 0.5 * w * w {
        return spectral_stay(x, y, w, h);
    }
    let mut p = 1.0 - (-low).exp();
    for k in 1..100 {
        let kw = k as f64 * w;
        let mut step = 0.0;
        for s in [kw, -kw] {
            step += (-2.0 * s * (s + y - x) / h).exp();
            step -= (-2.0 * (x + s) * (y + s) / h).exp();
        }
        p += step;
        if (-2.0 * kw * (kw - w) / h).exp() < 1e-18 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Sine expansion of the killed heat kernel divided by the free one.
fn spectral_stay(x: f64, y: f64, w: f64, h: f64) -> f64 {
    use std::f64::consts::PI;
    let a = PI * PI * h / (2.0 * w * w);
    let mut kernel = 0.0;
    for n in 1..1000 {
        let nf = n as f64;
        let damp = (-nf * nf * a).exp();
        kernel += (nf * PI * x / w).sin() * (nf * PI * y / w).sin() * damp;
        if damp < 1e-300 || (n > 1 && damp < 1e-18 * kernel.abs()) {
            break;
        }
    }
    let kernel = 2.0 / w * kernel;
    let free = (-(y - x).powi(2) / (2.0 * h)).exp() / (2.0 * PI * h).sqrt();
    (kernel / free).clamp(0.0, 1.0)
}

/// `P(sup_{[0,1]} |W| ≤ ε) = (4/π) Σ_k (−1)^k/(2k+1) · exp(−(2k+1)²π²/(8ε²))`.
pub fn exact_centered_small_ball(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("ε = {epsilon} must be positive")));
    }
    let c = std::f64::consts::PI.powi(2) / (8.0 * epsilon * epsilon);
    let mut sum = 0.0;
    for k in 0..1_000_000u64 {
        let j = (2 * k + 1) as f64;
        let term = (-j * j * c).exp() / j;
        sum += if k % 2 == 0 { term } else { -term };
        if term <= 1e-16 * sum.abs() {
            break;
        }
    }
    Ok((4.0 / std::f64::consts::PI * sum).clamp(0.0, 1.0))
}

pub fn exact_centered_estimate(epsilon: f64) -> Result<SmallBallEstimate> {
    let p = exact_centered_small_ball(epsilon)?;
    Ok(SmallBallEstimate {
        p_hat: p,
        log_p: p.ln(),
        std_err: 0.0,
        method: SmallBallMethod::ExactSeries,
        reps: 0,
        grid_m: 0,
        hits: 0,
        low_count: false,
        max_log_weight: None,
    })
}

struct Setup {
    /// Cell lengths of the merged grid.
    h: Vec<f64>,
    /// `T·f` at the merged points.
    shift: Vec<f64>,
    /// `f′` on each merged cell.
    slope: Vec<f64>,
    half_width: f64,
    t_scale: f64,
    energy: f64,
}

fn setup(f: &SmoothPath, t_scale: f64, epsilon: f64, reps: u64, grid: &Grid) -> Result<Setup> {
    if reps == 0 {
        return Err(Error::invalid("reps must be at least 1"));
    }
    if !(t_scale > 0.0 && t_scale.is_finite()) || !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid("T and ε must be positive"));
    }
    let pts = crate::process::merge_sorted(&grid.points().collect::<Vec<_>>(), f.knots());
    let h: Vec<f64> = pts.windows(2).map(|w| w[1] - w[0]).collect();
    let fv: Vec<f64> = pts.iter().map(|&t| f.eval(t)).collect();
    let slope = fv
        .windows(2)
        .zip(&h)
        .map(|(v, d)| (v[1] - v[0]) / d)
        .collect();
    Ok(Setup {
        h,
        shift: fv.iter().map(|v| t_scale * v).collect(),
        slope,
        half_width: t_scale * epsilon,
        t_scale,
        energy: f.energy(),
    })
}

/// One replication: simulates `W` and returns `Some(Σ f′_i ΔW_i)` when
/// `sup |W − shift| ≤ half_width`, `None` otherwise.
fn replicate(s: &Setup, shifted: bool, mode: SupMode, rng: &mut impl Rng) -> Option<f64> {
    let r = s.half_width;
    let w = 2.0 * r;
    let (mut wv, mut dot, mut stay) = (0.0f64, 0.0f64, 1.0f64);
    let mut prev = 0.0 - if shifted { s.shift[0] } else { 0.0 };
    if prev.abs() > r {
        return None;
    }
    for (i, &h) in s.h.iter().enumerate() {
        let z: f64 = StandardNormal.sample(rng);
        let dw = h.sqrt() * z;
        wv += dw;
        dot += s.slope[i] * dw;
        let d = wv - if shifted { s.shift[i + 1] } else { 0.0 };
        if d.abs() > r {
            return None;
        }
        if mode == SupMode::Continuous {
            stay *= bridge_stay_probability(prev + r, d + r, w, h);
            if stay == 0.0 {
                return None;
            }
        }
        prev = d;
    }
    if mode == SupMode::Continuous {
        let v: f64 = rng.random();
        if v >= stay {
            return None;
        }
    }
    Some(dot)
}

fn warn_low(hits: u64) -> bool {
    let low = hits < 10;
    if low {
        log::warn!("small-ball estimate rests on {hits} hits");
    }
    low
}

/// Fraction of simulated paths with `sup |W/T − f| ≤ ε`.
pub fn small_ball_naive(
    f: &SmoothPath,
    t_scale: f64,
    epsilon: f64,
    reps: u64,
    grid: &Grid,
    seed: u64,
    mode: SupMode,
) -> Result<SmallBallEstimate> {
    let s = setup(f, t_scale, epsilon, reps, grid)?;
    let hits: u64 = (0..reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::stream(tag::SMALL_BALL, seed, r);
            u64::from(replicate(&s, true, mode, &mut rng).is_some())
        })
        .sum();
    let p = hits as f64 / reps as f64;
    Ok(SmallBallEstimate {
        p_hat: p,
        log_p: p.ln(),
        std_err: (p * (1.0 - p) / reps as f64).sqrt(),
        method: SmallBallMethod::Naive,
        reps,
        grid_m: grid.cells(),
        hits,
        low_count: warn_low(hits),
        max_log_weight: None,
    })
}

/// Cameron–Martin estimate
/// `E[1{sup|W| ≤ Tε} · exp(−T Σ f′_i ΔW_i − T²‖f‖²/2)]` from centred paths.
/// With `f = 0` it reproduces [`small_ball_naive`] exactly for the same seed.
pub fn small_ball_cameron_martin(
    f: &SmoothPath,
    t_scale: f64,
    epsilon: f64,
    reps: u64,
    grid: &Grid,
    seed: u64,
    mode: SupMode,
) -> Result<SmallBallEstimate> {
    let s = setup(f, t_scale, epsilon, reps, grid)?;
    let t = s.t_scale;
    let log_weights: Vec<f64> = (0..reps)
        .into_par_iter()
        .filter_map(|r| {
            let mut rng = rng::stream(tag::SMALL_BALL, seed, r);
            replicate(&s, false, mode, &mut rng).map(|dot| -t * dot - 0.5 * t * t * s.energy)
        })
        .collect();
    let hits = log_weights.len() as u64;
    let n = reps as f64;
    if hits == 0 {
        return Ok(SmallBallEstimate {
            p_hat: 0.0,
            log_p: f64::NEG_INFINITY,
            std_err: 0.0,
            method: SmallBallMethod::CameronMartin,
            reps,
            grid_m: grid.cells(),
            hits,
            low_count: warn_low(hits),
            max_log_weight: None,
        });
    }
    let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return Err(Error::Internal("non-finite Cameron–Martin weight".into()));
    }
    let (s1, s2) = log_weights.iter().fold((0.0, 0.0), |(a, b), lw| {
        let w = (lw - top).exp();
        (a + w, b + w * w)
    });
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    let scale = top.exp();
    log::debug!("Cameron–Martin max log-weight {top}");
    Ok(SmallBallEstimate {
        p_hat: scale * mean,
        log_p: top + mean.ln(),
        std_err: scale * (var / n).sqrt(),
        method: SmallBallMethod::CameronMartin,
        reps,
        grid_m: grid.cells(),
        hits,
        low_count: warn_low(hits),
        max_log_weight: Some(top),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_series_values() {
        let p = exact_centered_small_ball(0.5).unwrap();
        assert!((p - 9.156_990_289_760_756e-3).abs() < 1e-15);
        assert!(exact_centered_small_ball(5.0).unwrap() >= 0.9999);
        let mut prev = 0.0;
        for i in 1..60 {
            let q = exact_centered_small_ball(i as f64 * 0.1).unwrap();
            assert!(q >= prev);
            prev = q;
        }
        assert!(exact_centered_small_ball(0.0).is_err());
    }

    #[test]
    fn stay_probability_limits() {
        assert_eq!(bridge_stay_probability(0.0, 0.5, 1.0, 0.1), 0.0);
        assert_eq!(bridge_stay_probability(0.5, 0.5, 1.0, 1e-6), 1.0);
        // One distant barrier: the reflection formula.
        let p = bridge_stay_probability(0.3, 0.2, 100.0, 0.05);
        assert!((p - (1.0 - (-2.0 * 0.3 * 0.2 / 0.05f64).exp())).abs() < 1e-14);
        // Long bridge pinned at the midpoint of a narrow strip.
        let p = bridge_stay_probability(0.5, 0.5, 1.0, 10.0);
        let lead = 2.0 * (-std::f64::consts::PI.powi(2) * 5.0).exp() * (20.0 * std::f64::consts::PI).sqrt();
        assert!((p / lead - 1.0).abs() < 1e-9, "{p} vs {lead}");
        // Both expansions agree where they overlap.
        for (x, y) in [(0.3, 0.6), (0.1, 0.9), (0.5, 0.2)] {
            let h = 0.5;
            let image = bridge_stay_probability(x, y, 1.0, h);
            let sine = spectral_stay(x, y, 1.0, h);
            assert!((image - sine).abs() < 1e-12, "{image} vs {sine}");
        }
    }

    #[test]
    fn large_ball_is_almost_sure() {
        let g = Grid::new(64).unwrap();
        let e = small_ball_naive(&SmoothPath::zero(), 1.0, 3.0, 2000, &g, 1, SupMode::Continuous).unwrap();
        assert!(e.p_hat > 0.99);
    }

    #[test]
    fn tiny_ball_has_no_hits() {
        let g = Grid::new(64).unwrap();
        let e = small_ball_naive(&SmoothPath::zero(), 1.0, 0.05, 200, &g, 1, SupMode::Continuous).unwrap();
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.std_err, 0.0);
        assert!(e.low_count);
    }

    #[test]
    fn cameron_martin_reduces_to_naive_at_zero_shift() {
        let g = Grid::new(128).unwrap();
        for mode in [SupMode::Continuous, SupMode::Grid] {
            let a = small_ball_naive(&SmoothPath::zero(), 1.0, 0.8, 3000, &g, 7, mode).unwrap();
            let b = small_ball_cameron_martin(&SmoothPath::zero(), 1.0, 0.8, 3000, &g, 7, mode).unwrap();
            assert_eq!(a.hits, b.hits);
            assert_eq!(a.p_hat, b.p_hat);
            assert_eq!(a.std_err, b.std_err);
        }
    }

    #[test]
    fn grid_mode_is_biased_upwards() {
        let g = Grid::new(16).unwrap();
        let f = SmoothPath::zero();
        let c = small_ball_naive(&f, 1.0, 0.7, 4000, &g, 3, SupMode::Continuous).unwrap();
        let d = small_ball_naive(&f, 1.0, 0.7, 4000, &g, 3, SupMode::Grid).unwrap();
        assert!(d.hits >= c.hits);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = Grid::new(8).unwrap();
        let f = SmoothPath::zero();
        assert!(small_ball_naive(&f, 1.0, 0.5, 0, &g, 1, SupMode::Grid).is_err());
        assert!(small_ball_cameron_martin(&f, -1.0, 0.5, 1, &g, 1, SupMode::Grid).is_err());
    }
}
