use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Grid, Interp, Trajectory, UniformSample};
use crate::rng::{self, tag};
use crate::{loglog, Error, Result};

/// Shape `x ↦ scale·(#{p ≤ x}/denom − rate·x)` shared by every counting path.
#[derive(Debug, Clone, Copy)]
struct CountingForm {
    scale: f64,
    denom: f64,
    rate: f64,
}

impl CountingForm {
    fn at(&self, count: usize, x: f64) -> f64 {
        self.scale * (count as f64 / self.denom - self.rate * x)
    }
}

/// Counting path `x ↦ scale·(#{p ≤ x}/denom − rate·x)` with jumps at the
/// sorted `positions ⊂ [0, 1]`, merged with the points of `grid`.
pub fn counting_path(
    positions: &[f64],
    scale: f64,
    denom: f64,
    rate: f64,
    grid: &Grid,
) -> Result<Trajectory> {
    if positions.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::invalid("jump positions must lie in [0, 1]"));
    }
    if positions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::invalid("jump positions must be sorted"));
    }
    Ok(build_counting(
        positions,
        CountingForm { scale, denom, rate },
        grid,
    ))
}

fn build_counting(positions: &[f64], form: CountingForm, grid: &Grid) -> Trajectory {
    let cap = positions.len() + grid.cells() + 1;
    let (mut knots, mut left, mut value) = (
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
        Vec::with_capacity(cap),
    );
    let m = grid.cells();
    let (mut i, mut j) = (0usize, 0usize);
    while i <= m {
        let g = grid.point(i);
        let x = match positions.get(j) {
            Some(&p) if p < g => p,
            _ => g,
        };
        let below = j;
        while j < positions.len() && positions[j] == x {
            j += 1;
        }
        if g == x {
            i += 1;
        }
        let v = form.at(j, x);
        knots.push(x);
        value.push(v);
        left.push(if x == 0.0 { v } else { form.at(below, x) });
    }
    let right = value.clone();
    Trajectory::from_parts_unchecked(Interp::CadlagStep, knots, left, value, right)
}

/// Exact `sup_{[0,1]} |x ↦ scale·(#{p ≤ x}/denom − rate·x)|` without building
/// the trajectory.
pub fn counting_sup_abs(positions: &[f64], scale: f64, denom: f64, rate: f64) -> f64 {
    let form = CountingForm { scale, denom, rate };
    let mut sup = form.at(0, 0.0).abs().max(form.at(positions.len(), 1.0).abs());
    let mut j = 0;
    while j < positions.len() {
        let x = positions[j];
        let below = j;
        while j < positions.len() && positions[j] == x {
            j += 1;
        }
        sup = sup.max(form.at(j, x).abs());
        if x > 0.0 {
            sup = sup.max(form.at(below, x).abs());
        }
    }
    sup
}

/// Uniform empirical process `α_n(t) = √n (F_n(t) − t)`.
pub fn empirical_process(sample: &UniformSample, grid: &Grid) -> Result<Trajectory> {
    if !sample.is_full() {
        return Err(Error::invalid("empirical process needs a full sample"));
    }
    let n = sample.n() as f64;
    Ok(build_counting(
        sample.values(),
        CountingForm {
            scale: n.sqrt(),
            denom: n,
            rate: 1.0,
        },
        grid,
    ))
}

/// Uniform quantile process `β_n(t) = √n (F_n⁻¹(t) − t)` with
/// `F_n⁻¹(t) = U_(⌈nt⌉)` for `t > 0` and `F_n⁻¹(0) = 0`.
///
/// The path is left-continuous with jumps at `k/n`; the stored right limits
/// carry the next order statistic.
pub fn quantile_process(sample: &UniformSample, grid: &Grid) -> Result<Trajectory> {
    if !sample.is_full() {
        return Err(Error::invalid("quantile process needs a full sample"));
    }
    let n = sample.n();
    let u = sample.values();
    let m = grid.cells() as u64;
    let sq = (n as f64).sqrt();
    let order = |k: u64| if k == 0 { 0.0 } else { u[(k - 1) as usize] };
    let cap = (n + m + 1) as usize;
    let mut knots = Vec::with_capacity(cap);
    let mut left = Vec::with_capacity(cap);
    let mut value = Vec::with_capacity(cap);
    let mut right = Vec::with_capacity(cap);
    // Walk k/n (k = 0..=n) and i/m (i = 0..=m) in order, comparing exactly.
    let (mut k, mut i) = (0u64, 0u64);
    while k <= n || i <= m {
        let (kn, im) = (u128::from(k) * u128::from(m), u128::from(i) * u128::from(n));
        let take_k = k <= n && (i > m || kn <= im);
        let take_i = i <= m && (k > n || im <= kn);
        if take_k {
            let x = k as f64 / n as f64;
            let here = sq * (order(k) - x);
            let next = if k < n { sq * (order(k + 1) - x) } else { here };
            knots.push(x);
            left.push(here);
            value.push(here);
            right.push(next);
            k += 1;
        } else {
            let x = i as f64 / m as f64;
            // ⌈n i / m⌉ in integer arithmetic.
            let idx = (u128::from(n) * u128::from(i)).div_ceil(u128::from(m)) as u64;
            let v = sq * (order(idx) - x);
            knots.push(x);
            left.push(v);
            value.push(v);
            right.push(v);
        }
        if take_i {
            i += 1;
        }
    }
    Ok(Trajectory::from_parts_unchecked(
        Interp::CadlagStep,
        knots,
        left,
        value,
        right,
    ))
}

/// Normalisation of local processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Divide by `√(2 a_n loglog n)`.
    Flil,
    /// No normalisation: `s ↦ α_n(a_n s)`.
    Raw,
}

/// Local empirical process `s ↦ α_n(a_n s)`, optionally divided by
/// `√(2 a_n loglog n)`.
pub fn local_empirical_process(
    sample: &UniformSample,
    a_n: f64,
    grid: &Grid,
    normalization: Normalization,
) -> Result<Trajectory> {
    if !(a_n > 0.0 && a_n <= 1.0) {
        return Err(Error::invalid(format!("bandwidth {a_n} not in (0, 1]")));
    }
    if a_n > sample.window() {
        return Err(Error::invalid(format!(
            "bandwidth {a_n} exceeds the sample window {}",
            sample.window()
        )));
    }
    let n = sample.n() as f64;
    if n * a_n < 1.0 {
        log::warn!("n·a_n = {} < 1: the local process has few jumps", n * a_n);
    }
    let norm = match normalization {
        Normalization::Raw => 1.0,
        Normalization::Flil => {
            let ll = loglog(n);
            if ll <= 0.0 {
                return Err(Error::invalid(format!(
                    "loglog({n}) = 0: the FLIL normalisation is undefined"
                )));
            }
            (2.0 * a_n * ll).sqrt()
        }
    };
    let u = sample.values();
    let inside = &u[..u.partition_point(|&x| x <= a_n)];
    let positions: Vec<f64> = inside.iter().map(|&x| (x / a_n).min(1.0)).collect();
    let sq = n.sqrt();
    Ok(build_counting(
        &positions,
        CountingForm {
            scale: sq / norm,
            denom: n,
            rate: a_n,
        },
        grid,
    ))
}

/// Normalised increment `s ↦ (α_n(t0 + a s) − α_n(t0)) / √(2 a log(1/a))`.
pub fn increment_process(
    sample: &UniformSample,
    t0: f64,
    a_n: f64,
    grid: &Grid,
) -> Result<Trajectory> {
    if !(a_n > 0.0 && a_n < 1.0) {
        return Err(Error::invalid(format!("increment width {a_n} not in (0, 1)")));
    }
    if !(t0 >= 0.0) || t0 + a_n > 1.0 + 1e-12 {
        return Err(Error::invalid(format!(
            "increment window [{t0}, {t0} + {a_n}] leaves [0, 1]"
        )));
    }
    if t0 + a_n > sample.window() + 1e-12 {
        return Err(Error::invalid("increment window exceeds the sample window"));
    }
    let n = sample.n() as f64;
    let norm = (2.0 * a_n * (1.0 / a_n).ln()).sqrt();
    let u = sample.values();
    let lo = u.partition_point(|&x| x <= t0);
    let hi = u.partition_point(|&x| x <= t0 + a_n);
    let positions: Vec<f64> = u[lo..hi]
        .iter()
        .map(|&x| ((x - t0) / a_n).clamp(0.0, 1.0))
        .collect();
    Ok(build_counting(
        &positions,
        CountingForm {
            scale: n.sqrt() / norm,
            denom: n,
            rate: a_n,
        },
        grid,
    ))
}

/// Poissonized empirical path together with its Poisson sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonizedPath {
    pub path: Trajectory,
    pub eta: u64,
}

/// `t ↦ n^{-1/2}(Σ_{i ≤ η} 1{U_i ≤ t} − n t)` with `η ~ Poisson(n)`.
pub fn poissonized_empirical(n: u64, seed: u64, grid: &Grid) -> Result<PoissonizedPath> {
    if n == 0 {
        return Err(Error::invalid("Poisson mean must be positive"));
    }
    let mut rng = rng::stream(tag::POISSONIZED, seed, n);
    let eta = poisson_count(n as f64, &mut rng)?;
    let mut u: Vec<f64> = (0..eta).map(|_| rng.random::<f64>()).collect();
    u.sort_unstable_by(f64::total_cmp);
    let nf = n as f64;
    let path = build_counting(
        &u,
        CountingForm {
            scale: nf.sqrt(),
            denom: nf,
            rate: 1.0,
        },
        grid,
    );
    Ok(PoissonizedPath { path, eta })
}

/// `s ↦ Π(T s) − T s` for a unit-rate Poisson counting process `Π`.
pub fn centered_poisson_path(t_scale: f64, grid: &Grid, seed: u64) -> Result<Trajectory> {
    if !(t_scale > 0.0 && t_scale.is_finite()) {
        return Err(Error::invalid(format!("time scale {t_scale} must be positive")));
    }
    let mut rng = rng::stream(tag::POISSON_PATH, seed, 0);
    let count = poisson_count(t_scale, &mut rng)?;
    let mut arrivals: Vec<f64> = (0..count).map(|_| rng.random::<f64>()).collect();
    arrivals.sort_unstable_by(f64::total_cmp);
    Ok(build_counting(
        &arrivals,
        CountingForm {
            scale: 1.0,
            denom: 1.0,
            rate: t_scale,
        },
        grid,
    ))
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    let dist = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(dist.sample(rng) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianKind {
    Wiener,
    BrownianBridge,
}

/// Wiener path from cumulative `N(0, Δ)` increments, or the bridge
/// `B(t) = W(t) − t W(1)` built from the same seed's Wiener path.
pub fn gaussian_path(kind: GaussianKind, grid: &Grid, seed: u64) -> Trajectory {
    gaussian_path_with(kind, grid, &mut rng::stream(tag::GAUSSIAN, seed, 0))
}

/// As [`gaussian_path`], drawing from a caller-supplied stream.
pub fn gaussian_path_with<R: Rng + ?Sized>(kind: GaussianKind, grid: &Grid, rng: &mut R) -> Trajectory {
    let sd = grid.delta().sqrt();
    let mut w = Vec::with_capacity(grid.cells() + 1);
    let mut acc = 0.0;
    w.push(0.0);
    for _ in 0..grid.cells() {
        let z: f64 = StandardNormal.sample(rng);
        acc += sd * z;
        w.push(acc);
    }
    if kind == GaussianKind::BrownianBridge {
        let end = acc;
        for (v, t) in w.iter_mut().zip(grid.points()) {
            *v -= t * end;
        }
    }
    Trajectory::from_grid_values(grid, w).expect("grid-sized values")
}
