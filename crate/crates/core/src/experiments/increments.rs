use super::clustering::expect;
use super::{fan_out, Diagnostics, ExperimentConfig, ExperimentId, ExperimentRecord, Observation};
use crate::geometry::{membership, strassen_distance, BallSpec};
use crate::process::increment_process;
use crate::{Error, Grid, Result, Trajectory, UniformSample};

/// Cells of the piecewise-linear inner net.
pub const NET_CELLS: usize = 8;
const SLOPES: [f64; 3] = [-1.0, 0.0, 1.0];

/// `0, h·a, 2h·a, …` below `1 − a`, followed by `1 − a`.
pub fn t0_grid(a: f64, step: f64) -> Result<Vec<f64>> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("increment width {a} not in (0, 1)")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::invalid("t0 step must be positive"));
    }
    let end = 1.0 - a;
    let h = step * a;
    let mut out: Vec<f64> = (0..)
        .map(|k| k as f64 * h)
        .take_while(|&t| t < end)
        .collect();
    out.push(end);
    Ok(out)
}

/// Extremes of `g(x) − s·(x − j/8)` over each closed net cell `j` and slope
/// `s ∈ {−1, 0, 1}`, taken over left limits, values and right limits.
#[derive(Debug, Clone)]
struct CellExtremes {
    hi: [[f64; 3]; NET_CELLS],
    lo: [[f64; 3]; NET_CELLS],
}

impl CellExtremes {
    fn of(g: &Trajectory) -> Self {
        let mut e = CellExtremes {
            hi: [[f64::NEG_INFINITY; 3]; NET_CELLS],
            lo: [[f64::INFINITY; 3]; NET_CELLS],
        };
        let cells = NET_CELLS as f64;
        for (k, &x) in g.knots().iter().enumerate() {
            let pos = x * cells;
            let j = (pos.floor() as usize).min(NET_CELLS - 1);
            let first = if pos > 0.0 && pos.fract() == 0.0 { pos as usize - 1 } else { j };
            for c in first..=j {
                let start = c as f64 / cells;
                for (si, &s) in SLOPES.iter().enumerate() {
                    for v in [g.left()[k], g.values()[k], g.right()[k]] {
                        let w = v - s * (x - start);
                        e.hi[c][si] = e.hi[c][si].max(w);
                        e.lo[c][si] = e.lo[c][si].min(w);
                    }
                }
            }
        }
        e
    }
}

/// `max_f min_t ‖g_t − f‖` over the net of piecewise-linear `f` with slopes
/// in `{−1, 0, 1}` on eight equal cells (energy at most 1).
///
/// Every path must have knots at the cell boundaries `j/8`.
pub fn inner_coverage(paths: &[Trajectory]) -> Result<f64> {
    if paths.is_empty() {
        return Err(Error::invalid("inner coverage needs at least one path"));
    }
    for g in paths {
        for j in 0..=NET_CELLS {
            let x = j as f64 / NET_CELLS as f64;
            if g.knots().binary_search_by(|k| k.total_cmp(&x)).is_err() {
                return Err(Error::invalid(format!("path has no knot at {x}")));
            }
        }
    }
    let ext: Vec<CellExtremes> = paths.iter().map(CellExtremes::of).collect();
    let mut best = 0.0f64;
    let mut slopes = [0usize; NET_CELLS];
    loop {
        let mut closest = f64::INFINITY;
        for e in &ext {
            let mut level = 0.0;
            let mut d = 0.0f64;
            for (j, &si) in slopes.iter().enumerate() {
                let f0 = level / NET_CELLS as f64;
                d = d.max(e.hi[j][si] - f0).max(f0 - e.lo[j][si]);
                level += SLOPES[si];
            }
            closest = closest.min(d);
        }
        best = best.max(closest);
        // Next slope vector in base 3.
        let mut i = 0;
        while i < NET_CELLS && slopes[i] == 2 {
            slopes[i] = 0;
            i += 1;
        }
        if i == NET_CELLS {
            break;
        }
        slopes[i] += 1;
    }
    Ok(best)
}

/// Outer and inner coverage statistics of the normalised increments
/// `Θ_n` of the nested sample of `seed`.
pub fn increments_observation(
    n: u64,
    seed: u64,
    a_n: f64,
    t0_step: f64,
    ball: BallSpec,
    grid: &Grid,
    tolerance: f64,
) -> Result<Observation> {
    let sample = UniformSample::draw(n, seed)?;
    let paths: Vec<Trajectory> = t0_grid(a_n, t0_step)?
        .into_iter()
        .map(|t0| increment_process(&sample, t0, a_n, grid))
        .collect::<Result<_>>()?;
    let mut outer = 0.0f64;
    let mut energy = None;
    let mut iterations = 0;
    for g in &paths {
        if g.sup_abs() <= outer || (outer > 0.0 && membership(g, ball, outer)?.member) {
            continue;
        }
        let d = strassen_distance(g, ball, tolerance)?;
        iterations += d.iterations;
        if d.epsilon > outer {
            outer = d.epsilon;
            energy = Some(d.certificate.energy());
        }
    }
    let inner = inner_coverage(&paths)?;
    Ok(Observation {
        a_n: Some(a_n),
        raw: outer,
        scaled: outer * (1.0 / a_n).ln().powf(2.0 / 3.0),
        diagnostics: Diagnostics {
            energy,
            iterations: Some(iterations),
            inner: Some(inner),
        },
    })
}

pub fn run_increments_law(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect(config, ExperimentId::Increments)?;
    let (grid, ball, tol) = (config.grid()?, config.ball_or_default(), config.tolerance);
    let step = config
        .t0_step
        .ok_or_else(|| Error::invalid("the increments experiment needs t0-step"))?;
    let a = config.bandwidths(&config.indices()?)?;
    fan_out(config, |n, seed, j| {
        increments_observation(n, seed, a[j], step, ball, &grid, tol)
    })
}
