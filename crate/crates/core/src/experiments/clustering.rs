use super::{fan_out, Diagnostics, ExperimentConfig, ExperimentId, ExperimentRecord, Observation};
use crate::geometry::{strassen_distance, BallSpec};
use crate::process::{empirical_process, local_empirical_process, quantile_process, Normalization};
use crate::{flil_norm, loglog, Error, Grid, Result, Trajectory, UniformSample};

fn clustering_rate(n: u64) -> f64 {
    loglog(n as f64).powf(2.0 / 3.0)
}

/// Distance of `g` to `ball`, checked against `‖g‖` since the ball contains 0.
fn distance_observation(
    g: &Trajectory,
    ball: BallSpec,
    tolerance: f64,
    scale: f64,
    a_n: Option<f64>,
) -> Result<Observation> {
    let d = strassen_distance(g, ball, tolerance)?;
    let sup = g.sup_abs();
    if !(d.epsilon >= 0.0 && d.epsilon <= sup) {
        return Err(Error::Internal(format!(
            "distance {} outside [0, ‖g‖ = {sup}]",
            d.epsilon
        )));
    }
    Ok(Observation {
        a_n,
        raw: d.epsilon,
        scaled: d.epsilon * scale,
        diagnostics: Diagnostics {
            energy: Some(d.certificate.energy()),
            iterations: Some(d.iterations),
            inner: None,
        },
    })
}

fn normalizer(n: u64) -> Result<f64> {
    let b = flil_norm(n as f64);
    if b > 0.0 {
        Ok(b)
    } else {
        Err(Error::invalid(format!("loglog({n}) = 0")))
    }
}

/// `d(α_n / b_n, ball)` for the nested sample of `seed`.
pub fn flil_observation(n: u64, seed: u64, ball: BallSpec, grid: &Grid, tolerance: f64) -> Result<Observation> {
    let sample = UniformSample::draw(n, seed)?;
    let g = empirical_process(&sample, grid)?.scaled(1.0 / normalizer(n)?);
    distance_observation(&g, ball, tolerance, clustering_rate(n), None)
}

/// `d(β_n / b_n, ball)` for the nested sample of `seed`.
pub fn quantile_observation(n: u64, seed: u64, ball: BallSpec, grid: &Grid, tolerance: f64) -> Result<Observation> {
    let sample = UniformSample::draw(n, seed)?;
    let g = quantile_process(&sample, grid)?.scaled(1.0 / normalizer(n)?);
    distance_observation(&g, ball, tolerance, clustering_rate(n), None)
}

/// Distance of `α_n(a_n ·) / √(2 a_n loglog n)` to `ball`.
pub fn local_observation(
    n: u64,
    seed: u64,
    a_n: f64,
    ball: BallSpec,
    grid: &Grid,
    tolerance: f64,
) -> Result<Observation> {
    let sample = UniformSample::draw_window(n, seed, a_n)?;
    let g = local_empirical_process(&sample, a_n, grid, Normalization::Flil)?;
    distance_observation(&g, ball, tolerance, clustering_rate(n), Some(a_n))
}

/// `n^{1/4} (log n)^{−1/2} (loglog n)^{−1/4} ‖α_n + β_n‖`, exact over the
/// jump points of both paths.
pub fn bahadur_kiefer_observation(n: u64, seed: u64, grid: &Grid) -> Result<Observation> {
    let sample = UniformSample::draw(n, seed)?;
    let sum = empirical_process(&sample, grid)?.add(&quantile_process(&sample, grid)?);
    let nf = n as f64;
    let ll = loglog(nf);
    if ll <= 0.0 {
        return Err(Error::invalid(format!("loglog({n}) = 0")));
    }
    let raw = sum.sup_abs();
    Ok(Observation {
        a_n: None,
        raw,
        scaled: raw * nf.powf(0.25) / (nf.ln().sqrt() * ll.powf(0.25)),
        diagnostics: Diagnostics::default(),
    })
}

pub fn run_flil_clustering(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect(config, ExperimentId::Flil)?;
    let (grid, ball, tol) = (config.grid()?, config.ball_or_default(), config.tolerance);
    fan_out(config, |n, seed, _| flil_observation(n, seed, ball, &grid, tol))
}

pub fn run_quantile_clustering(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect(config, ExperimentId::Quantile)?;
    let (grid, ball, tol) = (config.grid()?, config.ball_or_default(), config.tolerance);
    fan_out(config, |n, seed, _| quantile_observation(n, seed, ball, &grid, tol))
}

/// Refuses bandwidths violating the local clustering conditions.
pub fn run_local_clustering(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect(config, ExperimentId::Local)?;
    let (grid, ball, tol) = (config.grid()?, config.ball_or_default(), config.tolerance);
    let a = config.bandwidths(&config.indices()?)?;
    fan_out(config, |n, seed, j| local_observation(n, seed, a[j], ball, &grid, tol))
}

pub fn run_bahadur_kiefer(config: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    expect(config, ExperimentId::BahadurKiefer)?;
    let grid = config.grid()?;
    fan_out(config, |n, seed, _| bahadur_kiefer_observation(n, seed, &grid))
}

pub(crate) fn expect(config: &ExperimentConfig, id: ExperimentId) -> Result<()> {
    if config.experiment != id {
        return Err(Error::invalid(format!(
            "config is for the {} experiment, not {id}",
            config.experiment
        )));
    }
    config.validate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BallKind;
    use crate::process::{BandwidthSchedule, IndexSchedule};

    fn grid() -> Grid {
        Grid::new(64).unwrap()
    }

    #[test]
    fn flil_statistic_is_bounded_by_the_path_norm() {
        let ball = BallSpec::unit(BallKind::S2);
        for seed in 0..5 {
            let o = flil_observation(500, seed, ball, &grid(), 1e-9).unwrap();
            let s = UniformSample::draw(500, seed).unwrap();
            let sup = empirical_process(&s, &grid()).unwrap().sup_abs() / flil_norm(500.0);
            assert!(o.raw >= 0.0 && o.raw <= sup);
            assert!((o.scaled - o.raw * clustering_rate(500)).abs() < 1e-15);
            assert!(o.diagnostics.energy.unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn quantile_and_empirical_distances_differ_by_at_most_the_bk_norm() {
        let ball = BallSpec::unit(BallKind::S2);
        for seed in 0..5 {
            let n = 300;
            let a = flil_observation(n, seed, ball, &grid(), 1e-10).unwrap().raw;
            let b = quantile_observation(n, seed, ball, &grid(), 1e-10).unwrap().raw;
            let bk = bahadur_kiefer_observation(n, seed, &grid()).unwrap().raw / flil_norm(n as f64);
            assert!((a - b).abs() <= bk + 1e-9, "seed {seed}: {a} {b} {bk}");
        }
    }

    #[test]
    fn local_with_unit_bandwidth_reduces_to_the_flil_path() {
        for seed in 0..4 {
            let n = 400;
            let s2 = BallSpec::unit(BallKind::S2);
            let s1 = BallSpec::unit(BallKind::S1);
            let flil = flil_observation(n, seed, s2, &grid(), 1e-9).unwrap();
            let local = local_observation(n, seed, 1.0, s2, &grid(), 1e-9).unwrap();
            assert!((flil.raw - local.raw).abs() < 1e-8);
            let local_s1 = local_observation(n, seed, 1.0, s1, &grid(), 1e-9).unwrap();
            assert!(local_s1.raw <= flil.raw + 1e-9);
        }
    }

    #[test]
    fn runners_produce_one_record_per_pair() {
        let schedule = IndexSchedule::Explicit { values: vec![50, 200] };
        let mut c = ExperimentConfig::new(ExperimentId::BahadurKiefer, schedule.clone(), vec![4, 1, 9]);
        c.grid_m = 16;
        let rs = run_bahadur_kiefer(&c).unwrap();
        assert_eq!(rs.len(), 6);
        let keys: Vec<(u64, u64)> = rs.iter().map(|r| (r.seed, r.n)).collect();
        assert_eq!(keys, vec![(1, 50), (1, 200), (4, 50), (4, 200), (9, 50), (9, 200)]);
        assert!(rs.iter().all(|r| r.scaled >= 0.0 && r.running_extremum >= r.scaled));

        let mut c = ExperimentConfig::new(ExperimentId::Local, schedule, vec![1]);
        c.bandwidth = Some(BandwidthSchedule::Power { theta: 1.0 });
        assert!(matches!(run_local_clustering(&c), Err(Error::BandwidthCondition { .. })));
        assert!(run_flil_clustering(&c).is_err());
    }
}
