use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::clustering::expect;
use super::config::check_reps;
use super::{ExperimentConfig, ExperimentId};
use crate::process::{counting_sup_abs, poisson_count};
use crate::rng::{self, tag};
use crate::{flil_norm, loglog, Error, Result, UniformSample};

const CHUNK: u64 = 1_000;

/// Counts replications `r < reps` whose statistic satisfies `hit`, in
/// fixed chunks so the total does not depend on scheduling.
fn count_hits<S, H>(reps: u64, stat: S, hits: H, width: usize) -> Result<Vec<u64>>
where
    S: Fn(u64) -> Result<f64> + Sync,
    H: Fn(f64, usize) -> bool + Sync,
{
    let chunks: Vec<u64> = (0..reps.div_ceil(CHUNK)).collect();
    let partial: Vec<Vec<u64>> = chunks
        .par_iter()
        .map(|&c| {
            let mut counts = vec![0u64; width];
            for r in c * CHUNK..((c + 1) * CHUNK).min(reps) {
                let s = stat(r)?;
                for (i, k) in counts.iter_mut().enumerate() {
                    if hits(s, i) {
                        *k += 1;
                    }
                }
            }
            Ok(counts)
        })
        .collect::<Result<_>>()?;
    Ok(partial.into_iter().fold(vec![0u64; width], |mut acc, p| {
        for (a, b) in acc.iter_mut().zip(p) {
            *a += b;
        }
        acc
    }))
}

fn binomial_se(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkwRow {
    pub lambda: f64,
    /// `2 exp(−2λ²)`.
    pub bound: f64,
    pub p_hat: f64,
    pub std_err: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DkwReport {
    pub n: u64,
    pub seed: u64,
    pub reps: u64,
    pub rows: Vec<DkwRow>,
    pub pass: bool,
}

/// Monte Carlo estimate of `P(‖α_n‖ ≥ λ)` against `2 exp(−2λ²)`; a row
/// passes when `p̂ ≤ bound + 4·se`.
pub fn run_dkw_check(n: u64, lambdas: &[f64], reps: u64, seed: u64) -> Result<DkwReport> {
    check_reps(reps)?;
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    if lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
        return Err(Error::invalid("DKW thresholds must be nonnegative"));
    }
    let sq = (n as f64).sqrt();
    let counts = count_hits(
        reps,
        |r| {
            let s = UniformSample::draw_spacings(n, seed, r)?;
            Ok(counting_sup_abs(s.values(), sq, n as f64, 1.0))
        },
        |s, i| s >= lambdas[i],
        lambdas.len(),
    )?;
    let rows: Vec<DkwRow> = lambdas
        .iter()
        .zip(counts)
        .map(|(&lambda, k)| {
            let p_hat = k as f64 / reps as f64;
            let std_err = binomial_se(p_hat, reps);
            let bound = 2.0 * (-2.0 * lambda * lambda).exp();
            DkwRow {
                lambda,
                bound,
                p_hat,
                std_err,
                pass: p_hat <= bound + 4.0 * std_err,
            }
        })
        .collect();
    Ok(DkwReport {
        n,
        seed,
        reps,
        pass: rows.iter().all(|r| r.pass),
        rows,
    })
}

/// `exp(−mean·((1+u) log(1+u) − u))`, the Chernoff bound on
/// `P(X ≥ (1+u)·mean)` for `X ~ Poisson(mean)`.
pub fn poisson_chernoff_tail(mean: f64, u: f64) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) || !(u > 0.0 && u.is_finite()) {
        return Err(Error::invalid(format!(
            "Chernoff tail needs mean > 0 and u > 0, got {mean} and {u}"
        )));
    }
    Ok((-mean * ((1.0 + u) * u.ln_1p() - u)).exp())
}

/// `2·poisson_chernoff_tail(n·a, u)` at `u = (4 loglog n/(n·a))^{1/2}`.
pub fn chernoff_slack(n: u64, a: f64) -> Result<f64> {
    let mean = n as f64 * a;
    let u = (4.0 * loglog(n as f64) / mean).sqrt();
    Ok(2.0 * poisson_chernoff_tail(mean, u)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonizationReport {
    pub n: u64,
    pub window: f64,
    pub lambda: f64,
    pub seed: u64,
    pub reps: u64,
    /// `λ·√a·b_n`.
    pub threshold: f64,
    pub p_emp: f64,
    pub se_emp: f64,
    pub p_pois: f64,
    pub se_pois: f64,
    pub slack: f64,
    /// `p_emp ≤ 2 p_pois + 4·se(p_emp − 2 p_pois)`.
    pub forward_pass: bool,
    /// `p_pois ≤ 2 p_emp + slack + 4·se(p_pois − 2 p_emp)`.
    pub reverse_pass: bool,
    pub pass: bool,
}

/// Compares `P(sup_s |α_n(a s)| > λ√a b_n)` with the same probability for
/// the Poissonized process `Π̃_n(a ·)` in both directions.
pub fn run_poissonization_check(n: u64, a: f64, lambda: f64, reps: u64, seed: u64) -> Result<PoissonizationReport> {
    check_reps(reps)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("window {a} not in (0, 1)")));
    }
    if !(lambda > 0.0) {
        return Err(Error::invalid("lambda must be positive"));
    }
    let nf = n as f64;
    let b = flil_norm(nf);
    if b <= 0.0 {
        return Err(Error::invalid(format!("loglog({n}) = 0")));
    }
    let threshold = lambda * a.sqrt() * b;
    let sq = nf.sqrt();
    let local_sup = |values: &[f64]| {
        let positions: Vec<f64> = values.iter().map(|&u| (u / a).min(1.0)).collect();
        counting_sup_abs(&positions, sq, nf, a)
    };
    let emp = count_hits(
        reps,
        |r| Ok(local_sup(UniformSample::draw_window_binomial(n, seed, a, r)?.values())),
        |s, _| s > threshold,
        1,
    )?[0];
    let pois = count_hits(
        reps,
        |r| {
            let mut rng = rng::stream(tag::POIS_CHECK_POIS, seed, r);
            let k = poisson_count(nf * a, &mut rng)?;
            let mut u: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            u.sort_unstable_by(f64::total_cmp);
            Ok(counting_sup_abs(&u, sq, nf, a))
        },
        |s, _| s > threshold,
        1,
    )?[0];
    let p_emp = emp as f64 / reps as f64;
    let p_pois = pois as f64 / reps as f64;
    let se_emp = binomial_se(p_emp, reps);
    let se_pois = binomial_se(p_pois, reps);
    let slack = chernoff_slack(n, a)?;
    let forward_se = (se_emp * se_emp + 4.0 * se_pois * se_pois).sqrt();
    let reverse_se = (se_pois * se_pois + 4.0 * se_emp * se_emp).sqrt();
    let forward_pass = p_emp <= 2.0 * p_pois + 4.0 * forward_se;
    let reverse_pass = p_pois <= 2.0 * p_emp + slack + 4.0 * reverse_se;
    Ok(PoissonizationReport {
        n,
        window: a,
        lambda,
        seed,
        reps,
        threshold,
        p_emp,
        se_emp,
        p_pois,
        se_pois,
        slack,
        forward_pass,
        reverse_pass,
        pass: forward_pass && reverse_pass,
    })
}

/// One DKW report per `(n, seed)`.
pub fn run_dkw_config(config: &ExperimentConfig) -> Result<Vec<DkwReport>> {
    expect(config, ExperimentId::Dkw)?;
    let lambdas = config.lambdas.clone().unwrap_or_default();
    let reps = config.reps_or_default();
    let mut out = Vec::new();
    for &seed in &config.seeds {
        for n in config.indices()? {
            out.push(run_dkw_check(n, &lambdas, reps, seed)?);
        }
    }
    Ok(out)
}

/// One Poissonization report per `(n, seed)`.
pub fn run_poissonization_config(config: &ExperimentConfig) -> Result<Vec<PoissonizationReport>> {
    expect(config, ExperimentId::Poissonization)?;
    let (a, lambda) = (config.window.unwrap_or(f64::NAN), config.lambda.unwrap_or(f64::NAN));
    let reps = config.reps_or_default();
    let mut out = Vec::new();
    for &seed in &config.seeds {
        for n in config.indices()? {
            out.push(run_poissonization_check(n, a, lambda, reps, seed)?);
        }
    }
    Ok(out)
}
