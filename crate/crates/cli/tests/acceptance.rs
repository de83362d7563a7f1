//! Acceptance suite. Runs every criterion in sequence and prints one
//! PASS/FAIL line per criterion; exits non-zero if any criterion fails.
//!
//! `ACCEPTANCE_ONLY=3,5` restricts the run to the listed criteria.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use flillab::experiments::{
    run_chung, run_flil_clustering, run_local_clustering, run_poissonization_check, summarize,
    run_bahadur_kiefer, run_dkw_check, ExperimentConfig, ExperimentId, ExperimentRecord, TargetSpec,
};
use flillab::gaussian::{exact_centered_small_ball, small_ball_cameron_martin, small_ball_naive, SupMode};
use flillab::geometry::{strassen_distance, taut_string, BallKind, BallSpec, Tube};
use flillab::process::{BandwidthSchedule, IndexSchedule, Interp};
use flillab::{flil_norm, Error, Grid, SmoothPath, Trajectory};
use flillab_oracles::box_qp_min_energy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_tube(rng: &mut ChaCha8Rng, m: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let x: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for _ in 0..=m {
        let c: f64 = rng.random_range(-1.5..1.5);
        let w: f64 = rng.random_range(0.0..0.6);
        lo.push(c - w);
        hi.push(c + w);
    }
    lo[0] = lo[0].min(0.0);
    hi[0] = hi[0].max(0.0);
    (x, lo, hi)
}

fn random_step(rng: &mut ChaCha8Rng, jumps: usize) -> Trajectory {
    let mut knots: Vec<f64> = (0..jumps).map(|_| rng.random::<f64>()).collect();
    knots.push(0.0);
    knots.push(1.0);
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let k = knots.len();
    let (mut left, mut value, mut right) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..k {
        let l: f64 = rng.random_range(-1.5..1.5);
        let r: f64 = rng.random_range(-1.5..1.5);
        left.push(if i == 0 { r } else { l });
        value.push(if i == k - 1 { l } else { r });
        right.push(if i == k - 1 { l } else { r });
    }
    Trajectory::from_parts(Interp::CadlagStep, knots, left, value, right).unwrap()
}

fn taut_string_vs_qp() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let m = 32;
    let mut worst = 0.0f64;
    for case in 0..100 {
        let (x, mut lo, mut hi) = random_tube(&mut rng, m);
        let end = (case % 2 == 1).then(|| 0.5 * (lo[m] + hi[m]));
        let f = taut_string(&Tube::new(x.clone(), lo.clone(), hi.clone(), end).unwrap()).unwrap();
        lo[0] = 0.0;
        hi[0] = 0.0;
        if let Some(e) = end {
            lo[m] = e;
            hi[m] = e;
        }
        let (e_qp, _) = box_qp_min_energy(&x, &lo, &hi).unwrap();
        worst = worst.max((f.energy() - e_qp).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-6 && secs < 5.0,
        format!("max |energy − QP| = {worst:.2e} over 100 tubes in {secs:.2} s"),
    )
}

fn analytic_distances() -> Verdict {
    let grid = Grid::new(64).unwrap();
    let d = |g: &Trajectory, kind| strassen_distance(g, BallSpec::unit(kind), 1e-10).unwrap().epsilon;
    let two_t = d(&Trajectory::ramp(&grid, 2.0), BallKind::S1);
    let t = d(&Trajectory::ramp(&grid, 1.0), BallKind::S2);
    let z1 = d(&Trajectory::ramp(&grid, 0.0), BallKind::S1);
    let z2 = d(&Trajectory::ramp(&grid, 0.0), BallKind::S2);
    let pass = (two_t - 1.0).abs() <= 1e-6 && (t - 1.0).abs() <= 1e-6 && z1 == 0.0 && z2 == 0.0;
    verdict(
        pass,
        format!("d(2t, S1) = {two_t:.9}, d(t, S2) = {t:.9}, d(0, S1) = {z1}, d(0, S2) = {z2}"),
    )
}

fn distance_axioms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let tol = 1e-9;
    let mut violations = Vec::new();
    for case in 0..1000 {
        let jumps = 1 + case % 30;
        let g = random_step(&mut rng, jumps);
        let other = random_step(&mut rng, jumps);
        let h = g.combine(1.0, &other, rng.random_range(0.0..0.5));
        let dist = |p: &Trajectory, kind, c| strassen_distance(p, BallSpec::new(kind, c).unwrap(), tol).unwrap().epsilon;
        for kind in [BallKind::S1, BallKind::S2] {
            let (dg, dh) = (dist(&g, kind, 1.0), dist(&h, kind, 1.0));
            if (dg - dh).abs() > g.sup_distance(&h) + 2.0 * tol {
                violations.push(format!("case {case}: Lipschitz ({kind:?})"));
            }
            let radii: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&c| dist(&g, kind, c)).collect();
            if radii.windows(2).any(|w| w[1] > w[0] + tol) {
                violations.push(format!("case {case}: radius monotonicity ({kind:?})"));
            }
        }
        if dist(&g, BallKind::S1, 1.0) > dist(&g, BallKind::S2, 1.0) + tol {
            violations.push(format!("case {case}: S1 farther than S2"));
        }
    }
    verdict(
        violations.is_empty(),
        format!("{} violations on 1000 trajectories {:?}", violations.len(), violations.iter().take(3).collect::<Vec<_>>()),
    )
}

fn small_ball_oracle() -> Verdict {
    let start = Instant::now();
    let grid = Grid::default();
    let mut notes = Vec::new();
    let mut pass = true;
    for (i, eps) in [0.3, 0.5, 1.0].into_iter().enumerate() {
        let e = small_ball_naive(&SmoothPath::zero(), 1.0, eps, 1_000_000, &grid, 10 + i as u64, SupMode::Continuous)
            .unwrap();
        let p = exact_centered_small_ball(eps).unwrap();
        let binomial = (p * (1.0 - p) / e.reps as f64).sqrt();
        let ok = (e.p_hat - p).abs() <= 4.0 * binomial;
        pass &= ok;
        notes.push(format!("ε={eps}: {:.3e} vs {p:.3e}", e.p_hat));
    }
    for (i, f) in [SmoothPath::zero(), SmoothPath::identity()].iter().enumerate() {
        for t in [1.0, 3.0] {
            let eps = 0.5;
            let reps = 100_000;
            let seed = 40 + 2 * i as u64 + t as u64;
            let a = small_ball_naive(f, t, eps, reps, &grid, seed, SupMode::Continuous).unwrap();
            let b = small_ball_cameron_martin(f, t, eps, reps, &grid, seed + 100, SupMode::Continuous).unwrap();
            let joint = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
            let ok = (a.p_hat - b.p_hat).abs() <= 4.0 * joint && a.hits > 0 && b.hits > 0;
            pass &= ok;
            notes.push(format!("f{i} T={t}: naive {:.2e} / CM {:.2e}", a.p_hat, b.p_hat));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    verdict(pass, format!("{}; {secs:.1} s", notes.join(", ")))
}

fn dkw() -> Verdict {
    let mut pass = true;
    let mut notes = Vec::new();
    for (n, seed) in [(100, 1), (10_000, 2)] {
        let r = run_dkw_check(n, &[0.5, 1.0, 2.0], 100_000, seed).unwrap();
        pass &= r.pass;
        let rows: Vec<String> = r.rows.iter().map(|w| format!("λ={} p̂={:.4}≤{:.4}", w.lambda, w.p_hat, w.bound)).collect();
        notes.push(format!("n={n}: {}", rows.join(" ")));
    }
    verdict(pass, notes.join("; "))
}

fn seeds() -> Vec<u64> {
    (1..=20).collect()
}

fn decade_schedule() -> IndexSchedule {
    IndexSchedule::Explicit {
        values: vec![1_000, 10_000, 100_000, 1_000_000],
    }
}

fn trend(records: &[ExperimentRecord]) -> (bool, bool, String) {
    let rows = summarize(records);
    let raw: Vec<f64> = rows.iter().map(|r| r.median_raw).collect();
    let decreasing = raw.windows(2).all(|w| w[1] < w[0]);
    let scaled = |n| rows.iter().find(|r| r.n == n).unwrap().median_scaled;
    let bounded = scaled(1_000_000) <= 3.0 * scaled(10_000);
    let text = rows
        .iter()
        .map(|r| format!("n={}: {:.4}/{:.4}", r.n, r.median_raw, r.median_scaled))
        .collect::<Vec<_>>()
        .join(", ");
    (decreasing, bounded, text)
}

fn flil_trend() -> Verdict {
    let start = Instant::now();
    let c = ExperimentConfig::new(ExperimentId::Flil, decade_schedule(), seeds());
    let records = run_flil_clustering(&c).unwrap();
    let (dec, bounded, text) = trend(&records);
    let secs = start.elapsed().as_secs_f64();
    verdict(
        dec && bounded && secs <= 1800.0,
        format!("median raw/scaled {text}; decreasing={dec} bounded={bounded}; {secs:.0} s"),
    )
}

fn local_trend() -> Verdict {
    let start = Instant::now();
    let mut c = ExperimentConfig::new(ExperimentId::Local, decade_schedule(), seeds());
    c.bandwidth = Some(BandwidthSchedule::Power { theta: 0.5 });
    let records = run_local_clustering(&c).unwrap();
    let (dec, bounded, text) = trend(&records);
    let mut bad = c.clone();
    bad.bandwidth = Some(BandwidthSchedule::Power { theta: 1.0 });
    let refused = match run_local_clustering(&bad) {
        Err(Error::BandwidthCondition { conditions }) => {
            conditions.iter().any(|s| s == "n·a_n/(log₂n)^(7/3) → ∞")
        }
        _ => false,
    };
    let secs = start.elapsed().as_secs_f64();
    verdict(
        dec && bounded && refused,
        format!("median raw/scaled {text}; decreasing={dec} bounded={bounded} a_n=1/n refused={refused}; {secs:.0} s"),
    )
}

fn chung_interior() -> Verdict {
    let start = Instant::now();
    let values: Vec<u64> = (0..=8).map(|k| 10f64.powf(3.0 + 0.5 * k as f64).round() as u64).collect();
    let mut c = ExperimentConfig::new(ExperimentId::Chung, IndexSchedule::Explicit { values }, seeds());
    c.target = Some(TargetSpec::Zero);
    let out = run_chung(&c).unwrap();
    let est = out.liminf_estimate;
    let nonincreasing = c.seeds.iter().all(|&s| {
        let mut rs: Vec<&ExperimentRecord> = out.records.iter().filter(|r| r.seed == s).collect();
        rs.sort_by_key(|r| r.n);
        rs.windows(2).all(|w| w[1].running_extremum <= w[0].running_extremum)
    });
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (0.4..=1.6).contains(&est) && nonincreasing,
        format!("liminf estimate {est:.4} (π/4 ≈ 0.7854); prefix-min nonincreasing={nonincreasing}; {secs:.0} s"),
    )
}

fn bahadur_kiefer() -> Verdict {
    let start = Instant::now();
    let c = ExperimentConfig::new(ExperimentId::BahadurKiefer, decade_schedule(), seeds());
    let records = run_bahadur_kiefer(&c).unwrap();
    let med = summarize(&records).iter().find(|r| r.n == 1_000_000).unwrap().median_scaled;
    let nondecreasing = c.seeds.iter().all(|&s| {
        let rs: Vec<&ExperimentRecord> = records.iter().filter(|r| r.seed == s).collect();
        rs.windows(2).all(|w| w[1].running_extremum >= w[0].running_extremum)
    });
    let secs = start.elapsed().as_secs_f64();
    verdict(
        (0.2..=1.5).contains(&med) && nondecreasing,
        format!("median at n=10^6 {med:.4} (2^(-1/4) ≈ 0.8409); prefix-max nondecreasing={nondecreasing}; {secs:.0} s"),
    )
}

fn poissonization() -> Verdict {
    let (n, a) = (10_000u64, 0.01);
    // sup|W| over [0, 1] exceeds x with probability 0.1.
    let (mut lo, mut hi) = (0.5, 4.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - exact_centered_small_ball(mid).unwrap() > 0.1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi) / flil_norm(n as f64);
    let r = run_poissonization_check(n, a, lambda, 100_000, 17).unwrap();
    verdict(
        r.pass,
        format!(
            "λ={lambda:.4}: p_emp={:.4} p_pois={:.4} slack={:.4}; forward={} reverse={}",
            r.p_emp, r.p_pois, r.slack, r.forward_pass, r.reverse_pass
        ),
    )
}

fn run_cli(dir: &Path, config: &Path, id: &str, threads: usize, out: &str) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_flillab"))
        .args(["experiment", id, "--config"])
        .arg(config)
        .arg("--out")
        .arg(dir.join(out))
        .args(["--threads", &threads.to_string()])
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("{id} with {threads} threads exited with {status}"))
    }
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        (
            "flil",
            "experiment = \"flil\"\nseeds = [1, 2, 3, 4, 5, 6, 7, 8]\n\
             schedule = { kind = \"geometric\", start = 1000, ratio = 10.0, count = 3 }\n",
        ),
        (
            "chung",
            "experiment = \"chung\"\nseeds = [1, 2, 3, 4, 5, 6]\n\
             schedule = { kind = \"geometric\", start = 1000, ratio = 4.0, count = 5 }\n",
        ),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (id, text) in configs {
        let config = dir.path().join(format!("{id}.toml"));
        fs::write(&config, text).unwrap();
        let runs = [(1, "a"), (1, "b"), (3, "c"), (8, "d")];
        let mut csvs = Vec::new();
        for (threads, tag) in runs {
            let out = format!("{id}-{tag}");
            if let Err(e) = run_cli(dir.path(), &config, id, threads, &out) {
                return verdict(false, e);
            }
            csvs.push(fs::read(dir.path().join(&out).join("records.csv")).unwrap());
        }
        let same = csvs.windows(2).all(|w| w[0] == w[1]);
        pass &= same;
        notes.push(format!("{id}: {} runs (threads 1,1,3,8) identical={same}", runs.len()));
    }
    verdict(pass, notes.join("; "))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Verdict); 11] = [
        (1, "taut string matches dense QP", taut_string_vs_qp),
        (2, "analytic distances", analytic_distances),
        (3, "distance axioms", distance_axioms),
        (4, "small-ball oracle", small_ball_oracle),
        (5, "DKW inequality", dkw),
        (6, "FLIL clustering trend", flil_trend),
        (7, "local clustering trend", local_trend),
        (8, "Chung interior constant", chung_interior),
        (9, "Bahadur-Kiefer bracket", bahadur_kiefer),
        (10, "Poissonization sandwich", poissonization),
        (11, "determinism across thread counts", determinism),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (id, name, check) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let v = panic::catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|_| verdict(false, "panicked"));
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {status} {name}: {}", v.detail);
        if !v.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
