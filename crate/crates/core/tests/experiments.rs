use flillab::experiments::{
    check_running_extrema, poisson_chernoff_tail, run, ExperimentConfig, ExperimentId, Outcome, TargetSpec,
};
use flillab::process::IndexSchedule;
use flillab_oracles::poisson_upper_tail;

fn small(id: ExperimentId, values: Vec<u64>) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(id, IndexSchedule::Explicit { values }, vec![1, 2, 3]);
    c.grid_m = 64;
    c
}

#[test]
fn chernoff_bound_dominates_the_poisson_tail() {
    for (mean, u) in [(100.0, 0.2), (10.0, 1.0), (1_000.0, 0.05), (50.0, 0.5)] {
        let k = (mean * (1.0 + u) as f64).ceil() as u64;
        let bound = poisson_chernoff_tail(mean, u).unwrap();
        let exact = poisson_upper_tail(mean, k);
        assert!(bound >= exact, "mean {mean}, u {u}: {bound} < {exact}");
    }
    assert!(poisson_chernoff_tail(0.0, 1.0).is_err());
}

#[test]
fn record_experiments_produce_consistent_records() {
    for id in [ExperimentId::Flil, ExperimentId::Quantile, ExperimentId::Local, ExperimentId::BahadurKiefer] {
        let c = small(id, vec![200, 800, 3_200]);
        let out = run(&c).unwrap();
        let records = out.records();
        assert_eq!(records.len(), 9, "{id}");
        check_running_extrema(records).unwrap();
        assert!(records.iter().all(|r| r.raw.is_finite() && r.raw >= 0.0));
        assert!(out.passed());
    }
}

#[test]
fn chung_reports_an_interior_constant() {
    let mut c = small(ExperimentId::Chung, vec![1_000, 4_000, 16_000]);
    c.target = Some(TargetSpec::Line { slope: 0.5 });
    let Outcome::Records {
        records,
        liminf_estimate,
        theoretical,
    } = run(&c).unwrap()
    else {
        panic!("chung yields records");
    };
    check_running_extrema(&records).unwrap();
    assert!(liminf_estimate.unwrap() > 0.0);
    assert!(theoretical.unwrap() > 0.0);
}

#[test]
fn runs_repeat_exactly() {
    let c = small(ExperimentId::Flil, vec![500, 5_000]);
    let a = run(&c).unwrap();
    let b = run(&c).unwrap();
    assert_eq!(a.records(), b.records());
}

#[test]
fn invalid_configs_are_refused_before_running() {
    let mut c = small(ExperimentId::Flil, vec![500, 5_000]);
    c.seeds = vec![1, 1];
    assert!(run(&c).is_err());
    let mut c = small(ExperimentId::Increments, vec![500, 5_000]);
    c.t0_step = None;
    assert!(run(&c).is_err());
}
