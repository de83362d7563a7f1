use flillab::process::{
    centered_poisson_path, empirical_process, gaussian_path, local_empirical_process, poissonized_empirical,
    quantile_process, GaussianKind, Normalization,
};
use flillab::{Grid, UniformSample};
use flillab_oracles::{bridge_small_ball, ks_one_sample, ks_two_sample, wiener_small_ball, KS_CRITICAL_1PCT};

#[test]
fn uniform_stream_passes_kolmogorov_smirnov() {
    let s = UniformSample::draw(20_000, 5).unwrap();
    let ks = ks_one_sample(s.values(), |x| x.clamp(0.0, 1.0));
    assert!(ks < KS_CRITICAL_1PCT, "KS statistic {ks}");
}

#[test]
fn samples_are_nested_in_n() {
    let small = UniformSample::draw(500, 9).unwrap();
    let large = UniformSample::draw(5_000, 9).unwrap();
    assert!(small.values().iter().all(|v| large.values().binary_search_by(|p| p.total_cmp(v)).is_ok()));
    let window = UniformSample::draw_window(5_000, 9, 0.1).unwrap();
    let expected: Vec<f64> = large.values().iter().copied().filter(|&u| u <= 0.1).collect();
    assert_eq!(window.values(), &expected[..]);
}

#[test]
fn empirical_process_matches_counts_at_every_knot() {
    let grid = Grid::new(64).unwrap();
    let s = UniformSample::draw(300, 2).unwrap();
    let g = empirical_process(&s, &grid).unwrap();
    let rn = 300f64.sqrt();
    for (t, v) in g.knots().iter().zip(g.values()) {
        let direct = rn * (s.count_le(*t) as f64 / 300.0 - t);
        assert!((v - direct).abs() < 1e-12);
    }
    assert!(g.values()[0].abs() < 1e-12 && g.values().last().unwrap().abs() < 1e-12);
}

#[test]
fn quantile_and_empirical_sups_are_close() {
    let grid = Grid::new(256).unwrap();
    let s = UniformSample::draw(50_000, 4).unwrap();
    let a = empirical_process(&s, &grid).unwrap().sup_abs();
    let b = quantile_process(&s, &grid).unwrap().sup_abs();
    assert!((a - b).abs() < 0.1, "{a} vs {b}");
}

fn sups(samples: impl Iterator<Item = UniformSample>, grid: &Grid) -> Vec<f64> {
    samples.map(|s| empirical_process(&s, grid).unwrap().sup_abs()).collect()
}

#[test]
fn spacings_sampler_has_the_law_of_sorted_uniforms() {
    let grid = Grid::new(32).unwrap();
    let a = sups((0..600).map(|r| UniformSample::draw_spacings(200, 1, r).unwrap()), &grid);
    let b = sups((0..600).map(|s| UniformSample::draw(200, 1000 + s).unwrap()), &grid);
    let ks = ks_two_sample(&a, &b);
    assert!(ks < KS_CRITICAL_1PCT, "two-sample KS {ks}");
}

#[test]
fn binomial_window_sampler_has_the_law_of_the_streamed_window() {
    let grid = Grid::new(32).unwrap();
    let (n, a) = (2_000, 0.05);
    let local = |s: UniformSample| local_empirical_process(&s, a, &grid, Normalization::Flil).unwrap().sup_abs();
    let x: Vec<f64> = (0..600)
        .map(|r| local(UniformSample::draw_window_binomial(n, 3, a, r).unwrap()))
        .collect();
    let y: Vec<f64> = (0..600)
        .map(|s| local(UniformSample::draw_window(n, 500 + s, a).unwrap()))
        .collect();
    let ks = ks_two_sample(&x, &y);
    assert!(ks < KS_CRITICAL_1PCT, "two-sample KS {ks}");
}

#[test]
fn wiener_and_bridge_sups_follow_their_series() {
    let grid = Grid::new(2048).unwrap();
    let w: Vec<f64> = (0..500).map(|s| gaussian_path(GaussianKind::Wiener, &grid, s).sup_abs()).collect();
    let b: Vec<f64> = (0..500)
        .map(|s| gaussian_path(GaussianKind::BrownianBridge, &grid, s).sup_abs())
        .collect();
    let kw = ks_one_sample(&w, wiener_small_ball);
    let kb = ks_one_sample(&b, bridge_small_ball);
    assert!(kw < KS_CRITICAL_1PCT && kb < KS_CRITICAL_1PCT, "KS {kw}, {kb}");
}

#[test]
fn poissonized_sizes_and_centred_poisson_paths() {
    let grid = Grid::new(16).unwrap();
    let n = 400;
    let etas: Vec<f64> = (0..400).map(|s| poissonized_empirical(n, s, &grid).unwrap().eta as f64).collect();
    let mean = etas.iter().sum::<f64>() / etas.len() as f64;
    assert!((mean - n as f64).abs() < 4.0 * (n as f64 / etas.len() as f64).sqrt(), "mean {mean}");

    let p = centered_poisson_path(50.0, &grid, 8).unwrap();
    assert_eq!(p.values()[0], 0.0);
    let end = *p.values().last().unwrap() + 50.0;
    assert!(end >= 0.0 && (end - end.round()).abs() < 1e-9);
}

#[test]
fn every_path_is_reproducible_from_its_seed() {
    let grid = Grid::new(64).unwrap();
    let a = poissonized_empirical(1_000, 12, &grid).unwrap();
    let b = poissonized_empirical(1_000, 12, &grid).unwrap();
    assert_eq!(a, b);
    assert_eq!(
        gaussian_path(GaussianKind::Wiener, &grid, 3),
        gaussian_path(GaussianKind::Wiener, &grid, 3)
    );
    assert_ne!(
        gaussian_path(GaussianKind::Wiener, &grid, 3),
        gaussian_path(GaussianKind::Wiener, &grid, 4)
    );
}
