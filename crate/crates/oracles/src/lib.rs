//! Reference computations for the test suites.
//!
//! Everything here is written against raw arrays and textbook formulas so
//! that it shares no code with the library under test.

use statrs::distribution::{ContinuousCDF, DiscreteCDF, Normal, Poisson};

/// Minimal `Σ (v[i+1] − v[i])² / (x[i+1] − x[i])` subject to
/// `lo[i] ≤ v[i] ≤ hi[i]`, solved by a dense primal active-set method.
/// Pinned values are expressed as `lo[i] == hi[i]`; `v[0]` must be pinned.
/// Returns `None` if the box is empty, else `(energy, v)`.
pub fn box_qp_min_energy(x: &[f64], lo: &[f64], hi: &[f64]) -> Option<(f64, Vec<f64>)> {
    let n = x.len();
    assert!(n >= 2 && lo.len() == n && hi.len() == n);
    assert_eq!(lo[0], hi[0], "the first value must be pinned");
    if (0..n).any(|i| lo[i] > hi[i]) {
        return None;
    }
    // Laplacian of the path graph with weights 1/Δx.
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n - 1 {
        let w = 1.0 / (x[i + 1] - x[i]);
        a[i][i] += w;
        a[i + 1][i + 1] += w;
        a[i][i + 1] -= w;
        a[i + 1][i] -= w;
    }
    let scale = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    // bound[i]: None = free, Some(false) = at lower, Some(true) = at upper.
    let mut v: Vec<f64> = (0..n).map(|i| 0.0f64.clamp(lo[i], hi[i])).collect();
    let mut bound: Vec<Option<bool>> = (0..n)
        .map(|i| {
            if v[i] == lo[i] {
                Some(false)
            } else if v[i] == hi[i] {
                Some(true)
            } else {
                None
            }
        })
        .collect();
    for _ in 0..50 * n + 100 {
        let free: Vec<usize> = (0..n).filter(|&i| bound[i].is_none()).collect();
        let target = if free.is_empty() {
            Vec::new()
        } else {
            // A_FF y = −A_FW v_W.
            let m = free.len();
            let mut k = vec![vec![0.0; m]; m];
            let mut rhs = vec![0.0; m];
            for (r, &i) in free.iter().enumerate() {
                for (c, &j) in free.iter().enumerate() {
                    k[r][c] = a[i][j];
                }
                rhs[r] = -(0..n)
                    .filter(|&j| bound[j].is_some())
                    .map(|j| a[i][j] * v[j])
                    .sum::<f64>();
            }
            cholesky_solve(&mut k, &rhs)
        };
        // Largest feasible step towards the subspace minimiser.
        let mut alpha = 1.0f64;
        let mut blocking = None;
        for (r, &i) in free.iter().enumerate() {
            let d = target[r] - v[i];
            if d < 0.0 && target[r] < lo[i] {
                let s = (lo[i] - v[i]) / d;
                if s < alpha {
                    alpha = s;
                    blocking = Some((i, false));
                }
            } else if d > 0.0 && target[r] > hi[i] {
                let s = (hi[i] - v[i]) / d;
                if s < alpha {
                    alpha = s;
                    blocking = Some((i, true));
                }
            }
        }
        for (r, &i) in free.iter().enumerate() {
            v[i] = (v[i] + alpha * (target[r] - v[i])).clamp(lo[i], hi[i]);
        }
        if let Some((i, up)) = blocking {
            v[i] = if up { hi[i] } else { lo[i] };
            bound[i] = Some(up);
            continue;
        }
        // Stationary on the face: release the worst multiplier, if any.
        let vmax = v.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let tol = 1e-11 * scale * vmax;
        let mut worst = (tol, None);
        for i in 0..n {
            if lo[i] == hi[i] {
                continue;
            }
            let g: f64 = (0..n).map(|j| a[i][j] * v[j]).sum();
            let violation = match bound[i] {
                Some(false) => -g,
                Some(true) => g,
                None => 0.0,
            };
            if violation > worst.0 {
                worst = (violation, Some(i));
            }
        }
        match worst.1 {
            Some(i) => bound[i] = None,
            None => {
                let e = (0..n - 1)
                    .map(|i| (v[i + 1] - v[i]).powi(2) / (x[i + 1] - x[i]))
                    .sum();
                return Some((e, v));
            }
        }
    }
    panic!("active-set iteration did not converge");
}

fn cholesky_solve(k: &mut [Vec<f64>], b: &[f64]) -> Vec<f64> {
    let m = b.len();
    for j in 0..m {
        let mut d = k[j][j];
        for p in 0..j {
            d -= k[j][p] * k[j][p];
        }
        assert!(d > 0.0, "matrix not positive definite");
        let d = d.sqrt();
        k[j][j] = d;
        for i in j + 1..m {
            let mut s = k[i][j];
            for p in 0..j {
                s -= k[i][p] * k[j][p];
            }
            k[i][j] = s / d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..m {
        for p in 0..i {
            y[i] -= k[i][p] * y[p];
        }
        y[i] /= k[i][i];
    }
    for i in (0..m).rev() {
        for p in i + 1..m {
            y[i] -= k[p][i] * y[p];
        }
        y[i] /= k[i][i];
    }
    y
}

/// Box for `|g − f| ≤ ε` at each knot, where `g` has one-sided limits
/// `left`, `value`, `right` there. `f(0) = 0` and, when `pin_end`, `f(1) = 0`.
fn knot_box(
    left: &[f64],
    value: &[f64],
    right: &[f64],
    eps: f64,
    pin_end: bool,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = value.len();
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let top = left[i].max(value[i]).max(right[i]);
        let bot = left[i].min(value[i]).min(right[i]);
        lo.push(top - eps);
        hi.push(bot + eps);
    }
    let pinned: &[usize] = if pin_end { &[0, n - 1] } else { &[0] };
    for &i in pinned {
        if !(lo[i] <= 0.0 && 0.0 <= hi[i]) {
            return None;
        }
        lo[i] = 0.0;
        hi[i] = 0.0;
    }
    Some((lo, hi))
}

/// Minimal energy in the ε-tube of a knot-described path, via the dense QP.
pub fn dense_qp_energy(
    x: &[f64],
    left: &[f64],
    value: &[f64],
    right: &[f64],
    eps: f64,
    pin_end: bool,
) -> Option<f64> {
    let (lo, hi) = knot_box(left, value, right, eps, pin_end)?;
    box_qp_min_energy(x, &lo, &hi).map(|(e, _)| e)
}

/// Distance from a knot-described path to `radius·S1` (or `radius·S2` when
/// `pin_end`), by bisection over the dense QP.
pub fn dense_qp_distance(
    x: &[f64],
    left: &[f64],
    value: &[f64],
    right: &[f64],
    pin_end: bool,
    radius: f64,
) -> f64 {
    let sup = left
        .iter()
        .chain(value)
        .chain(right)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let (mut a, mut b) = (0.0, sup);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        let ok = dense_qp_energy(x, left, value, right, mid, pin_end)
            .is_some_and(|e| e <= radius * radius);
        if ok {
            b = mid;
        } else {
            a = mid;
        }
        if b - a < 1e-13 {
            break;
        }
    }
    b
}

/// 1% critical value of the Kolmogorov distribution.
pub const KS_CRITICAL_1PCT: f64 = 1.628;

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut s = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// `√n · sup |F_n − F|` for the sample against the continuous `cdf`.
pub fn ks_one_sample(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    });
    n.sqrt() * d
}

/// `√(nm/(n+m)) · sup |F_n − G_m|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    (n * m / (n + m)).sqrt() * d
}

/// `P(X ≥ k)` for `X ~ Poisson(mean)`.
pub fn poisson_upper_tail(mean: f64, k: u64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    Poisson::new(mean).expect("positive mean").sf(k - 1)
}

/// `P(sup_{[0,1]} |W| ≤ ε)` from the reflection-principle sum
/// `Σ_k (−1)^k [Φ((2k+1)ε) − Φ((2k−1)ε)]`, folded onto `k ≥ 0` and written
/// with upper tails. Accurate to about 1e-11 absolute.
pub fn wiener_small_ball(eps: f64) -> f64 {
    let phi = Normal::standard();
    let mut s = 1.0 - 2.0 * phi.sf(eps);
    for k in 1..200 {
        let kf = k as f64;
        let term = phi.sf((2.0 * kf - 1.0) * eps) - phi.sf((2.0 * kf + 1.0) * eps);
        s += if k % 2 == 0 { 2.0 * term } else { -2.0 * term };
    }
    s
}

/// `P(sup_{[0,1]} |B| ≤ x)` for the Brownian bridge.
pub fn bridge_small_ball(x: f64) -> f64 {
    1.0 - kolmogorov_sf(x)
}
