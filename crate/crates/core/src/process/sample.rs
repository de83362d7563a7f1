use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp1};

use crate::rng::{self, tag};
use crate::{Error, Result};

/// Sorted uniform sample, possibly restricted to a window `[0, window]`.
///
/// A full sample (`window == 1`) holds all `n` order statistics. A windowed
/// sample holds only the order statistics that fall in `[0, window]`, which is
/// all that local processes on `[0, window]` depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSample {
    n: u64,
    seed: u64,
    window: f64,
    values: Vec<f64>,
}

impl UniformSample {
    /// The first `n` variates of the seed's uniform stream, sorted.
    ///
    /// Samples are nested: `draw(n, s)` consists of the first `n` draws of the
    /// same infinite sequence for every `n`, mirroring an a.s. statement along
    /// one sample path.
    pub fn draw(n: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        let mut rng = rng::stream(tag::UNIFORM, seed, 0);
        let mut values: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        values.sort_unstable_by(f64::total_cmp);
        Ok(UniformSample {
            n,
            seed,
            window: 1.0,
            values,
        })
    }

    /// The part of `draw(n, seed)` lying in `[0, window]`, computed by
    /// streaming without materialising the whole sample.
    pub fn draw_window(n: u64, seed: u64, window: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        check_window(window)?;
        let mut rng = rng::stream(tag::UNIFORM, seed, 0);
        let mut values: Vec<f64> = (0..n)
            .map(|_| rng.random::<f64>())
            .filter(|&u| u <= window)
            .collect();
        values.sort_unstable_by(f64::total_cmp);
        Ok(UniformSample {
            n,
            seed,
            window,
            values,
        })
    }

    /// Windowed samples for several sizes from one pass over the stream.
    ///
    /// Entry `j` equals `draw_window(sizes[j], seed, windows[j])`. `sizes`
    /// must be nondecreasing and every window at most `max(windows)`.
    pub fn draw_windows(seed: u64, sizes: &[u64], windows: &[f64]) -> Result<Vec<Self>> {
        if sizes.len() != windows.len() {
            return Err(Error::invalid("sizes and windows differ in length"));
        }
        if sizes.iter().any(|&n| n == 0) || sizes.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("sizes must be positive and nondecreasing"));
        }
        for &w in windows {
            check_window(w)?;
        }
        let Some(&n_max) = sizes.last() else {
            return Ok(Vec::new());
        };
        let cap = windows.iter().copied().fold(0.0f64, f64::max);
        let mut rng = rng::stream(tag::UNIFORM, seed, 0);
        // (index, value) pairs below the largest window.
        let kept: Vec<(u64, f64)> = (0..n_max)
            .map(|i| (i, rng.random::<f64>()))
            .filter(|&(_, u)| u <= cap)
            .collect();
        Ok(sizes
            .iter()
            .zip(windows)
            .map(|(&n, &w)| {
                let mut values: Vec<f64> = kept
                    .iter()
                    .filter(|&&(i, u)| i < n && u <= w)
                    .map(|&(_, u)| u)
                    .collect();
                values.sort_unstable_by(f64::total_cmp);
                UniformSample {
                    n,
                    seed,
                    window: w,
                    values,
                }
            })
            .collect())
    }

    /// Full sorted sample generated from normalised exponential spacings.
    ///
    /// Same law as [`draw`](Self::draw) at O(n) cost without sorting, but an
    /// independent stream and not nested in `n`. Used by Monte Carlo checks
    /// that need many replications at one size.
    pub fn draw_spacings(n: u64, seed: u64, replication: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        let mut rng = rng::stream(tag::SPACINGS, seed, replication);
        let mut acc = 0.0;
        let mut values: Vec<f64> = (0..n)
            .map(|_| {
                let e: f64 = Exp1.sample(&mut rng);
                acc += e;
                acc
            })
            .collect();
        let e: f64 = Exp1.sample(&mut rng);
        let total = acc + e;
        for v in &mut values {
            *v /= total;
        }
        Ok(UniformSample {
            n,
            seed,
            window: 1.0,
            values,
        })
    }

    /// Windowed sample drawn directly: a `Binomial(n, window)` count of
    /// uniforms on `[0, window)`. Same law as `draw_window`, independent stream.
    pub fn draw_window_binomial(n: u64, seed: u64, window: f64, replication: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sample size must be positive"));
        }
        check_window(window)?;
        let mut rng = rng::stream(tag::WINDOW, seed, replication);
        let count = Binomial::new(n, window)
            .map_err(|e| Error::invalid(e.to_string()))?
            .sample(&mut rng);
        let mut values: Vec<f64> = (0..count).map(|_| window * rng.random::<f64>()).collect();
        values.sort_unstable_by(f64::total_cmp);
        Ok(UniformSample {
            n,
            seed,
            window,
            values,
        })
    }

    /// Builds a full sample from explicit values (sorted on construction).
    pub fn from_values(mut values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sample size must be positive"));
        }
        if values.iter().any(|u| !(0.0..=1.0).contains(u)) {
            return Err(Error::invalid("sample values must lie in [0, 1]"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(UniformSample {
            n: values.len() as u64,
            seed,
            window: 1.0,
            values,
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Right end of the observed window (1 for a full sample).
    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn is_full(&self) -> bool {
        self.window >= 1.0 && self.values.len() as u64 == self.n
    }

    /// Sorted values (only those inside the window).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `#{i : U_i ≤ x}` for `x` inside the window.
    pub fn count_le(&self, x: f64) -> usize {
        self.values.partition_point(|&u| u <= x)
    }

    pub fn count_lt(&self, x: f64) -> usize {
        self.values.partition_point(|&u| u < x)
    }
}

fn check_window(window: f64) -> Result<()> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::invalid(format!("window {window} not in (0, 1]")));
    }
    Ok(())
}
