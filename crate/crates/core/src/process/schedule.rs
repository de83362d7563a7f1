use serde::{Deserialize, Serialize};

use crate::{loglog, Error, Result};

/// Bandwidth sequence `a_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BandwidthSchedule {
    /// `a_n = n^{−θ}`.
    Power { theta: f64 },
    /// Explicit `(n, a_n)` pairs.
    Table { pairs: Vec<(u64, f64)> },
}

impl BandwidthSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            BandwidthSchedule::Power { theta } => {
                if !(0.0..=1.0).contains(theta) {
                    return Err(Error::invalid(format!("exponent θ = {theta} not in [0, 1]")));
                }
            }
            BandwidthSchedule::Table { pairs } => {
                if pairs.is_empty() {
                    return Err(Error::invalid("bandwidth table is empty"));
                }
                if pairs.iter().any(|&(n, a)| n == 0 || !(a > 0.0 && a <= 1.0)) {
                    return Err(Error::invalid("bandwidth table needs n ≥ 1 and a_n in (0, 1]"));
                }
                if pairs.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::invalid("bandwidth table indices must increase"));
                }
            }
        }
        Ok(())
    }

    /// `a_n`; table schedules only know their own indices.
    pub fn a(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        match self {
            BandwidthSchedule::Power { theta } => Ok((n as f64).powf(-theta)),
            BandwidthSchedule::Table { pairs } => pairs
                .iter()
                .find(|&&(m, _)| m == n)
                .map(|&(_, a)| a)
                .ok_or_else(|| Error::invalid(format!("bandwidth table has no entry for n = {n}"))),
        }
    }
}

/// Sequence of sample sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", rename_all_fields = "kebab-case")]
pub enum IndexSchedule {
    /// `n_0 = start`, `n_{j+1} = ⌈ratio·n_j⌉`.
    Geometric { start: u64, ratio: f64, count: usize },
    /// Distinct values of the blocking sequence from `k_start` on.
    Blocking { k_start: u64, count: usize },
    Explicit { values: Vec<u64> },
}

impl IndexSchedule {
    /// Strictly increasing indices.
    pub fn indices(&self) -> Result<Vec<u64>> {
        let out = match self {
            IndexSchedule::Geometric {
                start,
                ratio,
                count,
            } => {
                if *start == 0 || !(*ratio > 1.0 && ratio.is_finite()) {
                    return Err(Error::invalid("geometric schedule needs start ≥ 1 and ratio > 1"));
                }
                let mut out = Vec::with_capacity(*count);
                let mut n = *start;
                for _ in 0..*count {
                    out.push(n);
                    let next = (ratio * n as f64).ceil();
                    if next >= u64::MAX as f64 {
                        return Err(Error::invalid("geometric schedule overflows"));
                    }
                    n = next as u64;
                }
                out
            }
            IndexSchedule::Blocking { k_start, count } => {
                let mut out: Vec<u64> = Vec::with_capacity(*count);
                let mut k = *k_start;
                while out.len() < *count {
                    let v = blocking_sequence(k)?;
                    if v >= u64::MAX as f64 {
                        return Err(Error::invalid("blocking sequence overflows"));
                    }
                    let v = v as u64;
                    if out.last() != Some(&v) {
                        out.push(v);
                    }
                    k += 1;
                }
                out
            }
            IndexSchedule::Explicit { values } => values.clone(),
        };
        if out.is_empty() {
            return Err(Error::invalid("index schedule is empty"));
        }
        if out.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("indices must be strictly increasing"));
        }
        Ok(out)
    }
}

/// `⌊exp(k·exp(−(log k)^{1/6}))⌋`, returned as an integer-valued float since
/// it leaves the `u64` range near `k = 380`.
pub fn blocking_sequence(k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::invalid(format!("blocking index k = {k} must be at least 2")));
    }
    let kf = k as f64;
    Ok((kf * (-kf.ln().powf(1.0 / 6.0)).exp()).exp().floor())
}

/// Which limit theorem a bandwidth must serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    LocalEmpirical,
    LocalQuantile,
    /// Needs the growth exponent `p` of the rate function, `∇(L) ≍ L^p`.
    Chung,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionStatus {
    Holds,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub status: ConditionStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub regime: Regime,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.status == ConditionStatus::Holds)
    }

    pub fn violations(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.status == ConditionStatus::Violated)
            .map(|c| c.condition.clone())
            .collect()
    }

    pub fn into_result(self) -> Result<Self> {
        if self.holds() {
            Ok(self)
        } else {
            Err(Error::BandwidthCondition {
                conditions: self.violations(),
            })
        }
    }
}

/// Quantity whose limit a condition prescribes.
enum Limit {
    /// `n·a_n / (log₂n)^power → ∞`; `power = 0` also demands monotone growth.
    GrowsOverLogPower(f64),
    /// `a_n ↓ 0`.
    BandwidthToZero,
    /// `a_n log₂n → 0`.
    BandwidthLogToZero,
}

fn fmt_power(p: f64) -> String {
    let thirds = p * 3.0;
    if (thirds - thirds.round()).abs() < 1e-9 && (thirds.round() as i64) % 3 != 0 {
        format!("{}/3", thirds.round() as i64)
    } else {
        format!("{p}")
    }
}

impl Limit {
    fn name(&self) -> String {
        match self {
            Limit::GrowsOverLogPower(p) if *p == 0.0 => "n·a_n ↑ ∞".into(),
            Limit::GrowsOverLogPower(p) if *p == 1.0 => "n·a_n/log₂n → ∞".into(),
            Limit::GrowsOverLogPower(p) => format!("n·a_n/(log₂n)^({}) → ∞", fmt_power(*p)),
            Limit::BandwidthToZero => "a_n ↓ 0".into(),
            Limit::BandwidthLogToZero => "a_n·log₂n → 0".into(),
        }
    }

    /// Symbolic decision for `a_n = n^{−θ}`.
    fn power(&self, theta: f64) -> (ConditionStatus, String) {
        let ok = match self {
            Limit::GrowsOverLogPower(_) => theta < 1.0,
            Limit::BandwidthToZero | Limit::BandwidthLogToZero => theta > 0.0,
        };
        let detail = match self {
            Limit::GrowsOverLogPower(_) => format!("n·a_n = n^{}", 1.0 - theta),
            _ => format!("a_n = n^(-{theta})"),
        };
        let status = if ok {
            ConditionStatus::Holds
        } else {
            ConditionStatus::Violated
        };
        (status, detail)
    }

    /// Trend over a finite table: the quantity must move monotonically in
    /// the prescribed direction and change overall.
    fn table(&self, pairs: &[(u64, f64)]) -> (ConditionStatus, String) {
        let q: Vec<f64> = pairs
            .iter()
            .map(|&(n, a)| {
                let nf = n as f64;
                match self {
                    Limit::GrowsOverLogPower(p) => {
                        let l = loglog(nf);
                        if *p > 0.0 && l <= 0.0 {
                            f64::INFINITY
                        } else {
                            nf * a / l.powf(*p)
                        }
                    }
                    Limit::BandwidthToZero => a,
                    Limit::BandwidthLogToZero => a * loglog(nf),
                }
            })
            .collect();
        let increasing = matches!(self, Limit::GrowsOverLogPower(_));
        let finite: Vec<f64> = q.iter().copied().filter(|v| v.is_finite()).collect();
        let bad_steps = finite
            .windows(2)
            .filter(|w| if increasing { w[1] < w[0] } else { w[1] > w[0] })
            .count();
        let (first, last) = (
            finite.first().copied().unwrap_or(f64::NAN),
            finite.last().copied().unwrap_or(f64::NAN),
        );
        let moved = if increasing { last > first } else { last < first };
        let detail = format!(
            "from {first} to {last} over n ∈ [{}, {}], {bad_steps} non-monotone steps",
            pairs[0].0,
            pairs[pairs.len() - 1].0
        );
        let status = if bad_steps == 0 && moved && finite.len() >= 2 {
            ConditionStatus::Holds
        } else {
            ConditionStatus::Violated
        };
        (status, detail)
    }
}

/// Checks the bandwidth requirements of a regime. `rate_exponent` is the
/// growth exponent `p` of `∇(L) ≍ L^p` and is used only for [`Regime::Chung`].
pub fn check_bandwidth_conditions(
    schedule: &BandwidthSchedule,
    regime: Regime,
    rate_exponent: Option<f64>,
) -> Result<ConditionReport> {
    schedule.validate()?;
    let mut limits = vec![Limit::GrowsOverLogPower(0.0)];
    match regime {
        Regime::LocalEmpirical => {
            limits.push(Limit::GrowsOverLogPower(7.0 / 3.0));
            limits.push(Limit::BandwidthToZero);
        }
        Regime::LocalQuantile => {
            limits.push(Limit::GrowsOverLogPower(7.0 / 3.0));
            limits.push(Limit::GrowsOverLogPower(11.0 / 3.0));
            limits.push(Limit::BandwidthToZero);
        }
        Regime::Chung => {
            let p = rate_exponent
                .ok_or_else(|| Error::invalid("the Chung regime needs a rate exponent"))?;
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::invalid(format!("rate exponent {p} must be nonnegative")));
            }
            limits.push(Limit::BandwidthToZero);
            limits.push(Limit::BandwidthLogToZero);
            limits.push(Limit::GrowsOverLogPower(1.0 + 2.0 * p));
        }
    }
    let checks = limits
        .iter()
        .map(|lim| {
            let (status, detail) = match schedule {
                BandwidthSchedule::Power { theta } => lim.power(*theta),
                BandwidthSchedule::Table { pairs } => lim.table(pairs),
            };
            ConditionCheck {
                condition: lim.name(),
                status,
                detail,
            }
        })
        .collect();
    Ok(ConditionReport { regime, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocking_sequence_values() {
        assert_eq!(blocking_sequence(5).unwrap(), 5.0);
        assert_eq!(blocking_sequence(10).unwrap(), 23.0);
        assert!(blocking_sequence(1).is_err());
        for k in 10..500 {
            assert!(blocking_sequence(k + 1).unwrap() >= blocking_sequence(k).unwrap());
        }
    }

    #[test]
    fn square_root_bandwidth_passes_local_empirical() {
        let s = BandwidthSchedule::Power { theta: 0.5 };
        let r = check_bandwidth_conditions(&s, Regime::LocalEmpirical, None).unwrap();
        assert_eq!(r.checks.len(), 3);
        assert!(r.holds());
    }

    #[test]
    fn inverse_n_bandwidth_fails_with_named_condition() {
        let s = BandwidthSchedule::Power { theta: 1.0 };
        let err = check_bandwidth_conditions(&s, Regime::LocalEmpirical, None)
            .unwrap()
            .into_result()
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("n·a_n/(log₂n)^(7/3) → ∞"), "{msg}");
    }

    #[test]
    fn chung_bv_rate_conditions_hold() {
        let s = BandwidthSchedule::Power { theta: 0.5 };
        let r = check_bandwidth_conditions(&s, Regime::Chung, Some(2.0 / 3.0)).unwrap();
        assert!(r.holds());
        assert!(r.checks.iter().any(|c| c.condition == "a_n·log₂n → 0"));
        assert!(r
            .checks
            .iter()
            .any(|c| c.condition == "n·a_n/(log₂n)^(7/3) → ∞"));
        assert!(check_bandwidth_conditions(&s, Regime::Chung, None).is_err());
    }

    #[test]
    fn constant_bandwidth_fails_decay() {
        let s = BandwidthSchedule::Power { theta: 0.0 };
        let r = check_bandwidth_conditions(&s, Regime::LocalQuantile, None).unwrap();
        assert_eq!(r.violations(), vec!["a_n ↓ 0".to_string()]);
    }

    #[test]
    fn table_trends_and_violations() {
        let good = BandwidthSchedule::Table {
            pairs: (3..8).map(|j| (10u64.pow(j), 10f64.powf(-(j as f64) / 2.0))).collect(),
        };
        assert!(check_bandwidth_conditions(&good, Regime::LocalEmpirical, None)
            .unwrap()
            .holds());
        let flat = BandwidthSchedule::Table {
            pairs: (3..8).map(|j| (10u64.pow(j), 10f64.powi(-(j as i32)))).collect(),
        };
        let r = check_bandwidth_conditions(&flat, Regime::LocalEmpirical, None).unwrap();
        assert!(r.violations().contains(&"n·a_n ↑ ∞".to_string()));
        let bad = BandwidthSchedule::Table {
            pairs: vec![(1000, 0.01), (2000, 0.02), (4000, 0.001)],
        };
        let r = check_bandwidth_conditions(&bad, Regime::LocalEmpirical, None).unwrap();
        assert!(r.violations().contains(&"a_n ↓ 0".to_string()));
    }

    #[test]
    fn schedules_produce_increasing_indices() {
        let g = IndexSchedule::Geometric {
            start: 1000,
            ratio: 10.0,
            count: 5,
        };
        assert_eq!(
            g.indices().unwrap(),
            vec![1000, 10_000, 100_000, 1_000_000, 10_000_000]
        );
        let b = IndexSchedule::Blocking {
            k_start: 10,
            count: 6,
        }
        .indices()
        .unwrap();
        assert_eq!(b[0], 23);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(IndexSchedule::Explicit { values: vec![5, 5] }.indices().is_err());
        assert_eq!(BandwidthSchedule::Power { theta: 0.5 }.a(100).unwrap(), 0.1);
    }
}
