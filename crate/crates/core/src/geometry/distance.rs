use serde::{Deserialize, Serialize};

use super::{taut_string, SmoothPath, Tube};
use crate::process::Trajectory;
use crate::{Error, Result};

/// Strassen ball: `S1 = {f(0) = 0, ∫f′² ≤ 1}`, `S2 = S1 ∩ {f(1) = 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BallKind {
    S1,
    S2,
}

impl BallKind {
    fn end(self) -> Option<f64> {
        match self {
            BallKind::S1 => None,
            BallKind::S2 => Some(0.0),
        }
    }
}

/// The ball `c·S1` or `c·S2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub kind: BallKind,
    pub radius: f64,
}

impl BallSpec {
    pub fn new(kind: BallKind, radius: f64) -> Result<Self> {
        let b = BallSpec { kind, radius };
        b.validate()?;
        Ok(b)
    }

    pub fn unit(kind: BallKind) -> Self {
        BallSpec { kind, radius: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius >= 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("ball radius {} must be ≥ 0", self.radius)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceResult {
    /// Certified upper end of the final bracket: `certificate` lies in the
    /// ball and within `epsilon` of the path.
    pub epsilon: f64,
    /// Lower end of the final bracket; the distance is in `[lower, epsilon]`.
    pub lower: f64,
    pub certificate: SmoothPath,
    /// Slack for behaviour between evaluation points. Distances are
    /// evaluated exactly on the merged knots, so this is 0.
    pub rigorous_bound: f64,
    pub iterations: usize,
    pub tolerance: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

fn check_path(g: &Trajectory) -> Result<()> {
    let finite = g
        .left()
        .iter()
        .chain(g.values())
        .chain(g.right())
        .all(|v| v.is_finite());
    if finite {
        Ok(())
    } else {
        Err(Error::invalid("path contains non-finite values"))
    }
}

/// Minimal `∫f′²` over paths of the ball's shape in the ε-tube around `g`;
/// `None` when the tube is empty.
pub fn min_energy_in_tube(g: &Trajectory, epsilon: f64, kind: BallKind) -> Result<Option<SmoothPath>> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid(format!("ε = {epsilon} must be positive")));
    }
    check_path(g)?;
    Ok(taut_string(&Tube::around(g, epsilon, kind.end())?))
}

/// Smallest ε at which the tube around `g` is nonempty.
fn feasibility_threshold(g: &Trajectory, kind: BallKind) -> f64 {
    let env: Vec<(f64, f64)> = g.knot_envelopes().collect();
    let width = env.iter().fold(0.0f64, |acc, (lo, hi)| acc.max((hi - lo) / 2.0));
    let pin = |(lo, hi): (f64, f64)| hi.max(-lo);
    let mut t = width.max(pin(env[0]));
    if kind == BallKind::S2 {
        t = t.max(pin(env[env.len() - 1]));
    }
    t
}

/// `inf {ε : g ∈ c·S + ε·B₀}` by bisection on ε, to within `tolerance`.
pub fn strassen_distance(g: &Trajectory, ball: BallSpec, tolerance: f64) -> Result<DistanceResult> {
    ball.validate()?;
    check_path(g)?;
    if !(tolerance > 0.0) {
        return Err(Error::invalid(format!("tolerance {tolerance} must be positive")));
    }
    let sup = g.sup_abs();
    let c2 = ball.radius * ball.radius;
    let accept = |eps: f64| -> Option<SmoothPath> {
        if eps <= 0.0 {
            return None;
        }
        let tube = Tube::around(g, eps, ball.kind.end()).ok()?;
        taut_string(&tube).filter(|f| f.energy() <= c2)
    };
    let mut lo = feasibility_threshold(g, ball.kind).min(sup);
    let mut hi = sup;
    let mut best = SmoothPath::zero();
    let mut iterations = 0;
    if ball.radius > 0.0 && lo < hi {
        if let Some(f) = accept(lo) {
            hi = lo;
            best = f;
        }
        while hi - lo > tolerance {
            iterations += 1;
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match accept(mid) {
                Some(f) => {
                    hi = mid;
                    best = f;
                }
                None => lo = mid,
            }
        }
    } else {
        lo = if ball.radius > 0.0 { lo } else { sup };
    }
    let result = DistanceResult {
        epsilon: hi,
        lower: lo,
        certificate: best,
        rigorous_bound: 0.0,
        iterations,
        tolerance,
    };
    #[cfg(debug_assertions)]
    verify_certificate(g, ball, &result);
    Ok(result)
}

#[cfg(debug_assertions)]
fn verify_certificate(g: &Trajectory, ball: BallSpec, r: &DistanceResult) {
    let f = &r.certificate;
    let slack = 1e-9 * (1.0 + r.epsilon);
    assert!(f.energy() <= ball.radius * ball.radius + 1e-9, "certificate leaves the ball");
    if ball.kind == BallKind::S2 {
        assert!(f.values().last().unwrap().abs() <= 1e-12, "certificate misses f(1) = 0");
    }
    let (d, _) = sup_norm_distance(g, f);
    assert!(d <= r.epsilon + slack, "certificate at distance {d} > {}", r.epsilon);
}

/// Membership of `g` in `c·S + ε·B₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// Minimal energy in the ε-tube, `None` when the tube is empty.
    pub energy: Option<f64>,
    /// Minimal-energy path in the tube; a member of the ball iff `member`.
    pub certificate: Option<SmoothPath>,
}

pub fn membership(g: &Trajectory, ball: BallSpec, epsilon: f64) -> Result<Membership> {
    ball.validate()?;
    let path = min_energy_in_tube(g, epsilon, ball.kind)?;
    let energy = path.as_ref().map(SmoothPath::energy);
    Ok(Membership {
        member: energy.is_some_and(|e| e <= ball.radius * ball.radius),
        energy,
        certificate: path,
    })
}

/// `(sup_{[0,1]} |g − f|, slack)`; the supremum is exact, slack is 0.
pub fn sup_norm_distance(g: &Trajectory, f: &SmoothPath) -> (f64, f64) {
    (g.sup_distance(&f.to_trajectory()), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::Grid;

    fn ramp(slope: f64) -> Trajectory {
        Trajectory::ramp(&Grid::new(16).unwrap(), slope)
    }

    #[test]
    fn zero_path_is_in_both_balls() {
        for kind in [BallKind::S1, BallKind::S2] {
            let d = strassen_distance(&ramp(0.0), BallSpec::unit(kind), 1e-10).unwrap();
            assert_eq!(d.epsilon, 0.0);
        }
    }

    #[test]
    fn distance_of_2t_to_s1_is_one() {
        let d = strassen_distance(&ramp(2.0), BallSpec::unit(BallKind::S1), 1e-10).unwrap();
        assert!((d.epsilon - 1.0).abs() < 1e-9, "{}", d.epsilon);
        assert!(d.certificate.energy() <= 1.0);
    }

    #[test]
    fn distance_of_t_to_s2_is_one() {
        let d = strassen_distance(&ramp(1.0), BallSpec::unit(BallKind::S2), 1e-10).unwrap();
        assert!((d.epsilon - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_energy_examples() {
        assert_eq!(
            min_energy_in_tube(&ramp(0.0), 0.3, BallKind::S1)
                .unwrap()
                .unwrap()
                .energy(),
            0.0
        );
        let e = min_energy_in_tube(&ramp(2.0), 1.0, BallKind::S1)
            .unwrap()
            .unwrap()
            .energy();
        assert!((e - 1.0).abs() < 1e-12);
        assert!(min_energy_in_tube(&ramp(1.0), 0.999, BallKind::S2)
            .unwrap()
            .is_none());
        assert!(min_energy_in_tube(&ramp(1.0), 0.0, BallKind::S2).is_err());
    }

    #[test]
    fn step_to_constant_has_s2_distance_c() {
        // Jumps from 0 to c right after 0 and stays there.
        for c in [0.0, 0.3, 1.7] {
            let g = Trajectory::from_parts(
                crate::Interp::CadlagStep,
                vec![0.0, 1.0],
                vec![0.0, c],
                vec![0.0, c],
                vec![c, c],
            )
            .unwrap();
            let d = strassen_distance(&g, BallSpec::unit(BallKind::S2), 1e-10).unwrap();
            assert!((d.epsilon - c).abs() < 1e-9, "{c}: {}", d.epsilon);
        }
    }

    #[test]
    fn zero_radius_gives_sup_norm() {
        let g = ramp(-0.7);
        let d = strassen_distance(&g, BallSpec::new(BallKind::S1, 0.0).unwrap(), 1e-8).unwrap();
        assert_eq!(d.epsilon, 0.7);
        assert_eq!(d.certificate.energy(), 0.0);
    }

    #[test]
    fn membership_examples() {
        assert!(membership(&ramp(0.0), BallSpec::unit(BallKind::S1), 0.1).unwrap().member);
        let m = membership(&ramp(2.0), BallSpec::unit(BallKind::S1), 0.5).unwrap();
        assert!(!m.member);
        assert!(m.energy.unwrap() > 1.0);
    }

    #[test]
    fn sup_norm_distance_to_zero_is_sup() {
        let g = ramp(0.4);
        assert_eq!(sup_norm_distance(&g, &SmoothPath::zero()), (0.4, 0.0));
        let f = SmoothPath::line(0.4);
        assert_eq!(sup_norm_distance(&g, &f).0, 0.0);
    }

    #[test]
    fn nan_radius_is_rejected() {
        assert!(BallSpec::new(BallKind::S1, f64::NAN).is_err());
        assert!(BallSpec::new(BallKind::S1, -1.0).is_err());
    }
}
