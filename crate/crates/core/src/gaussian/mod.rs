//! Gaussian small-ball estimators, Chung constants, rate functions and
//! non-covering tails of Gaussian paths.

mod chung;
mod cluster_tail;
mod rate;
mod small_ball;

pub use chung::{chung_constant_interior, ChiConvention, ChungTarget, TargetClass};
pub use cluster_tail::{cluster_tail_scan, gaussian_cluster_tail, TailEstimate, TailScan};
pub use rate::{rate_function, RateFnSpec};
pub use small_ball::{
    bridge_stay_probability, exact_centered_estimate, exact_centered_small_ball,
    small_ball_cameron_martin, small_ball_naive, SmallBallEstimate, SmallBallMethod, SupMode,
};
