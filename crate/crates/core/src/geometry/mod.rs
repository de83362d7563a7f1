//! Sup-norm distances to the Strassen balls `c·S1` and `c·S2`.
//!
//! `g ∈ c·S + ε·B₀` iff the minimal energy of a path of the ball's shape in
//! the ε-tube around `g` is at most `c²`. The energy is nonincreasing in ε, so
//! the distance is found by bisection.

mod distance;
mod smooth_path;
mod taut_string;

pub use distance::{
    membership, min_energy_in_tube, strassen_distance, sup_norm_distance, BallKind, BallSpec,
    DistanceResult, Membership, DEFAULT_TOLERANCE,
};
pub use smooth_path::SmoothPath;
pub use taut_string::{taut_string, Tube};
