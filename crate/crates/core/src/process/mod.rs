//! Deterministic simulation of samples, empirical-type processes, Gaussian
//! and Poisson paths, and the index/bandwidth schedules.

mod grid;
mod paths;
mod sample;
mod schedule;
mod trajectory;

pub use grid::Grid;
pub use paths::{
    centered_poisson_path, counting_path, counting_sup_abs, empirical_process, gaussian_path, gaussian_path_with,
    increment_process, local_empirical_process, poissonized_empirical, quantile_process,
    GaussianKind, Normalization, PoissonizedPath,
};
pub(crate) use paths::poisson_count;
pub use sample::UniformSample;
pub use schedule::{
    blocking_sequence, check_bandwidth_conditions, BandwidthSchedule, ConditionCheck,
    ConditionReport, ConditionStatus, IndexSchedule, Regime,
};
pub use trajectory::{Interp, Trajectory};
pub(crate) use trajectory::merge_knots as merge_sorted;
