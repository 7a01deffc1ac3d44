//! Statistical inference over repeated simulations in independently sampled
//! networks.

mod estimate;
mod group;
mod quantile;
mod study;
mod tdist;

pub use estimate::{
    network_estimate, point_estimate, read_estimate_csv, resolution_error, true_estimate,
    write_estimate_csv, EstimateRow, NetworkEstimate, TrueEstimate, DEFAULT_CONFIDENCE,
};
pub use group::{group_runs, RunManifest, RunStatus};
pub use quantile::{EmpiricalDistribution, QuantileGrid};
pub use study::{ci_width_study, WidthRow};
pub use tdist::t_value;
