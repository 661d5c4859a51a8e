//! Monte Carlo realization of the graphical construction.

pub mod estimators;
pub mod event_log;
pub mod rng;

pub use estimators::{
    count_interactions, empirical_tv, estimate_heat_kernel, estimate_interactions, estimate_law, estimate_probj,
    Estimate, TvEstimate,
};
pub use event_log::{sample_event_log, EventLog, Ring, RingSampler, Trajectory};
pub use rng::RngSpec;
