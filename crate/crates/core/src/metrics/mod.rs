//! Subspace distances, moment diagnostics and empirical rates.

mod distance;
mod moments;
mod rate;

pub use distance::{subspace_distance, SubspaceDistanceReport};
pub use moments::{estimate_moments, power_mean_from_log_terms, MomentDiagnostics, PowerMean, MIN_MC_BUDGET, THETA_DRAWS};
pub use rate::{fit_rate, RateFit};
