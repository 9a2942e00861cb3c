//! Smoothed-gradient outer-product estimation of the central mean subspace.

mod config;
mod gradient;
mod pipeline;
mod plugin;

pub use config::{
    bandwidth_for_bounded_support, default_sigma_theta, exhaustiveness_m_bound, mom_partitions_for_confidence,
    EsgopConfig, SupportMode, Variant,
};
pub use gradient::{estimate_lle_gradient, estimate_smoothed_gradient, weighted_local_linear_slope};
pub use pipeline::{
    assemble_m_hat, draw_thetas, median_of_means_select, partition_indices, run, run_algorithm1, run_lle,
    run_median_of_means, EstimateDiagnostics, SmoothedGradientPair, SubspaceEstimate, SPLIT_STREAM, THETA_STREAM,
};
pub use plugin::{run_plugin_ratio, GaussianFitDensity, PluginDiagnostics, RatioEstimatorSpec};
