//! Central mean subspace estimation for multi-index regression models.
//!
//! The estimator reweights labelled samples from a known covariate
//! distribution into Gaussian neighbourhoods of random anchor points, applies
//! Stein's identity to obtain unbiased smoothed-gradient estimates, and
//! returns the leading eigenvectors of a symmetrised outer-product matrix
//! assembled from two independent halves of each data partition.
//!
//! Module map:
//!
//! - [`numkit`]: dense matrices, Jacobi eigensolver, one-sided Jacobi SVD,
//!   Cholesky, reproducible random streams.
//! - [`model`]: link functions, design distributions, data generation and
//!   analytic oracles (smoothed gradients, signal strength, ratio moments).
//! - [`esgop`]: the estimation pipeline and its median-of-means, plug-in
//!   ratio and local-linear variants.
//! - [`metrics`]: subspace distances, moment diagnostics, rate fits.
//! - [`baselines`]: SIR, SAVE and finite-sample EGOP, plus the SAVE
//!   non-exhaustiveness demonstration.

pub mod baselines;
pub mod error;
pub mod esgop;
pub mod metrics;
pub mod model;
pub mod numkit;

pub use error::{Error, Result};
