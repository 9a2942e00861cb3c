//! Dense linear algebra and random sampling kernel.

mod chol;
mod eigen;
mod matrix;
mod rng;
mod sampling;
mod svd;

pub use chol::{orthonormal_complement, Cholesky};
pub use eigen::{sym_eigen, SymEigen};
pub use matrix::{dot, norm, squared_distance, DenseMatrix, DenseVector};
pub use rng::RngStream;
pub use sampling::{sample_cauchy, sample_gaussian, sample_standard_normal_matrix};
pub use svd::{operator_norm, thin_svd, ThinSvd};

