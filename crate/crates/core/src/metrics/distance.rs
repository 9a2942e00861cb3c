use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{operator_norm, orthonormal_complement, sample_standard_normal_matrix, thin_svd, DenseMatrix, RngStream};

const ORTHONORMAL_TOL: f64 = 1e-8;
/// Fixed seed for the random completion columns; the result does not depend on it.
const COMPLETION_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceDistanceReport {
    /// `min_R ‖Û R − U‖_op` over orthogonal `R`.
    pub procrustes: f64,
    /// `‖Ûᵀ U⊥‖_op`.
    pub sin_theta: f64,
    pub optimal_rotation: DenseMatrix,
}

fn check_orthonormal(name: &str, a: &DenseMatrix) -> Result<()> {
    let defect = a.orthonormality_defect();
    if !(defect <= ORTHONORMAL_TOL) {
        return Err(Error::Validation(format!("{name} does not have orthonormal columns (defect {defect:e})")));
    }
    Ok(())
}

/// Distance with optimal rotation and the `sinΘ` distance between two
/// `d × k` orthonormal bases.
pub fn subspace_distance(u_hat: &DenseMatrix, u: &DenseMatrix) -> Result<SubspaceDistanceReport> {
    if u_hat.shape() != u.shape() {
        return Err(Error::Shape(format!(
            "bases have shapes {:?} and {:?}",
            u_hat.shape(),
            u.shape()
        )));
    }
    check_orthonormal("U_hat", u_hat)?;
    check_orthonormal("U", u)?;
    let (d, k) = u.shape();
    let cross = u_hat.t_matmul(u)?;
    let svd = thin_svd(&cross)?;
    let rotation = svd.u.matmul(&svd.v.transpose())?;
    let procrustes = operator_norm(&u_hat.matmul(&rotation)?.sub(u)?)?;
    let sin_theta = if k == d {
        0.0
    } else {
        let candidates = sample_standard_normal_matrix(&mut RngStream::new(COMPLETION_SEED, 0), d, d);
        let perp = orthonormal_complement(u, &candidates)
            .or_else(|_| orthonormal_complement(u, &DenseMatrix::identity(d)))?;
        operator_norm(&u_hat.t_matmul(&perp)?)?.clamp(0.0, 1.0)
    };
    Ok(SubspaceDistanceReport {
        procrustes,
        sin_theta,
        optimal_rotation: rotation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_bases() {
        let u = DenseMatrix::standard_basis(5, 2);
        let r = subspace_distance(&u, &u).unwrap();
        assert_eq!(r.procrustes, 0.0);
        assert_eq!(r.sin_theta, 0.0);
        assert!(r.optimal_rotation.sub(&DenseMatrix::identity(2)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn orthogonal_lines() {
        let e1 = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let e2 = DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let r = subspace_distance(&e2, &e1).unwrap();
        assert!((r.procrustes - 2f64.sqrt()).abs() < 1e-10);
        assert!((r.sin_theta - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_is_absorbed() {
        let u = DenseMatrix::standard_basis(4, 2);
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let q = DenseMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        let r = subspace_distance(&u.matmul(&q).unwrap(), &u).unwrap();
        assert!(r.procrustes < 1e-15);
        assert!(r.sin_theta < 1e-15);
    }

    #[test]
    fn rejects_non_orthonormal() {
        let a = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let e1 = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(subspace_distance(&a, &e1), Err(Error::Validation(_))));
    }
}
