//! Cyclic Jacobi eigensolver for dense symmetric matrices.

use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `A = Q Λ Qᵀ` with eigenvalues sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DenseMatrix,
}

impl SymEigen {
    /// Eigenvectors of the `k` largest eigenvalues.
    pub fn top(&self, k: usize) -> DenseMatrix {
        self.eigenvectors.leading_columns(k)
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        let n = self.eigenvalues.len();
        let mut out = DenseMatrix::zeros(n, n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let q = self.eigenvectors.col(i);
            out.add_outer(lambda, q, q);
        }
        out
    }
}

/// Full eigendecomposition of a symmetric matrix.
///
/// Each eigenvector is normalised so its largest-magnitude entry is positive
/// (first such entry on ties).
pub fn sym_eigen(a: &DenseMatrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix passed to sym_eigen".into()));
    }
    let scale = a.max_abs();
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Asymmetric { asymmetry: asym });
    }

    let n = a.rows();
    let mut w = a.clone();
    for j in 0..n {
        for i in 0..j {
            let avg = 0.5 * (w[(i, j)] + w[(j, i)]);
            w[(i, j)] = avg;
            w[(j, i)] = avg;
        }
    }
    let mut v = DenseMatrix::identity(n);

    let total = w.frobenius_norm();
    if total > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let off = off_diagonal_norm(&w);
            if off <= f64::EPSILON * total {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut w, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| w[(i, i)]).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = eigenvectors.col_mut(dst);
        col.copy_from_slice(v.col(src));
        canonical_sign(col);
    }
    Ok(SymEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Flips `v` so its largest-magnitude entry (lowest index on ties) is positive.
pub(crate) fn canonical_sign(v: &mut [f64]) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs {
            best_abs = x.abs();
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::rng::RngStream;
    use crate::numkit::sampling::sample_standard_normal_matrix;

    fn random_symmetric(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = RngStream::new(seed, 0);
        let g = sample_standard_normal_matrix(&mut rng, n, n);
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = 0.5 * (g[(i, j)] + g[(j, i)]);
            }
        }
        a
    }

    #[test]
    fn identity_is_fixed_point() {
        let e = sym_eigen(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.eigenvectors, DenseMatrix::identity(3));
    }

    #[test]
    fn diagonal_is_sorted_permutation() {
        let e = sym_eigen(&DenseMatrix::from_diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.eigenvalues, vec![3.0, 2.0, 1.0]);
        let expected =
            DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]])
                .unwrap();
        assert_eq!(e.eigenvectors, expected);
    }

    #[test]
    fn random_reconstruction_and_orthonormality() {
        for seed in 0..5 {
            let a = random_symmetric(8, seed);
            let e = sym_eigen(&a).unwrap();
            assert!(e.eigenvectors.orthonormality_defect() <= 1e-10);
            // oracle: direct product Q diag(λ) Qᵀ
            let q = &e.eigenvectors;
            let lam = DenseMatrix::from_diagonal(&e.eigenvalues);
            let rebuilt = q.matmul(&lam).unwrap().matmul(&q.transpose()).unwrap();
            let err = rebuilt.sub(&a).unwrap().max_abs();
            assert!(err <= 1e-8 * a.max_abs(), "seed {seed}: err {err}");
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn shift_moves_spectrum() {
        let a = random_symmetric(6, 11);
        let c = 2.75;
        let shifted = a.add(&DenseMatrix::identity(6).scaled(c)).unwrap();
        let e0 = sym_eigen(&a).unwrap();
        let e1 = sym_eigen(&shifted).unwrap();
        for (x, y) in e0.eigenvalues.iter().zip(&e1.eigenvalues) {
            assert!((x + c - y).abs() < 1e-10);
        }
    }

    #[test]
    fn sign_convention() {
        let mut v = [0.5, -0.5, 0.1];
        canonical_sign(&mut v);
        assert_eq!(v, [0.5, -0.5, 0.1]);
        let mut v = [-0.5, 0.5, 0.1];
        canonical_sign(&mut v);
        assert_eq!(v, [0.5, -0.5, -0.1]);
        let mut v = [0.1, -0.9];
        canonical_sign(&mut v);
        assert_eq!(v, [-0.1, 0.9]);

        let a = DenseMatrix::from_rows(&[vec![2.0, -1.0, 0.0], vec![-1.0, 3.0, 0.5], vec![0.0, 0.5, 1.0]])
            .unwrap();
        let e = sym_eigen(&a).unwrap();
        for j in 0..3 {
            let col = e.eigenvectors.col(j);
            let big = col.iter().copied().fold(0.0_f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(sym_eigen(&rect), Err(Error::Shape(_))));
        let asym = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&asym), Err(Error::Asymmetric { .. })));
        let mut nan = DenseMatrix::identity(2);
        nan[(0, 1)] = f64::NAN;
        assert!(matches!(sym_eigen(&nan), Err(Error::NonFinite(_))));
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eigen(&DenseMatrix::zeros(4, 4)).unwrap();
        assert!(e.eigenvalues.iter().all(|&v| v == 0.0));
        assert!(e.eigenvectors.orthonormality_defect() < 1e-15);
    }
}
