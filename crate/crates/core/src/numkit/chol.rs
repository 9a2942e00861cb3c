use super::matrix::{dot, norm, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: DenseMatrix,
}

impl Cholesky {
    /// Factors a symmetric positive-definite matrix. Pivots below
    /// `rel_tol · max(diag)` are reported as a conditioning error.
    pub fn new(a: &DenseMatrix, rel_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("matrix passed to Cholesky".into()));
        }
        let n = a.rows();
        let max_diag = (0..n).map(|i| a[(i, i)]).fold(0.0_f64, f64::max);
        let floor = rel_tol * max_diag;
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for p in 0..j {
                d -= l[(j, p)] * l[(j, p)];
            }
            if !(d > floor) || d <= 0.0 {
                return Err(Error::Conditioning(format!(
                    "pivot {j} is {d:e} (floor {floor:e})"
                )));
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for p in 0..j {
                    s -= l[(i, p)] * l[(j, p)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in 0..i {
                s -= self.l[(i, p)] * y[p];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ x = y`.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for p in (i + 1)..n {
                s -= self.l[(p, i)] * x[p];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &[f64]) -> DenseVector {
        DenseVector::from(self.backward(&self.forward(b)))
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim()).map(|i| self.l[(i, i)].ln()).sum::<f64>()
    }
}

/// Orthonormal basis of the orthogonal complement of the columns of `u`,
/// built by Gram–Schmidt against `u` padded with the supplied candidate
/// columns. `u` must have orthonormal columns.
pub fn orthonormal_complement(u: &DenseMatrix, candidates: &DenseMatrix) -> Result<DenseMatrix> {
    let (d, k) = u.shape();
    if candidates.rows() != d {
        return Err(Error::Shape("candidate columns have wrong length".into()));
    }
    let mut basis: Vec<Vec<f64>> = (0..k).map(|j| u.col(j).to_vec()).collect();
    let mut out = Vec::with_capacity(d - k);
    for c in 0..candidates.cols() {
        if out.len() == d - k {
            break;
        }
        let mut v = candidates.col(c).to_vec();
        let start = norm(&v);
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&v, b);
                for (x, &y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let len = norm(&v);
        if len > 1e-6 * start.max(f64::MIN_POSITIVE) {
            v.iter_mut().for_each(|x| *x /= len);
            basis.push(v.clone());
            out.push(DenseVector::from(v));
        }
    }
    if out.len() != d - k {
        return Err(Error::Conditioning(
            "candidate columns do not span the complement".into(),
        ));
    }
    if out.is_empty() {
        return Ok(DenseMatrix::zeros(d, 0));
    }
    DenseMatrix::from_columns(&out)
}
