//! Thin SVD by one-sided (Hestenes) Jacobi rotations.

use super::matrix::{dot, norm, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// `A = U diag(σ) Vᵀ` with `U: m x r`, `V: n x r`, `r = min(m, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThinSvd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

pub fn thin_svd(a: &DenseMatrix) -> Result<ThinSvd> {
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix passed to thin_svd".into()));
    }
    if a.rows() >= a.cols() {
        tall_svd(a)
    } else {
        let t = tall_svd(&a.transpose())?;
        Ok(ThinSvd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        })
    }
}

/// Largest singular value.
pub fn operator_norm(a: &DenseMatrix) -> Result<f64> {
    Ok(thin_svd(a)?.singular_values.first().copied().unwrap_or(0.0))
}

fn tall_svd(a: &DenseMatrix) -> Result<ThinSvd> {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DenseMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(w.col(p), w.col(p));
                let beta = dot(w.col(q), w.col(q));
                let gamma = dot(w.col(p), w.col(q));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| norm(w.col(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let scale = norms.iter().copied().fold(0.0_f64, f64::max);
    let tiny = scale * (m.max(n) as f64) * f64::EPSILON;

    let mut u = DenseMatrix::zeros(m, n);
    let mut vs = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = norms[src];
        vs.col_mut(dst).copy_from_slice(v.col(src));
        if s > tiny {
            for (o, &x) in u.col_mut(dst).iter_mut().zip(w.col(src)) {
                *o = x / s;
            }
            sigma.push(s);
        } else {
            sigma.push(0.0);
            deficient.push(dst);
        }
    }
    complete_columns(&mut u, &deficient);
    Ok(ThinSvd {
        u,
        singular_values: sigma,
        v: vs,
    })
}

fn rotate_columns(w: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let m = w.rows();
    for i in 0..m {
        let wp = w[(i, p)];
        let wq = w[(i, q)];
        w[(i, p)] = c * wp - s * wq;
        w[(i, q)] = s * wp + c * wq;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to the
/// remaining columns, drawing candidates from the standard basis.
pub(crate) fn complete_columns(u: &mut DenseMatrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0usize;
    for &slot in missing {
        while candidate < m {
            let mut e = vec![0.0; m];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &j in &filled {
                    let proj = dot(&e, u.col(j));
                    for (x, &b) in e.iter_mut().zip(u.col(j)) {
                        *x -= proj * b;
                    }
                }
            }
            let len = norm(&e);
            if len > 1e-8 {
                for (o, x) in u.col_mut(slot).iter_mut().zip(&e) {
                    *o = x / len;
                }
                filled.push(slot);
                break;
            }
        }
    }
}
