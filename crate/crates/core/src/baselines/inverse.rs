use serde::{Deserialize, Serialize};

use super::{finish, symmetrize_upper, BaselineEstimate, BaselineMethod};
use crate::error::{Error, Result};
use crate::model::Dataset;
use crate::numkit::{Cholesky, DenseMatrix};

/// Equal-count slicing on the order of `Y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub n_slices: usize,
}

impl Default for SliceSpec {
    fn default() -> Self {
        Self { n_slices: 10 }
    }
}

impl SliceSpec {
    /// Row indices of each slice. Ties in `Y` are ordered by row index.
    pub fn slices(&self, y: &[f64]) -> Result<Vec<Vec<usize>>> {
        let h = self.n_slices;
        if h == 0 {
            return Err(Error::Parameter("need at least one slice".into()));
        }
        if y.len() < 2 * h {
            return Err(Error::Parameter(format!("{} slices need n ≥ {}, got {}", h, 2 * h, y.len())));
        }
        let mut order: Vec<usize> = (0..y.len()).collect();
        order.sort_by(|&a, &b| y[a].total_cmp(&y[b]).then(a.cmp(&b)));
        let (base, extra) = (y.len() / h, y.len() % h);
        let mut out = Vec::with_capacity(h);
        let mut start = 0;
        for s in 0..h {
            let len = base + usize::from(s < extra);
            out.push(order[start..start + len].to_vec());
            start += len;
        }
        Ok(out)
    }
}

/// Which within-slice matrix SAVE compares against the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SaveForm {
    /// `E[(E[ZZᵀ|Y] − I)²]`.
    #[default]
    SecondMoment,
    /// `E[(I − Cov[Z|Y])²]`.
    Covariance,
}

/// Centered and whitened covariates `Z = L⁻¹(X − μ̂)` with `Σ̂ + εI = LLᵀ`.
struct Whitened {
    z: DenseMatrix,
    chol: Cholesky,
}

fn whiten(data: &Dataset) -> Result<Whitened> {
    let (n, d) = (data.n(), data.d());
    let x = data.x();
    let mean: Vec<f64> = (0..d).map(|j| x.col(j).iter().sum::<f64>() / n as f64).collect();
    let mut cov = DenseMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let s: f64 = x.col(a).iter().zip(x.col(b)).map(|(p, q)| (p - mean[a]) * (q - mean[b])).sum();
            cov[(a, b)] = s / n as f64;
        }
    }
    symmetrize_upper(&mut cov);
    let ridge = 1e-8 * cov.trace() / d as f64;
    for a in 0..d {
        cov[(a, a)] += ridge;
    }
    let chol = Cholesky::new(&cov, 1e-10)
        .map_err(|e| Error::Conditioning(format!("sample covariance is singular: {e}")))?;
    let mut z = DenseMatrix::zeros(n, d);
    let mut row = vec![0.0; d];
    for i in 0..n {
        x.row_into(i, &mut row);
        row.iter_mut().zip(&mean).for_each(|(v, m)| *v -= m);
        z.set_row(i, &chol.forward(&row));
    }
    Ok(Whitened { z, chol })
}

/// `L⁻ᵀ M L⁻¹`, mapping a whitened-coordinate kernel back to `X` coordinates.
fn back_transform(m: &DenseMatrix, chol: &Cholesky) -> DenseMatrix {
    let d = m.rows();
    let mut linv = DenseMatrix::zeros(d, d);
    for j in 0..d {
        let e: Vec<f64> = (0..d).map(|i| f64::from(u8::from(i == j))).collect();
        linv.col_mut(j).copy_from_slice(&chol.forward(&e));
    }
    let mut out = linv.t_matmul(&m.matmul(&linv).expect("square")).expect("square");
    symmetrize_upper(&mut out);
    out
}

fn slice_moments(z: &DenseMatrix, idx: &[usize]) -> (Vec<f64>, DenseMatrix) {
    let d = z.cols();
    let mut mean = vec![0.0; d];
    let mut second = DenseMatrix::zeros(d, d);
    let mut row = vec![0.0; d];
    for &i in idx {
        z.row_into(i, &mut row);
        mean.iter_mut().zip(&row).for_each(|(m, v)| *m += v);
        second.add_outer(1.0, &row, &row);
    }
    let k = idx.len() as f64;
    mean.iter_mut().for_each(|m| *m /= k);
    (mean, second.scaled(1.0 / k))
}

/// Sliced inverse regression: `Cov[E[Z|Y]]` from slice means.
pub fn sir(data: &Dataset, slices: SliceSpec, k: usize) -> Result<BaselineEstimate> {
    check_k(data, k)?;
    let groups = slices.slices(data.y())?;
    let w = whiten(data)?;
    let d = data.d();
    let mut m = DenseMatrix::zeros(d, d);
    for g in &groups {
        let (mean, _) = slice_moments(&w.z, g);
        m.add_outer(g.len() as f64 / data.n() as f64, &mean, &mean);
    }
    symmetrize_upper(&mut m);
    finish(BaselineMethod::Sir, back_transform(&m, &w.chol), k, 0, 0)
}

/// Sliced average variance estimation in the default second-moment form.
pub fn save(data: &Dataset, slices: SliceSpec, k: usize) -> Result<BaselineEstimate> {
    save_with_form(data, slices, k, SaveForm::SecondMoment)
}

pub fn save_with_form(data: &Dataset, slices: SliceSpec, k: usize, form: SaveForm) -> Result<BaselineEstimate> {
    check_k(data, k)?;
    let groups = slices.slices(data.y())?;
    let w = whiten(data)?;
    let d = data.d();
    let mut m = DenseMatrix::zeros(d, d);
    for g in &groups {
        let (mean, second) = slice_moments(&w.z, g);
        let mut dev = second;
        if form == SaveForm::Covariance {
            dev.add_outer(-1.0, &mean, &mean);
        }
        for a in 0..d {
            dev[(a, a)] -= 1.0;
        }
        symmetrize_upper(&mut dev);
        let sq = dev.matmul(&dev)?;
        m = m.add(&sq.scaled(g.len() as f64 / data.n() as f64))?;
    }
    symmetrize_upper(&mut m);
    finish(BaselineMethod::Save, back_transform(&m, &w.chol), k, 0, 0)
}

fn check_k(data: &Dataset, k: usize) -> Result<()> {
    if k == 0 || k > data.d() {
        return Err(Error::Parameter(format!("k must lie in 1..={}, got {k}", data.d())));
    }
    Ok(())
}
