//! Inverse- and forward-regression baselines.

mod egop;
mod inverse;
mod save_demo;

pub use egop::{egop, EgopOptions};
pub use inverse::{save, save_with_form, sir, SaveForm, SliceSpec};
pub use save_demo::{save_counterexample_demo, IdentityCheck, SaveDemoOptions, SaveDemoReport};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numkit::{sym_eigen, DenseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Sir,
    Save,
    Egop,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineEstimate {
    pub method: BaselineMethod,
    pub m_hat: DenseMatrix,
    pub u_hat: DenseMatrix,
    pub eigenvalues: Vec<f64>,
    /// Local fits skipped as singular (EGOP only).
    pub skipped: usize,
    /// Evaluation points used (EGOP only).
    pub eval_points: usize,
}

impl BaselineEstimate {
    pub fn operator_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Mirrors the upper triangle onto the lower one.
pub(crate) fn symmetrize_upper(m: &mut DenseMatrix) {
    let d = m.rows();
    for c in 0..d {
        for r in (c + 1)..d {
            m[(r, c)] = m[(c, r)];
        }
    }
}

pub(crate) fn finish(method: BaselineMethod, m_hat: DenseMatrix, k: usize, skipped: usize, eval_points: usize) -> Result<BaselineEstimate> {
    let eig = sym_eigen(&m_hat)?;
    Ok(BaselineEstimate {
        method,
        u_hat: eig.top(k),
        eigenvalues: eig.eigenvalues,
        m_hat,
        skipped,
        eval_points,
    })
}
