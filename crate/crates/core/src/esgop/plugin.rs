//! Pipeline with the design density replaced by a fitted one.

use serde::{Deserialize, Serialize};

use super::config::EsgopConfig;
use super::pipeline::{assemble_m_hat, compute_pairs, finish, EstimateDiagnostics, GradientForm, SubspaceEstimate};
use crate::error::{Error, Result};
use crate::model::{log_density_ratio, Dataset, DesignDistribution, MarginalDensity};
use crate::numkit::{Cholesky, DenseMatrix};

const LN_2PI: f64 = 1.837_877_066_409_345_5;
/// Rows of the labeled data used to evaluate the ratio diagnostics.
const DIAGNOSTIC_ROWS: usize = 2_000;
/// `a_N^{n/4m}` above this sets the warning flag.
const AMPLIFICATION_WARN: f64 = 10.0;

/// `N(μ̂, Σ̂)` fitted by sample mean and covariance.
#[derive(Clone, Debug)]
pub struct GaussianFitDensity {
    mean: Vec<f64>,
    chol: Cholesky,
    log_norm: f64,
}

impl GaussianFitDensity {
    pub fn fit(sample: &DenseMatrix) -> Result<Self> {
        let (n, d) = sample.shape();
        if n <= d {
            return Err(Error::Estimation(format!(
                "Gaussian fit needs more than d = {d} unlabeled points, got {n}"
            )));
        }
        let mean: Vec<f64> = (0..d).map(|j| sample.col(j).iter().sum::<f64>() / n as f64).collect();
        let mut cov = DenseMatrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let (ca, cb) = (sample.col(a), sample.col(b));
                let s: f64 = ca.iter().zip(cb).map(|(x, y)| (x - mean[a]) * (y - mean[b])).sum();
                let v = s / (n - 1) as f64;
                cov[(a, b)] = v;
                cov[(b, a)] = v;
            }
        }
        let chol = Cholesky::new(&cov, 1e-12)
            .map_err(|e| Error::Estimation(format!("degenerate covariance fit: {e}")))?;
        let log_norm = -0.5 * (d as f64 * LN_2PI + chol.log_det());
        Ok(Self { mean, chol, log_norm })
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn covariance(&self) -> DenseMatrix {
        let l = self.chol.factor();
        l.matmul(&l.transpose()).expect("square")
    }
}

impl MarginalDensity for GaussianFitDensity {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(a, b)| a - b).collect();
        let z = self.chol.forward(&centered);
        self.log_norm - 0.5 * z.iter().map(|v| v * v).sum::<f64>()
    }
}

/// How `ρ̂_N` is produced.
#[derive(Clone, Debug)]
pub enum RatioEstimatorSpec {
    /// Gaussian family fitted to the unlabeled sample. When a reference
    /// design is given the diagnostics compare against its exact ratio;
    /// otherwise they compare fits on the two halves of the unlabeled sample.
    GaussianFit { reference: Option<DesignDistribution> },
    /// Use this density as `p̂` directly.
    Injected(DesignDistribution),
}

/// Monte-Carlo versions of `a_N = E[(ρ̂/ρ)⁴]` and `b_N = E[(ρ̂ − ρ)²]`,
/// maxima over the `m` locations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PluginDiagnostics {
    pub estimator: String,
    /// `true_design`, `split_half` or `injected`.
    pub reference: String,
    pub unlabeled_n: usize,
    pub a_n: f64,
    pub log_a_n: f64,
    pub b_n: f64,
    /// `(n / 4m) ln a_N`, the log of the variance inflation factor.
    pub log_amplification: f64,
    pub warning: bool,
}

fn log_mean_exp(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY {
        return mx;
    }
    mx + (v.iter().map(|x| (x - mx).exp()).sum::<f64>() / v.len() as f64).ln()
}

fn ratio_diagnostics(
    data: &Dataset,
    fitted: &dyn MarginalDensity,
    reference: &dyn MarginalDensity,
    thetas: &[&[f64]],
    h: f64,
) -> (f64, f64) {
    let rows = data.n().min(DIAGNOSTIC_ROWS);
    let mut x = vec![0.0; data.d()];
    let (mut log_a, mut b) = (f64::NEG_INFINITY, 0.0_f64);
    for theta in thetas {
        let mut fourth = Vec::with_capacity(rows);
        let mut sq = 0.0;
        let mut used = 0usize;
        for i in 0..rows {
            data.x().row_into(i, &mut x);
            let (Some(lf), Some(lr)) = (
                log_density_ratio(fitted, h, theta, &x),
                log_density_ratio(reference, h, theta, &x),
            ) else {
                continue;
            };
            fourth.push(4.0 * (lf - lr));
            sq += (lf.exp() - lr.exp()).powi(2);
            used += 1;
        }
        if used > 0 {
            log_a = log_a.max(log_mean_exp(&fourth));
            b = b.max(sq / used as f64);
        }
    }
    (log_a, b)
}

/// Algorithm 1 with `ρ` replaced by the ratio estimator's `ρ̂_N`.
pub fn run_plugin_ratio(
    data: &Dataset,
    unlabeled: &DenseMatrix,
    cfg: &EsgopConfig,
    spec: &RatioEstimatorSpec,
) -> Result<SubspaceEstimate> {
    let (pairs, plugin) = match spec {
        RatioEstimatorSpec::Injected(design) => {
            let pairs = compute_pairs(data, design, cfg, GradientForm::Stein)?;
            let diag = PluginDiagnostics {
                estimator: "injected".into(),
                reference: "injected".into(),
                unlabeled_n: unlabeled.rows(),
                a_n: 1.0,
                ..Default::default()
            };
            (pairs, diag)
        }
        RatioEstimatorSpec::GaussianFit { reference } => {
            if unlabeled.rows() == 0 {
                return Err(Error::Estimation("unlabeled sample is empty".into()));
            }
            if unlabeled.cols() != data.d() {
                return Err(Error::Shape(format!(
                    "unlabeled sample has {} columns, data has {}",
                    unlabeled.cols(),
                    data.d()
                )));
            }
            let fitted = GaussianFitDensity::fit(unlabeled)?;
            let pairs = compute_pairs(data, &fitted, cfg, GradientForm::Stein)?;
            let thetas: Vec<&[f64]> = pairs.iter().map(|p| &p.theta[..]).collect();
            let (log_a, b, label) = match reference {
                Some(r) => {
                    let (la, b) = ratio_diagnostics(data, &fitted, r, &thetas, cfg.h);
                    (la, b, "true_design")
                }
                None => {
                    let half = unlabeled.rows() / 2;
                    let a_idx: Vec<usize> = (0..half).collect();
                    let b_idx: Vec<usize> = (half..unlabeled.rows()).collect();
                    let fa = GaussianFitDensity::fit(&unlabeled.select_rows(&a_idx))?;
                    let fb = GaussianFitDensity::fit(&unlabeled.select_rows(&b_idx))?;
                    let (la, b) = ratio_diagnostics(data, &fa, &fb, &thetas, cfg.h);
                    (la, b, "split_half")
                }
            };
            let log_amp = log_a * data.n() as f64 / (4 * cfg.m) as f64;
            let diag = PluginDiagnostics {
                estimator: "gaussian_fit".into(),
                reference: label.into(),
                unlabeled_n: unlabeled.rows(),
                a_n: log_a.exp(),
                log_a_n: log_a,
                b_n: b,
                log_amplification: log_amp,
                warning: !(log_amp <= AMPLIFICATION_WARN.ln()),
            };
            (pairs, diag)
        }
    };
    let m_hat = assemble_m_hat(&pairs)?;
    let mut d = EstimateDiagnostics::default();
    if plugin.warning {
        d.warnings.push(format!(
            "ratio fit is poor: a_N = {:.4}, variance inflation exp({:.1})",
            plugin.a_n, plugin.log_amplification
        ));
    }
    d.plugin = Some(plugin);
    finish(m_hat, pairs, data, cfg, d)
}
