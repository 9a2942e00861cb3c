//! Monte-Carlo estimates of the moment quantities that enter the error bound.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esgop::EsgopConfig;
use crate::model::{
    log_density_ratio, true_smoothed_gradient, DesignDistribution, DesignFamily, McBudget, MultiIndexModel,
};
use crate::numkit::{sample_gaussian, sym_eigen, DenseMatrix, DenseVector, RngStream};

pub const MIN_MC_BUDGET: usize = 10_000;
/// `θ` draws used for the `λ_k(M̄)` estimate.
pub const THETA_DRAWS: usize = 1_000;
const JACKKNIFE_BLOCKS: usize = 20;
/// Relative jackknife error above which a power mean is flagged unstable.
const UNSTABLE_REL_SE: f64 = 0.25;
/// Largest single-term share of the sum above which the mean is flagged unstable.
const UNSTABLE_MAX_SHARE: f64 = 0.2;
/// Per-`θ` budget for links without a closed-form smoothed gradient.
const CUSTOM_LINK_BUDGET: usize = 10_000;

/// `(E Vᵖ)^{1/p}` with its jackknife standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerMean {
    pub value: f64,
    pub std_error: f64,
    pub unstable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostics {
    /// `(E ρ_h(X; 0)⁵)^{1/5}`.
    pub mu_rho_hat: PowerMean,
    /// Closed form when the design is isotropic Gaussian.
    pub mu_rho_closed_form: Option<f64>,
    /// `(E f(UᵀX)⁶)^{1/6}`.
    pub mu_f_hat: PowerMean,
    /// `(E_θ ‖∇̄_h f(θ)‖⁴)^{1/4}`, `θ ~ N(0, σθ² I)`.
    pub mu_delta_hat: PowerMean,
    /// `λ_k(E_θ β_h(θ)β_h(θ)ᵀ)`.
    pub lambda_k_bar_hat: f64,
    pub lambda_k_bar_se: f64,
    pub mc_budget: usize,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if mx == f64::NEG_INFINITY || mx.is_nan() {
        return mx;
    }
    mx + v.iter().map(|x| (x - mx).exp()).sum::<f64>().ln()
}

/// `(mean exp(tᵢ))^{1/p}` from log-terms `tᵢ = p ln Vᵢ`, accumulated in log
/// space, with a block-jackknife standard error.
pub fn power_mean_from_log_terms(log_terms: &[f64], p: f64) -> PowerMean {
    let n = log_terms.len();
    let total = log_sum_exp(log_terms);
    let value = ((total - (n as f64).ln()) / p).exp();
    if !value.is_finite() || n < JACKKNIFE_BLOCKS {
        return PowerMean {
            value,
            std_error: f64::NAN,
            unstable: !value.is_finite(),
        };
    }
    let mx = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_share = if total == f64::NEG_INFINITY { 0.0 } else { (mx - total).exp() };
    let block = n / JACKKNIFE_BLOCKS;
    let block_sums: Vec<f64> = (0..JACKKNIFE_BLOCKS)
        .map(|b| {
            let end = if b + 1 == JACKKNIFE_BLOCKS { n } else { (b + 1) * block };
            log_sum_exp(&log_terms[b * block..end])
        })
        .collect();
    let loo: Vec<f64> = (0..JACKKNIFE_BLOCKS)
        .map(|b| {
            let end = if b + 1 == JACKKNIFE_BLOCKS { n } else { (b + 1) * block };
            let rest: Vec<f64> = block_sums
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != b)
                .map(|(_, &s)| s)
                .collect();
            let count = (n - (end - b * block)) as f64;
            ((log_sum_exp(&rest) - count.ln()) / p).exp()
        })
        .collect();
    let bbar = loo.iter().sum::<f64>() / JACKKNIFE_BLOCKS as f64;
    let g = JACKKNIFE_BLOCKS as f64;
    let se = ((g - 1.0) / g * loo.iter().map(|v| (v - bbar).powi(2)).sum::<f64>()).sqrt();
    let unstable = !se.is_finite() || se > UNSTABLE_REL_SE * value || max_share > UNSTABLE_MAX_SHARE;
    PowerMean {
        value,
        std_error: se,
        unstable,
    }
}

fn abs_log(v: f64) -> f64 {
    let a = v.abs();
    if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        a.ln()
    }
}

/// Monte-Carlo moment diagnostics for a model, design and configuration.
pub fn estimate_moments(
    model: &MultiIndexModel,
    design: &DesignDistribution,
    cfg: &EsgopConfig,
    mc_budget: usize,
    stream: &mut RngStream,
) -> Result<MomentDiagnostics> {
    if mc_budget < MIN_MC_BUDGET {
        return Err(Error::Parameter(format!("mc_budget must be at least {MIN_MC_BUDGET}, got {mc_budget}")));
    }
    if design.dim() != model.d() {
        return Err(Error::Shape("design and model dimensions differ".into()));
    }
    let d = model.d();
    let zero = vec![0.0; d];
    let x = design.sample(stream, mc_budget);
    let mut row = vec![0.0; d];
    let mut rho_terms = Vec::with_capacity(mc_budget);
    let mut f_terms = Vec::with_capacity(mc_budget);
    for i in 0..mc_budget {
        x.row_into(i, &mut row);
        if let Some(l) = log_density_ratio(design, cfg.h, &zero, &row) {
            rho_terms.push(5.0 * l);
        }
        f_terms.push(6.0 * abs_log(model.mean_response(&row)));
    }
    let mu_rho_hat = power_mean_from_log_terms(&rho_terms, 5.0);
    let mu_f_hat = power_mean_from_log_terms(&f_terms, 6.0);
    let mu_rho_closed_form = match design.family() {
        DesignFamily::Gaussian { sigma } => Some(crate::model::moment_mu_rho_closed_form(*sigma, cfg.h, d)?),
        _ => None,
    };

    let thetas = sample_gaussian(stream, THETA_DRAWS, d, &DenseVector::zeros(d), cfg.sigma_theta)?;
    let seed = stream.seed() ^ 0x9e37_79b9_7f4a_7c15;
    let mut betas = Vec::with_capacity(THETA_DRAWS);
    let mut delta_terms = Vec::with_capacity(THETA_DRAWS);
    for j in 0..THETA_DRAWS {
        let budget = McBudget {
            samples: CUSTOM_LINK_BUDGET,
            seed,
            stream_id: j as u64,
        };
        let beta = true_smoothed_gradient(model, cfg.h, &thetas.row(j), Some(&budget))?.beta;
        delta_terms.push(4.0 * abs_log(beta.norm()));
        betas.push(beta);
    }
    let mu_delta_hat = power_mean_from_log_terms(&delta_terms, 4.0);
    let k = model.k();
    let lambda_k = |bs: &[DenseVector]| -> Result<f64> {
        let mut m = DenseMatrix::zeros(d, d);
        for b in bs {
            m.add_outer(1.0 / bs.len() as f64, b, b);
        }
        for a in 0..d {
            for c in 0..a {
                let s = 0.5 * (m[(a, c)] + m[(c, a)]);
                m[(a, c)] = s;
                m[(c, a)] = s;
            }
        }
        Ok(sym_eigen(&m)?.eigenvalues[k - 1])
    };
    let lambda_k_bar_hat = lambda_k(&betas)?;
    let blocks = 10;
    let size = THETA_DRAWS / blocks;
    let loo: Vec<f64> = (0..blocks)
        .map(|b| {
            let rest: Vec<DenseVector> = betas
                .iter()
                .enumerate()
                .filter(|(i, _)| i / size != b)
                .map(|(_, v)| v.clone())
                .collect();
            lambda_k(&rest)
        })
        .collect::<Result<_>>()?;
    let mean = loo.iter().sum::<f64>() / blocks as f64;
    let g = blocks as f64;
    let lambda_k_bar_se = ((g - 1.0) / g * loo.iter().map(|v| (v - mean).powi(2)).sum::<f64>()).sqrt();

    Ok(MomentDiagnostics {
        mu_rho_hat,
        mu_rho_closed_form,
        mu_f_hat,
        mu_delta_hat,
        lambda_k_bar_hat,
        lambda_k_bar_se,
        mc_budget,
    })
}
