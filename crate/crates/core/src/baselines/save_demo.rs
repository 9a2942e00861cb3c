use serde::{Deserialize, Serialize};

use super::{save, sir, SliceSpec};
use crate::error::{Error, Result};
use crate::esgop::{default_sigma_theta, run_algorithm1, EsgopConfig};
use crate::metrics::subspace_distance;
use crate::model::{generate, presets, DesignDistribution};
use crate::numkit::{DenseMatrix, RngStream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaveDemoOptions {
    /// Sample size for the estimators.
    pub n: usize,
    /// Sample size for the conditional second-moment check.
    pub n_moment: usize,
    pub y_grid: Vec<f64>,
    pub slices: SliceSpec,
    pub h: f64,
    pub m: usize,
    pub seed: u64,
}

impl Default for SaveDemoOptions {
    fn default() -> Self {
        Self {
            n: 200_000,
            n_moment: 1_000_000,
            y_grid: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            slices: SliceSpec::default(),
            h: 1.0,
            m: 15,
            seed: 0,
        }
    }
}

/// `E[XXᵀ | Y ≥ y]` entries at one threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub y: f64,
    pub count: usize,
    pub e11: f64,
    pub e12: f64,
    pub e22: f64,
    /// Largest absolute entry of `E[XXᵀ | Y ≥ y] − I`.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaveDemoReport {
    pub n: usize,
    pub save_op_norm: f64,
    pub sir_op_norm: f64,
    pub esgop_procrustes: f64,
    pub esgop_sin_theta: f64,
    pub identity_checks: Vec<IdentityCheck>,
    pub max_identity_deviation: f64,
}

/// Runs SAVE, SIR and the smoothed-gradient estimator on the single-index
/// model whose link makes the SAVE matrix vanish.
pub fn save_counterexample_demo(opts: &SaveDemoOptions, stream: &mut RngStream) -> Result<SaveDemoReport> {
    if opts.n < 10_000 {
        return Err(Error::Parameter(format!("the demo needs n ≥ 10⁴, got {}", opts.n)));
    }
    let model = presets::save_demo();
    let design = DesignDistribution::standard_gaussian(2)?;
    let data = generate(&model, &design, opts.n, stream)?;
    let save_est = save(&data, opts.slices, 1)?;
    let sir_est = sir(&data, opts.slices, 1)?;
    let cfg = EsgopConfig::new(opts.h, default_sigma_theta(opts.h, 2, None)?, opts.m, 1, opts.seed);
    let est = run_algorithm1(&data, &design, &cfg)?;
    let dist = subspace_distance(&est.u_hat, model.u())?;

    let big = generate(&model, &design, opts.n_moment.max(1), stream)?;
    let identity_checks: Vec<IdentityCheck> = opts
        .y_grid
        .iter()
        .map(|&y| conditional_second_moment(big.x(), big.y(), y))
        .collect();
    let max_identity_deviation = identity_checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    Ok(SaveDemoReport {
        n: opts.n,
        save_op_norm: save_est.operator_norm(),
        sir_op_norm: sir_est.operator_norm(),
        esgop_procrustes: dist.procrustes,
        esgop_sin_theta: dist.sin_theta,
        identity_checks,
        max_identity_deviation,
    })
}

fn conditional_second_moment(x: &DenseMatrix, y: &[f64], thr: f64) -> IdentityCheck {
    let (mut s11, mut s12, mut s22, mut count) = (0.0, 0.0, 0.0, 0usize);
    for (i, &yi) in y.iter().enumerate() {
        if yi >= thr {
            let (a, b) = (x[(i, 0)], x[(i, 1)]);
            s11 += a * a;
            s12 += a * b;
            s22 += b * b;
            count += 1;
        }
    }
    let c = count.max(1) as f64;
    let (e11, e12, e22) = (s11 / c, s12 / c, s22 / c);
    let max_deviation = if count == 0 {
        f64::INFINITY
    } else {
        (e11 - 1.0).abs().max(e12.abs()).max((e22 - 1.0).abs())
    };
    IdentityCheck {
        y: thr,
        count,
        e11,
        e12,
        e22,
        max_deviation,
    }
}
