//! Analytic and Monte-Carlo reference values used as test oracles and
//! diagnostics.

use rand_distr::{Distribution, StandardNormal};

use super::link::{LinkFunction, LinkKind, Polynomial};
use super::MultiIndexModel;
use crate::error::{Error, Result};
use crate::numkit::{sym_eigen, DenseMatrix, DenseVector, RngStream};

pub const DEFAULT_MC_BUDGET: usize = 1_000_000;

/// Monte-Carlo budget for links without a closed-form smoothed gradient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McBudget {
    pub samples: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl McBudget {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            stream_id: 0,
        }
    }
}

/// `β_h(θ)` with a per-coordinate standard error when it was simulated.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothedGradient {
    pub beta: DenseVector,
    pub std_error: Option<DenseVector>,
    pub samples: usize,
}

fn double_factorial_odd(q: u32) -> f64 {
    // (q − 1)!! for even q
    (1..q).step_by(2).map(f64::from).product()
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// `E[(w + hZ)^p]` for standard normal `Z`.
pub fn gaussian_power_mean(w: f64, h: f64, p: u32) -> f64 {
    (0..=p)
        .step_by(2)
        .map(|q| binomial(p, q) * w.powi((p - q) as i32) * h.powi(q as i32) * double_factorial_odd(q))
        .sum()
}

fn polynomial_smoothed_gradient(p: &Polynomial, h: f64, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.k];
    for t in &p.terms {
        for i in 0..p.k {
            let pi = t.powers[i];
            if pi == 0 {
                continue;
            }
            let mut v = t.coef * f64::from(pi);
            for (j, (&q, &x)) in t.powers.iter().zip(w).enumerate() {
                let e = if j == i { q - 1 } else { q };
                v *= gaussian_power_mean(x, h, e);
            }
            out[i] += v;
        }
    }
    out
}

/// Mean and covariance of simulated `k`-vectors `g(w + hZ)`.
fn simulate_link_gradient(
    link: &LinkFunction,
    h: f64,
    w: &[f64],
    budget: &McBudget,
) -> Result<(Vec<f64>, DenseMatrix)> {
    if budget.samples < 2 {
        return Err(Error::Parameter("Monte-Carlo budget needs at least 2 samples".into()));
    }
    let k = link.k();
    let use_stein = !link.has_gradient();
    if use_stein && !(h > 0.0) {
        return Err(Error::Parameter("score-form smoothing needs h > 0".into()));
    }
    let mut rng = RngStream::new(budget.seed, budget.stream_id);
    let mut mean = vec![0.0; k];
    let mut m2 = DenseMatrix::zeros(k, k);
    let mut z = vec![0.0; k];
    let mut pt = vec![0.0; k];
    let mut g = vec![0.0; k];
    let mut delta = vec![0.0; k];
    for s in 0..budget.samples {
        for i in 0..k {
            z[i] = StandardNormal.sample(&mut rng);
            pt[i] = w[i] + h * z[i];
        }
        if use_stein {
            // E[f(w + hZ) Z] / h = E[∇f(w + hZ)]
            let fv = link.evaluate(&pt);
            for i in 0..k {
                g[i] = fv * z[i] / h;
            }
        } else {
            link.gradient_into(&pt, &mut g);
        }
        let n = (s + 1) as f64;
        for i in 0..k {
            delta[i] = g[i] - mean[i];
            mean[i] += delta[i] / n;
        }
        for a in 0..k {
            for b in 0..k {
                m2[(a, b)] += delta[a] * (g[b] - mean[b]);
            }
        }
    }
    let cov = m2.scaled(1.0 / (budget.samples - 1) as f64);
    Ok((mean, cov))
}

/// `∇̄_h f(w) = E[∇f(w + hZ)]`, `Z ~ N(0, I_k)`, in index coordinates.
pub fn smoothed_link_gradient(
    link: &LinkFunction,
    h: f64,
    w: &[f64],
    mc: Option<&McBudget>,
) -> Result<Vec<f64>> {
    if w.len() != link.k() {
        return Err(Error::Shape(format!("point has length {}, link expects {}", w.len(), link.k())));
    }
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("smoothing radius must be >= 0, got {h}")));
    }
    match link.kind() {
        LinkKind::Linear(a) => Ok(a.clone()),
        LinkKind::Polynomial(p) => Ok(polynomial_smoothed_gradient(p, h, w)),
        LinkKind::Custom(c) => match mc {
            Some(b) => Ok(simulate_link_gradient(link, h, w, b)?.0),
            None => Err(Error::Capability(format!(
                "link '{}' has no closed-form smoothed gradient; supply a Monte-Carlo budget",
                c.name
            ))),
        },
    }
}

/// `β_h(θ) = U E_{Z~N(0,h²I)}[∇f(Uᵀ(θ + Z))]`.
pub fn true_smoothed_gradient(
    model: &MultiIndexModel,
    h: f64,
    theta: &[f64],
    mc: Option<&McBudget>,
) -> Result<SmoothedGradient> {
    let u = model.u();
    if theta.len() != u.rows() {
        return Err(Error::Shape(format!("theta has length {}, expected {}", theta.len(), u.rows())));
    }
    let w = u.t_mat_vec(theta)?;
    let link = model.link();
    if let LinkKind::Custom(c) = link.kind() {
        let Some(b) = mc else {
            return Err(Error::Capability(format!(
                "link '{}' has no closed-form smoothed gradient; supply a Monte-Carlo budget",
                c.name
            )));
        };
        if !(h >= 0.0 && h.is_finite()) {
            return Err(Error::Parameter(format!("smoothing radius must be >= 0, got {h}")));
        }
        let (mean, cov) = simulate_link_gradient(link, h, &w, b)?;
        let beta = u.mat_vec(&mean)?;
        // Var(βᵢ) = uᵢᵀ C uᵢ / N with uᵢ the i-th row of U
        let se: DenseVector = (0..u.rows())
            .map(|i| {
                let row = u.row(i);
                let cr = cov.mat_vec(&row).expect("k x k");
                (crate::numkit::dot(&row, &cr).max(0.0) / b.samples as f64).sqrt()
            })
            .collect();
        return Ok(SmoothedGradient {
            beta,
            std_error: Some(se),
            samples: b.samples,
        });
    }
    let g = smoothed_link_gradient(link, h, &w, None)?;
    Ok(SmoothedGradient {
        beta: u.mat_vec(&g)?,
        std_error: None,
        samples: 0,
    })
}

/// Monte-Carlo `E[∇f(Z)∇f(Z)ᵀ]` over `Z ~ N(0, I_k)`.
pub fn signal_matrix(link: &LinkFunction, mc_budget: usize, stream: &mut RngStream) -> Result<DenseMatrix> {
    if mc_budget == 0 {
        return Err(Error::Parameter("Monte-Carlo budget must be positive".into()));
    }
    if !link.has_gradient() {
        return Err(Error::Capability(format!("link '{}' has no gradient", link.name())));
    }
    let k = link.k();
    let mut acc = DenseMatrix::zeros(k, k);
    let mut z = vec![0.0; k];
    let mut g = vec![0.0; k];
    for _ in 0..mc_budget {
        z.iter_mut().for_each(|v| *v = StandardNormal.sample(&mut *stream));
        link.gradient_into(&z, &mut g);
        acc.add_outer(1.0, &g, &g);
    }
    let mut m = acc.scaled(1.0 / mc_budget as f64);
    for a in 0..k {
        for b in 0..a {
            let s = 0.5 * (m[(a, b)] + m[(b, a)]);
            m[(a, b)] = s;
            m[(b, a)] = s;
        }
    }
    Ok(m)
}

/// `τ = min_{‖η‖=1} E[(ηᵀ∇f(Z))²]`, the smallest eigenvalue of [`signal_matrix`].
pub fn minimum_signal_strength(model: &MultiIndexModel, mc_budget: usize, stream: &mut RngStream) -> Result<f64> {
    let m = signal_matrix(model.link(), mc_budget, stream)?;
    let eig = sym_eigen(&m)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0))
}

/// `(E ρ⁵)^{1/5}` for the design `N(0, σ²I_d)` against `N(θ, h²I_d)`:
/// `(5h⁸/σ⁸ − 4h¹⁰/σ¹⁰)^{−d/10}` when `h < √5 σ / 2`, else `+∞`.
pub fn moment_mu_rho_closed_form(sigma: f64, h: f64, d: usize) -> Result<f64> {
    if !(sigma > 0.0 && h > 0.0) {
        return Err(Error::Parameter(format!("need sigma > 0 and h > 0, got {sigma}, {h}")));
    }
    let r = h / sigma;
    if r >= 5f64.sqrt() / 2.0 {
        return Ok(f64::INFINITY);
    }
    let base = 5.0 * r.powi(8) - 4.0 * r.powi(10);
    Ok(base.powf(-(d as f64) / 10.0))
}
