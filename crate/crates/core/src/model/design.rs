use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::numkit::{sample_cauchy, squared_distance, DenseMatrix, RngStream};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Anything with a log-density on `ℝᵈ`: the importance ratio only needs this.
pub trait MarginalDensity: Send + Sync {
    fn dim(&self) -> usize;
    /// `log p(x)`; `-∞` outside the support.
    fn log_density(&self, x: &[f64]) -> f64;
    /// Whether the support is a proper subset of `ℝᵈ`.
    fn has_bounded_support(&self) -> bool {
        false
    }
}

pub type SamplerFn = Arc<dyn Fn(&mut RngStream, usize) -> DenseMatrix + Send + Sync>;
pub type LogDensityFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct CustomDesign {
    pub name: String,
    pub sampler: SamplerFn,
    pub log_density: LogDensityFn,
}

impl fmt::Debug for CustomDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDesign").field("name", &self.name).finish()
    }
}

#[derive(Clone, Debug)]
pub enum DesignFamily {
    /// `N(0, σ² I_d)`.
    Gaussian { sigma: f64 },
    /// Independent standard Cauchy coordinates.
    Cauchy,
    /// `N(0, I_d)` conditioned on `‖x‖ ≤ radius`.
    TruncatedGaussian { radius: f64 },
    Custom(CustomDesign),
}

/// Covariate distribution `P_X` with sampler and log-density.
#[derive(Clone, Debug)]
pub struct DesignDistribution {
    d: usize,
    family: DesignFamily,
    log_norm: f64,
}

impl DesignDistribution {
    pub fn gaussian(d: usize, sigma: f64) -> Result<Self> {
        check_dim(d)?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("design sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            d,
            family: DesignFamily::Gaussian { sigma },
            log_norm: -0.5 * d as f64 * (LN_2PI + 2.0 * sigma.ln()),
        })
    }

    pub fn standard_gaussian(d: usize) -> Result<Self> {
        Self::gaussian(d, 1.0)
    }

    pub fn cauchy(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            d,
            family: DesignFamily::Cauchy,
            log_norm: -(d as f64) * PI.ln(),
        })
    }

    pub fn truncated_gaussian(d: usize, radius: f64) -> Result<Self> {
        check_dim(d)?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Parameter(format!("truncation radius must be positive, got {radius}")));
        }
        // P(‖Z‖ ≤ K) = P(χ²_d ≤ K²)
        let mass = gamma_lr(d as f64 / 2.0, radius * radius / 2.0);
        if !(mass > 0.0) {
            return Err(Error::Parameter(format!(
                "truncation radius {radius} leaves no mass in d = {d}"
            )));
        }
        Ok(Self {
            d,
            family: DesignFamily::TruncatedGaussian { radius },
            log_norm: -0.5 * d as f64 * LN_2PI - mass.ln(),
        })
    }

    pub fn custom(
        d: usize,
        name: impl Into<String>,
        sampler: SamplerFn,
        log_density: LogDensityFn,
    ) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            d,
            family: DesignFamily::Custom(CustomDesign {
                name: name.into(),
                sampler,
                log_density,
            }),
            log_norm: 0.0,
        })
    }

    pub fn family(&self) -> &DesignFamily {
        &self.family
    }

    pub fn name(&self) -> String {
        match &self.family {
            DesignFamily::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            DesignFamily::Cauchy => "cauchy".into(),
            DesignFamily::TruncatedGaussian { radius } => format!("truncated_gaussian(K={radius})"),
            DesignFamily::Custom(c) => c.name.clone(),
        }
    }

    pub fn has_bounded_support(&self) -> bool {
        matches!(self.family, DesignFamily::TruncatedGaussian { .. })
    }

    pub fn in_support(&self, x: &[f64]) -> bool {
        self.log_density(x) > f64::NEG_INFINITY
    }

    /// `n x d` i.i.d. draws.
    pub fn sample(&self, stream: &mut RngStream, n: usize) -> DenseMatrix {
        let d = self.d;
        match &self.family {
            DesignFamily::Gaussian { sigma } => {
                let mut x = DenseMatrix::zeros(n, d);
                for i in 0..n {
                    for j in 0..d {
                        let z: f64 = StandardNormal.sample(stream);
                        x[(i, j)] = sigma * z;
                    }
                }
                x
            }
            DesignFamily::Cauchy => sample_cauchy(stream, n, d),
            DesignFamily::TruncatedGaussian { radius } => {
                let r2 = radius * radius;
                let mut x = DenseMatrix::zeros(n, d);
                let mut row = vec![0.0; d];
                for i in 0..n {
                    loop {
                        row.iter_mut().for_each(|v| *v = StandardNormal.sample(stream));
                        if row.iter().map(|v| v * v).sum::<f64>() <= r2 {
                            break;
                        }
                    }
                    x.set_row(i, &row);
                }
                x
            }
            DesignFamily::Custom(c) => (c.sampler)(stream, n),
        }
    }
}

impl MarginalDensity for DesignDistribution {
    fn dim(&self) -> usize {
        self.d
    }

    fn log_density(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        match &self.family {
            DesignFamily::Gaussian { sigma } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                self.log_norm - 0.5 * r2 / (sigma * sigma)
            }
            DesignFamily::Cauchy => self.log_norm - x.iter().map(|v| v.mul_add(*v, 1.0).ln()).sum::<f64>(),
            DesignFamily::TruncatedGaussian { radius } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 > radius * radius {
                    f64::NEG_INFINITY
                } else {
                    self.log_norm - 0.5 * r2
                }
            }
            DesignFamily::Custom(c) => (c.log_density)(x),
        }
    }

    fn has_bounded_support(&self) -> bool {
        matches!(self.family, DesignFamily::TruncatedGaussian { .. })
    }
}

impl DesignDistribution {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn log_density(&self, x: &[f64]) -> f64 {
        MarginalDensity::log_density(self, x)
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::Parameter("dimension must be positive".into()))
    } else {
        Ok(())
    }
}

/// `log φ_h(x − θ)` for the isotropic Gaussian kernel.
#[inline]
pub fn log_gaussian_kernel(h: f64, theta: &[f64], x: &[f64]) -> f64 {
    let d = x.len() as f64;
    -0.5 * squared_distance(x, theta) / (h * h) - 0.5 * d * (LN_2PI + 2.0 * h.ln())
}

/// `log ρ_h(x; θ) = log φ_h(x − θ) − log p(x)`; `None` outside the support.
#[inline]
pub fn log_density_ratio(
    density: &dyn MarginalDensity,
    h: f64,
    theta: &[f64],
    x: &[f64],
) -> Option<f64> {
    let lp = density.log_density(x);
    if lp == f64::NEG_INFINITY {
        None
    } else {
        Some(log_gaussian_kernel(h, theta, x) - lp)
    }
}

/// Importance weight `ρ_h(x; θ) = φ_h(x − θ) / p(x)`, evaluated in log space.
pub fn density_ratio(
    density: &dyn MarginalDensity,
    h: f64,
    theta: &[f64],
    x: &[f64],
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("bandwidth must be positive, got {h}")));
    }
    if theta.len() != density.dim() || x.len() != density.dim() {
        return Err(Error::Shape(format!(
            "theta/x must have length {}",
            density.dim()
        )));
    }
    log_density_ratio(density, h, theta, x)
        .map(f64::exp)
        .ok_or_else(|| Error::Support(format!("x = {x:?} has zero design density")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn integrate_2d(design: &DesignDistribution, half_width: f64, steps: usize) -> f64 {
        let h = 2.0 * half_width / steps as f64;
        let mut s = 0.0;
        for i in 0..steps {
            for j in 0..steps {
                let x = [-half_width + (i as f64 + 0.5) * h, -half_width + (j as f64 + 0.5) * h];
                s += design.log_density(&x).exp();
            }
        }
        s * h * h
    }

    #[test]
    fn densities_integrate_to_one() {
        let g = DesignDistribution::gaussian(2, 1.5).unwrap();
        assert!((integrate_2d(&g, 12.0, 600) - 1.0).abs() < 0.01);
        let t = DesignDistribution::truncated_gaussian(2, 1.2).unwrap();
        assert!((integrate_2d(&t, 1.3, 800) - 1.0).abs() < 0.01);
        // Cauchy tails are slow; integrate 1-D in closed form on the remainder
        let c = DesignDistribution::cauchy(1).unwrap();
        let w = 2000.0;
        let steps = 400_000;
        let h = 2.0 * w / steps as f64;
        let s: f64 = (0..steps)
            .map(|i| c.log_density(&[-w + (i as f64 + 0.5) * h]).exp() * h)
            .sum();
        let tail = 1.0 - 2.0 / PI * w.atan();
        assert!((s + tail - 1.0).abs() < 0.01);
    }

    #[test]
    fn truncated_support() {
        let t = DesignDistribution::truncated_gaussian(3, 2.0).unwrap();
        assert_eq!(t.log_density(&[2.0, 0.1, 0.0]), f64::NEG_INFINITY);
        assert!(t.in_support(&[1.0, 1.0, 0.5]));
        let x = t.sample(&mut RngStream::new(1, 0), 2000);
        for i in 0..x.rows() {
            let r2: f64 = x.row(i).iter().map(|v| v * v).sum();
            assert!(r2 <= 4.0);
        }
    }

    #[test]
    fn ratio_identity_case() {
        let g = DesignDistribution::standard_gaussian(4).unwrap();
        let theta = [0.0; 4];
        for x in [[0.0; 4], [1.0, -2.0, 0.5, 3.0]] {
            let r = density_ratio(&g, 1.0, &theta, &x).unwrap();
            assert!((r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_closed_form_gaussian() {
        // (σ/h)^d exp(−‖x‖²(1/h² − 1/σ²)/2) with d=1, σ=2, h=1, x=0
        let g = DesignDistribution::gaussian(1, 2.0).unwrap();
        let r = density_ratio(&g, 1.0, &[0.0], &[0.0]).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
        let x = 1.3;
        let r = density_ratio(&g, 1.0, &[0.0], &[x]).unwrap();
        let oracle = 2.0 * (-x * x * (1.0 - 0.25) / 2.0).exp();
        assert!((r - oracle).abs() < 1e-12);
    }

    #[test]
    fn ratio_errors() {
        let t = DesignDistribution::truncated_gaussian(2, 1.0).unwrap();
        assert!(matches!(
            density_ratio(&t, 1.0, &[0.0, 0.0], &[2.0, 0.0]),
            Err(Error::Support(_))
        ));
        assert!(matches!(
            density_ratio(&t, 0.0, &[0.0, 0.0], &[0.0, 0.0]),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn cauchy_ratio_is_bounded() {
        let c = DesignDistribution::cauchy(3).unwrap();
        let x = c.sample(&mut RngStream::new(4, 0), 1_000_000);
        let theta = [0.1, -0.2, 0.05];
        let mut row = [0.0; 3];
        let mut max = 0.0_f64;
        for i in 0..x.rows() {
            x.row_into(i, &mut row);
            max = max.max(density_ratio(&c, 0.7, &theta, &row).unwrap());
        }
        // sup_x φ_h(x−θ)/p(x) ≤ (2πh²)^{-3/2} π³ · max (1+x²)e^{-(x-θ)²/2h²} per coordinate
        assert!(max.is_finite() && max < 1e3, "max ratio {max}");
    }

    #[test]
    fn ratio_is_unbiased_weight() {
        // E_p[ρ] = 1 whenever φ_h is absolutely continuous w.r.t. p
        let g = DesignDistribution::gaussian(2, 1.5).unwrap();
        let n = 200_000;
        let x = g.sample(&mut RngStream::new(8, 0), n);
        for theta in [[0.0, 0.0], [0.3, -0.4], [-0.2, 0.1]] {
            let mut row = [0.0; 2];
            let w: Vec<f64> = (0..n)
                .map(|i| {
                    x.row_into(i, &mut row);
                    density_ratio(&g, 1.0, &theta, &row).unwrap()
                })
                .collect();
            let mean = w.iter().sum::<f64>() / n as f64;
            let var = w.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean} se {se}");
        }
    }
}
