use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which aggregation / gradient estimator the pipeline uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Mean,
    MedianOfMeans,
    PluginRatio,
    Lle,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Mean => "mean",
            Variant::MedianOfMeans => "median_of_means",
            Variant::PluginRatio => "plugin_ratio",
            Variant::Lle => "lle",
        }
    }
}

/// Treatment of samples where the design density vanishes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SupportMode {
    /// Out-of-support samples and bounded-support designs are errors.
    #[default]
    Strict,
    /// Ratio taken on the support only; out-of-support samples get zero
    /// weight and the truncation bias is accepted.
    AppendixC,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsgopConfig {
    pub h: f64,
    pub sigma_theta: f64,
    pub m: usize,
    pub k: usize,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub seed: u64,
    /// Skip the `σθ < h/√20` and `m ≤ n/(2d)` checks.
    #[serde(default)]
    pub relax_theory_constraints: bool,
    #[serde(default)]
    pub support_mode: SupportMode,
}

impl EsgopConfig {
    pub fn new(h: f64, sigma_theta: f64, m: usize, k: usize, seed: u64) -> Self {
        Self {
            h,
            sigma_theta,
            m,
            k,
            variant: Variant::Mean,
            seed,
            relax_theory_constraints: false,
            support_mode: SupportMode::Strict,
        }
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn relaxed(mut self) -> Self {
        self.relax_theory_constraints = true;
        self
    }

    pub fn with_support_mode(mut self, mode: SupportMode) -> Self {
        self.support_mode = mode;
        self
    }

    /// Data-independent checks.
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Parameter(format!("h must be positive, got {}", self.h)));
        }
        if !(self.sigma_theta > 0.0 && self.sigma_theta.is_finite()) {
            return Err(Error::Parameter(format!("sigma_theta must be positive, got {}", self.sigma_theta)));
        }
        if self.m == 0 {
            return Err(Error::Parameter("m must be at least 1".into()));
        }
        if self.k == 0 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        if !self.relax_theory_constraints && self.sigma_theta >= self.h / 20f64.sqrt() {
            return Err(Error::Validation(format!(
                "constraint sigma_theta < h/√20 violated: sigma_theta = {} ≥ {} (set relax_theory_constraints to override)",
                self.sigma_theta,
                self.h / 20f64.sqrt()
            )));
        }
        Ok(())
    }

    /// Checks that depend on the dataset shape.
    pub fn validate_for(&self, n: usize, d: usize) -> Result<()> {
        self.validate()?;
        if self.k > d {
            return Err(Error::Parameter(format!("k = {} exceeds dimension d = {d}", self.k)));
        }
        if n < 2 * self.m {
            return Err(Error::Partition(format!(
                "n = {n} is too small for m = {} partitions (need n ≥ 2m)",
                self.m
            )));
        }
        if !self.relax_theory_constraints && self.m * 2 * d > n {
            return Err(Error::Validation(format!(
                "constraint m ≤ n/(2d) violated: m = {}, n/(2d) = {} (set relax_theory_constraints to override)",
                self.m,
                n / (2 * d)
            )));
        }
        Ok(())
    }
}

/// `h = K / (4(√d + √ln n))` for designs supported on `‖x‖ ≤ K`.
pub fn bandwidth_for_bounded_support(radius: f64, d: usize, n: f64) -> Result<f64> {
    if !(radius > 0.0) || d == 0 || !(n >= 2.0) {
        return Err(Error::Parameter(format!(
            "need K > 0, d ≥ 1 and n ≥ 2, got K = {radius}, d = {d}, n = {n}"
        )));
    }
    Ok(radius / (4.0 * ((d as f64).sqrt() + n.ln().sqrt())))
}

/// `σθ = h √((r−1)/(20(r−1)+10d))` for a degree-`r ≥ 2` link, otherwise
/// `h/√(20+10d)`.
pub fn default_sigma_theta(h: f64, d: usize, degree: Option<u32>) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Parameter(format!("h must be positive, got {h}")));
    }
    let d = d as f64;
    Ok(match degree {
        Some(r) if r >= 2 => {
            let r1 = f64::from(r - 1);
            h * (r1 / (20.0 * r1 + 10.0 * d)).sqrt()
        }
        _ => h / (20.0 + 10.0 * d).sqrt(),
    })
}

/// Number of median-of-means blocks for confidence `1 − δ`: `⌈8 ln(1/δ)⌉`.
pub fn mom_partitions_for_confidence(delta: f64) -> Result<usize> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(((8.0 * (1.0 / delta).ln()).ceil() as usize).max(1))
}

/// Partition count above which the averaged outer product is exhaustive with
/// probability `1 − δ`: `8 μΔ⁴ λ_k⁻² δ⁻¹ ln²(4d/δ)`. Reported, never enforced.
pub fn exhaustiveness_m_bound(mu_delta: f64, lambda_k: f64, delta: f64, d: usize) -> f64 {
    if !(lambda_k > 0.0) {
        return f64::INFINITY;
    }
    let l = (4.0 * d as f64 / delta).ln();
    8.0 * mu_delta.powi(4) / (lambda_k * lambda_k) / delta * l * l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_rule() {
        let e = std::f64::consts::E;
        let h = bandwidth_for_bounded_support(10.0, 10, e).unwrap();
        assert!((h - 10.0 / (4.0 * (10f64.sqrt() + 1.0))).abs() < 1e-15);
        assert!((h - 0.6005).abs() < 5e-4);
        let k = 4.0 * (3f64.sqrt() + 100f64.ln().sqrt());
        assert!((bandwidth_for_bounded_support(k, 3, 100.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(bandwidth_for_bounded_support(10.0, 5, 1e4).unwrap() < bandwidth_for_bounded_support(10.0, 5, 1e3).unwrap());
        assert!(bandwidth_for_bounded_support(10.0, 6, 1e3).unwrap() < bandwidth_for_bounded_support(10.0, 5, 1e3).unwrap());
        assert!(bandwidth_for_bounded_support(0.0, 5, 1e3).is_err());
        assert!(bandwidth_for_bounded_support(1.0, 5, 1.0).is_err());
    }

    #[test]
    fn sigma_theta_defaults() {
        assert!((default_sigma_theta(1.0, 10, None).unwrap() - 0.091_287_092_917_527_69).abs() < 1e-12);
        assert!((default_sigma_theta(1.0, 10, Some(2)).unwrap() - (1.0f64 / 120.0).sqrt()).abs() < 1e-15);
        assert!((default_sigma_theta(1.0, 10, Some(3)).unwrap() - (2.0f64 / 140.0).sqrt()).abs() < 1e-15);
        assert_eq!(default_sigma_theta(2.0, 10, Some(1)).unwrap(), default_sigma_theta(2.0, 10, None).unwrap());
    }

    #[test]
    fn mom_helper() {
        assert_eq!(mom_partitions_for_confidence(0.05).unwrap(), 24);
        assert!(mom_partitions_for_confidence(1.0).is_err());
    }

    #[test]
    fn config_checks() {
        let ok = EsgopConfig::new(1.0, 0.1, 15, 3, 0);
        ok.validate_for(10_000, 10).unwrap();
        let wide = EsgopConfig::new(1.0, 0.3, 15, 3, 0);
        let msg = wide.validate().unwrap_err().to_string();
        assert!(msg.contains("sigma_theta < h/√20"), "{msg}");
        wide.clone().relaxed().validate().unwrap();
        assert!(matches!(ok.validate_for(20, 10), Err(Error::Partition(_))));
        assert!(matches!(ok.validate_for(200, 10), Err(Error::Validation(_))));
        assert!(matches!(EsgopConfig::new(1.0, 0.1, 2, 11, 0).validate_for(1000, 10), Err(Error::Parameter(_))));
    }
}
