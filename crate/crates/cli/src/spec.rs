//! JSON experiment documents.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use esgop_core::esgop::{default_sigma_theta, SupportMode, Variant};
use esgop_core::model::{presets, DesignDistribution, MultiIndexModel, NoiseSpec};

/// Covariate distribution by family name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSpec {
    Gaussian {
        #[serde(default = "one")]
        sigma: f64,
    },
    Cauchy,
    TruncatedGaussian { radius: f64 },
}

fn one() -> f64 {
    1.0
}

impl Default for DesignSpec {
    fn default() -> Self {
        DesignSpec::Gaussian { sigma: 1.0 }
    }
}

impl DesignSpec {
    pub fn build(&self, d: usize) -> Result<DesignDistribution> {
        Ok(match *self {
            DesignSpec::Gaussian { sigma } => DesignDistribution::gaussian(d, sigma)?,
            DesignSpec::Cauchy => DesignDistribution::cauchy(d)?,
            DesignSpec::TruncatedGaussian { radius } => DesignDistribution::truncated_gaussian(d, radius)?,
        })
    }

    pub fn label(&self) -> String {
        match *self {
            DesignSpec::Gaussian { sigma } if sigma == 1.0 => "gaussian".into(),
            DesignSpec::Gaussian { sigma } => format!("gaussian(sigma={sigma})"),
            DesignSpec::Cauchy => "cauchy".into(),
            DesignSpec::TruncatedGaussian { radius } => format!("truncated_gaussian(radius={radius})"),
        }
    }
}

fn default_noise() -> NoiseSpec {
    NoiseSpec::Gaussian { sigma: presets::DEFAULT_SIGMA_Y }
}

/// A named model preset with its noise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default = "default_noise")]
    pub noise: NoiseSpec,
}

impl ModelSpec {
    pub fn new(id: &str) -> Self {
        Self {
            id: id.into(),
            d: None,
            noise: default_noise(),
        }
    }

    pub fn build(&self) -> Result<MultiIndexModel> {
        presets::by_id(&self.id, self.d, self.noise).with_context(|| format!("model '{}'", self.id))
    }
}

/// `σθ` for a bandwidth: explicit value, or the default rule for the link degree.
pub fn resolve_sigma_theta(explicit: Option<f64>, h: f64, model: &MultiIndexModel) -> Result<f64> {
    match explicit {
        Some(s) => Ok(s),
        None => Ok(default_sigma_theta(h, model.d(), model.link().degree())?),
    }
}

/// Swept parameter used for the plot's horizontal axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[default]
    N,
    H,
    M,
}

/// Grid sweep over `(design, n, h, m)` with replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: ModelSpec,
    #[serde(default = "default_designs")]
    pub designs: Vec<DesignSpec>,
    #[serde(default)]
    pub variant: Variant,
    pub n: Vec<usize>,
    pub h: Vec<f64>,
    pub m: Vec<usize>,
    /// Fixed `σθ`; the default rule per `h` when absent.
    #[serde(default)]
    pub sigma_theta: Option<f64>,
    #[serde(default)]
    pub k: Option<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub relax_theory_constraints: bool,
    #[serde(default)]
    pub support_mode: SupportMode,
    /// Unlabeled sample size for the plug-in variant.
    #[serde(default = "default_unlabeled")]
    pub unlabeled_n: usize,
    #[serde(default)]
    pub x_axis: Axis,
}

fn default_designs() -> Vec<DesignSpec> {
    vec![DesignSpec::default()]
}

fn default_unlabeled() -> usize {
    1_000_000
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.designs.is_empty() || self.n.is_empty() || self.h.is_empty() || self.m.is_empty() {
            bail!("experiment '{}': every grid (designs, n, h, m) must be non-empty", self.name);
        }
        if self.replicates == 0 {
            bail!("experiment '{}': replicates must be at least 1", self.name);
        }
        self.model.build()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).context("parsing experiment config")?;
        spec.validate()?;
        Ok(spec)
    }

    /// Figure-1 style sweep: error against `n` for several bandwidths.
    pub fn fig1(design: DesignSpec) -> Self {
        let name = match design {
            DesignSpec::Cauchy => "fig1-cauchy",
            _ => "fig1-gaussian",
        };
        Self {
            name: name.into(),
            model: ModelSpec::new("paper-fig1"),
            designs: vec![design],
            variant: Variant::Mean,
            n: vec![10_000, 20_000, 40_000, 80_000],
            h: vec![0.5, 1.0, 1.2, 1.5],
            m: vec![15],
            sigma_theta: None,
            k: None,
            replicates: 10,
            seed: 0,
            relax_theory_constraints: false,
            support_mode: SupportMode::Strict,
            unlabeled_n: default_unlabeled(),
            x_axis: Axis::N,
        }
    }

    /// Figure-2 style sweep: error against `m` at fixed `n`.
    pub fn fig2() -> Self {
        Self {
            name: "fig2-msweep".into(),
            n: vec![100_000],
            h: vec![1.0],
            m: vec![1, 2, 3, 5, 10, 15, 25, 50, 100],
            x_axis: Axis::M,
            ..Self::fig1(DesignSpec::default())
        }
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "fig1-gaussian" => Some(Self::fig1(DesignSpec::default())),
            "fig1-cauchy" => Some(Self::fig1(DesignSpec::Cauchy)),
            "fig2-msweep" => Some(Self::fig2()),
            _ => None,
        }
    }
}

pub const SWEEP_PRESETS: [&str; 3] = ["fig1-gaussian", "fig1-cauchy", "fig2-msweep"];

/// Where the labeled data for `estimate` comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// `n` rows of `d + 1` columns, response last.
    Csv {
        path: String,
        #[serde(default)]
        header: bool,
    },
    Generate { model: ModelSpec, n: usize },
}

/// Unlabeled covariates for the plug-in variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum UnlabeledSpec {
    /// `d` columns, no response.
    Csv {
        path: String,
        #[serde(default)]
        header: bool,
    },
    /// Drawn from the design.
    Generate { n: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub h: f64,
    #[serde(default)]
    pub sigma_theta: Option<f64>,
    pub m: usize,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub relax_theory_constraints: bool,
    #[serde(default)]
    pub support_mode: SupportMode,
}

/// Config for a single `estimate` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSpec {
    pub data: DataSpec,
    /// Design density used by the estimator, and the generator for `generate` data.
    #[serde(default)]
    pub design: DesignSpec,
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub unlabeled: Option<UnlabeledSpec>,
    #[serde(default)]
    pub seed: u64,
}

impl EstimateSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing estimate config")
    }
}

/// Config for `moments`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSpec {
    pub model: ModelSpec,
    #[serde(default)]
    pub design: DesignSpec,
    pub h: f64,
    #[serde(default)]
    pub sigma_theta: Option<f64>,
    #[serde(default = "default_mc")]
    pub mc_budget: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_mc() -> usize {
    1_000_000
}

impl MomentsSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing moments config")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for name in SWEEP_PRESETS {
            ExperimentSpec::preset(name).unwrap().validate().unwrap();
        }
        assert!(ExperimentSpec::preset("nope").is_none());
    }

    #[test]
    fn empty_grid_rejected() {
        let mut s = ExperimentSpec::fig2();
        s.m.clear();
        assert!(s.validate().unwrap_err().to_string().contains("non-empty"));
        let mut s = ExperimentSpec::fig2();
        s.replicates = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_defaults() {
        let s = ExperimentSpec::fig1(DesignSpec::Cauchy);
        let back = ExperimentSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
        let minimal = r#"{"name":"x","model":{"id":"cubic","d":4},"n":[1000],"h":[1.0],"m":[5],"replicates":2}"#;
        let s = ExperimentSpec::from_json(minimal).unwrap();
        assert_eq!(s.designs, vec![DesignSpec::Gaussian { sigma: 1.0 }]);
        assert_eq!(s.model.noise, NoiseSpec::Gaussian { sigma: 0.1 });
        assert!(ExperimentSpec::from_json(r#"{"name":"x","bogus":1}"#).is_err());
    }
}
