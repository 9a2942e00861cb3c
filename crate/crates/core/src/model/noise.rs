use rand_distr::{Distribution, Normal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::RngStream;

/// Additive response noise `ε` in `Y = f(UᵀX) + ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NoiseSpec {
    #[default]
    None,
    Gaussian { sigma: f64 },
    /// `scale · T_df`; heavy-tailed, used to stress the robust aggregation.
    StudentT { df: f64, scale: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Gaussian { sigma } if sigma >= 0.0 && sigma.is_finite() => Ok(()),
            NoiseSpec::Gaussian { sigma } => {
                Err(Error::Parameter(format!("noise sigma must be >= 0, got {sigma}")))
            }
            NoiseSpec::StudentT { df, scale } if df > 1.0 && scale >= 0.0 && scale.is_finite() => Ok(()),
            NoiseSpec::StudentT { df, scale } => Err(Error::Parameter(format!(
                "student_t noise needs df > 1 and scale >= 0, got df={df}, scale={scale}"
            ))),
        }
    }

    /// The scale parameter `σ_Y` (zero for noiseless responses).
    pub fn sigma_y(&self) -> f64 {
        match *self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Gaussian { sigma } => sigma,
            NoiseSpec::StudentT { scale, .. } => scale,
        }
    }

    pub(crate) fn sampler(&self) -> Result<NoiseSampler> {
        self.validate()?;
        Ok(match *self {
            NoiseSpec::None => NoiseSampler::Zero,
            NoiseSpec::Gaussian { sigma } if sigma == 0.0 => NoiseSampler::Zero,
            NoiseSpec::Gaussian { sigma } => {
                NoiseSampler::Normal(Normal::new(0.0, sigma).map_err(|e| Error::Parameter(e.to_string()))?)
            }
            NoiseSpec::StudentT { df, scale } => NoiseSampler::StudentT(
                StudentT::new(df).map_err(|e| Error::Parameter(e.to_string()))?,
                scale,
            ),
        })
    }
}

pub(crate) enum NoiseSampler {
    Zero,
    Normal(Normal<f64>),
    StudentT(StudentT<f64>, f64),
}

impl NoiseSampler {
    pub(crate) fn draw(&self, stream: &mut RngStream) -> f64 {
        match self {
            NoiseSampler::Zero => 0.0,
            NoiseSampler::Normal(n) => n.sample(stream),
            NoiseSampler::StudentT(t, s) => s * t.sample(stream),
        }
    }
}
