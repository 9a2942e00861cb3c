//! Named models addressable by string id.

use super::link::LinkFunction;
use super::save_link::construct_save_counterexample_link;
use super::{MultiIndexModel, NoiseSpec};
use crate::error::{Error, Result};
use crate::numkit::DenseMatrix;

pub const PRESET_IDS: [&str; 4] = ["paper-fig1", "save-demo", "phase-retrieval", "cubic"];

/// Response noise used by the simulation presets when none is given.
pub const DEFAULT_SIGMA_Y: f64 = 0.1;

/// `d = 10`, `U = [e₁, e₂, e₃]`, `f(z) = z₁² + z₂z₃`.
pub fn paper_fig1(noise: NoiseSpec) -> MultiIndexModel {
    MultiIndexModel::new(DenseMatrix::standard_basis(10, 3), LinkFunction::paper_quadratic(), noise)
        .expect("valid preset")
}

/// `d = 2`, `u = e₁`, noiseless, link built so that SAVE sees nothing.
pub fn save_demo() -> MultiIndexModel {
    MultiIndexModel::new(DenseMatrix::standard_basis(2, 1), construct_save_counterexample_link(), NoiseSpec::None)
        .expect("valid preset")
}

/// `f(z) = z²` along `e₁`.
pub fn phase_retrieval(d: usize, noise: NoiseSpec) -> Result<MultiIndexModel> {
    check_dim(d)?;
    MultiIndexModel::new(DenseMatrix::standard_basis(d, 1), LinkFunction::power(2), noise)
}

/// `f(z) = z³` along `e₁`.
pub fn cubic(d: usize, noise: NoiseSpec) -> Result<MultiIndexModel> {
    check_dim(d)?;
    MultiIndexModel::new(DenseMatrix::standard_basis(d, 1), LinkFunction::power(3), noise)
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Parameter("dimension must be positive".into()));
    }
    Ok(())
}

/// Looks a preset up by id. `d` applies to the single-index presets (default 10);
/// `noise` is ignored by `save-demo`, which is noiseless by construction.
pub fn by_id(id: &str, d: Option<usize>, noise: NoiseSpec) -> Result<MultiIndexModel> {
    match id {
        "paper-fig1" => {
            if let Some(d) = d.filter(|&d| d != 10) {
                return Err(Error::Parameter(format!("paper-fig1 is fixed at d = 10, got {d}")));
            }
            Ok(paper_fig1(noise))
        }
        "save-demo" => Ok(save_demo()),
        "phase-retrieval" => phase_retrieval(d.unwrap_or(10), noise),
        "cubic" => cubic(d.unwrap_or(10), noise),
        other => Err(Error::Parameter(format!(
            "unknown model preset '{other}' (known: {})",
            PRESET_IDS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_resolve() {
        for id in PRESET_IDS {
            let m = by_id(id, None, NoiseSpec::None).unwrap();
            assert!(m.k() <= m.d());
        }
        assert!(by_id("nope", None, NoiseSpec::None).is_err());
        assert!(by_id("paper-fig1", Some(5), NoiseSpec::None).is_err());
        assert_eq!(by_id("cubic", Some(4), NoiseSpec::None).unwrap().d(), 4);
    }
}
