//! Multi-index data-generating processes and their analytic oracles.

pub mod design;
pub mod link;
pub mod noise;
pub mod oracle;
pub mod presets;
pub mod save_link;

pub use design::{density_ratio, log_density_ratio, log_gaussian_kernel, DesignDistribution, DesignFamily, MarginalDensity};
pub use link::{LinkFunction, LinkKind, Monomial, Polynomial};
pub use noise::NoiseSpec;
pub use oracle::{
    minimum_signal_strength, moment_mu_rho_closed_form, smoothed_link_gradient, true_smoothed_gradient, McBudget,
    SmoothedGradient,
};
pub use save_link::construct_save_counterexample_link;

use crate::error::{Error, Result};
use crate::numkit::{DenseMatrix, DenseVector, RngStream};

/// `Y = f(UᵀX) + ε`.
#[derive(Clone, Debug)]
pub struct MultiIndexModel {
    u: DenseMatrix,
    link: LinkFunction,
    noise: NoiseSpec,
}

impl MultiIndexModel {
    pub fn new(u: DenseMatrix, link: LinkFunction, noise: NoiseSpec) -> Result<Self> {
        let (d, k) = u.shape();
        if k > d {
            return Err(Error::Parameter(format!("index dimension {k} exceeds ambient dimension {d}")));
        }
        if link.k() != k {
            return Err(Error::Shape(format!("link takes {} inputs but U has {k} columns", link.k())));
        }
        let defect = u.orthonormality_defect();
        if defect > 1e-10 {
            return Err(Error::Validation(format!("U is not orthonormal (defect {defect:e})")));
        }
        noise.validate()?;
        Ok(Self { u, link, noise })
    }

    pub fn d(&self) -> usize {
        self.u.rows()
    }

    pub fn k(&self) -> usize {
        self.u.cols()
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn link(&self) -> &LinkFunction {
        &self.link
    }

    pub fn noise(&self) -> NoiseSpec {
        self.noise
    }

    pub fn with_noise(&self, noise: NoiseSpec) -> Result<Self> {
        Self::new(self.u.clone(), self.link.clone(), noise)
    }

    /// Noiseless regression function `f(Uᵀx)`.
    pub fn mean_response(&self, x: &[f64]) -> f64 {
        let mut w = vec![0.0; self.k()];
        for (j, wj) in w.iter_mut().enumerate() {
            *wj = crate::numkit::dot(self.u.col(j), x);
        }
        self.link.evaluate(&w)
    }
}

/// Paired covariates and responses.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: DenseMatrix,
    y: DenseVector,
}

impl Dataset {
    pub fn new(x: DenseMatrix, y: DenseVector) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::Shape(format!("X has {} rows but Y has {} entries", x.rows(), y.len())));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("dataset entries".into()));
        }
        Ok(Self { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn d(&self) -> usize {
        self.x.cols()
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn y(&self) -> &DenseVector {
        &self.y
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_rows(idx),
            y: idx.iter().map(|&i| self.y[i]).collect(),
        }
    }
}

/// Draws `n` i.i.d. pairs from the model under the given design.
pub fn generate(model: &MultiIndexModel, design: &DesignDistribution, n: usize, stream: &mut RngStream) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::Parameter("cannot generate an empty dataset".into()));
    }
    if design.dim() != model.d() {
        return Err(Error::Shape(format!(
            "design has dimension {} but model has {}",
            design.dim(),
            model.d()
        )));
    }
    let x = design.sample(stream, n);
    let noise = model.noise.sampler()?;
    let mut row = vec![0.0; model.d()];
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        x.row_into(i, &mut row);
        y.push(model.mean_response(&row) + noise.draw(stream));
    }
    Dataset::new(x, DenseVector::from(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_noiseless_is_exact() {
        let model = MultiIndexModel::new(
            DenseMatrix::standard_basis(3, 3),
            LinkFunction::linear(vec![1.0, 0.0, 0.0]).unwrap(),
            NoiseSpec::None,
        )
        .unwrap();
        let design = DesignDistribution::standard_gaussian(3).unwrap();
        let data = generate(&model, &design, 50, &mut RngStream::new(1, 0)).unwrap();
        for i in 0..50 {
            assert_eq!(data.y()[i], data.x()[(i, 0)]);
        }
    }

    #[test]
    fn generation_is_deterministic_and_rejects_empty() {
        let model = presets::paper_fig1(NoiseSpec::Gaussian { sigma: 0.1 });
        let design = DesignDistribution::standard_gaussian(10).unwrap();
        let a = generate(&model, &design, 100, &mut RngStream::new(4, 2)).unwrap();
        let b = generate(&model, &design, 100, &mut RngStream::new(4, 2)).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            generate(&model, &design, 0, &mut RngStream::new(4, 2)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn rejects_bad_models() {
        let skew = DenseMatrix::from_rows(&[vec![1.0], vec![0.1]]).unwrap();
        assert!(MultiIndexModel::new(skew, LinkFunction::power(2), NoiseSpec::None).is_err());
        assert!(MultiIndexModel::new(DenseMatrix::standard_basis(3, 2), LinkFunction::power(2), NoiseSpec::None).is_err());
        assert!(Dataset::new(DenseMatrix::zeros(3, 2), DenseVector::zeros(2)).is_err());
    }
}
