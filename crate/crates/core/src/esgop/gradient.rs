//! Per-location smoothed-gradient estimators.

use super::config::SupportMode;
use crate::error::{Error, Result};
use crate::model::{log_density_ratio, Dataset, MarginalDensity};
use crate::numkit::{Cholesky, DenseMatrix, DenseVector};

fn check_inputs(data: &Dataset, theta: &[f64], h: f64, density: &dyn MarginalDensity) -> Result<()> {
    if data.n() == 0 {
        return Err(Error::Partition("empty data half".into()));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Parameter(format!("h must be positive, got {h}")));
    }
    if theta.len() != data.d() || density.dim() != data.d() {
        return Err(Error::Shape(format!(
            "theta ({}), density ({}) and data ({}) dimensions differ",
            theta.len(),
            density.dim(),
            data.d()
        )));
    }
    Ok(())
}

/// `log ρ_h(Xᵢ; θ)` for every row; `None` for rows given zero weight.
pub(crate) fn log_weights(
    data: &Dataset,
    theta: &[f64],
    h: f64,
    density: &dyn MarginalDensity,
    mode: SupportMode,
) -> Result<Vec<Option<f64>>> {
    if mode == SupportMode::Strict && density.has_bounded_support() {
        return Err(Error::Support(
            "design has bounded support; enable appendix_c support mode to accept the truncation bias".into(),
        ));
    }
    let mut row = vec![0.0; data.d()];
    (0..data.n())
        .map(|i| {
            data.x().row_into(i, &mut row);
            match log_density_ratio(density, h, theta, &row) {
                Some(l) => Ok(Some(l)),
                None if mode == SupportMode::AppendixC => Ok(None),
                None => Err(Error::Support(format!("sample {i} lies outside the design support"))),
            }
        })
        .collect()
}

/// `β̂ = (h⁻² / |D|) Σ ρ_h(Xᵢ; θ) Yᵢ (Xᵢ − θ)`.
pub fn estimate_smoothed_gradient(
    data: &Dataset,
    theta: &[f64],
    h: f64,
    density: &dyn MarginalDensity,
    mode: SupportMode,
) -> Result<DenseVector> {
    check_inputs(data, theta, h, density)?;
    let lw = log_weights(data, theta, h, density, mode)?;
    let d = data.d();
    let mut acc = vec![0.0; d];
    for (i, l) in lw.iter().enumerate() {
        let Some(l) = *l else { continue };
        let c = l.exp() * data.y()[i];
        if c == 0.0 {
            continue;
        }
        for (j, a) in acc.iter_mut().enumerate() {
            *a += c * (data.x()[(i, j)] - theta[j]);
        }
    }
    let scale = 1.0 / (h * h * data.n() as f64);
    let out: DenseVector = acc.into_iter().map(|a| a * scale).collect();
    if !out.is_finite() {
        return Err(Error::NonFinite("smoothed gradient estimate overflowed".into()));
    }
    Ok(out)
}

/// Slope of the weighted least-squares fit of `Y` on `(1, X − θ)`.
///
/// Weights are rescaled by their maximum before solving, which leaves the
/// solution unchanged but keeps the normal matrix representable.
pub fn weighted_local_linear_slope(data: &Dataset, theta: &[f64], log_weights: &[Option<f64>]) -> Result<DenseVector> {
    let (n, d) = (data.n(), data.d());
    if n < d + 2 {
        return Err(Error::Partition(format!("local linear fit needs n ≥ d + 2 = {}, got {n}", d + 2)));
    }
    let lmax = log_weights
        .iter()
        .flatten()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    if lmax == f64::NEG_INFINITY {
        return Err(Error::Conditioning("all local weights vanish".into()));
    }
    let p = d + 1;
    let mut a = DenseMatrix::zeros(p, p);
    let mut b = vec![0.0; p];
    let mut xt = vec![0.0; p];
    xt[0] = 1.0;
    for (i, l) in log_weights.iter().enumerate() {
        let Some(l) = *l else { continue };
        let w = (l - lmax).exp();
        if w == 0.0 {
            continue;
        }
        for j in 0..d {
            xt[j + 1] = data.x()[(i, j)] - theta[j];
        }
        let wy = w * data.y()[i];
        for r in 0..p {
            b[r] += wy * xt[r];
            let wr = w * xt[r];
            for c in r..p {
                a[(r, c)] += wr * xt[c];
            }
        }
    }
    for r in 0..p {
        for c in 0..r {
            a[(r, c)] = a[(c, r)];
        }
    }
    let chol = Cholesky::new(&a, 1e-12)
        .map_err(|e| Error::Conditioning(format!("weighted normal matrix is singular: {e}")))?;
    let coef = chol.solve(&b);
    let slope: DenseVector = coef[1..].iter().copied().collect();
    if !slope.is_finite() {
        return Err(Error::Conditioning("local linear slope is not finite".into()));
    }
    Ok(slope)
}

/// Local linear gradient with kernel `ρ_h(·; θ)`.
pub fn estimate_lle_gradient(
    data: &Dataset,
    theta: &[f64],
    h: f64,
    density: &dyn MarginalDensity,
    mode: SupportMode,
) -> Result<DenseVector> {
    check_inputs(data, theta, h, density)?;
    let lw = log_weights(data, theta, h, density, mode)?;
    weighted_local_linear_slope(data, theta, &lw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DesignDistribution;
    use crate::numkit::RngStream;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian_data(n: usize, d: usize, seed: u64, f: impl Fn(&[f64]) -> f64) -> Dataset {
        let mut rng = RngStream::new(seed, 0);
        let mut x = DenseMatrix::zeros(n, d);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let row: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
            y.push(f(&row));
            x.set_row(i, &row);
        }
        Dataset::new(x, DenseVector::from(y)).unwrap()
    }

    #[test]
    fn zero_response_gives_zero() {
        let data = gaussian_data(20, 3, 1, |_| 0.0);
        let design = DesignDistribution::standard_gaussian(3).unwrap();
        let g = estimate_smoothed_gradient(&data, &[0.1, 0.0, -0.2], 0.5, &design, SupportMode::Strict).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_point_identity_ratio() {
        let x = DenseMatrix::from_rows(&[vec![0.3, -1.2]]).unwrap();
        let data = Dataset::new(x, DenseVector::from(vec![2.5])).unwrap();
        let design = DesignDistribution::standard_gaussian(2).unwrap();
        let g = estimate_smoothed_gradient(&data, &[0.0, 0.0], 1.0, &design, SupportMode::Strict).unwrap();
        assert!((g[0] - 2.5 * 0.3).abs() < 1e-14);
        assert!((g[1] + 2.5 * 1.2).abs() < 1e-14);
    }

    #[test]
    fn empty_half_and_support_errors() {
        let design = DesignDistribution::truncated_gaussian(2, 1.0).unwrap();
        let x = DenseMatrix::from_rows(&[vec![0.1, 0.1], vec![3.0, 0.0]]).unwrap();
        let data = Dataset::new(x, DenseVector::from(vec![1.0, 1.0])).unwrap();
        let th = [0.0, 0.0];
        assert!(matches!(
            estimate_smoothed_gradient(&data, &th, 0.5, &design, SupportMode::Strict),
            Err(Error::Support(_))
        ));
        // appendix-C mode drops the second sample
        let g = estimate_smoothed_gradient(&data, &th, 0.5, &design, SupportMode::AppendixC).unwrap();
        let only = data.subset(&[0]);
        let g1 = estimate_smoothed_gradient(&only, &th, 0.5, &design, SupportMode::AppendixC).unwrap();
        assert!((g[0] - g1[0] / 2.0).abs() < 1e-14);
        let empty = data.subset(&[]);
        assert!(matches!(
            estimate_smoothed_gradient(&empty, &th, 0.5, &design, SupportMode::AppendixC),
            Err(Error::Partition(_))
        ));
    }

    #[test]
    fn lle_exact_on_linear_data() {
        let a = [0.7, -0.2, 1.5];
        let data = gaussian_data(50, 3, 7, |x| 0.3 + a.iter().zip(x).map(|(p, q)| p * q).sum::<f64>());
        let design = DesignDistribution::gaussian(3, 1.3).unwrap();
        let g = estimate_lle_gradient(&data, &[0.2, 0.1, -0.4], 0.8, &design, SupportMode::Strict).unwrap();
        for (gi, ai) in g.iter().zip(&a) {
            assert!((gi - ai).abs() < 1e-10, "{gi} vs {ai}");
        }
    }

    #[test]
    fn lle_with_equal_weights_is_ols() {
        // design N(0, h²I) at θ = 0 makes ρ ≡ 1
        let data = gaussian_data(200, 2, 3, |x| x[0] * x[0] + 0.5 * x[1]);
        let design = DesignDistribution::gaussian(2, 1.0).unwrap();
        let lle = estimate_lle_gradient(&data, &[0.0, 0.0], 1.0, &design, SupportMode::Strict).unwrap();
        let ones = vec![Some(0.0); data.n()];
        let ols = weighted_local_linear_slope(&data, &[0.0, 0.0], &ones).unwrap();
        for (a, b) in lle.iter().zip(ols.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lle_singular_is_conditioning_error() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0], vec![4.0, 4.0]]).unwrap();
        let data = Dataset::new(x, DenseVector::from(vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        let design = DesignDistribution::gaussian(2, 3.0).unwrap();
        assert!(matches!(
            estimate_lle_gradient(&data, &[0.0, 0.0], 1.0, &design, SupportMode::Strict),
            Err(Error::Conditioning(_))
        ));
    }
}
