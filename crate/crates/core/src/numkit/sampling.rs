use rand_distr::{Cauchy, Distribution, StandardNormal};

use super::matrix::{DenseMatrix, DenseVector};
use super::rng::RngStream;
use crate::error::{Error, Result};

/// `n x d` matrix with i.i.d. `N(mean, scale² I_d)` rows, drawn row by row.
pub fn sample_gaussian(
    stream: &mut RngStream,
    n: usize,
    d: usize,
    mean: &DenseVector,
    scale: f64,
) -> Result<DenseMatrix> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Parameter(format!("scale must be positive, got {scale}")));
    }
    if mean.len() != d {
        return Err(Error::Shape(format!(
            "mean has length {}, expected {d}",
            mean.len()
        )));
    }
    let mut x = DenseMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            let z: f64 = StandardNormal.sample(stream);
            x[(i, j)] = mean[j] + scale * z;
        }
    }
    Ok(x)
}

/// `n x d` matrix of i.i.d. standard normals.
pub fn sample_standard_normal_matrix(stream: &mut RngStream, n: usize, d: usize) -> DenseMatrix {
    let mut x = DenseMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            x[(i, j)] = StandardNormal.sample(stream);
        }
    }
    x
}

/// `n x d` matrix of i.i.d. standard Cauchy coordinates.
pub fn sample_cauchy(stream: &mut RngStream, n: usize, d: usize) -> DenseMatrix {
    let dist = Cauchy::new(0.0, 1.0).expect("unit Cauchy");
    let mut x = DenseMatrix::zeros(n, d);
    for i in 0..n {
        for j in 0..d {
            x[(i, j)] = dist.sample(stream);
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quantile(mut v: Vec<f64>, q: f64) -> f64 {
        v.sort_by(f64::total_cmp);
        v[((v.len() - 1) as f64 * q).round() as usize]
    }

    #[test]
    fn gaussian_mean_within_clt_bound() {
        let n = 100_000;
        let d = 3;
        let mut s = RngStream::new(1, 0);
        let x = sample_gaussian(&mut s, n, d, &DenseVector::zeros(d), 1.0).unwrap();
        for j in 0..d {
            let m = x.col(j).iter().sum::<f64>() / n as f64;
            assert!(m.abs() < 4.0 / (n as f64).sqrt(), "coord {j} mean {m}");
        }
    }

    #[test]
    fn gaussian_rejects_bad_scale() {
        let mut s = RngStream::new(1, 0);
        let mean = DenseVector::zeros(2);
        assert!(matches!(
            sample_gaussian(&mut s, 3, 2, &mean, 0.0),
            Err(Error::Parameter(_))
        ));
        assert!(sample_gaussian(&mut s, 3, 2, &mean, -1.0).is_err());
    }

    #[test]
    fn gaussian_is_deterministic() {
        let mean = DenseVector::from(vec![1.0, -2.0]);
        let a = sample_gaussian(&mut RngStream::new(9, 4), 50, 2, &mean, 0.5).unwrap();
        let b = sample_gaussian(&mut RngStream::new(9, 4), 50, 2, &mean, 0.5).unwrap();
        assert_eq!(a, b);
        let c = sample_gaussian(&mut RngStream::new(9, 5), 50, 2, &mean, 0.5).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cauchy_quantiles() {
        let n = 100_000;
        let x = sample_cauchy(&mut RngStream::new(2, 0), n, 2);
        for j in 0..2 {
            let col = x.col(j).to_vec();
            let med = quantile(col.clone(), 0.5);
            // order-statistic sd of the median is pi/(2 sqrt n) ~ 0.005
            assert!(med.abs() < 0.05, "median {med}");
            let q75 = quantile(col, 0.75);
            assert!((q75 - 1.0).abs() < 0.05, "q75 {q75}");
        }
        let y = sample_cauchy(&mut RngStream::new(2, 0), n, 2);
        assert_eq!(x, y);
    }
}
