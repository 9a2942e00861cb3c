use rand::seq::index::sample;

use super::{finish, symmetrize_upper, BaselineEstimate, BaselineMethod};
use crate::error::{Error, Result};
use crate::esgop::weighted_local_linear_slope;
use crate::model::Dataset;
use crate::numkit::{squared_distance, DenseMatrix, RngStream};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EgopOptions {
    /// Training points used as evaluation locations.
    pub eval_points: usize,
    pub seed: u64,
}

impl Default for EgopOptions {
    fn default() -> Self {
        Self {
            eval_points: 200,
            seed: 0,
        }
    }
}

/// Average outer product of Gaussian-kernel local-linear gradients.
pub fn egop(data: &Dataset, k: usize, bandwidth: f64, opts: EgopOptions) -> Result<BaselineEstimate> {
    let (n, d) = (data.n(), data.d());
    if !(bandwidth > 0.0) {
        return Err(Error::Parameter(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if k == 0 || k > d {
        return Err(Error::Parameter(format!("k must lie in 1..={d}, got {k}")));
    }
    if n < d + 2 {
        return Err(Error::Partition(format!("local fits need n ≥ d + 2 = {}, got {n}", d + 2)));
    }
    let count = opts.eval_points.min(n).max(1);
    let mut rng = RngStream::new(opts.seed, 0);
    let mut picks = sample(&mut rng, n, count).into_vec();
    picks.sort_unstable();
    let inv2h2 = 0.5 / (bandwidth * bandwidth);
    let mut m = DenseMatrix::zeros(d, d);
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut center = vec![0.0; d];
    let mut row = vec![0.0; d];
    for &e in &picks {
        data.x().row_into(e, &mut center);
        let lw: Vec<Option<f64>> = (0..n)
            .map(|i| {
                data.x().row_into(i, &mut row);
                Some(-squared_distance(&row, &center) * inv2h2)
            })
            .collect();
        match weighted_local_linear_slope(data, &center, &lw) {
            Ok(g) => {
                m.add_outer(1.0, &g, &g);
                used += 1;
            }
            Err(Error::Conditioning(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if used == 0 {
        return Err(Error::Conditioning("every local fit was singular".into()));
    }
    let mut m = m.scaled(1.0 / used as f64);
    symmetrize_upper(&mut m);
    finish(BaselineMethod::Egop, m, k, skipped, count)
}
