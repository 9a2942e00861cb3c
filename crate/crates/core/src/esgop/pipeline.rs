use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::config::{EsgopConfig, Variant};
use super::gradient::{estimate_lle_gradient, estimate_smoothed_gradient};
use super::plugin::PluginDiagnostics;
use crate::error::{Error, Result};
use crate::model::{Dataset, MarginalDensity};
use crate::numkit::{operator_norm, sample_gaussian, sym_eigen, DenseMatrix, DenseVector, RngStream};

/// RNG stream ids derived from `cfg.seed`.
pub const THETA_STREAM: u64 = 1;
pub const SPLIT_STREAM: u64 = 2;

/// Effective-rank threshold relative to the top eigenvalue.
const RANK_TOL: f64 = 1e-8;

/// Smoothed gradient estimates at one location from the two halves of its partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothedGradientPair {
    pub theta: DenseVector,
    pub beta1: DenseVector,
    pub beta2: DenseVector,
    pub n_used: usize,
}

impl SmoothedGradientPair {
    /// `β̂₁β̂₂ᵀ + β̂₂β̂₁ᵀ`, filled from the upper triangle so it is exactly symmetric.
    pub fn symmetric_product(&self) -> DenseMatrix {
        let d = self.beta1.len();
        let mut out = DenseMatrix::zeros(d, d);
        for c in 0..d {
            for r in 0..=c {
                let v = self.beta1[r] * self.beta2[c] + self.beta2[r] * self.beta1[c];
                out[(r, c)] = v;
                out[(c, r)] = v;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateDiagnostics {
    pub variant: String,
    pub n: usize,
    pub n_used: usize,
    pub n_dropped: usize,
    pub m: usize,
    /// Eigenvalues above `1e-8 λ₁`.
    pub effective_rank: usize,
    /// `(λ_k − λ_{k+1}) / λ₁`, advisory.
    pub relative_eigengap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mom_selected: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mom_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plugin: Option<PluginDiagnostics>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceEstimate {
    pub u_hat: DenseMatrix,
    pub eigenvalues: Vec<f64>,
    /// `λ_k − λ_{k+1}` (`λ_k` alone when `k = d`).
    pub eigengap: f64,
    pub m_hat: DenseMatrix,
    pub pairs: Vec<SmoothedGradientPair>,
    pub diagnostics: EstimateDiagnostics,
}

/// `m` index sets, each split into two halves of `⌊n/(2m)⌋` rows.
///
/// The permutation depends only on `(seed, n)`; the trailing `n mod 2m`
/// entries are dropped.
pub fn partition_indices(n: usize, m: usize, seed: u64) -> Result<Vec<[Vec<usize>; 2]>> {
    if m == 0 || n < 2 * m {
        return Err(Error::Partition(format!("cannot split n = {n} rows into 2m = {} halves", 2 * m)));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut RngStream::new(seed, SPLIT_STREAM));
    let b = n / (2 * m);
    Ok((0..m)
        .map(|j| {
            let base = 2 * j * b;
            [perm[base..base + b].to_vec(), perm[base + b..base + 2 * b].to_vec()]
        })
        .collect())
}

/// `m x d` locations `θⱼ ~ N(0, σθ² I)`.
pub fn draw_thetas(cfg: &EsgopConfig, d: usize) -> Result<DenseMatrix> {
    sample_gaussian(
        &mut RngStream::new(cfg.seed, THETA_STREAM),
        cfg.m,
        d,
        &DenseVector::zeros(d),
        cfg.sigma_theta,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum GradientForm {
    Stein,
    LocalLinear,
}

pub(crate) fn compute_pairs(
    data: &Dataset,
    density: &dyn MarginalDensity,
    cfg: &EsgopConfig,
    form: GradientForm,
) -> Result<Vec<SmoothedGradientPair>> {
    cfg.validate_for(data.n(), data.d())?;
    if density.dim() != data.d() {
        return Err(Error::Shape(format!(
            "density has dimension {} but data has {}",
            density.dim(),
            data.d()
        )));
    }
    let thetas = draw_thetas(cfg, data.d())?;
    let parts = partition_indices(data.n(), cfg.m, cfg.seed)?;
    parts
        .iter()
        .enumerate()
        .map(|(j, halves)| {
            let theta = DenseVector::from(thetas.row(j));
            let est = |idx: &[usize]| {
                let half = data.subset(idx);
                match form {
                    GradientForm::Stein => estimate_smoothed_gradient(&half, &theta, cfg.h, density, cfg.support_mode),
                    GradientForm::LocalLinear => estimate_lle_gradient(&half, &theta, cfg.h, density, cfg.support_mode),
                }
            };
            let beta1 = est(&halves[0])?;
            let beta2 = est(&halves[1])?;
            Ok(SmoothedGradientPair {
                theta,
                beta1,
                beta2,
                n_used: halves[0].len(),
            })
        })
        .collect()
}

/// Sum in a fixed pairwise-tree order over ascending indices.
fn tree_sum(terms: &[DenseMatrix]) -> DenseMatrix {
    match terms.len() {
        1 => terms[0].clone(),
        n => {
            let mid = n / 2;
            tree_sum(&terms[..mid]).add(&tree_sum(&terms[mid..])).expect("equal shapes")
        }
    }
}

/// `M̂ = (1/2m) Σⱼ (β̂ⱼ₁β̂ⱼ₂ᵀ + β̂ⱼ₂β̂ⱼ₁ᵀ)`.
pub fn assemble_m_hat(pairs: &[SmoothedGradientPair]) -> Result<DenseMatrix> {
    if pairs.is_empty() {
        return Err(Error::Partition("no gradient pairs to assemble".into()));
    }
    let terms: Vec<DenseMatrix> = pairs.iter().map(SmoothedGradientPair::symmetric_product).collect();
    Ok(tree_sum(&terms).scaled(1.0 / (2 * pairs.len()) as f64))
}

/// Index of the block whose operator-norm ball of minimal radius covers a
/// strict majority of blocks, with that radius. Lowest index wins ties.
pub fn median_of_means_select(blocks: &[DenseMatrix]) -> Result<(usize, f64)> {
    let m = blocks.len();
    if m == 0 {
        return Err(Error::Partition("no blocks to select from".into()));
    }
    let mut dist = vec![0.0; m * m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = operator_norm(&blocks[i].sub(&blocks[j])?)?;
            dist[i * m + j] = v;
            dist[j * m + i] = v;
        }
    }
    // ⌈(m+1)/2⌉-th smallest distance, counting the zero self-distance
    let rank = m / 2 + 1;
    let mut best = (0, f64::INFINITY);
    for j in 0..m {
        let mut row = dist[j * m..(j + 1) * m].to_vec();
        row.sort_by(f64::total_cmp);
        let r = row[rank - 1];
        if r < best.1 {
            best = (j, r);
        }
    }
    Ok(best)
}

pub(crate) fn finish(
    m_hat: DenseMatrix,
    pairs: Vec<SmoothedGradientPair>,
    data: &Dataset,
    cfg: &EsgopConfig,
    mut diagnostics: EstimateDiagnostics,
) -> Result<SubspaceEstimate> {
    if !m_hat.is_finite() {
        return Err(Error::NonFinite("assembled outer-product matrix".into()));
    }
    let eig = sym_eigen(&m_hat)?;
    let k = cfg.k;
    let lam = &eig.eigenvalues;
    let eigengap = if k < lam.len() { lam[k - 1] - lam[k] } else { lam[k - 1] };
    let top = lam[0];
    diagnostics.effective_rank = lam.iter().filter(|&&l| l > RANK_TOL * top.abs()).count();
    diagnostics.relative_eigengap = if top > 0.0 { eigengap / top } else { 0.0 };
    diagnostics.variant = cfg.variant.as_str().into();
    diagnostics.n = data.n();
    diagnostics.m = cfg.m;
    diagnostics.n_used = pairs.iter().map(|p| 2 * p.n_used).sum();
    diagnostics.n_dropped = data.n() - diagnostics.n_used;
    if diagnostics.effective_rank < k {
        diagnostics.warnings.push(format!(
            "effective rank {} is below k = {k}; the estimate cannot span the target subspace",
            diagnostics.effective_rank
        ));
    }
    Ok(SubspaceEstimate {
        u_hat: eig.top(k),
        eigenvalues: eig.eigenvalues,
        eigengap,
        m_hat,
        pairs,
        diagnostics,
    })
}

/// Smoothed-gradient outer-product estimate averaged over `m` locations.
pub fn run_algorithm1(data: &Dataset, density: &dyn MarginalDensity, cfg: &EsgopConfig) -> Result<SubspaceEstimate> {
    let pairs = compute_pairs(data, density, cfg, GradientForm::Stein)?;
    let m_hat = assemble_m_hat(&pairs)?;
    finish(m_hat, pairs, data, cfg, EstimateDiagnostics::default())
}

/// As [`run_algorithm1`] with local-linear gradients in place of the Stein form.
pub fn run_lle(data: &Dataset, density: &dyn MarginalDensity, cfg: &EsgopConfig) -> Result<SubspaceEstimate> {
    let pairs = compute_pairs(data, density, cfg, GradientForm::LocalLinear)?;
    let m_hat = assemble_m_hat(&pairs)?;
    finish(m_hat, pairs, data, cfg, EstimateDiagnostics::default())
}

/// Robust variant: keeps the single per-partition matrix chosen by
/// [`median_of_means_select`].
pub fn run_median_of_means(data: &Dataset, density: &dyn MarginalDensity, cfg: &EsgopConfig) -> Result<SubspaceEstimate> {
    let pairs = compute_pairs(data, density, cfg, GradientForm::Stein)?;
    let blocks: Vec<DenseMatrix> = pairs.iter().map(|p| p.symmetric_product().scaled(0.5)).collect();
    let (j, r) = median_of_means_select(&blocks)?;
    let diag = EstimateDiagnostics {
        mom_selected: Some(j),
        mom_radius: Some(r),
        ..Default::default()
    };
    let chosen = blocks[j].clone();
    finish(chosen, pairs, data, cfg, diag)
}

/// Dispatches on `cfg.variant` for the variants that need only the design density.
pub fn run(data: &Dataset, density: &dyn MarginalDensity, cfg: &EsgopConfig) -> Result<SubspaceEstimate> {
    match cfg.variant {
        Variant::Mean => run_algorithm1(data, density, cfg),
        Variant::MedianOfMeans => run_median_of_means(data, density, cfg),
        Variant::Lle => run_lle(data, density, cfg),
        Variant::PluginRatio => Err(Error::Capability(
            "plugin_ratio needs an unlabeled sample; call run_plugin_ratio".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::esgop::SupportMode;
    use crate::metrics::subspace_distance;
    use crate::model::{generate, presets, DesignDistribution, NoiseSpec};

    fn pair(b1: Vec<f64>, b2: Vec<f64>) -> SmoothedGradientPair {
        let d = b1.len();
        SmoothedGradientPair {
            theta: DenseVector::zeros(d),
            beta1: DenseVector::from(b1),
            beta2: DenseVector::from(b2),
            n_used: 1,
        }
    }

    #[test]
    fn partitions_are_disjoint_and_drop_the_tail() {
        let parts = partition_indices(103, 5, 9).unwrap();
        assert_eq!(parts.len(), 5);
        let mut seen = vec![false; 103];
        for halves in &parts {
            for h in halves {
                assert_eq!(h.len(), 10);
                for &i in h {
                    assert!(!seen[i]);
                    seen[i] = true;
                }
            }
        }
        assert_eq!(seen.iter().filter(|&&s| s).count(), 100);
        assert_eq!(parts, partition_indices(103, 5, 9).unwrap());
        assert_ne!(parts, partition_indices(103, 5, 10).unwrap());
        assert!(matches!(partition_indices(9, 5, 0), Err(Error::Partition(_))));
    }

    #[test]
    fn theta_draws_share_prefixes_across_m() {
        let a = draw_thetas(&EsgopConfig::new(1.0, 0.1, 3, 1, 4), 5).unwrap();
        let b = draw_thetas(&EsgopConfig::new(1.0, 0.1, 7, 1, 4), 5).unwrap();
        for j in 0..3 {
            assert_eq!(a.row(j), b.row(j));
        }
    }

    #[test]
    fn single_pair_assembly() {
        let p = pair(vec![1.0, 2.0, 0.0], vec![3.0, -1.0, 0.5]);
        let m = assemble_m_hat(std::slice::from_ref(&p)).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let expect = 0.5 * (p.beta1[r] * p.beta2[c] + p.beta2[r] * p.beta1[c]);
                assert!((m[(r, c)] - expect).abs() < 1e-15);
                assert_eq!(m[(r, c)].to_bits(), m[(c, r)].to_bits());
            }
        }
        assert!(matches!(assemble_m_hat(&[]), Err(Error::Partition(_))));
    }

    #[test]
    fn assembled_matrix_is_exactly_symmetric() {
        let mut rng = RngStream::new(3, 0);
        let pairs: Vec<_> = (0..17)
            .map(|_| {
                let g = sample_gaussian(&mut rng, 2, 6, &DenseVector::zeros(6), 1.3).unwrap();
                pair(g.row(0), g.row(1))
            })
            .collect();
        assert_eq!(assemble_m_hat(&pairs).unwrap().asymmetry(), 0.0);
    }

    #[test]
    fn median_of_means_cases() {
        let a = DenseMatrix::from_diagonal(&[1.0, 0.0]);
        assert_eq!(median_of_means_select(std::slice::from_ref(&a)).unwrap(), (0, 0.0));
        assert_eq!(median_of_means_select(&[a.clone(), a.clone(), a.clone()]).unwrap(), (0, 0.0));
        let outlier = DenseMatrix::from_diagonal(&[100.0, -50.0]);
        let near = |e: f64| DenseMatrix::from_diagonal(&[1.0 + e, 0.0]);
        let blocks = vec![outlier, near(0.0), near(0.1), near(-0.1), near(0.05)];
        let (j, r) = median_of_means_select(&blocks).unwrap();
        // distances from 1.05: 0, 0.05, 0.05, 0.15, far; third smallest 0.05
        assert_eq!(j, 4);
        assert!((r - 0.05).abs() < 1e-12, "{r}");
        assert!(median_of_means_select(&[]).is_err());
    }

    #[test]
    fn one_partition_cannot_recover_three_directions() {
        let model = presets::paper_fig1(NoiseSpec::Gaussian { sigma: 0.1 });
        let design = DesignDistribution::standard_gaussian(10).unwrap();
        let mut bad = 0;
        for r in 0..10 {
            let data = generate(&model, &design, 20_000, &mut RngStream::new(r, 50)).unwrap();
            let cfg = EsgopConfig::new(1.0, 1.0 / 120f64.sqrt(), 1, 3, r);
            let est = run_algorithm1(&data, &design, &cfg).unwrap();
            assert!(est.diagnostics.effective_rank <= 2);
            assert!(!est.diagnostics.warnings.is_empty());
            if subspace_distance(&est.u_hat, model.u()).unwrap().procrustes > 0.5 {
                bad += 1;
            }
        }
        assert!(bad >= 9, "{bad}/10");
    }

    #[test]
    fn run_is_deterministic_and_dispatches() {
        let model = presets::paper_fig1(NoiseSpec::None);
        let design = DesignDistribution::standard_gaussian(10).unwrap();
        let data = generate(&model, &design, 3_000, &mut RngStream::new(1, 0)).unwrap();
        let cfg = EsgopConfig::new(1.0, 0.09, 5, 3, 42);
        let a = run(&data, &design, &cfg).unwrap();
        let b = run_algorithm1(&data, &design, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.diagnostics.n_used + a.diagnostics.n_dropped, 3_000);
        assert_eq!(a.diagnostics.n_used, 3_000);
        let mom = run(&data, &design, &cfg.clone().with_variant(Variant::MedianOfMeans)).unwrap();
        assert!(mom.diagnostics.mom_selected.unwrap() < 5);
        assert!(run(&data, &design, &cfg.clone().with_variant(Variant::PluginRatio)).is_err());
        let lle = run(&data, &design, &cfg.clone().with_variant(Variant::Lle)).unwrap();
        assert_eq!(lle.u_hat.shape(), (10, 3));
    }

    #[test]
    fn constraint_and_support_errors() {
        let model = presets::phase_retrieval(3, NoiseSpec::None).unwrap();
        let design = DesignDistribution::truncated_gaussian(3, 4.0).unwrap();
        let data = generate(&model, &design, 600, &mut RngStream::new(1, 0)).unwrap();
        let cfg = EsgopConfig::new(0.5, 0.05, 4, 1, 0);
        assert!(matches!(run(&data, &design, &cfg), Err(Error::Support(_))));
        run(&data, &design, &cfg.clone().with_support_mode(SupportMode::AppendixC)).unwrap();
        let wide = EsgopConfig::new(0.5, 0.2, 4, 1, 0).with_support_mode(SupportMode::AppendixC);
        assert!(matches!(run(&data, &design, &wide), Err(Error::Validation(_))));
        let many = EsgopConfig::new(0.5, 0.05, 150, 1, 0).with_support_mode(SupportMode::AppendixC);
        assert!(matches!(run(&data, &design, &many), Err(Error::Validation(_))));
        run(&data, &design, &many.relaxed()).unwrap();
    }
}
