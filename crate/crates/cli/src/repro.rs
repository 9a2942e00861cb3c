//! Named reproduction experiments, each with pass/fail checks.

use std::time::Instant;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;

use esgop_core::baselines::{save_counterexample_demo, SaveDemoOptions};
use esgop_core::esgop::{
    bandwidth_for_bounded_support, default_sigma_theta, estimate_lle_gradient, estimate_smoothed_gradient,
    mom_partitions_for_confidence, run_algorithm1, run_median_of_means, run_plugin_ratio, EsgopConfig,
    RatioEstimatorSpec, SupportMode,
};
use esgop_core::metrics::{estimate_moments, subspace_distance};
use esgop_core::model::oracle::{moment_mu_rho_closed_form, true_smoothed_gradient};
use esgop_core::model::{generate, presets, DesignDistribution, LinkFunction, MultiIndexModel, NoiseSpec};
use esgop_core::numkit::{sample_gaussian, sample_standard_normal_matrix, thin_svd, DenseMatrix, DenseVector, RngStream};

use crate::plot::line_plot_svg;
use crate::seeds::{derive_seed, DATA_STREAM, UNLABELED_STREAM};
use crate::spec::{Axis, DesignSpec, ExperimentSpec};
use crate::sweep::{mean_se, run_sweep, series, series_slopes, summarize, CellSummary, RunRecord};

pub const REPRO_NAMES: [&str; 11] = [
    "fig1-gaussian",
    "fig1-cauchy",
    "fig2-msweep",
    "unbiased-check",
    "murho-check",
    "sandwich-check",
    "save-demo",
    "lle-check",
    "mom-stress",
    "biasC-check",
    "plugin-check",
];

/// One acceptance check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(criterion: u8, label: &str, passed: bool, detail: String) -> Self {
        Self {
            criterion,
            label: label.into(),
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproReport {
    pub name: String,
    pub seed: u64,
    pub passed: bool,
    pub wall_seconds: f64,
    pub checks: Vec<Check>,
    pub measured: serde_json::Value,
    #[serde(skip)]
    pub runs: Vec<RunRecord>,
    #[serde(skip)]
    pub plot: Option<String>,
}

pub fn run_repro(name: &str, seed: u64) -> Result<ReproReport> {
    let start = Instant::now();
    let (checks, measured, runs, plot) = match name {
        "fig1-gaussian" => fig1_gaussian(seed)?,
        "fig1-cauchy" => fig1_cauchy(seed)?,
        "fig2-msweep" => fig2_msweep(seed)?,
        "unbiased-check" => plain(unbiased_check(seed)?),
        "murho-check" => plain(murho_check(seed)?),
        "sandwich-check" => plain(sandwich_check(seed)?),
        "save-demo" => plain(save_demo(seed)?),
        "lle-check" => plain(lle_check(seed)?),
        "mom-stress" => plain(mom_stress(seed)?),
        "biasC-check" => plain(bias_c_check(seed)?),
        "plugin-check" => plain(plugin_check(seed)?),
        other => bail!("unknown repro '{other}'; known: {}", REPRO_NAMES.join(", ")),
    };
    Ok(ReproReport {
        name: name.into(),
        seed,
        passed: checks.iter().all(|c| c.passed),
        wall_seconds: start.elapsed().as_secs_f64(),
        checks,
        measured,
        runs,
        plot,
    })
}

type Outcome = (Vec<Check>, serde_json::Value, Vec<RunRecord>, Option<String>);

fn plain((checks, measured): (Vec<Check>, serde_json::Value)) -> Outcome {
    (checks, measured, Vec::new(), None)
}

fn sweep_with_plot(spec: &ExperimentSpec) -> Result<(Vec<RunRecord>, Vec<CellSummary>, String, f64)> {
    let start = Instant::now();
    let runs = run_sweep(spec)?;
    let secs = start.elapsed().as_secs_f64();
    let cells = summarize(&runs);
    let x_label = match spec.x_axis {
        Axis::N => "n",
        Axis::H => "h",
        Axis::M => "m",
    };
    let svg = line_plot_svg(&spec.name, x_label, "procrustes error", &series(spec.x_axis, &cells));
    Ok((runs, cells, svg, secs))
}

fn cell_means(cells: &[CellSummary], h: f64) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = cells.iter().filter(|c| c.h == h).map(|c| (c.n, c.mean_procrustes)).collect();
    v.sort_by_key(|p| p.0);
    v
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn fig1_gaussian(seed: u64) -> Result<Outcome> {
    let spec = ExperimentSpec {
        seed,
        ..ExperimentSpec::fig1(DesignSpec::default())
    };
    let (runs, cells, svg, secs) = sweep_with_plot(&spec)?;
    let at1 = cell_means(&cells, 1.0);
    let means: Vec<f64> = at1.iter().map(|p| p.1).collect();
    let pts: Vec<(f64, f64)> = at1.iter().map(|&(n, e)| (n as f64, e)).collect();
    let fit = esgop_core::metrics::fit_rate(&pts)?;
    let ok1 = strictly_decreasing(&means) && (-0.75..=-0.25).contains(&fit.slope) && secs < 600.0;
    let c1 = Check::new(
        1,
        "Fig-1 Gaussian rate",
        ok1,
        format!(
            "h=1 means {:?}, slope {:.3} (need strictly decreasing, slope in [-0.75, -0.25]), sweep {:.1}s (< 600s)",
            round(&means),
            fit.slope,
            secs
        ),
    );

    let n_max = *spec.n.iter().max().expect("non-empty");
    let err = |h: f64, r: usize| {
        runs.iter()
            .find(|x| x.n == n_max && x.h == h && x.replicate == r)
            .map(|x| x.procrustes)
            .unwrap_or(f64::NAN)
    };
    let votes = (0..spec.replicates)
        .filter(|&r| err(1.0, r) <= err(0.5, r) && err(1.0, r) <= err(1.5, r))
        .count();
    let mean_at = |h: f64| cells.iter().find(|c| c.n == n_max && c.h == h).map(|c| c.mean_procrustes).unwrap_or(f64::NAN);
    let (m05, m1, m15) = (mean_at(0.5), mean_at(1.0), mean_at(1.5));
    let ok2 = 2 * votes > spec.replicates && m1 <= m05 && m1 <= m15;
    let c2 = Check::new(
        2,
        "Fig-1 bandwidth sensitivity",
        ok2,
        format!(
            "n={n_max}: mean error h=0.5 {m05:.4}, h=1 {m1:.4}, h=1.5 {m15:.4}; h=1 best in {votes}/{} replicates",
            spec.replicates
        ),
    );
    let measured = json!({
        "slope_h1": fit.slope,
        "r_squared_h1": fit.r_squared,
        "means_h1": means,
        "sweep_seconds": secs,
        "votes_h1_best": votes,
        "cells": cells,
        "slopes": series_slopes(&series(Axis::N, &cells)),
    });
    Ok((vec![c1, c2], measured, runs, Some(svg)))
}

fn fig1_cauchy(seed: u64) -> Result<Outcome> {
    let spec = ExperimentSpec {
        seed,
        ..ExperimentSpec::fig1(DesignSpec::Cauchy)
    };
    let (runs, cells, svg, _) = sweep_with_plot(&spec)?;
    let finite = runs.iter().all(|r| r.procrustes.is_finite());
    let mut parts = Vec::new();
    let mut slopes_ok = true;
    let mut per_h = Vec::new();
    for &h in &spec.h {
        let at = cell_means(&cells, h);
        let means: Vec<f64> = at.iter().map(|p| p.1).collect();
        let pts: Vec<(f64, f64)> = at.iter().map(|&(n, e)| (n as f64, e)).collect();
        let slope = esgop_core::metrics::fit_rate(&pts)?.slope;
        slopes_ok &= slope < 0.0;
        let strict = strictly_decreasing(&means);
        parts.push(format!("h={h}: slope {slope:.3}{}", if strict { " (strict)" } else { "" }));
        per_h.push(json!({"h": h, "means": means, "slope": slope, "strictly_decreasing": strict}));
    }
    let c3 = Check::new(
        3,
        "Fig-1 Cauchy design",
        finite && slopes_ok,
        format!("all errors finite: {finite}; decreasing means negative log-log slope: {}", parts.join(", ")),
    );
    Ok((vec![c3], json!({"per_h": per_h, "cells": cells}), runs, Some(svg)))
}

fn fig2_msweep(seed: u64) -> Result<Outcome> {
    let spec = ExperimentSpec {
        seed,
        ..ExperimentSpec::fig2()
    };
    let (runs, cells, svg, _) = sweep_with_plot(&spec)?;
    let at = |m: usize| cells.iter().find(|c| c.m == m).map(|c| c.mean_procrustes).unwrap_or(f64::NAN);
    let m_max = *spec.m.iter().max().expect("non-empty");
    let (e1, e15, emax) = (at(1), at(15), at(m_max));
    let ok = e1 >= 2.0 * e15 && e15 <= emax;
    let c4 = Check::new(
        4,
        "Fig-2 m-sweep",
        ok,
        format!("mean error m=1 {e1:.4}, m=15 {e15:.4} (ratio {:.2}, need >= 2), m={m_max} {emax:.4}", e1 / e15),
    );
    let curve: Vec<(usize, f64)> = cells.iter().map(|c| (c.m, c.mean_procrustes)).collect();
    Ok((vec![c4], json!({"curve": curve, "cells": cells}), runs, Some(svg)))
}

fn round(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn stream(seed: u64, key: &str, r: usize, id: u64) -> RngStream {
    RngStream::new(derive_seed(seed, key, r), id)
}

fn unbiased_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    const ESTIMATES: usize = 200;
    const N: usize = 1_000;
    let noise = NoiseSpec::Gaussian { sigma: presets::DEFAULT_SIGMA_Y };
    let e1 = DenseMatrix::standard_basis(5, 1);
    let models = [
        ("linear", MultiIndexModel::new(e1, LinkFunction::linear(vec![1.0])?, noise)?),
        ("quadratic", presets::phase_retrieval(5, noise)?),
        ("paper-fig1", presets::paper_fig1(noise)),
    ];
    let h = 1.0;
    let mut worst = 0.0_f64;
    let mut worst_at = json!(null);
    let mut bad = 0;
    let mut total = 0;
    let mut rows = Vec::new();
    for (name, model) in &models {
        let d = model.d();
        let design = DesignDistribution::standard_gaussian(d)?;
        let st = default_sigma_theta(h, d, model.link().degree())?;
        for t in 0..3 {
            let key = format!("unbiased/{name}/{t}");
            let theta = sample_gaussian(&mut stream(seed, &key, 0, 1), 1, d, &DenseVector::zeros(d), st)?.row(0);
            let truth = true_smoothed_gradient(model, h, &theta, None)?.beta;
            let ests: Vec<Vec<f64>> = (0..ESTIMATES)
                .map(|r| {
                    let data = generate(model, &design, N, &mut stream(seed, &key, r + 1, DATA_STREAM))?;
                    Ok(estimate_smoothed_gradient(&data, &theta, h, &design, SupportMode::Strict)?.into_vec())
                })
                .collect::<Result<_>>()?;
            for j in 0..d {
                let col: Vec<f64> = ests.iter().map(|e| e[j]).collect();
                let (m, se) = mean_se(&col);
                let z = (m - truth[j]).abs() / se;
                if z > worst {
                    worst = z;
                    worst_at = json!({"link": name, "theta_index": t, "coordinate": j, "mean": m, "se": se, "truth": truth[j]});
                }
                total += 1;
                if !(z <= 3.0) {
                    bad += 1;
                }
            }
            rows.push(json!({"link": name, "theta_index": t, "truth": truth.into_vec()}));
        }
    }
    let c = Check::new(
        5,
        "Unbiasedness suite",
        bad == 0,
        format!("{bad}/{total} coordinates beyond 3 SE (max |z| = {worst:.2}); {ESTIMATES} estimates of n={N} each"),
    );
    Ok((vec![c], json!({"max_abs_z": worst, "worst": worst_at, "violations": bad, "coordinates": total, "cases": rows})))
}

fn murho_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    const SAMPLES: usize = 10_000_000;
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for &h in &[0.8, 1.0] {
        for d in 1..=3usize {
            let model = presets::phase_retrieval(d, NoiseSpec::None)?;
            let design = DesignDistribution::standard_gaussian(d)?;
            let cfg = EsgopConfig::new(h, default_sigma_theta(h, d, Some(2))?, 1, 1, 0);
            let m = estimate_moments(&model, &design, &cfg, SAMPLES, &mut stream(seed, &format!("murho/{h}/{d}"), 0, 1))?;
            let exact = moment_mu_rho_closed_form(1.0, h, d)?;
            let rel = (m.mu_rho_hat.value / exact - 1.0).abs();
            worst = worst.max(rel);
            rows.push(json!({"h": h, "d": d, "mc": m.mu_rho_hat.value, "se": m.mu_rho_hat.std_error, "closed_form": exact, "rel_error": rel}));
        }
    }
    let c = Check::new(
        6,
        "mu_rho closed form",
        worst <= 0.10,
        format!("max relative deviation {:.4} over h in {{0.8, 1}}, d in {{1,2,3}} at {SAMPLES} samples (need <= 0.10)", worst),
    );
    Ok((vec![c], json!({"cases": rows, "max_rel_error": worst})))
}

fn sandwich_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    let mut rng = stream(seed, "sandwich", 0, 1);
    let mut violations = 0;
    for _ in 0..1_000 {
        let d = 2 + (rand_index(&mut rng, 19));
        let k = 1 + rand_index(&mut rng, 5).min(d - 1);
        let a = thin_svd(&sample_standard_normal_matrix(&mut rng, d, k))?.u;
        let b = thin_svd(&sample_standard_normal_matrix(&mut rng, d, k))?.u;
        let r = subspace_distance(&a, &b)?;
        if !(r.sin_theta <= r.procrustes + 1e-12 && r.procrustes <= 2f64.sqrt() * r.sin_theta + 1e-12) {
            violations += 1;
        }
    }
    let u = DenseMatrix::standard_basis(6, 2);
    let same = subspace_distance(&u, &u)?.procrustes;
    let e1 = DenseMatrix::standard_basis(2, 1);
    let e2 = DenseMatrix::from_col_major(2, 1, vec![0.0, 1.0])?;
    let orth = subspace_distance(&e2, &e1)?;
    let exact = same == 0.0 && (orth.procrustes - 2f64.sqrt()).abs() <= 1e-10 && (orth.sin_theta - 1.0).abs() <= 1e-10;
    let c = Check::new(
        7,
        "Distance sandwich",
        violations == 0 && exact,
        format!(
            "{violations} violations on 1000 pairs; d(U,U) = {same}, orthogonal lines procrustes {:.12}, sin {:.12}",
            orth.procrustes, orth.sin_theta
        ),
    );
    Ok((vec![c], json!({"violations": violations, "self_distance": same, "orthogonal_procrustes": orth.procrustes})))
}

fn rand_index(rng: &mut RngStream, n: usize) -> usize {
    use rand::Rng;
    rng.random_range(0..n)
}

fn save_demo(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    let opts = SaveDemoOptions { seed, ..Default::default() };
    let rep = save_counterexample_demo(&opts, &mut stream(seed, "save-demo", 0, DATA_STREAM))?;
    let ok = rep.save_op_norm < 0.1 && rep.max_identity_deviation <= 0.03 && rep.esgop_procrustes < 0.25;
    let c = Check::new(
        8,
        "SAVE counterexample",
        ok,
        format!(
            "|M_SAVE|op {:.5} (< 0.1), |M_SIR|op {:.4}, identity deviation {:.4} (<= 0.03), ESGOP error {:.4} (< 0.25)",
            rep.save_op_norm, rep.sir_op_norm, rep.max_identity_deviation, rep.esgop_procrustes
        ),
    );
    Ok((vec![c], serde_json::to_value(&rep)?))
}

fn lle_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    let model = presets::paper_fig1(NoiseSpec::Gaussian { sigma: presets::DEFAULT_SIGMA_Y });
    let design = DesignDistribution::standard_gaussian(10)?;
    let h = 1.0;
    let st = default_sigma_theta(h, 10, Some(2))?;
    let ns = [1_000usize, 10_000, 100_000];
    let mut monotone = 0;
    let mut rows = Vec::new();
    for r in 0..10 {
        let theta = sample_gaussian(&mut stream(seed, "lle/theta", r, 1), 1, 10, &DenseVector::zeros(10), st)?.row(0);
        let mut gaps = Vec::new();
        for &n in &ns {
            let data = generate(&model, &design, n, &mut stream(seed, &format!("lle/{n}"), r, DATA_STREAM))?;
            let a = estimate_smoothed_gradient(&data, &theta, h, &design, SupportMode::Strict)?;
            let b = estimate_lle_gradient(&data, &theta, h, &design, SupportMode::Strict)?;
            gaps.push(a.sub(&b).norm());
        }
        if strictly_decreasing(&gaps) {
            monotone += 1;
        }
        rows.push(gaps);
    }
    let c = Check::new(
        9,
        "LLE equivalence",
        monotone >= 8,
        format!("gap decreasing over n in {{1e3, 1e4, 1e5}} in {monotone}/10 replicates (need >= 8)"),
    );
    Ok((vec![c], json!({"gaps": rows, "monotone": monotone})))
}

/// Linear-interpolation quantile of a sample.
pub fn quantile(v: &[f64], q: f64) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let pos = q * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

fn mom_stress(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    let noise = NoiseSpec::StudentT { df: 2.5, scale: 1.0 };
    let model = presets::paper_fig1(noise);
    let design = DesignDistribution::standard_gaussian(10)?;
    let m = mom_partitions_for_confidence(0.05)?;
    let h = 1.0;
    let st = default_sigma_theta(h, 10, Some(2))?;
    let (mut mean_err, mut mom_err) = (Vec::new(), Vec::new());
    for r in 0..40 {
        let s = derive_seed(seed, "mom-stress", r);
        let data = generate(&model, &design, 40_000, &mut RngStream::new(s, DATA_STREAM))?;
        let cfg = EsgopConfig::new(h, st, m, 3, s);
        mean_err.push(subspace_distance(&run_algorithm1(&data, &design, &cfg)?.u_hat, model.u())?.procrustes);
        mom_err.push(subspace_distance(&run_median_of_means(&data, &design, &cfg)?.u_hat, model.u())?.procrustes);
    }
    let (p_mean, p_mom) = (quantile(&mean_err, 0.95), quantile(&mom_err, 0.95));
    let c = Check::new(
        10,
        "MoM stress",
        p_mom <= p_mean,
        format!("95th percentile error over 40 replicates: median-of-means {p_mom:.4}, mean {p_mean:.4} (m = {m}, t(2.5) noise)"),
    );
    Ok((vec![c], json!({"m": m, "p95_mean": p_mean, "p95_mom": p_mom, "mean_errors": mean_err, "mom_errors": mom_err})))
}

fn bias_c_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    const ESTIMATES: usize = 500;
    const N: usize = 10_000;
    let (radius, d) = (10.0, 5);
    let design = DesignDistribution::truncated_gaussian(d, radius)?;
    let model = presets::phase_retrieval(d, NoiseSpec::None)?;
    let h = bandwidth_for_bounded_support(radius, d, N as f64)?;
    let st = default_sigma_theta(h, d, Some(2))?;
    let mut wins = 0;
    let mut groups = Vec::new();
    for g in 0..10 {
        let theta = sample_gaussian(&mut stream(seed, "biasC/theta", g, 1), 1, d, &DenseVector::zeros(d), st)?.row(0);
        let targets = [
            true_smoothed_gradient(&model, h, &theta, None)?.beta,
            true_smoothed_gradient(&model, 2.0 * h, &theta, None)?.beta,
        ];
        let mut acc = [DenseVector::zeros(d), DenseVector::zeros(d)];
        for r in 0..ESTIMATES {
            let data = generate(&model, &design, N, &mut stream(seed, &format!("biasC/{g}"), r, DATA_STREAM))?;
            for (i, bw) in [h, 2.0 * h].into_iter().enumerate() {
                let b = estimate_smoothed_gradient(&data, &theta, bw, &design, SupportMode::AppendixC)?;
                acc[i] = acc[i].add(&b.scaled(1.0 / ESTIMATES as f64));
            }
        }
        let bias = [acc[0].sub(&targets[0]).norm(), acc[1].sub(&targets[1]).norm()];
        if bias[0] < bias[1] {
            wins += 1;
        }
        groups.push(json!({"bias_h": bias[0], "bias_2h": bias[1]}));
    }
    let c = Check::new(
        11,
        "Bounded-support bias",
        wins >= 8,
        format!("measured bias smaller at h = {h:.4} than at 2h in {wins}/10 seed groups (need >= 8)"),
    );
    Ok((vec![c], json!({"h": h, "groups": groups, "wins": wins})))
}

fn plugin_check(seed: u64) -> Result<(Vec<Check>, serde_json::Value)> {
    let model = presets::paper_fig1(NoiseSpec::Gaussian { sigma: presets::DEFAULT_SIGMA_Y });
    let design = DesignDistribution::standard_gaussian(10)?;
    let st = default_sigma_theta(1.0, 10, Some(2))?;
    let mut identical = true;
    let (mut known, mut fitted) = (Vec::new(), Vec::new());
    let mut log_amp = Vec::new();
    for r in 0..10 {
        let s = derive_seed(seed, "plugin", r);
        let data = generate(&model, &design, 40_000, &mut RngStream::new(s, DATA_STREAM))?;
        let cfg = EsgopConfig::new(1.0, st, 15, 3, s);
        let base = run_algorithm1(&data, &design, &cfg)?;
        let empty = DenseMatrix::zeros(0, 10);
        let inj = run_plugin_ratio(&data, &empty, &cfg, &RatioEstimatorSpec::Injected(design.clone()))?;
        identical &= bits(&base.m_hat) == bits(&inj.m_hat) && bits(&base.u_hat) == bits(&inj.u_hat);
        let unlabeled = design.sample(&mut RngStream::new(s, UNLABELED_STREAM), 1_000_000);
        let fit = run_plugin_ratio(&data, &unlabeled, &cfg, &RatioEstimatorSpec::GaussianFit { reference: Some(design.clone()) })?;
        known.push(subspace_distance(&base.u_hat, model.u())?.procrustes);
        fitted.push(subspace_distance(&fit.u_hat, model.u())?.procrustes);
        log_amp.push(fit.diagnostics.plugin.map(|p| p.log_amplification).unwrap_or(f64::NAN));
    }
    let (mk, mf) = (mean_se(&known).0, mean_se(&fitted).0);
    let c = Check::new(
        12,
        "Plug-in ratio",
        identical && mf <= 2.0 * mk,
        format!("injected true ratio bit-identical: {identical}; mean error fitted {mf:.4} vs known {mk:.4} (ratio {:.3}, need <= 2)", mf / mk),
    );
    Ok((vec![c], json!({"bit_identical": identical, "known": known, "fitted": fitted, "log_amplification": log_amp})))
}

fn bits(m: &DenseMatrix) -> Vec<u64> {
    m.as_slice().iter().map(|v| v.to_bits()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_interpolates() {
        let v: Vec<f64> = (0..=20).map(f64::from).collect();
        assert_eq!(quantile(&v, 0.95), 19.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn unknown_name_lists_presets() {
        let e = run_repro("nope", 0).unwrap_err().to_string();
        assert!(e.contains("fig1-gaussian") && e.contains("biasC-check"), "{e}");
    }

    #[test]
    fn sandwich_repro_passes() {
        let r = run_repro("sandwich-check", 0).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert_eq!(r.checks[0].criterion, 7);
    }
}
