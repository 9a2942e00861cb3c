//! Subcommand implementations.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::json;

use esgop_core::esgop::{exhaustiveness_m_bound, run, run_plugin_ratio, EsgopConfig, RatioEstimatorSpec, Variant};
use esgop_core::metrics::{estimate_moments, subspace_distance};
use esgop_core::model::generate;
use esgop_core::numkit::RngStream;

use crate::io::{matrix_csv, read_dataset, read_matrix, write_json, write_string};
use crate::plot::line_plot_svg;
use crate::repro::run_repro;
use crate::seeds::{DATA_STREAM, UNLABELED_STREAM};
use crate::spec::{resolve_sigma_theta, Axis, DataSpec, EstimateSpec, ExperimentSpec, MomentsSpec, UnlabeledSpec};
use crate::sweep::{run_sweep, runs_csv, series, series_slopes, summarize};

fn ensure_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

/// Runs one estimate and writes `u_hat.csv`, `eigenvalues.csv` and `diag.json`.
pub fn cmd_estimate(spec: &EstimateSpec, out: &Path) -> Result<()> {
    let (data, truth) = match &spec.data {
        DataSpec::Csv { path, header } => (read_dataset(Path::new(path), *header)?, None),
        DataSpec::Generate { model, n } => {
            let model = model.build()?;
            let design = spec.design.build(model.d())?;
            let data = generate(&model, &design, *n, &mut RngStream::new(spec.seed, DATA_STREAM))?;
            (data, Some(model))
        }
    };
    let d = data.d();
    let design = spec.design.build(d)?;
    let e = &spec.estimator;
    let sigma_theta = match &truth {
        Some(model) => resolve_sigma_theta(e.sigma_theta, e.h, model)?,
        None => match e.sigma_theta {
            Some(s) => s,
            None => esgop_core::esgop::default_sigma_theta(e.h, d, None)?,
        },
    };
    let k = match (e.k, &truth) {
        (Some(k), _) => k,
        (None, Some(model)) => model.k(),
        (None, None) => bail!("estimator.k is required for CSV input"),
    };
    let cfg = EsgopConfig {
        h: e.h,
        sigma_theta,
        m: e.m,
        k,
        variant: e.variant,
        seed: spec.seed,
        relax_theory_constraints: e.relax_theory_constraints,
        support_mode: e.support_mode,
    };
    let est = if e.variant == Variant::PluginRatio {
        let unlabeled = match &spec.unlabeled {
            Some(UnlabeledSpec::Csv { path, header }) => read_matrix(Path::new(path), *header)?,
            Some(UnlabeledSpec::Generate { n }) => design.sample(&mut RngStream::new(spec.seed, UNLABELED_STREAM), *n),
            None => bail!("variant plugin_ratio needs an 'unlabeled' sample"),
        };
        run_plugin_ratio(&data, &unlabeled, &cfg, &RatioEstimatorSpec::GaussianFit { reference: None })?
    } else {
        run(&data, &design, &cfg)?
    };
    ensure_dir(out)?;
    write_string(&out.join("u_hat.csv"), &matrix_csv(&est.u_hat))?;
    let spectrum: String = est.eigenvalues.iter().map(|v| format!("{v}\n")).collect();
    write_string(&out.join("eigenvalues.csv"), &spectrum)?;
    let error = match &truth {
        Some(model) => Some(subspace_distance(&est.u_hat, model.u())?),
        None => None,
    };
    let diag = json!({
        "config": cfg,
        "design": spec.design,
        "eigenvalues": est.eigenvalues,
        "eigengap": est.eigengap,
        "diagnostics": est.diagnostics,
        "error_vs_truth": error.map(|r| json!({"procrustes": r.procrustes, "sin_theta": r.sin_theta})),
    });
    write_json(&out.join("diag.json"), &diag)
}

/// Runs a sweep and writes `runs.csv`, `summary.json` and `plot.svg`.
pub fn cmd_sweep(spec: &ExperimentSpec, out: &Path) -> Result<()> {
    let runs = run_sweep(spec)?;
    let cells = summarize(&runs);
    let ser = series(spec.x_axis, &cells);
    ensure_dir(out)?;
    write_string(&out.join("runs.csv"), &runs_csv(&runs)?)?;
    let slopes = if spec.x_axis == Axis::N { Some(series_slopes(&ser)) } else { None };
    write_json(&out.join("summary.json"), &json!({"experiment": spec, "cells": cells, "slopes": slopes}))?;
    let x = match spec.x_axis {
        Axis::N => "n",
        Axis::H => "h",
        Axis::M => "m",
    };
    write_string(&out.join("plot.svg"), &line_plot_svg(&spec.name, x, "procrustes error", &ser))
}

/// Runs a named reproduction and writes `summary.json` (plus runs and plot for sweeps).
/// Returns whether every check passed.
pub fn cmd_repro(name: &str, seed: u64, out: &Path) -> Result<bool> {
    let report = run_repro(name, seed)?;
    ensure_dir(out)?;
    if !report.runs.is_empty() {
        write_string(&out.join("runs.csv"), &runs_csv(&report.runs)?)?;
    }
    if let Some(svg) = &report.plot {
        write_string(&out.join("plot.svg"), svg)?;
    }
    write_json(&out.join("summary.json"), &report)?;
    for c in &report.checks {
        println!("criterion {:>2} {}: {}  {}", c.criterion, c.label, if c.passed { "PASS" } else { "FAIL" }, c.detail);
    }
    Ok(report.passed)
}

pub fn cmd_moments(spec: &MomentsSpec, out: &Path) -> Result<()> {
    let model = spec.model.build()?;
    let design = spec.design.build(model.d())?;
    let st = resolve_sigma_theta(spec.sigma_theta, spec.h, &model)?;
    let cfg = EsgopConfig::new(spec.h, st, 1, model.k(), spec.seed);
    let m = estimate_moments(&model, &design, &cfg, spec.mc_budget, &mut RngStream::new(spec.seed, 1))?;
    let bound = exhaustiveness_m_bound(m.mu_delta_hat.value, m.lambda_k_bar_hat, 0.05, model.d());
    ensure_dir(out)?;
    write_json(&out.join("moments.json"), &json!({"h": spec.h, "sigma_theta": st, "moments": m, "m_bound_delta_0.05": bound}))
}

/// The `save-demo` reproduction on its own.
pub fn cmd_save_demo(seed: u64, out: &Path) -> Result<bool> {
    cmd_repro("save-demo", seed, out)
}
