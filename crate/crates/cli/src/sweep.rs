//! Grid sweeps with replicates.

use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use esgop_core::esgop::{run, run_plugin_ratio, EsgopConfig, RatioEstimatorSpec, Variant};
use esgop_core::metrics::{fit_rate, subspace_distance};
use esgop_core::model::generate;
use esgop_core::numkit::RngStream;

use crate::seeds::{derive_seed, DATA_STREAM, UNLABELED_STREAM};
use crate::spec::{resolve_sigma_theta, Axis, DesignSpec, ExperimentSpec};

/// One grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub design: DesignSpec,
    pub n: usize,
    pub h: f64,
    pub m: usize,
    pub sigma_theta: f64,
}

impl Cell {
    /// Canonical description used for seeding.
    pub fn key(&self, spec: &ExperimentSpec) -> String {
        format!(
            "model={};d={:?};noise={:?};design={};variant={};n={};h={:?};m={};sigma_theta={:?}",
            spec.model.id,
            spec.model.d,
            spec.model.noise,
            self.design.label(),
            spec.variant.as_str(),
            self.n,
            self.h,
            self.m,
            self.sigma_theta
        )
    }
}

/// One row of `runs.csv`. Column order is the field order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub model: String,
    pub design: String,
    pub variant: String,
    pub n: usize,
    pub h: f64,
    pub m: usize,
    pub sigma_theta: f64,
    pub replicate: usize,
    pub seed: u64,
    pub procrustes: f64,
    pub sin_theta: f64,
    pub eigengap: f64,
    pub wall_ms: f64,
}

pub const RUNS_HEADER: &str =
    "experiment,model,design,variant,n,h,m,sigma_theta,replicate,seed,procrustes,sin_theta,eigengap,wall_ms";

/// Cells in grid order: design, then n, then h, then m.
pub fn cells(spec: &ExperimentSpec) -> Result<Vec<Cell>> {
    let model = spec.model.build()?;
    let mut out = Vec::new();
    for design in &spec.designs {
        for &n in &spec.n {
            for &h in &spec.h {
                for &m in &spec.m {
                    out.push(Cell {
                        design: *design,
                        n,
                        h,
                        m,
                        sigma_theta: resolve_sigma_theta(spec.sigma_theta, h, &model)?,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Runs one replicate of one cell.
pub fn run_cell(spec: &ExperimentSpec, cell: &Cell, replicate: usize) -> Result<RunRecord> {
    let seed = derive_seed(spec.seed, &cell.key(spec), replicate);
    run_cell_with_seed(spec, cell, replicate, seed)
}

/// Reruns a cell from the seed stored in its record.
pub fn run_cell_with_seed(spec: &ExperimentSpec, cell: &Cell, replicate: usize, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let model = spec.model.build()?;
    let design = cell.design.build(model.d())?;
    let data = generate(&model, &design, cell.n, &mut RngStream::new(seed, DATA_STREAM))?;
    let cfg = EsgopConfig {
        h: cell.h,
        sigma_theta: cell.sigma_theta,
        m: cell.m,
        k: spec.k.unwrap_or(model.k()),
        variant: spec.variant,
        seed,
        relax_theory_constraints: spec.relax_theory_constraints,
        support_mode: spec.support_mode,
    };
    let est = if spec.variant == Variant::PluginRatio {
        let unlabeled = design.sample(&mut RngStream::new(seed, UNLABELED_STREAM), spec.unlabeled_n);
        let ratio = RatioEstimatorSpec::GaussianFit { reference: Some(design.clone()) };
        run_plugin_ratio(&data, &unlabeled, &cfg, &ratio)?
    } else {
        run(&data, &design, &cfg)?
    };
    let dist = subspace_distance(&est.u_hat, model.u())?;
    Ok(RunRecord {
        experiment: spec.name.clone(),
        model: spec.model.id.clone(),
        design: cell.design.label(),
        variant: spec.variant.as_str().into(),
        n: cell.n,
        h: cell.h,
        m: cell.m,
        sigma_theta: cell.sigma_theta,
        replicate,
        seed,
        procrustes: dist.procrustes,
        sin_theta: dist.sin_theta,
        eigengap: est.eigengap,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Every `(cell, replicate)` pair, executed on the current rayon pool and
/// returned in grid order.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let cells = cells(spec)?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.replicates).map(move |r| (c, r)))
        .collect();
    jobs.par_iter()
        .map(|&(c, r)| {
            run_cell(spec, &cells[c], r)
                .with_context(|| format!("cell {} replicate {r}", cells[c].key(spec)))
        })
        .collect()
}

pub fn runs_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if records.is_empty() {
        w.write_record(RUNS_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn parse_runs_csv(text: &str) -> Result<Vec<RunRecord>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != RUNS_HEADER {
        anyhow::bail!("unexpected runs.csv header: {}", header.join(","));
    }
    rdr.deserialize().map(|r| r.context("parsing runs.csv row")).collect()
}

/// Mean and standard error of one cell's replicates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub design: String,
    pub n: usize,
    pub h: f64,
    pub m: usize,
    pub sigma_theta: f64,
    pub replicates: usize,
    pub mean_procrustes: f64,
    pub se_procrustes: f64,
    pub mean_sin_theta: f64,
    pub max_procrustes: f64,
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut out: Vec<CellSummary> = Vec::new();
    let mut groups: Vec<Vec<&RunRecord>> = Vec::new();
    for r in records {
        let pos = out
            .iter()
            .position(|c| c.design == r.design && c.n == r.n && c.h == r.h && c.m == r.m && c.sigma_theta == r.sigma_theta);
        match pos {
            Some(i) => groups[i].push(r),
            None => {
                out.push(CellSummary {
                    design: r.design.clone(),
                    n: r.n,
                    h: r.h,
                    m: r.m,
                    sigma_theta: r.sigma_theta,
                    replicates: 0,
                    mean_procrustes: 0.0,
                    se_procrustes: 0.0,
                    mean_sin_theta: 0.0,
                    max_procrustes: 0.0,
                });
                groups.push(vec![r]);
            }
        }
    }
    for (c, g) in out.iter_mut().zip(&groups) {
        let p: Vec<f64> = g.iter().map(|r| r.procrustes).collect();
        let s: Vec<f64> = g.iter().map(|r| r.sin_theta).collect();
        (c.mean_procrustes, c.se_procrustes) = mean_se(&p);
        c.mean_sin_theta = mean_se(&s).0;
        c.max_procrustes = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        c.replicates = g.len();
    }
    out
}

/// Points of one plotted series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    /// `(x, mean, standard error)`.
    pub points: Vec<(f64, f64, f64)>,
}

fn axis_value(axis: Axis, c: &CellSummary) -> f64 {
    match axis {
        Axis::N => c.n as f64,
        Axis::H => c.h,
        Axis::M => c.m as f64,
    }
}

fn series_label(axis: Axis, c: &CellSummary) -> String {
    let mut parts = vec![c.design.clone()];
    if axis != Axis::N {
        parts.push(format!("n={}", c.n));
    }
    if axis != Axis::H {
        parts.push(format!("h={}", c.h));
    }
    if axis != Axis::M {
        parts.push(format!("m={}", c.m));
    }
    parts.join(", ")
}

/// Groups cell summaries into series along `axis`, one per remaining parameter combination.
pub fn series(axis: Axis, cells: &[CellSummary]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for c in cells {
        let label = series_label(axis, c);
        let pt = (axis_value(axis, c), c.mean_procrustes, c.se_procrustes);
        match out.iter_mut().find(|s| s.label == label) {
            Some(s) => s.points.push(pt),
            None => out.push(Series { label, points: vec![pt] }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Log-log slope of mean error against the axis for each series with ≥ 3 points.
pub fn series_slopes(series: &[Series]) -> Vec<(String, Option<f64>)> {
    series
        .iter()
        .map(|s| {
            let pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.0, p.1)).collect();
            (s.label.clone(), fit_rate(&pts).ok().map(|f| f.slope))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ModelSpec;

    fn small() -> ExperimentSpec {
        ExperimentSpec {
            name: "t".into(),
            model: ModelSpec::new("cubic"),
            n: vec![1_000, 2_000],
            h: vec![1.0, 0.8],
            m: vec![5],
            replicates: 2,
            ..ExperimentSpec::fig2()
        }
    }

    #[test]
    fn one_record_per_cell_and_replicate() {
        let spec = small();
        let recs = run_sweep(&spec).unwrap();
        assert_eq!(recs.len(), 8);
        assert_eq!((recs[0].n, recs[0].h, recs[0].replicate), (1_000, 1.0, 0));
        assert_eq!((recs[3].n, recs[3].h, recs[3].replicate), (1_000, 0.8, 1));
        let again = run_cell_with_seed(&spec, &cells(&spec).unwrap()[1], 0, recs[2].seed).unwrap();
        assert_eq!(again.procrustes.to_bits(), recs[2].procrustes.to_bits());
        let text = runs_csv(&recs).unwrap();
        assert!(text.starts_with(RUNS_HEADER));
        assert_eq!(parse_runs_csv(&text).unwrap(), recs);
        let sum = summarize(&recs);
        assert_eq!(sum.len(), 4);
        assert!(sum.iter().all(|c| c.replicates == 2));
        let ser = series(Axis::N, &sum);
        assert_eq!(ser.len(), 2);
        assert_eq!(ser[0].points.len(), 2);
    }

    #[test]
    fn adding_cells_keeps_existing_seeds() {
        let spec = small();
        let mut bigger = spec.clone();
        bigger.n.insert(0, 500);
        bigger.h.push(1.2);
        let c = cells(&spec).unwrap();
        let cb = cells(&bigger).unwrap();
        let same = cb.iter().find(|x| **x == c[0]).unwrap();
        assert_eq!(run_cell(&spec, &c[0], 1).unwrap().seed, run_cell(&bigger, same, 1).unwrap().seed);
    }

    #[test]
    fn empty_header_only_output() {
        assert_eq!(runs_csv(&[]).unwrap().trim_end(), RUNS_HEADER);
    }
}
