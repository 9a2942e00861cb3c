use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use esgop_cli::commands::{cmd_estimate, cmd_moments, cmd_repro, cmd_save_demo, cmd_sweep};
use esgop_cli::repro::REPRO_NAMES;
use esgop_cli::spec::{DataSpec, EstimateSpec, ExperimentSpec, MomentsSpec, SWEEP_PRESETS};

const RUNS_HELP: &str = "runs.csv columns: experiment, model, design, variant, n, h, m, sigma_theta, \
replicate, seed (derived per run; rerunning the cell with it reproduces the row), procrustes, \
sin_theta, eigengap, wall_ms";

#[derive(Parser)]
#[command(name = "esgop", version, about = "Central mean subspace estimation experiments", after_help = RUNS_HELP)]
struct Cli {
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the subspace once; writes u_hat.csv, eigenvalues.csv, diag.json.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Labeled CSV (d+1 columns, response last); overrides the config's data source.
        #[arg(long)]
        data: Option<PathBuf>,
        /// The data CSV has a header row.
        #[arg(long)]
        header: bool,
    },
    /// Grid sweep with replicates; writes runs.csv, summary.json, plot.svg.
    #[command(after_help = RUNS_HELP)]
    Sweep {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// One of fig1-gaussian, fig1-cauchy, fig2-msweep.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Named reproduction with pass/fail summary.json.
    Repro {
        name: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte-Carlo moment diagnostics; writes moments.json.
    Moments {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// SAVE counterexample demonstration.
    SaveDemo {
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Estimate { config, out, seed, data, header } => {
            let mut spec = EstimateSpec::from_json(&read(&config)?)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(path) = data {
                spec.data = DataSpec::Csv { path: path.display().to_string(), header };
            } else if let DataSpec::Csv { header: h, .. } = &mut spec.data {
                *h |= header;
            }
            cmd_estimate(&spec, &out)?;
            Ok(true)
        }
        Command::Sweep { config, preset, out, seed } => {
            let mut spec = match (config, preset) {
                (Some(c), _) => ExperimentSpec::from_json(&read(&c)?)?,
                (None, Some(p)) => match ExperimentSpec::preset(&p) {
                    Some(s) => s,
                    None => bail!("unknown sweep preset '{p}'; known: {}", SWEEP_PRESETS.join(", ")),
                },
                (None, None) => bail!("either --config or --preset is required"),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            cmd_sweep(&spec, &out)?;
            Ok(true)
        }
        Command::Repro { name, out, seed } => {
            if !REPRO_NAMES.contains(&name.as_str()) {
                bail!("unknown repro '{name}'; known: {}", REPRO_NAMES.join(", "));
            }
            cmd_repro(&name, seed, &out)
        }
        Command::Moments { config, out, seed } => {
            let mut spec = MomentsSpec::from_json(&read(&config)?)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            cmd_moments(&spec, &out)?;
            Ok(true)
        }
        Command::SaveDemo { out, seed } => cmd_save_demo(seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
