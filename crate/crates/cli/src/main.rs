mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::LaatFlags;
use crate::error::{CliError, CliResult};

/// Manifold extraction from noisy point clouds.
#[derive(Debug, Parser)]
#[command(name = "laat", version)]
struct Cli {
    /// Worker threads for parallel stages.
    #[arg(long, global = true, env = "LAAT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a labeled synthetic cloud.
    Generate(GenerateArgs),
    /// Run the ant colony and write the pheromone field.
    Denoise(DenoiseArgs),
    /// Write the stationary vector of a Markov-chain baseline.
    Mc(McArgs),
    /// Score reports against labeled clouds.
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// two-arms, four-cylinders or voronoi-web.
    pub family: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seed of the background noise; defaults to `--seed`.
    #[arg(long)]
    pub noise_seed: Option<u64>,
    /// Defaults to `<family>-<seed>.csv`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// voronoi-web: total points.
    #[arg(long)]
    pub points: Option<usize>,
    /// voronoi-web: number of cell centers.
    #[arg(long)]
    pub centers: Option<usize>,
    /// voronoi-web: (filament + cluster) : (wall + void) ratio.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Manifest path; defaults to `<output>.manifest.json`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// TOML file with run settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: LaatFlags,
    /// Write the field after every epoch into this directory.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Remove points scoring at least this much and run again on the rest.
    #[arg(long)]
    pub rerun_excluding: Option<f64>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// alignment or distance.
    #[arg(long, default_value = "alignment")]
    pub flavor: String,
    #[arg(long, default_value_t = 10.0)]
    pub beta: f64,
    #[arg(long, short = 'r', default_value_t = 0.2)]
    pub radius: f64,
    /// Stopping tolerance on the L1 residual.
    #[arg(long, default_value_t = laat_core::markov::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long, default_value_t = laat_core::markov::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// lenient or strict handling of coincident points.
    #[arg(long, default_value = "lenient")]
    pub degeneracy: String,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum EvaluateCommand {
    /// AHD to the ground truth at every threshold.
    Sweep(SweepArgs),
    /// Pick the best threshold on a labeled cloud, optionally applying it to another.
    Calibrate(CalibrateArgs),
    /// Precision and recall at fixed survivor counts.
    Pr(PrArgs),
    /// Per-epoch AHD from calibration and evaluation snapshot directories.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct ScoredCloud {
    /// Score file aligned with the cloud.
    #[arg(long)]
    pub scores: PathBuf,
    /// Labeled cloud.
    #[arg(long)]
    pub cloud: PathBuf,
    /// Report CSV.
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: ScoredCloud,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub common: ScoredCloud,
    /// Calibrate only on a random axis-aligned cube with this share of the bounding-box volume.
    #[arg(long)]
    pub cube_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub cube_seed: u64,
    /// Scores to threshold with the calibrated value.
    #[arg(long, requires = "apply_cloud")]
    pub apply_scores: Option<PathBuf>,
    /// Labeled cloud matching `--apply-scores`.
    #[arg(long, requires = "apply_scores")]
    pub apply_cloud: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrArgs {
    #[command(flatten)]
    pub common: ScoredCloud,
    /// Survivor counts; repeatable or comma-separated.
    #[arg(long = "count", value_delimiter = ',', required = true)]
    pub counts: Vec<usize>,
    /// Labels counted as positive; defaults to every nonzero label.
    #[arg(long, value_delimiter = ',')]
    pub positive_labels: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub calibration_cloud: PathBuf,
    /// Snapshot directory written by `denoise --snapshots` on the calibration cloud.
    #[arg(long)]
    pub calibration_snapshots: PathBuf,
    #[arg(long)]
    pub cloud: PathBuf,
    #[arg(long)]
    pub snapshots: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    let Some(n) = threads else { return Ok(()) };
    if n == 0 {
        return Err(CliError::usage("threads must be a positive integer"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("cannot start {n} threads: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Denoise(a) => commands::denoise(a),
        Command::Mc(a) => commands::mc(a),
        Command::Evaluate(c) => commands::evaluate(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
