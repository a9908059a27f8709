//! Command-line front-end: reproducible generation, verification, burst
//! analysis and exponent estimation runs. Every run writes its artifacts
//! plus a manifest recording the full configuration and seed scheme, so a
//! directory is always sufficient to re-run the experiment.

use clap::{Args, Parser, Subcommand};
use lfsm_core::runner::{run, Command, RunConfig};
use lfsm_core::Result;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lfsm", version, about = "Stable self-similar motions: simulation, kinetic verification and burst statistics")]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,
}

#[derive(Subcommand)]
enum CommandArg {
    /// Generate sample paths (CSV or little-endian binary plus JSON sidecars)
    Generate(CommonArgs),
    /// Check the kinetic-equation residuals of the exact density
    VerifyKinetic(CommonArgs),
    /// Detect threshold bursts over an ensemble and fit power laws
    Bursts(CommonArgs),
    /// Estimate spectral, memory and self-similarity exponents
    Estimate(CommonArgs),
    /// Bursts plus estimation in one run
    FullExperiment(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Flat `key = value` config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stability index of the jump distribution, 0 < mu <= 2
    #[arg(long)]
    mu: Option<f64>,
    /// Memory exponent, 1 < beta < 3 (mutually exclusive with --H)
    #[arg(long, conflicts_with = "h")]
    beta: Option<f64>,
    /// Self-similarity exponent; derives beta = 2 (H + 1 - 1/mu)
    #[arg(long = "H")]
    h: Option<f64>,
    /// Scale constant of the characteristic function
    #[arg(long)]
    sigma: Option<f64>,
    /// Path length in samples
    #[arg(long)]
    n: Option<usize>,
    /// Sample spacing in t units
    #[arg(long)]
    dt: Option<f64>,
    /// Base RNG seed; ensemble member i uses seed + i
    #[arg(long)]
    seed: Option<u64>,
    /// Number of ensemble members
    #[arg(long)]
    ensemble: Option<usize>,
    /// Burst threshold: mean, zero, or a numeric level
    #[arg(long)]
    threshold: Option<String>,
    /// Logarithmic bins per decade for density estimates
    #[arg(long)]
    bins_per_decade: Option<usize>,
    /// Extra refinement levels for verify-kinetic
    #[arg(long)]
    refine: Option<usize>,
    /// Evaluation time for verify-kinetic
    #[arg(long)]
    t: Option<f64>,
    /// Verification grid points
    #[arg(long)]
    grid_points: Option<usize>,
    /// Verification grid half-width in rescaled units
    #[arg(long)]
    half_width: Option<f64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv, json or binary
    #[arg(long)]
    format: Option<String>,
}

fn build_config(command: Command, args: &CommonArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_config_str(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    cfg.command = command;
    if let Some(mu) = args.mu {
        cfg.params.mu = mu;
    }
    if let Some(beta) = args.beta {
        cfg.params.beta = beta;
    }
    if let Some(h) = args.h {
        cfg.params.beta = 2.0 * (h + 1.0 - 1.0 / cfg.params.mu);
    }
    if let Some(sigma) = args.sigma {
        cfg.params.sigma = sigma;
    }
    if let Some(n) = args.n {
        cfg.params.n = n;
    }
    if let Some(dt) = args.dt {
        cfg.params.dt = dt;
    }
    if let Some(seed) = args.seed {
        cfg.params.seed = seed;
    }
    if let Some(ensemble) = args.ensemble {
        cfg.ensemble_size = ensemble;
    }
    if let Some(threshold) = &args.threshold {
        cfg.threshold = threshold.parse()?;
    }
    if let Some(bins) = args.bins_per_decade {
        cfg.bins_per_decade = bins;
    }
    if let Some(refine) = args.refine {
        cfg.refine = refine;
    }
    if let Some(t) = args.t {
        cfg.t = t;
    }
    if let Some(points) = args.grid_points {
        cfg.grid_points = points;
    }
    if let Some(hw) = args.half_width {
        cfg.half_width = hw;
    }
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    if let Some(format) = &args.format {
        cfg.format = format.parse()?;
    }
    Ok(cfg)
}

fn execute() -> Result<()> {
    let cli = Cli::parse();
    let (command, args) = match &cli.command {
        CommandArg::Generate(a) => (Command::Generate, a),
        CommandArg::VerifyKinetic(a) => (Command::VerifyKinetic, a),
        CommandArg::Bursts(a) => (Command::Bursts, a),
        CommandArg::Estimate(a) => (Command::Estimate, a),
        CommandArg::FullExperiment(a) => (Command::FullExperiment, a),
    };
    let config = build_config(command, args)?;
    let summary = run(&config)?;
    println!(
        "{} artifacts written to {}",
        summary.files.len(),
        config.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match execute() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
