use std::path::PathBuf;
use std::process::ExitCode;

use cavity_cli::config::OUT_DIR_ENV;
use cavity_cli::{load_config, run_experiment, Experiment, ExperimentConfig, Overrides, Result};
use clap::{Parser, Subcommand};

/// Driven cavity + atom: entanglement and conditioned field experiments.
#[derive(Debug, Parser)]
#[command(name = "cavity", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file (required keys: drive, kappa). Without it the
    /// figure-1 parameters ℰ = 0.7g, κ = 0.125g are used.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Random seed for trajectory experiments.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Output directory [default: $CAVITY_OUT_DIR, else ./results].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Number of trajectories for `traject`.
    #[arg(long, global = true, value_name = "N")]
    ntraj: Option<usize>,

    /// Quadrature angle for `master` and `fig3`.
    #[arg(long, global = true, value_name = "X", allow_negative_numbers = true)]
    theta: Option<f64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Semiclassical steady state (phi_ss, r_ss).
    Steady,
    /// Master equation from |g,0>.
    Master,
    /// Trajectory ensemble from |g,0>.
    Traject,
    /// Entropy after an emission: branch states, trajectory, master equation.
    Fig1,
    /// Single trajectory with spontaneous emission (gamma = 0.4g default).
    Fig2,
    /// Conditioned intensity-field correlation.
    Fig3,
    /// Realignment trace norm of the post-collapse mixture.
    Realignment,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::Steady => Experiment::Steady,
            Command::Master => Experiment::Master,
            Command::Traject => Experiment::Traject,
            Command::Fig1 => Experiment::Fig1,
            Command::Fig2 => Experiment::Fig2,
            Command::Fig3 => Experiment::Fig3,
            Command::Realignment => Experiment::Realignment,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let overrides = Overrides {
        seed: cli.seed,
        out: cli.out,
        n_traj: cli.ntraj,
        theta: cli.theta,
        env_out: std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
    };
    let experiment = Experiment::from(cli.command);
    let cfg = match &cli.config {
        Some(path) => load_config(path, experiment, &overrides)?,
        None => ExperimentConfig::preset(experiment, &overrides)?,
    };
    let report = run_experiment(&cfg)?;
    for line in &report.summary {
        println!("{line}");
    }
    for path in &report.outputs {
        println!("wrote {}", path.display());
    }
    println!("wrote {}", report.manifest_path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
