//! Experiment configuration: one JSON file plus command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use cavity_core::dynamics::SystemParams;
use cavity_core::hilbert::SpaceSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 20_070_101;
pub const DEFAULT_OUT_DIR: &str = "results";
pub const OUT_DIR_ENV: &str = "CAVITY_OUT_DIR";
const REQUIRED_KEYS: [&str; 2] = ["drive", "kappa"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Steady,
    Master,
    Traject,
    Fig1,
    Fig2,
    Fig3,
    Realignment,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Steady => "steady",
            Experiment::Master => "master",
            Experiment::Traject => "traject",
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Realignment => "realignment",
        }
    }

    /// Experiments that evaluate the semiclassical steady state.
    fn needs_steady_state(self) -> bool {
        matches!(self, Experiment::Steady | Experiment::Fig1 | Experiment::Fig3 | Experiment::Realignment)
    }

    fn evolves_in_time(self) -> bool {
        !matches!(self, Experiment::Steady | Experiment::Realignment)
    }

    fn default_t_final(self) -> f64 {
        match self {
            Experiment::Master | Experiment::Traject => 10.0,
            Experiment::Fig1 | Experiment::Fig3 => 3.0,
            Experiment::Fig2 => 100.0,
            Experiment::Steady | Experiment::Realignment => 0.0,
        }
    }

    fn default_gamma(self) -> f64 {
        if self == Experiment::Fig2 {
            0.4
        } else {
            0.0
        }
    }

    fn default_n_traj(self) -> usize {
        if self == Experiment::Traject {
            100
        } else {
            1
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Keys accepted in the JSON file; everything is optional at parse time so
/// that missing required keys can be reported together.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    g: Option<f64>,
    drive: Option<f64>,
    kappa: Option<f64>,
    gamma: Option<f64>,
    n_max: Option<usize>,
    dt: Option<f64>,
    t_final: Option<f64>,
    stride: Option<usize>,
    seed: Option<u64>,
    n_traj: Option<usize>,
    theta: Option<f64>,
    out: Option<PathBuf>,
}

/// Command-line values; any `Some` wins over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub n_traj: Option<usize>,
    pub theta: Option<f64>,
    /// Value of the output-directory environment variable, if set.
    pub env_out: Option<PathBuf>,
}

/// A fully resolved, validated run configuration. Rates are in units of g.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub g: f64,
    pub drive: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub n_max: usize,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub seed: u64,
    pub n_traj: usize,
    pub theta: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Figure-1 parameters (ℰ = 0.7, κ = 0.125) with experiment defaults;
    /// used when no config file is given.
    pub fn preset(experiment: Experiment, overrides: &Overrides) -> Result<Self> {
        let file = ConfigFile { drive: Some(0.7), kappa: Some(0.125), ..Default::default() };
        resolve(experiment, file, overrides)
    }

    pub fn params(&self) -> SystemParams {
        SystemParams { g: self.g, drive: self.drive, kappa: self.kappa, gamma: self.gamma }
    }

    pub fn space(&self) -> Result<SpaceSpec> {
        Ok(SpaceSpec::new(self.n_max)?)
    }
}

/// Reads and validates `path`, then applies `overrides`.
pub fn load_config(path: &Path, experiment: Experiment, overrides: &Overrides) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    if text.trim().is_empty() {
        return Err(CliError::MissingKeys(REQUIRED_KEYS.to_vec()));
    }
    let file: ConfigFile = serde_json::from_str(&text).map_err(|e| {
        let message = e.to_string();
        if message.starts_with("unknown field") {
            CliError::UnknownKey { path: path.into(), line: e.line(), message }
        } else {
            CliError::Parse { path: path.into(), line: e.line(), column: e.column(), message }
        }
    })?;
    resolve(experiment, file, overrides)
}

fn resolve(experiment: Experiment, file: ConfigFile, o: &Overrides) -> Result<ExperimentConfig> {
    let missing: Vec<&'static str> = REQUIRED_KEYS
        .iter()
        .zip([file.drive.is_none(), file.kappa.is_none()])
        .filter_map(|(k, absent)| absent.then_some(*k))
        .collect();
    if !missing.is_empty() {
        return Err(CliError::MissingKeys(missing));
    }
    let cfg = ExperimentConfig {
        experiment,
        g: file.g.unwrap_or(1.0),
        drive: file.drive.unwrap_or_default(),
        kappa: file.kappa.unwrap_or_default(),
        gamma: file.gamma.unwrap_or(experiment.default_gamma()),
        n_max: file.n_max.unwrap_or(SpaceSpec::DEFAULT_N_MAX),
        dt: file.dt.unwrap_or(0.002),
        t_final: file.t_final.unwrap_or(experiment.default_t_final()),
        stride: file.stride.unwrap_or(5),
        seed: o.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        n_traj: o.n_traj.or(file.n_traj).unwrap_or(experiment.default_n_traj()),
        theta: o.theta.or(file.theta).unwrap_or(0.0),
        out_dir: o
            .out
            .clone()
            .or(file.out)
            .or_else(|| o.env_out.clone())
            .unwrap_or_else(|| DEFAULT_OUT_DIR.into()),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn invalid(field: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Invalid { field, reason: reason.into() }
}

fn validate(c: &ExperimentConfig) -> Result<()> {
    for (field, v) in [("g", c.g), ("drive", c.drive), ("kappa", c.kappa), ("gamma", c.gamma)] {
        if !v.is_finite() || v < 0.0 {
            return Err(invalid(field, format!("must be finite and nonnegative, got {v}")));
        }
    }
    if !c.theta.is_finite() {
        return Err(invalid("theta", "must be finite"));
    }
    if c.n_max < 1 {
        return Err(invalid("n_max", "must be at least 1"));
    }
    if c.n_traj < 1 {
        return Err(invalid("n_traj", "must be at least 1"));
    }
    if c.stride < 1 {
        return Err(invalid("stride", "must be at least 1"));
    }
    if !(c.dt.is_finite() && c.dt > 0.0) {
        return Err(invalid("dt", format!("must be positive, got {}", c.dt)));
    }
    if c.experiment.evolves_in_time() && !(c.t_final.is_finite() && c.t_final > 0.0) {
        return Err(invalid("t_final", format!("must be positive for {}, got {}", c.experiment, c.t_final)));
    }
    if c.experiment.needs_steady_state() {
        if c.g <= 0.0 {
            return Err(invalid("g", format!("must be positive for {}", c.experiment)));
        }
        if c.kappa <= 0.0 {
            return Err(invalid("kappa", format!("must be positive for {}", c.experiment)));
        }
        if c.drive <= 0.5 * c.g {
            return Err(invalid("drive", format!("must exceed g/2 = {} for {}", 0.5 * c.g, c.experiment)));
        }
    }
    if matches!(c.experiment, Experiment::Fig1 | Experiment::Fig3) && c.gamma != 0.0 {
        log::warn!("{}: branch-state results assume gamma = 0; got {}", c.experiment, c.gamma);
    }
    Ok(())
}
