//! Named experiments: each one writes its data files plus one manifest.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use cavity_core::branches::{
    branch_superposition, collapsed_relative_phase, conditional_steady_superposition, orthogonality_warning,
    post_emission_collapse, short_time_warning,
};
use cavity_core::correlations::{hft_approx, hft_from_branches, QuadratureSpec};
use cavity_core::dynamics::{integrate_master_with, semiclassical_steady_state, SystemParams, TOP_LEVEL_TOL};
use cavity_core::entanglement::{
    entropy_of_entanglement, pure_state_entropy, realignment_trace_norm, schematic_post_collapse_mixture,
    SchematicVariant,
};
use cavity_core::hilbert::{build_operators, partial_trace_field, SpaceSpec, StateVector, EXCITED, GROUND};
use cavity_core::series::TimeSeries;
use cavity_core::trajectories::{
    ensemble_expectation, entanglement_series, evolve_trajectory, run_ensemble, JumpChannel, StepPlan,
    TrajectoryResult,
};
use cavity_core::{Warning, C64};
use nalgebra::DMatrix;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{CliError, Result};
use crate::output::{write_jumps, write_manifest, write_series, JumpRow, RunManifest};

/// What a finished run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub manifest_path: PathBuf,
    pub outputs: Vec<PathBuf>,
    /// Human-readable result lines for the terminal.
    pub summary: Vec<String>,
}

/// Accumulates outputs and provenance while an experiment runs.
struct Run<'a> {
    cfg: &'a ExperimentConfig,
    outputs: Vec<PathBuf>,
    warnings: Vec<String>,
    results: BTreeMap<String, f64>,
    notes: BTreeMap<String, String>,
    summary: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Self {
        Self {
            cfg,
            outputs: Vec::new(),
            warnings: Vec::new(),
            results: BTreeMap::new(),
            notes: BTreeMap::new(),
            summary: Vec::new(),
        }
    }

    fn warn(&mut self, w: Warning) {
        let text = w.to_string();
        log::warn!("{text}");
        if !self.warnings.contains(&text) {
            self.warnings.push(text);
        }
    }

    fn result(&mut self, key: &str, value: f64) {
        self.results.insert(key.into(), value);
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.cfg.out_dir.join(format!("{}{suffix}", self.cfg.experiment))
    }

    fn series(&mut self, series: &TimeSeries) -> Result<()> {
        let path = self.path(".csv");
        write_series(series, &path)?;
        for (k, v) in &series.metadata {
            self.notes.insert(k.clone(), v.clone());
        }
        self.outputs.push(path);
        Ok(())
    }

    fn jumps(&mut self, rows: &[JumpRow]) -> Result<()> {
        let path = self.path("_jumps.csv");
        write_jumps(rows, &path)?;
        self.outputs.push(path);
        Ok(())
    }

    fn plan(&self) -> StepPlan {
        StepPlan { t_final: self.cfg.t_final, dt: self.cfg.dt, stride: self.cfg.stride }
    }

    /// Warns when the steady field states overlap noticeably; silently skips
    /// parameters without a strong-driving steady state.
    fn orthogonality(&mut self, params: &SystemParams) {
        if let Ok(Some(w)) = orthogonality_warning(params) {
            self.warn(w);
        }
    }

    /// Truncation check for pure-state runs, mirroring the master-equation one.
    fn trajectory_tail(&mut self, traj: &TrajectoryResult) -> Result<()> {
        let n_max = self.cfg.n_max;
        let mut warned = false;
        for (t, psi) in &traj.samples {
            let top = psi.amplitude(GROUND, n_max).norm_sqr() + psi.amplitude(EXCITED, n_max).norm_sqr();
            if top > TOP_LEVEL_TOL {
                return Err(cavity_core::Error::Truncation { what: "trajectory", mass: top, n_max }.into());
            }
            if top > 1e-3 * TOP_LEVEL_TOL && !warned {
                warned = true;
                self.warn(Warning::TruncationTail { t: *t, population: top });
            }
        }
        Ok(())
    }

    fn finish(self, start: Instant) -> Result<RunReport> {
        let manifest_path = self.path(".manifest.json");
        let manifest = RunManifest {
            experiment: self.cfg.experiment.name().into(),
            config: self.cfg.clone(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_seconds: start.elapsed().as_secs_f64(),
            outputs: self
                .outputs
                .iter()
                .map(|p| p.file_name().unwrap_or_default().to_string_lossy().into_owned())
                .collect(),
            warnings: self.warnings,
            results: self.results,
            notes: self.notes,
        };
        write_manifest(&manifest, &manifest_path)?;
        Ok(RunReport { manifest_path, outputs: self.outputs, summary: self.summary })
    }
}

/// Runs the configured experiment and writes its outputs under `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let start = Instant::now();
    let mut run = Run::new(cfg);
    match cfg.experiment {
        Experiment::Steady => steady(&mut run)?,
        Experiment::Master => master(&mut run)?,
        Experiment::Traject => traject(&mut run)?,
        Experiment::Fig1 => fig1(&mut run)?,
        Experiment::Fig2 => fig2(&mut run)?,
        Experiment::Fig3 => fig3(&mut run)?,
        Experiment::Realignment => realignment(&mut run)?,
    }
    run.finish(start)
}

fn steady(run: &mut Run) -> Result<()> {
    let p = run.cfg.params();
    let ss = semiclassical_steady_state(&p)?;
    run.orthogonality(&p);
    run.result("phi_ss", ss.phi_ss);
    run.result("r_ss", ss.r_ss);
    run.summary.push(format!("phi_ss = {:.6}", ss.phi_ss));
    run.summary.push(format!("r_ss = {:.6}", ss.r_ss));
    Ok(())
}

fn real_expectation(rho: &DMatrix<C64>, op: &DMatrix<C64>) -> f64 {
    (rho * op).trace().re
}

/// Master equation from |g, 0⟩: populations, quadrature and atomic entropy.
fn master(run: &mut Run) -> Result<()> {
    let (p, s) = (run.cfg.params(), run.cfg.space()?);
    let ops = build_operators(s);
    let excited = ops.excited_projector();
    let quad = QuadratureSpec::new(run.cfg.theta).operator(s);
    let rho0 = StateVector::basis(s, GROUND, 0).projector();
    let mut series = TimeSeries::new(["excited", "photons", "quadrature", "atom_entropy"]);
    series.note("initial_state", "|g,0>");
    let stats = integrate_master_with(&rho0, &p, run.cfg.t_final, run.cfg.dt, run.cfg.stride, |t, rho| {
        let m = rho.matrix();
        let e = entropy_of_entanglement(&partial_trace_field(rho))?.bits;
        series.push(
            t,
            vec![real_expectation(m, &excited), real_expectation(m, &ops.number.matrix), real_expectation(m, &quad), e],
        )
    })?;
    for w in stats.warnings {
        run.warn(w);
    }
    run.result("max_trace_drift", stats.max_trace_drift);
    run.result("max_top_level_population", stats.max_top_level_population);
    run.summary.push(format!("{} samples, max trace drift {:.2e}", series.len(), stats.max_trace_drift));
    run.series(&series)
}

fn jump_rows(results: &[TrajectoryResult]) -> Vec<JumpRow> {
    results
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.jumps.iter().map(move |j| JumpRow { trajectory: i, time: j.time, channel: j.channel.name() }))
        .collect()
}

/// Trajectory ensemble from |g, 0⟩: means and standard errors.
fn traject(run: &mut Run) -> Result<()> {
    let (p, s) = (run.cfg.params(), run.cfg.space()?);
    let ops = build_operators(s);
    let psi0 = StateVector::basis(s, GROUND, 0);
    let results = run_ensemble(&psi0, &p, &run.plan(), run.cfg.seed, run.cfg.n_traj)?;
    for r in &results {
        run.trajectory_tail(r)?;
    }
    let pe = ensemble_expectation(&results, &ops.excited_projector())?;
    let nn = ensemble_expectation(&results, &ops.number.matrix)?;
    let mut series = TimeSeries::new(["excited_mean", "excited_stderr", "photons_mean", "photons_stderr"]);
    series.note("initial_state", "|g,0>");
    series.note("seeding", "trajectory i uses ChaCha8 seeded with seed XOR i");
    for (a, b) in pe.iter().zip(&nn) {
        series.push(a.t, vec![a.mean, a.std_err, b.mean, b.std_err])?;
    }
    let rows = jump_rows(&results);
    run.result("n_traj", results.len() as f64);
    run.result("jumps", rows.len() as f64);
    run.summary.push(format!("{} trajectories, {} jumps", results.len(), rows.len()));
    run.series(&series)?;
    run.jumps(&rows)
}

/// Entropy after an emission from the conditional steady state: branch
/// states, one trajectory and the master equation on a common grid.
fn fig1(run: &mut Run) -> Result<()> {
    let (p, s) = (run.cfg.params(), run.cfg.space()?);
    let ss = semiclassical_steady_state(&p)?;
    run.orthogonality(&p);
    if let Some(w) = short_time_warning(run.cfg.t_final, p.g, ss.r_ss) {
        run.warn(w);
    }
    let collapsed = post_emission_collapse(&conditional_steady_superposition(&p, 0.0, s)?)?;
    let phase = collapsed_relative_phase(0.0, ss.phi_ss);

    let mut master = Vec::new();
    let stats = integrate_master_with(&collapsed.projector(), &p, run.cfg.t_final, run.cfg.dt, run.cfg.stride, |t, rho| {
        master.push((t, entropy_of_entanglement(&partial_trace_field(rho))?.bits));
        Ok(())
    })?;
    for w in stats.warnings {
        run.warn(w);
    }
    let traj = evolve_trajectory(&collapsed, &p, &run.plan(), run.cfg.seed)?;
    run.trajectory_tail(&traj)?;
    if traj.samples.len() != master.len() {
        return Err(CliError::Check("trajectory and master-equation grids differ".into()));
    }

    let mut series = TimeSeries::new(["branch", "trajectory", "master"]);
    series.note("initial_state", "sigma_minus applied to the conditional steady superposition");
    series.note("branch_relative_phase", phase);
    let mut worst: f64 = 0.0;
    for ((t, e_master), (_, psi)) in master.iter().zip(&traj.samples) {
        let e_branch = pure_state_entropy(&branch_superposition(*t, &p, phase, s)?)?.bits;
        worst = worst.max((e_branch - e_master).abs());
        series.push(*t, vec![e_branch, pure_state_entropy(psi)?.bits, *e_master])?;
    }
    run.result("max_branch_master_deviation", worst);
    run.result("trajectory_jumps", traj.jumps.len() as f64);
    run.summary.push(format!("max |branch - master| entropy = {worst:.4}"));
    run.series(&series)?;
    run.jumps(&jump_rows(std::slice::from_ref(&traj)))
}

/// One trajectory from |g, 0⟩ with spontaneous emission.
fn fig2(run: &mut Run) -> Result<()> {
    let (p, s) = (run.cfg.params(), run.cfg.space()?);
    run.orthogonality(&p);
    let psi0 = StateVector::basis(s, GROUND, 0);
    let traj = evolve_trajectory(&psi0, &p, &run.plan(), run.cfg.seed)?;
    run.trajectory_tail(&traj)?;
    let series = entanglement_series(&traj)?;
    let spont = traj.jumps.iter().filter(|j| j.channel == JumpChannel::SpontaneousEmission).count();
    let max_entropy = series.column("entropy").unwrap_or_default().into_iter().fold(0.0, f64::max);
    run.result("spontaneous_jumps", spont as f64);
    run.result("cavity_jumps", (traj.jumps.len() - spont) as f64);
    run.result("max_entropy", max_entropy);
    run.summary.push(format!("{spont} spontaneous emissions, max entropy {max_entropy:.4}"));
    run.series(&series)?;
    run.jumps(&jump_rows(std::slice::from_ref(&traj)))
}

/// Conditioned intensity-field correlation from the branch picture, with
/// and without interference between branches, and the closed form.
fn fig3(run: &mut Run) -> Result<()> {
    let (p, s) = (run.cfg.params(), run.cfg.space()?);
    let ss = semiclassical_steady_state(&p)?;
    run.orthogonality(&p);
    if let Some(w) = short_time_warning(run.cfg.t_final, p.g, ss.r_ss) {
        run.warn(w);
    }
    let step = run.cfg.dt * run.cfg.stride as f64;
    let n = (run.cfg.t_final / step).round() as usize;
    let ts: Vec<f64> = (0..=n).map(|k| k as f64 * step).collect();
    let quad = QuadratureSpec::new(run.cfg.theta);
    let coherent = hft_from_branches(&ts, &p, quad, true, s)?;
    let incoherent = hft_from_branches(&ts, &p, quad, false, s)?;
    let approx = hft_approx(&ts, &p, true)?;

    let mut series = TimeSeries::new(["coherent", "incoherent", "approx"]).with_time_label("tau");
    series.note("theta", run.cfg.theta);
    if run.cfg.theta != 0.0 {
        series.note("approx_column", "closed form assumes theta = 0");
    }
    for (k, tau) in ts.iter().enumerate() {
        series.push(*tau, vec![coherent.values[k], incoherent.values[k], approx.values[k]])?;
    }
    run.summary.push(format!("{} delays up to g*tau = {}", ts.len(), run.cfg.t_final));
    run.series(&series)
}

/// Realignment trace norm of the schematic post-collapse mixture.
fn realignment(run: &mut Run) -> Result<()> {
    let p = run.cfg.params();
    let ss = semiclassical_steady_state(&p)?;
    let rho = schematic_post_collapse_mixture(ss.phi_ss, SchematicVariant::Corrected)?;
    let tn = realignment_trace_norm(rho.matrix(), 2, SpaceSpec::new(3)?.fock_dim())?;
    let printed = schematic_post_collapse_mixture(ss.phi_ss, SchematicVariant::Printed)?;
    let tn_printed = realignment_trace_norm(printed.matrix(), 2, 4)?;
    run.result("phi_ss", ss.phi_ss);
    run.result("trace_norm", tn);
    run.result("trace_norm_uncorrected_lower_branch", tn_printed);
    run.summary.push(format!("realignment trace norm = {tn:.12} (sqrt 2 = {:.12})", 2f64.sqrt()));
    let err = (tn - 2f64.sqrt()).abs();
    if err > 1e-9 {
        return Err(CliError::Check(format!("trace norm {tn} differs from sqrt 2 by {err:.3e}")));
    }
    Ok(())
}
