//! Monte-Carlo wavefunction unraveling of the master equation.
//!
//! Each step drifts the unnormalized state with RK4 under `−iK` (see
//! [`effective_hamiltonian`]); the lost norm `δp = 1 − ‖ψ̃‖²` is the jump
//! probability. On a jump the pre-step state is hit with `√(2κ) a` or
//! `√γ σ₋`, chosen by their weights, and renormalized.
//!
//! Random numbers come from one `ChaCha8Rng` per trajectory, seeded with
//! `seed ^ trajectory_index`; ensemble reductions use a fixed pairwise tree,
//! so results do not depend on thread count.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{check_step, effective_hamiltonian, SystemParams};
use crate::entanglement::pure_state_entropy;
use crate::error::{Error, Result};
use crate::hilbert::{build_operators, DensityOperator, SpaceSpec, StateVector, EXCITED};
use crate::integrator::Rk4;
use crate::series::TimeSeries;
use crate::sparse::SparseOp;

/// Largest jump probability allowed in one step.
pub const MAX_JUMP_PROBABILITY: f64 = 0.1;
const NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JumpChannel {
    CavityEmission,
    SpontaneousEmission,
}

impl JumpChannel {
    pub fn name(self) -> &'static str {
        match self {
            JumpChannel::CavityEmission => "cavity_emission",
            JumpChannel::SpontaneousEmission => "spontaneous_emission",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub channel: JumpChannel,
    /// `⟨σ₊σ₋⟩` right after the jump.
    pub excited_after: f64,
    /// Entropy of entanglement right after the jump, in bits.
    pub entropy_after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub samples: Vec<(f64, StateVector)>,
    pub jumps: Vec<JumpRecord>,
    pub seed: u64,
}

/// Time discretization shared by a trajectory run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub t_final: f64,
    pub dt: f64,
    /// Keep every `stride`-th step (plus the last).
    pub stride: usize,
}

impl StepPlan {
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Operators prepared once and shared by all trajectories of a run.
struct Propagator {
    spec: SpaceSpec,
    generator: SparseOp,
    cavity: Option<(f64, SparseOp)>,
    spontaneous: Option<(f64, SparseOp)>,
}

impl Propagator {
    fn new(spec: SpaceSpec, params: &SystemParams) -> Self {
        let ops = build_operators(spec);
        let scaled = effective_hamiltonian(spec, params) * C64::new(0.0, -1.0);
        Self {
            spec,
            generator: SparseOp::from_dense(&scaled),
            cavity: (params.kappa > 0.0).then(|| (2.0 * params.kappa, SparseOp::from_dense(&ops.a.matrix))),
            spontaneous: (params.gamma > 0.0)
                .then(|| (params.gamma, SparseOp::from_dense(&ops.sigma_minus.matrix))),
        }
    }

    fn weight(&self, channel: &Option<(f64, SparseOp)>, psi: &DVector<C64>, buf: &mut DVector<C64>) -> f64 {
        match channel {
            Some((rate, op)) => {
                op.apply(psi, buf);
                rate * buf.norm_squared()
            }
            None => 0.0,
        }
    }

    fn run(&self, psi0: &StateVector, plan: &StepPlan, seed: u64) -> Result<TrajectoryResult> {
        let dim = self.spec.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut psi = psi0.amplitudes().clone();
        let mut drift = psi.clone();
        let mut buf = DVector::zeros(dim);
        let mut rk = Rk4::new(&psi);
        let stride = plan.stride.max(1);
        let n_steps = plan.steps();
        let mut samples = vec![(0.0, psi0.clone())];
        let mut jumps = Vec::new();

        for k in 1..=n_steps {
            let t = k as f64 * plan.dt;
            drift.copy_from(&psi);
            rk.step(&mut drift, plan.dt, |y, out| self.generator.apply(y, out));
            let dp = 1.0 - drift.norm_squared();
            if dp > MAX_JUMP_PROBABILITY {
                return Err(Error::StepSize(format!(
                    "jump probability {dp:.4} > {MAX_JUMP_PROBABILITY} at t = {t:.4} (dt = {})",
                    plan.dt
                )));
            }
            let x: f64 = rng.random();
            if x < dp {
                let wc = self.weight(&self.cavity, &psi, &mut buf);
                let ws = self.weight(&self.spontaneous, &psi, &mut buf);
                let y: f64 = rng.random();
                let (channel, op) = if y * (wc + ws) < wc {
                    (JumpChannel::CavityEmission, &self.cavity)
                } else {
                    (JumpChannel::SpontaneousEmission, &self.spontaneous)
                };
                let (_, op) = op.as_ref().expect("a channel with positive weight exists");
                op.apply(&psi, &mut buf);
                let n = buf.norm();
                if !(n > 0.0) {
                    return Err(Error::Normalization(format!("jump at t = {t} annihilated the state")));
                }
                psi.copy_from(&(&buf / C64::from(n)));
                let after = StateVector::from_amplitudes(self.spec, psi.clone())?;
                let excited_after = (0..self.spec.fock_dim())
                    .map(|m| after.amplitude(EXCITED, m).norm_sqr())
                    .sum();
                jumps.push(JumpRecord {
                    time: t,
                    channel,
                    excited_after,
                    entropy_after: pure_state_entropy(&after)?.bits,
                });
            } else {
                let n = drift.norm();
                psi.copy_from(&drift);
                psi /= C64::from(n);
            }
            let norm_err = (psi.norm_squared() - 1.0).abs();
            if norm_err > NORM_TOL {
                return Err(Error::Normalization(format!("norm error {norm_err:.3e} at t = {t}")));
            }
            if k % stride == 0 || k == n_steps {
                samples.push((t, StateVector::from_amplitudes(self.spec, psi.clone())?));
            }
        }
        Ok(TrajectoryResult { samples, jumps, seed })
    }
}

fn check_inputs(psi0: &StateVector, params: &SystemParams, plan: &StepPlan) -> Result<()> {
    params.validate()?;
    check_step(psi0.spec(), params, plan.dt)?;
    if !(plan.t_final >= 0.0) {
        return Err(Error::Domain(format!("t_final must be >= 0, got {}", plan.t_final)));
    }
    let n = psi0.norm_sqr();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::Normalization(format!("initial state has squared norm {n}")));
    }
    Ok(())
}

/// One trajectory with generator seed `seed`.
pub fn evolve_trajectory(
    psi0: &StateVector,
    params: &SystemParams,
    plan: &StepPlan,
    seed: u64,
) -> Result<TrajectoryResult> {
    check_inputs(psi0, params, plan)?;
    Propagator::new(psi0.spec(), params).run(psi0, plan, seed)
}

/// `n_traj` independent trajectories, trajectory `i` seeded with `seed ^ i`,
/// evaluated in parallel and returned in index order.
pub fn run_ensemble(
    psi0: &StateVector,
    params: &SystemParams,
    plan: &StepPlan,
    seed: u64,
    n_traj: usize,
) -> Result<Vec<TrajectoryResult>> {
    check_inputs(psi0, params, plan)?;
    let prop = Propagator::new(psi0.spec(), params);
    (0..n_traj as u64)
        .into_par_iter()
        .map(|i| prop.run(psi0, plan, seed ^ i))
        .collect()
}

/// Deterministic pairwise reduction over `0..n`.
fn pairwise<T, F, G>(lo: usize, hi: usize, leaf: &F, add: &G) -> T
where
    T: Send,
    F: Fn(usize) -> T + Sync,
    G: Fn(T, T) -> T + Sync,
{
    if hi - lo == 1 {
        return leaf(lo);
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| pairwise(lo, mid, leaf, add), || pairwise(mid, hi, leaf, add));
    add(a, b)
}

fn check_grid(results: &[TrajectoryResult]) -> Result<usize> {
    let first = results.first().ok_or(Error::EmptyEnsemble)?;
    let n = first.samples.len();
    for r in results {
        if r.samples.len() != n
            || r.samples.iter().zip(&first.samples).any(|(a, b)| (a.0 - b.0).abs() > 1e-12)
        {
            return Err(Error::Domain("trajectories do not share a time grid".into()));
        }
    }
    Ok(n)
}

/// `ρ̂(t) = mean |ψ(t)⟩⟨ψ(t)|` at every sample time.
pub fn ensemble_density(results: &[TrajectoryResult]) -> Result<Vec<(f64, DensityOperator)>> {
    let n_samples = check_grid(results)?;
    let spec = results[0].samples[0].1.spec();
    let scale = C64::from(1.0 / results.len() as f64);
    (0..n_samples)
        .map(|j| {
            let sum: DMatrix<C64> = pairwise(
                0,
                results.len(),
                &|i| {
                    let v = results[i].samples[j].1.amplitudes();
                    v * v.adjoint()
                },
                &|a, b| a + b,
            );
            Ok((results[0].samples[j].0, DensityOperator::new(spec, sum * scale)?))
        })
        .collect()
}

/// Ensemble mean of a real observable and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleStat {
    pub t: f64,
    pub mean: f64,
    pub std_err: f64,
}

/// Per-sample mean and standard error of `Re ⟨ψ|op|ψ⟩` across trajectories.
pub fn ensemble_expectation(results: &[TrajectoryResult], op: &DMatrix<C64>) -> Result<Vec<EnsembleStat>> {
    let n_samples = check_grid(results)?;
    let n = results.len();
    let sparse = SparseOp::from_dense(op);
    let dim = results[0].samples[0].1.spec().dim();
    if op.nrows() != dim {
        return Err(Error::Dimension { expected: dim, got: op.nrows() });
    }
    let per_traj: Vec<Vec<f64>> = results
        .par_iter()
        .map(|r| {
            let mut buf = DVector::zeros(dim);
            r.samples
                .iter()
                .map(|(_, s)| {
                    sparse.apply(s.amplitudes(), &mut buf);
                    s.amplitudes().dotc(&buf).re
                })
                .collect()
        })
        .collect();
    Ok((0..n_samples)
        .map(|j| {
            let mean = pairwise(0, n, &|i| per_traj[i][j], &|a, b| a + b) / n as f64;
            let var = if n > 1 {
                pairwise(0, n, &|i| (per_traj[i][j] - mean).powi(2), &|a, b| a + b) / (n - 1) as f64
            } else {
                0.0
            };
            EnsembleStat { t: results[0].samples[j].0, mean, std_err: (var / n as f64).sqrt() }
        })
        .collect())
}

/// Entropy of entanglement along a trajectory: one row per sample plus one
/// row at every jump time that is not already a sample time.
pub fn entanglement_series(result: &TrajectoryResult) -> Result<TimeSeries> {
    let mut rows: Vec<(f64, f64)> = result
        .samples
        .iter()
        .map(|(t, s)| Ok((*t, pure_state_entropy(s)?.bits)))
        .collect::<Result<_>>()?;
    for j in &result.jumps {
        if !result.samples.iter().any(|(t, _)| (t - j.time).abs() < 1e-12) {
            rows.push((j.time, j.entropy_after));
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut series = TimeSeries::new(["entropy"]);
    series.note("seed", result.seed);
    for (t, e) in rows {
        series.push(t, vec![e])?;
    }
    Ok(series)
}
