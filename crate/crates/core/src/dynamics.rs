//! Deterministic evolution: Liouvillian, master-equation integration and the
//! semiclassical steady states.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::branches::{special_state, Sign};
use crate::error::{Error, Result};
use crate::hilbert::{build_operators, check_dim, DensityOperator, SpaceSpec};
use crate::integrator::Rk4;
use crate::sparse::SparseOp;
use crate::Warning;

const I: C64 = C64::new(0.0, 1.0);

/// Trace drift tolerated before the integrator renormalizes.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Top-Fock-level population that aborts an integration.
pub const TOP_LEVEL_TOL: f64 = 1e-6;
/// Upper bound on `dt · Λ`, where `Λ` is [`generator_scale`].
pub const STEP_GUARD: f64 = 0.1;

/// Physical rates in units where the coupling sets the time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Atom–field coupling.
    pub g: f64,
    /// External drive amplitude ℰ.
    pub drive: f64,
    /// Cavity field decay rate κ.
    pub kappa: f64,
    /// Spontaneous emission rate γ.
    pub gamma: f64,
}

impl SystemParams {
    pub fn new(g: f64, drive: f64, kappa: f64, gamma: f64) -> Result<Self> {
        let p = Self { g, drive, kappa, gamma };
        p.validate()?;
        Ok(p)
    }

    /// ℰ = 0.7g, κ = 0.125g, γ = 0.
    pub fn figure1() -> Self {
        Self { g: 1.0, drive: 0.7, kappa: 0.125, gamma: 0.0 }
    }

    /// Figure-1 rates with γ = 0.4g.
    pub fn figure2() -> Self {
        Self { gamma: 0.4, ..Self::figure1() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("drive", self.drive), ("kappa", self.kappa), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    fn require_strong_driving(&self) -> Result<()> {
        if !(self.g > 0.0) {
            return Err(Error::InvalidParams("g must be > 0".into()));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidParams("kappa must be > 0 for steady states".into()));
        }
        if self.drive <= 0.5 * self.g {
            return Err(Error::WeakDriving { drive: self.drive, half_g: 0.5 * self.g });
        }
        Ok(())
    }
}

/// Rough spectral radius of the generator on the truncated space: the largest
/// of `g√n_max`, `2ℰ√n_max`, `κ n_max` and `γ`.
pub fn generator_scale(spec: SpaceSpec, params: &SystemParams) -> f64 {
    let n = spec.n_max() as f64;
    [params.g * n.sqrt(), 2.0 * params.drive * n.sqrt(), params.kappa * n, params.gamma]
        .into_iter()
        .fold(0.0, f64::max)
}

pub fn check_step(spec: SpaceSpec, params: &SystemParams, dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::StepSize(format!("dt must be positive, got {dt}")));
    }
    let x = dt * generator_scale(spec, params);
    if x >= STEP_GUARD {
        return Err(Error::StepSize(format!(
            "dt * generator scale = {x:.4} >= {STEP_GUARD} (dt = {dt})"
        )));
    }
    Ok(())
}

/// `H = g(a†σ₋ + aσ₊) + iℰ(a† − a)`
pub fn hamiltonian(spec: SpaceSpec, params: &SystemParams) -> DMatrix<C64> {
    let ops = build_operators(spec);
    let jc = &ops.a_dagger.matrix * &ops.sigma_minus.matrix + &ops.a.matrix * &ops.sigma_plus.matrix;
    jc * C64::from(params.g) + (&ops.a_dagger.matrix - &ops.a.matrix) * (I * params.drive)
}

/// Non-Hermitian generator of the no-jump evolution,
/// `K = H − iκ a†a − i(γ/2) σ₊σ₋`.
pub fn effective_hamiltonian(spec: SpaceSpec, params: &SystemParams) -> DMatrix<C64> {
    let ops = build_operators(spec);
    hamiltonian(spec, params)
        - &ops.number.matrix * (I * params.kappa)
        - ops.excited_projector() * (I * 0.5 * params.gamma)
}

/// Precomputed right-hand side of the master equation,
/// `L(ρ) = −i(Kρ − ρK†) + 2κ aρa† + γ σ₋ρσ₊`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    spec: SpaceSpec,
    params: SystemParams,
    generator: SparseOp,
    jumps: Vec<(f64, SparseOp)>,
}

impl Liouvillian {
    pub fn new(spec: SpaceSpec, params: SystemParams) -> Self {
        let ops = build_operators(spec);
        let generator = SparseOp::from_dense(&effective_hamiltonian(spec, &params));
        let mut jumps = Vec::new();
        if params.kappa > 0.0 {
            jumps.push((2.0 * params.kappa, SparseOp::from_dense(&ops.a.matrix)));
        }
        if params.gamma > 0.0 {
            jumps.push((params.gamma, SparseOp::from_dense(&ops.sigma_minus.matrix)));
        }
        Self { spec, params, generator, jumps }
    }

    pub fn spec(&self) -> SpaceSpec {
        self.spec
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Overwrites `out` with `L(rho)`. Works for non-Hermitian `rho` too.
    pub fn apply_into(&self, rho: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        self.generator.left_mul_acc(rho, -I, out);
        self.generator.right_mul_adjoint_acc(rho, I, out);
        for (rate, op) in &self.jumps {
            op.sandwich_acc(rho, *rate, out);
        }
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
        check_dim(self.spec.dim(), rho.nrows())?;
        check_dim(self.spec.dim(), rho.ncols())?;
        let mut out = DMatrix::zeros(rho.nrows(), rho.ncols());
        self.apply_into(rho, &mut out);
        Ok(out)
    }
}

/// `dρ/dt` for the full master equation.
pub fn liouvillian_apply(rho: &DensityOperator, params: &SystemParams) -> Result<DMatrix<C64>> {
    Liouvillian::new(rho.spec(), *params).apply(rho.matrix())
}

/// Bookkeeping returned by the master-equation integrators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MasterStats {
    pub steps: usize,
    pub max_trace_drift: f64,
    pub renormalizations: usize,
    pub max_top_level_population: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct MasterRun {
    pub samples: Vec<(f64, DensityOperator)>,
    pub stats: MasterStats,
}

/// Integrates the master equation with fixed-step RK4, storing every
/// `stride`-th step (and the last one).
pub fn integrate_master(
    rho0: &DensityOperator,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<MasterRun> {
    let mut samples = Vec::new();
    let stats = integrate_master_with(rho0, params, t_final, dt, stride, |t, rho| {
        samples.push((t, rho.clone()));
        Ok(())
    })?;
    Ok(MasterRun { samples, stats })
}

/// As [`integrate_master`], handing each sample to `observer` instead of
/// storing it. The integrator itself works on an arbitrary operator, so the
/// same routine propagates non-Hermitian coherences.
pub fn integrate_master_with<F>(
    rho0: &DensityOperator,
    params: &SystemParams,
    t_final: f64,
    dt: f64,
    stride: usize,
    mut observer: F,
) -> Result<MasterStats>
where
    F: FnMut(f64, &DensityOperator) -> Result<()>,
{
    params.validate()?;
    let spec = rho0.spec();
    check_step(spec, params, dt)?;
    if !(t_final >= 0.0) {
        return Err(Error::Domain(format!("t_final must be >= 0, got {t_final}")));
    }
    let stride = stride.max(1);
    let n_steps = (t_final / dt).round() as usize;
    let liouvillian = Liouvillian::new(spec, *params);
    let mut stats = MasterStats::default();

    let mut rho = rho0.clone();
    let trace0 = rho.trace();
    let mut rk = Rk4::new(rho.matrix());
    observer(0.0, &rho)?;
    for k in 1..=n_steps {
        rk.step(rho.matrix_mut(), dt, |y, out| liouvillian.apply_into(y, out));
        let t = k as f64 * dt;

        let drift = (rho.trace() - trace0).norm();
        stats.max_trace_drift = stats.max_trace_drift.max(drift);
        if drift > TRACE_DRIFT_TOL {
            log::warn!("master equation trace drift {drift:.3e} at t = {t:.4}; renormalizing");
            if stats.renormalizations == 0 {
                stats.warnings.push(Warning::TraceDrift { t, drift });
            }
            stats.renormalizations += 1;
            let s = trace0 / rho.trace();
            *rho.matrix_mut() *= s;
        }

        let top = top_level_population(&rho);
        if top > stats.max_top_level_population {
            stats.max_top_level_population = top;
        }
        if top > TOP_LEVEL_TOL {
            return Err(Error::Truncation { what: "master equation top Fock level", mass: top, n_max: spec.n_max() });
        }
        if top > 1e-3 * TOP_LEVEL_TOL
            && !stats.warnings.iter().any(|w| matches!(w, Warning::TruncationTail { .. }))
        {
            stats.warnings.push(Warning::TruncationTail { t, population: top });
        }

        if k % stride == 0 || k == n_steps {
            observer(t, &rho)?;
        }
    }
    stats.steps = n_steps;
    Ok(stats)
}

fn top_level_population(rho: &DensityOperator) -> f64 {
    let spec = rho.spec();
    let n = spec.n_max();
    (0..2).map(|s| rho.matrix()[(spec.index(s, n), spec.index(s, n))].norm()).sum()
}

/// Mean-field point: coherent field `α = r e^{iφ}` and atomic Bloch vector
/// `(⟨σ_x⟩, ⟨σ_y⟩, ⟨σ_z⟩)` with `σ_x = σ₊ + σ₋`, `σ_y = i(σ₋ − σ₊)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalPoint {
    pub r: f64,
    pub phi: f64,
    pub bloch: [f64; 3],
}

impl SemiclassicalPoint {
    pub fn field(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }

    /// `⟨σ₋⟩ = (x − iy)/2`
    pub fn dipole(&self) -> C64 {
        C64::new(self.bloch[0], -self.bloch[1]) * 0.5
    }
}

/// The bistable pair for strong driving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStates {
    /// `arcsin(g / 2ℰ)`
    pub phi_ss: f64,
    /// `(ℰ/κ) cos φ_ss`
    pub r_ss: f64,
    /// Field phase `−φ_ss`.
    pub upper: SemiclassicalPoint,
    /// Field phase `+φ_ss`.
    pub lower: SemiclassicalPoint,
}

pub fn semiclassical_steady_state(params: &SystemParams) -> Result<SteadyStates> {
    params.require_strong_driving()?;
    let phi_ss = (params.g / (2.0 * params.drive)).asin();
    let r_ss = params.drive / params.kappa * phi_ss.cos();
    // dipole parallel to the field on the upper branch, antiparallel on the lower
    let upper = SemiclassicalPoint { r: r_ss, phi: -phi_ss, bloch: [phi_ss.cos(), phi_ss.sin(), 0.0] };
    let lower = SemiclassicalPoint { r: r_ss, phi: phi_ss, bloch: [-phi_ss.cos(), phi_ss.sin(), 0.0] };
    Ok(SteadyStates { phi_ss, r_ss, upper, lower })
}

/// Time derivatives of a [`SemiclassicalPoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalRates {
    pub dr: f64,
    pub dphi: f64,
    pub dbloch: [f64; 3],
}

impl SemiclassicalRates {
    pub fn max_abs(&self) -> f64 {
        [self.dr, self.dphi, self.dbloch[0], self.dbloch[1], self.dbloch[2]]
            .into_iter()
            .map(f64::abs)
            .fold(0.0, f64::max)
    }
}

/// Factorized mean-field equations of the master equation at γ = 0:
///
/// ```text
/// dα/dt = ℰ − κα − ig s
/// ds/dt = ig α z
/// dz/dt = −4g Im(α* s)
/// ```
///
/// with `s = ⟨σ₋⟩`, `z = ⟨σ_z⟩`. `dφ` is reported as 0 at `r = 0`.
pub fn semiclassical_rhs(point: &SemiclassicalPoint, params: &SystemParams) -> SemiclassicalRates {
    let g = params.g;
    let alpha = point.field();
    let s = point.dipole();
    let z = point.bloch[2];
    let dalpha = C64::from(params.drive) - alpha * params.kappa - I * g * s;
    let ds = I * g * alpha * z;
    let dz = -4.0 * g * (alpha.conj() * s).im;
    let rot = C64::from_polar(1.0, -point.phi);
    let dr = (dalpha * rot).re;
    let dphi = if point.r > 0.0 { (dalpha * rot).im / point.r } else { 0.0 };
    SemiclassicalRates { dr, dphi, dbloch: [2.0 * ds.re, -2.0 * ds.im, dz] }
}

/// Equal incoherent mixture of the two special states sitting on the
/// semiclassical branches (valid for γ = 0).
pub fn steady_state_mixture(params: &SystemParams, spec: SpaceSpec) -> Result<DensityOperator> {
    let ss = semiclassical_steady_state(params)?;
    let u = special_state(Sign::Plus, ss.r_ss, -ss.phi_ss, spec)?.projector();
    let l = special_state(Sign::Minus, ss.r_ss, ss.phi_ss, spec)?.projector();
    DensityOperator::mixture(&[(0.5, &u), (0.5, &l)])
}
