//! Closed-form factorizable states and the branch superpositions that follow
//! a spontaneous emission.
//!
//! Phase convention: the special state with sign `±`, amplitude `r` and phase
//! `φ` is
//!
//! ```text
//! (e^{iφ}|e⟩ ± |g⟩)/√2 ⊗ |r e^{iφ}⟩
//! ```
//!
//! so `⟨σ₋⟩ = ±e^{iφ}/2` and `φ` is the argument of the field. With this
//! choice the upper state (`+`, `−φ_ss`) and lower state (`−`, `+φ_ss`) are
//! the ones that sit on the semiclassical fixed points of the master equation.

use nalgebra::{DVector, Vector2};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::dynamics::{semiclassical_steady_state, SystemParams};
use crate::error::{Error, Result};
use crate::hilbert::{atom_field_product, coherent_state, SpaceSpec, StateVector, EXCITED, GROUND};
use crate::Warning;

/// `r_ss sin φ_ss` below this triggers [`Warning::WeakOrthogonality`].
pub const ORTHOGONALITY_WARN: f64 = 3.0;
/// `g t / r` above this triggers [`Warning::ShortTimeDegraded`].
pub const SHORT_TIME_WARN: f64 = 0.5;
/// Minimum excited population for an emission to be possible.
pub const MIN_EMISSION_WEIGHT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The two semiclassical attractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Upper,
    Lower,
}

/// Symbolic special state `e^{iΦ} (e^{iφ}|e⟩ ± |g⟩)/√2 ⊗ |r e^{iφ}⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorizableState {
    pub sign: Sign,
    pub r: f64,
    pub phi: f64,
    pub global_phase: f64,
}

impl FactorizableState {
    pub fn new(sign: Sign, r: f64, phi: f64) -> Self {
        Self { sign, r, phi, global_phase: 0.0 }
    }

    pub fn field_amplitude(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }

    pub fn atom(&self) -> Vector2<C64> {
        let mut v = Vector2::zeros();
        v[GROUND] = C64::from(self.sign.value() * FRAC_1_SQRT_2);
        v[EXCITED] = C64::from_polar(FRAC_1_SQRT_2, self.phi);
        v
    }

    pub fn to_vector(&self, spec: SpaceSpec) -> Result<StateVector> {
        if !(self.r >= 0.0) {
            return Err(Error::Domain(format!("amplitude r must be >= 0, got {}", self.r)));
        }
        let field = coherent_state(self.field_amplitude(), spec)?;
        let psi = atom_field_product(&self.atom(), &field, spec)?;
        let phase = C64::from_polar(1.0, self.global_phase);
        StateVector::from_amplitudes(spec, psi.into_amplitudes() * phase)
    }
}

pub fn special_state(sign: Sign, r0: f64, phi0: f64, spec: SpaceSpec) -> Result<StateVector> {
    FactorizableState::new(sign, r0, phi0).to_vector(spec)
}

/// Two-term superposition along one branch after an emission.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub branch: Branch,
    pub t: f64,
    pub terms: [(C64, FactorizableState); 2],
}

impl BranchState {
    /// Concrete state, renormalized on the truncated space.
    pub fn to_vector(&self, spec: SpaceSpec) -> Result<StateVector> {
        self.unnormalized(spec)?.normalized()
    }

    pub fn unnormalized(&self, spec: SpaceSpec) -> Result<StateVector> {
        let a = self.terms[0].1.to_vector(spec)?;
        let b = self.terms[1].1.to_vector(spec)?;
        StateVector::combine(&[(self.terms[0].0, &a), (self.terms[1].0, &b)])
    }

    /// The two weighted components separately (not renormalized).
    pub fn components(&self, spec: SpaceSpec) -> Result<[StateVector; 2]> {
        let part = |i: usize| -> Result<StateVector> {
            let (w, s) = &self.terms[i];
            let v = s.to_vector(spec)?;
            StateVector::from_amplitudes(spec, v.into_amplitudes() * *w)
        };
        Ok([part(0)?, part(1)?])
    }
}

/// Symbolic branch state anchored at amplitude `r` and phase magnitude `phi`
/// (the upper branch sits at `−phi`, the lower at `+phi`). The stationary
/// component carries global phase `−grt/2`, the rotating one `+grt/2`, and
/// the rotating component's phase is shifted by `gt/r`.
pub fn describe_branch(branch: Branch, t: f64, g: f64, r: f64, phi: f64) -> Result<BranchState> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("branch amplitude must be > 0, got {r}")));
    }
    let shift = g * t / r;
    let theta = 0.5 * g * r * t;
    let w = C64::from(FRAC_1_SQRT_2);
    let (plus_phi, minus_phi) = match branch {
        Branch::Upper => (-phi, -phi + shift),
        Branch::Lower => (phi - shift, phi),
    };
    let plus = FactorizableState { sign: Sign::Plus, r, phi: plus_phi, global_phase: -theta };
    let minus = FactorizableState { sign: Sign::Minus, r, phi: minus_phi, global_phase: theta };
    Ok(BranchState { branch, t, terms: [(w, plus), (-w, minus)] })
}

/// Branch state at the semiclassical steady state.
pub fn branch_state(branch: Branch, t: f64, params: &SystemParams, spec: SpaceSpec) -> Result<StateVector> {
    let ss = semiclassical_steady_state(params)?;
    branch_state_at(branch, t, params, ss.r_ss, ss.phi_ss, spec)
}

/// Branch state anchored at an arbitrary (instantaneous) field amplitude and
/// phase instead of the steady state.
pub fn branch_state_at(
    branch: Branch,
    t: f64,
    params: &SystemParams,
    r: f64,
    phi: f64,
    spec: SpaceSpec,
) -> Result<StateVector> {
    if let Some(w) = short_time_warning(t, params.g, r) {
        log::debug!("{w}");
    }
    describe_branch(branch, t, params.g, r, phi)?.to_vector(spec)
}

/// `(Ψ_u + e^{−iΦ′} Ψ_l)`, each branch normalized first, then renormalized.
pub fn branch_superposition(
    t: f64,
    params: &SystemParams,
    relative_phase: f64,
    spec: SpaceSpec,
) -> Result<StateVector> {
    let u = branch_state(Branch::Upper, t, params, spec)?;
    let l = branch_state(Branch::Lower, t, params, spec)?;
    StateVector::combine(&[(C64::from(1.0), &u), (C64::from_polar(1.0, -relative_phase), &l)])?.normalized()
}

/// Pure conditional steady state
/// `(Ψ⁰₊(r_ss, −φ_ss) + e^{−iΦ′} Ψ⁰₋(r_ss, φ_ss))/√2`, renormalized exactly.
pub fn conditional_steady_superposition(
    params: &SystemParams,
    relative_phase: f64,
    spec: SpaceSpec,
) -> Result<StateVector> {
    let ss = semiclassical_steady_state(params)?;
    if let Some(w) = orthogonality_warning(params)? {
        log::debug!("{w}");
    }
    let u = special_state(Sign::Plus, ss.r_ss, -ss.phi_ss, spec)?;
    let l = special_state(Sign::Minus, ss.r_ss, ss.phi_ss, spec)?;
    StateVector::combine(&[
        (C64::from(FRAC_1_SQRT_2), &u),
        (C64::from_polar(FRAC_1_SQRT_2, -relative_phase), &l),
    ])?
    .normalized()
}

/// The relative phase at which [`branch_superposition`] at `t = 0` equals the
/// σ₋-collapse of [`conditional_steady_superposition`] taken at
/// `relative_phase`. The emission amplitudes `e^{∓iφ_ss}` of the two
/// components shift the relative phase by `2φ_ss`.
pub fn collapsed_relative_phase(relative_phase: f64, phi_ss: f64) -> f64 {
    relative_phase - 2.0 * phi_ss
}

/// Applies σ₋ and renormalizes: the atom ends up exactly in |g⟩.
pub fn post_emission_collapse(psi: &StateVector) -> Result<StateVector> {
    let spec = psi.spec();
    let weight: f64 = (0..spec.fock_dim()).map(|n| psi.amplitude(EXCITED, n).norm_sqr()).sum();
    let weight = weight / psi.norm_sqr();
    if !(weight > MIN_EMISSION_WEIGHT) {
        return Err(Error::ZeroAmplitude(weight));
    }
    let mut amps = DVector::zeros(spec.dim());
    for n in 0..spec.fock_dim() {
        amps[spec.index(GROUND, n)] = psi.amplitude(EXCITED, n);
    }
    StateVector::from_amplitudes(spec, amps)?.normalized()
}

/// Leading-order decay `exp(−g²κt³/3)` of the coherence between the two
/// components of a branch.
pub fn decoherence_factor(t: f64, params: &SystemParams) -> f64 {
    (-params.g * params.g * params.kappa * t.powi(3) / 3.0).exp()
}

/// `|⟨r e^{iφ_a} | r e^{iφ_b}⟩| = exp(−r²(1 − cos(φ_a − φ_b)))`
pub fn field_orthogonality(r: f64, phi_a: f64, phi_b: f64) -> f64 {
    (-r * r * (1.0 - (phi_a - phi_b).cos())).exp()
}

pub fn orthogonality_warning(params: &SystemParams) -> Result<Option<Warning>> {
    let ss = semiclassical_steady_state(params)?;
    let r_sin_phi = ss.r_ss * ss.phi_ss.sin();
    Ok((r_sin_phi < ORTHOGONALITY_WARN).then_some(Warning::WeakOrthogonality { r_sin_phi }))
}

pub fn short_time_warning(t: f64, g: f64, r: f64) -> Option<Warning> {
    let gt_over_r = g * t / r;
    (gt_over_r > SHORT_TIME_WARN).then_some(Warning::ShortTimeDegraded { t, gt_over_r })
}
