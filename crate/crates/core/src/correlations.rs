//! Intensity-field correlation `h(τ) = ⟨σ₊(0) a_θ(τ) σ₋(0)⟩ / ⟨σ₊σ₋⟩⟨a_θ⟩`:
//! the mean field quadrature after a spontaneous emission, relative to its
//! unconditioned value.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::branches::{describe_branch, short_time_warning, Branch};
use crate::dynamics::{integrate_master_with, semiclassical_steady_state, steady_state_mixture, SystemParams};
use crate::error::{Error, Result};
use crate::hilbert::{build_operators, DensityOperator, QuantumState, SpaceSpec, StateVector};
use crate::series::TimeSeries;

const DENOMINATOR_TOL: f64 = 1e-10;

/// Quadrature `a_θ = (a e^{−iθ} + a† e^{iθ})/2`. The default θ = 0 is aligned
/// with the real mean steady-state field.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadratureSpec {
    pub theta: f64,
}

impl QuadratureSpec {
    pub fn new(theta: f64) -> Self {
        Self { theta }
    }

    pub fn operator(&self, spec: SpaceSpec) -> DMatrix<C64> {
        build_operators(spec).quadrature(self.theta)
    }
}

/// Denominators used to normalize a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HftNormalization {
    /// `⟨σ₊σ₋⟩` of the unconditioned state.
    pub excited_population: f64,
    /// `⟨a_θ⟩` of the unconditioned state.
    pub quadrature_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HftSeries {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub theta: f64,
    /// `None` for the closed-form approximation.
    pub normalization: Option<HftNormalization>,
}

impl HftSeries {
    pub fn to_series(&self, column: &str) -> Result<TimeSeries> {
        let mut s = TimeSeries::new([column]).with_time_label("tau");
        s.note("theta", self.theta);
        if let Some(n) = self.normalization {
            s.note("excited_population", n.excited_population);
            s.note("quadrature_mean", n.quadrature_mean);
        }
        for (t, v) in self.taus.iter().zip(&self.values) {
            s.push(*t, vec![*v])?;
        }
        Ok(s)
    }
}

/// Conditions `rho_init` on one emission (`σ₋ρσ₊` renormalized), propagates it
/// with the master equation and normalizes `⟨a_θ⟩(τ)` by `⟨a_θ⟩` of
/// `rho_init`. Samples every `stride` steps up to `t_final`.
pub fn hft_numeric(
    rho_init: &DensityOperator,
    params: &SystemParams,
    quad: QuadratureSpec,
    t_final: f64,
    dt: f64,
    stride: usize,
) -> Result<HftSeries> {
    let spec = rho_init.spec();
    let ops = build_operators(spec);
    let aq = quad.operator(spec);
    let excited = rho_init.expect(&ops.excited_projector())?.re;
    if !(excited > DENOMINATOR_TOL) {
        return Err(Error::Normalization(format!("excited population {excited:.3e} too small to condition on")));
    }
    let mean = rho_init.expect(&aq)?.re;
    if !(mean.abs() > DENOMINATOR_TOL) {
        return Err(Error::Normalization(format!("quadrature mean {mean:.3e} vanishes at theta = {}", quad.theta)));
    }
    let sm = &ops.sigma_minus.matrix;
    let cond = sm * rho_init.matrix() * &ops.sigma_plus.matrix;
    let tr = cond.trace().re;
    let conditioned = DensityOperator::new(spec, cond / C64::from(tr))?;

    let mut taus = Vec::new();
    let mut values = Vec::new();
    integrate_master_with(&conditioned, params, t_final, dt, stride, |t, rho| {
        taus.push(t);
        values.push(rho.expect(&aq)?.re / mean);
        Ok(())
    })?;
    Ok(HftSeries {
        taus,
        values,
        theta: quad.theta,
        normalization: Some(HftNormalization { excited_population: excited, quadrature_mean: mean }),
    })
}

fn mean_quadrature(psi: &StateVector, aq: &DMatrix<C64>) -> Result<f64> {
    Ok(psi.expect(aq)?.re / psi.norm_sqr())
}

/// `h(t)` from the closed-form branch states, averaged over the two branches
/// and normalized by `⟨a_θ⟩` of the steady-state mixture. With
/// `coherent = false` each branch is replaced by the equal mixture of its
/// two components (no cross terms).
pub fn hft_from_branches(
    ts: &[f64],
    params: &SystemParams,
    quad: QuadratureSpec,
    coherent: bool,
    spec: SpaceSpec,
) -> Result<HftSeries> {
    let ss = semiclassical_steady_state(params)?;
    let aq = quad.operator(spec);
    let reference = steady_state_mixture(params, spec)?;
    let mean = reference.expect(&aq)?.re;
    if !(mean.abs() > DENOMINATOR_TOL) {
        return Err(Error::Normalization(format!("quadrature mean {mean:.3e} vanishes at theta = {}", quad.theta)));
    }
    let excited = reference.expect(&build_operators(spec).excited_projector())?.re;
    if let Some(w) = ts.last().and_then(|&t| short_time_warning(t, params.g, ss.r_ss)) {
        log::warn!("{w}");
    }
    let values = ts
        .iter()
        .map(|&t| {
            let mut acc = 0.0;
            for branch in [Branch::Upper, Branch::Lower] {
                let b = describe_branch(branch, t, params.g, ss.r_ss, ss.phi_ss)?;
                acc += if coherent {
                    mean_quadrature(&b.unnormalized(spec)?, &aq)?
                } else {
                    let [x, y] = b.components(spec)?;
                    0.5 * (mean_quadrature(&x, &aq)? + mean_quadrature(&y, &aq)?)
                };
            }
            Ok(0.5 * acc / mean)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HftSeries {
        taus: ts.to_vec(),
        values,
        theta: quad.theta,
        normalization: Some(HftNormalization { excited_population: excited, quadrature_mean: mean }),
    })
}

/// Short-time closed form
///
/// ```text
/// h − 1 ≈ (tan φ_ss + u sin(2g r_ss t)) g t / (2 r_ss) − (g t / r_ss)² / 4,   u = e^{−g²t²/2}
/// ```
///
/// With `rabi = false` the oscillating term is dropped (`u = 0`), which is
/// the incoherent counterpart.
pub fn hft_approx(ts: &[f64], params: &SystemParams, rabi: bool) -> Result<HftSeries> {
    let ss = semiclassical_steady_state(params)?;
    let (g, r) = (params.g, ss.r_ss);
    if let Some(w) = ts.last().and_then(|&t| short_time_warning(t, g, r)) {
        log::warn!("{w}");
    }
    let values = ts
        .iter()
        .map(|&t| {
            let x = g * t / r;
            let u = if rabi { (-0.5 * g * g * t * t).exp() } else { 0.0 };
            1.0 + (ss.phi_ss.tan() + u * (2.0 * g * r * t).sin()) * 0.5 * x - 0.25 * x * x
        })
        .collect();
    Ok(HftSeries { taus: ts.to_vec(), values, theta: 0.0, normalization: None })
}
