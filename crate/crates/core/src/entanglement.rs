//! Entropy of entanglement, the short-time entropy approximation and the
//! realignment separability test.

use std::f64::consts::LN_2;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;

use crate::dynamics::SystemParams;
use crate::error::{Error, Result};
use crate::hilbert::{reduced_atom_state, DensityOperator, SpaceSpec, StateVector, EXCITED, GROUND};

/// Eigenvalues below this are treated as exactly zero in entropy sums.
pub const EIGEN_CUTOFF: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-7;

/// Von Neumann entropy of a qubit, in bits.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EntropyValue {
    pub bits: f64,
}

impl EntropyValue {
    pub fn bits(self) -> f64 {
        self.bits
    }
}

/// `−Σ λ log₂ λ`, skipping eigenvalues below [`EIGEN_CUTOFF`].
pub fn von_neumann_bits(eigenvalues: &[f64]) -> f64 {
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > EIGEN_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum();
    s.max(0.0)
}

pub fn binary_entropy(p: f64) -> f64 {
    von_neumann_bits(&[p, 1.0 - p])
}

/// Eigenvalues of a Hermitian 2×2 matrix, ascending.
fn eig2(m: &Matrix2<C64>) -> [f64; 2] {
    let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
    let b = 0.5 * (m[(0, 1)] + m[(1, 0)].conj());
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mid - rad, mid + rad]
}

pub fn entropy_of_entanglement(rho_atom: &Matrix2<C64>) -> Result<EntropyValue> {
    let herm = (rho_atom - rho_atom.adjoint()).norm();
    if herm > DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("not Hermitian (defect {herm:.3e})")));
    }
    let tr = rho_atom.trace();
    if (tr - C64::from(1.0)).norm() > DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
    }
    let eig = eig2(rho_atom);
    if eig[0] < -DENSITY_TOL {
        return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {:.3e}", eig[0])));
    }
    Ok(EntropyValue { bits: von_neumann_bits(&eig).min(1.0) })
}

/// Entropy of entanglement of a pure joint state.
pub fn pure_state_entropy(psi: &StateVector) -> Result<EntropyValue> {
    let mut rho = reduced_atom_state(psi);
    let n = psi.norm_sqr();
    if !(n > 0.0) {
        return Err(Error::Normalization("zero state".into()));
    }
    rho /= C64::from(n);
    entropy_of_entanglement(&rho)
}

/// The overlap functions of the short-time entropy approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollapseFunctions {
    pub u: f64,
    /// Offset-corrected: equals the binary entropy of `(1 ± u)/2`.
    pub f1: f64,
    pub f2: f64,
}

impl CollapseFunctions {
    /// The expression exactly as printed, which is `f1 − 1`.
    pub fn f1_printed(&self) -> f64 {
        self.f1 - 1.0
    }
}

/// `y ln y` with the `0 ln 0 = 0` limit.
fn ylny(y: f64) -> f64 {
    if y <= 0.0 {
        0.0
    } else {
        y * y.ln()
    }
}

pub fn collapse_functions(u: f64) -> Result<CollapseFunctions> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("overlap u must lie in [0, 1], got {u}")));
    }
    // u ln((1−u)/(1+u)) − ln(1−u²) rearranged as −(1−u)ln(1−u) − (1+u)ln(1+u)
    // so that u = 1 needs no special case.
    let printed = (-ylny(1.0 - u) - ylny(1.0 + u)) / (2.0 * LN_2);
    let f2 = (2.0 * u * (1.0 - LN_2) + ylny(1.0 + u) - ylny(1.0 - u)) / (4.0 * LN_2);
    Ok(CollapseFunctions { u, f1: 1.0 + printed, f2 })
}

/// Which `f1` the entropy approximation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum F1Variant {
    #[default]
    Corrected,
    Printed,
}

/// Short-time entropy along one branch after an emission:
///
/// ```text
/// E ≈ f1(u) − f2(u) sin(2grt) (gt/r) − (gt/r)² / (8 ln 2),   u = e^{−g²t²/2}
/// ```
///
/// clamped to [0, 1].
pub fn approx_entropy(t: f64, params: &SystemParams, r: f64) -> EntropyValue {
    approx_entropy_with(t, params, r, F1Variant::Corrected)
}

pub fn approx_entropy_with(t: f64, params: &SystemParams, r: f64, variant: F1Variant) -> EntropyValue {
    let g = params.g;
    let gt = g * t;
    if gt / (2.0 * r) > 0.5 {
        log::debug!("approx_entropy: g*t/2r = {:.3} exceeds 0.5", gt / (2.0 * r));
    }
    let u = (-0.5 * gt * gt).exp();
    let cf = collapse_functions(u).expect("u in [0,1] by construction");
    let f1 = match variant {
        F1Variant::Corrected => cf.f1,
        F1Variant::Printed => cf.f1_printed(),
    };
    let x = gt / r;
    let e = f1 - cf.f2 * (2.0 * g * r * t).sin() * x - x * x / (8.0 * LN_2);
    EntropyValue { bits: e.clamp(0.0, 1.0) }
}

/// Trace norm of the realigned matrix `R[(i,j),(k,l)] = ρ[(i,k),(j,l)]` for
/// a bipartite `dim_a × dim_b` system. Values above 1 certify entanglement.
pub fn realignment_trace_norm(rho: &DMatrix<C64>, dim_a: usize, dim_b: usize) -> Result<f64> {
    let d = dim_a * dim_b;
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::Dimension { expected: d, got: rho.nrows().max(rho.ncols()) });
    }
    let r = DMatrix::from_fn(dim_a * dim_a, dim_b * dim_b, |row, col| {
        let (i, j) = (row / dim_a, row % dim_a);
        let (k, l) = (col / dim_b, col % dim_b);
        rho[(i * dim_b + k, j * dim_b + l)]
    });
    Ok(r.singular_values().iter().sum())
}

/// Which form of the lower-branch state to use in
/// [`schematic_post_collapse_mixture`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchematicVariant {
    /// Both lower-branch atomic states carry `e^{−iφ}`; trace norm is √2 for
    /// every φ.
    #[default]
    Corrected,
    /// The second lower-branch atomic state carries `e^{+iφ}`; the trace norm
    /// then depends on φ.
    Printed,
}

/// Equal mixture of the two post-collapse branch states after the collapse
/// time, with the field truncated to four orthonormal states |1⟩..|4⟩
/// (Fock slots 0..3 of a `n_max = 3` space).
pub fn schematic_post_collapse_mixture(phi: f64, variant: SchematicVariant) -> Result<DensityOperator> {
    if !(phi > 0.0 && phi < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("phi must lie in (0, pi/2), got {phi}")));
    }
    let spec = SpaceSpec::new(3)?;
    let ep = C64::from_polar(1.0, phi);
    let em = C64::from_polar(1.0, -phi);
    let one = C64::from(1.0);
    let half = C64::from(0.5);
    // (field slot, weight, e amplitude, g amplitude)
    let upper = [(0, -half, ep, -one), (1, half, ep, one)];
    let last_e = match variant {
        SchematicVariant::Corrected => em,
        SchematicVariant::Printed => ep,
    };
    let lower = [(2, half, em, one), (3, -half, last_e, -one)];
    let build = |terms: &[(usize, C64, C64, C64)]| -> Result<DensityOperator> {
        let mut amps = nalgebra::DVector::zeros(spec.dim());
        for &(n, w, ce, cg) in terms {
            amps[spec.index(EXCITED, n)] += w * ce;
            amps[spec.index(GROUND, n)] += w * cg;
        }
        Ok(StateVector::from_amplitudes(spec, amps)?.normalized()?.projector())
    };
    DensityOperator::mixture(&[(0.5, &build(&upper)?), (0.5, &build(&lower)?)])
}
