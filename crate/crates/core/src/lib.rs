//! Simulation and analysis of a single two-level atom in a coherently driven,
//! lossy cavity.
//!
//! The model is the resonant master equation
//!
//! ```text
//! dρ/dt = −ig[a†σ₋ + aσ₊, ρ] + ℰ[a† − a, ρ]
//!         + κ(2aρa† − a†aρ − ρa†a) + (γ/2)(2σ₋ρσ₊ − σ₊σ₋ρ − ρσ₊σ₋)
//! ```
//!
//! on a truncated Fock space. Time is measured in units of 1/g.
//!
//! * [`hilbert`]: basis, operators, coherent states, partial traces
//! * [`dynamics`]: Liouvillian, RK4 master-equation integration, semiclassical
//!   steady states
//! * [`trajectories`]: Monte-Carlo wavefunction unraveling with cavity and
//!   spontaneous-emission jumps
//! * [`branches`]: closed-form factorizable states and post-emission branch
//!   superpositions
//! * [`entanglement`]: entropy of entanglement, collapse functions, the
//!   realignment criterion
//! * [`correlations`]: the intensity-field correlation `h^FT(τ)`

// `!(x > 0.0)` is used on purpose: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branches;
pub mod correlations;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod hilbert;
pub mod integrator;
pub mod series;
mod sparse;
pub mod trajectories;
mod warning;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use warning::Warning;
