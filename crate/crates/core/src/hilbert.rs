//! Truncated atom ⊗ field Hilbert space.
//!
//! Basis ordering is atom-major: the composite index of `|atom, n⟩` is
//! `atom * (n_max + 1) + n`, with atom index 0 = `|g⟩` and 1 = `|e⟩`. Every
//! module in this crate relies on that layout.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen, Vector2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Atom index of the ground state `|g⟩`.
pub const GROUND: usize = 0;
/// Atom index of the excited state `|e⟩`.
pub const EXCITED: usize = 1;

/// Maximum Poisson mass a coherent state may place above the cutoff.
pub const COHERENT_TAIL_TOL: f64 = 1e-8;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceSpec {
    n_max: usize,
}

impl SpaceSpec {
    pub const DEFAULT_N_MAX: usize = 60;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidParams(format!("n_max must be >= 1, got {n_max}")));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of Fock levels, `n_max + 1`.
    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Composite dimension `2 (n_max + 1)`.
    pub fn dim(&self) -> usize {
        2 * self.fock_dim()
    }

    pub fn index(&self, atom: usize, n: usize) -> usize {
        debug_assert!(atom < 2 && n <= self.n_max);
        atom * self.fock_dim() + n
    }
}

impl Default for SpaceSpec {
    fn default() -> Self {
        Self { n_max: Self::DEFAULT_N_MAX }
    }
}

/// Anything an expectation value can be taken on.
pub trait QuantumState {
    fn spec(&self) -> SpaceSpec;
    /// `⟨ψ|O|ψ⟩` or `Tr(O ρ)`.
    fn expect(&self, op: &DMatrix<C64>) -> Result<C64>;
}

/// Pure joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    spec: SpaceSpec,
    amps: DVector<C64>,
}

impl StateVector {
    pub fn from_amplitudes(spec: SpaceSpec, amps: DVector<C64>) -> Result<Self> {
        if amps.len() != spec.dim() {
            return Err(Error::Dimension { expected: spec.dim(), got: amps.len() });
        }
        Ok(Self { spec, amps })
    }

    pub fn basis(spec: SpaceSpec, atom: usize, n: usize) -> Self {
        let mut amps = DVector::zeros(spec.dim());
        amps[spec.index(atom, n)] = ONE;
        Self { spec, amps }
    }

    pub fn spec(&self) -> SpaceSpec {
        self.spec
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn amplitude(&self, atom: usize, n: usize) -> C64 {
        self.amps[self.spec.index(atom, n)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.norm_squared()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.amps.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Normalization(format!("state norm is {n}")));
        }
        self.amps /= C64::from(n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        check_dim(self.spec.dim(), other.amps.len())?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// `|⟨self|other⟩|²` for normalized inputs.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator { spec: self.spec, matrix: &self.amps * self.amps.adjoint() }
    }

    /// Linear combination `Σ cᵢ |ψᵢ⟩` (not renormalized).
    pub fn combine(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Domain("empty linear combination".into()))?;
        let spec = first.1.spec;
        let mut amps = DVector::zeros(spec.dim());
        for (c, s) in terms {
            check_dim(spec.dim(), s.amps.len())?;
            amps += &s.amps * *c;
        }
        Ok(Self { spec, amps })
    }
}

impl QuantumState for StateVector {
    fn spec(&self) -> SpaceSpec {
        self.spec
    }

    fn expect(&self, op: &DMatrix<C64>) -> Result<C64> {
        check_dim(self.spec.dim(), op.nrows())?;
        check_dim(self.spec.dim(), op.ncols())?;
        Ok(self.amps.dotc(&(op * &self.amps)))
    }
}

/// Mixed joint state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    spec: SpaceSpec,
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    /// Wraps a matrix after a shape check; see [`DensityOperator::validate`]
    /// for the physical checks.
    pub fn new(spec: SpaceSpec, matrix: DMatrix<C64>) -> Result<Self> {
        check_dim(spec.dim(), matrix.nrows())?;
        check_dim(spec.dim(), matrix.ncols())?;
        Ok(Self { spec, matrix })
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        psi.projector()
    }

    /// Convex combination `Σ wᵢ ρᵢ`.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let spec = first.1.spec;
        let mut m = DMatrix::zeros(spec.dim(), spec.dim());
        for (w, rho) in parts {
            if *w < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            check_dim(spec.dim(), rho.matrix.nrows())?;
            m += &rho.matrix * C64::from(*w);
        }
        Ok(Self { spec, matrix: m })
    }

    pub fn spec(&self) -> SpaceSpec {
        self.spec
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest entry of `|ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.norm_squared()
    }

    /// `⟨ψ|ρ|ψ⟩`
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        Ok(self.expect(&psi.projector().matrix)?.re)
    }

    /// `½ ‖ρ − σ‖₁`
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        check_dim(self.spec.dim(), other.matrix.nrows())?;
        let diff = &self.matrix - &other.matrix;
        Ok(0.5 * hermitian_eigenvalues(&diff).iter().map(|x| x.abs()).sum::<f64>())
    }

    /// Hermiticity within 1e−9, unit trace within 1e−8 and, when
    /// `check_positivity`, smallest eigenvalue ≥ −1e−7.
    pub fn validate(&self, check_positivity: bool) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-9 {
            return Err(Error::InvalidDensityMatrix(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - ONE).norm() > 1e-8 {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        if check_positivity {
            let min = self.min_eigenvalue();
            if min < -1e-7 {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }
}

impl QuantumState for DensityOperator {
    fn spec(&self) -> SpaceSpec {
        self.spec
    }

    fn expect(&self, op: &DMatrix<C64>) -> Result<C64> {
        check_dim(self.spec.dim(), op.nrows())?;
        check_dim(self.spec.dim(), op.ncols())?;
        // Tr(Oρ) = Σ_ij O_ij ρ_ji
        let d = self.spec.dim();
        let mut acc = ZERO;
        for i in 0..d {
            for j in 0..d {
                acc += op[(i, j)] * self.matrix[(j, i)];
            }
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpLabel {
    A,
    ADagger,
    SigmaMinus,
    SigmaPlus,
    SigmaZ,
    Number,
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OpLabel,
    pub matrix: DMatrix<C64>,
}

/// The composite-space operators of the model.
#[derive(Debug, Clone)]
pub struct Operators {
    pub spec: SpaceSpec,
    pub a: OperatorMatrix,
    pub a_dagger: OperatorMatrix,
    pub sigma_minus: OperatorMatrix,
    pub sigma_plus: OperatorMatrix,
    pub sigma_z: OperatorMatrix,
    pub number: OperatorMatrix,
    pub identity: OperatorMatrix,
}

impl Operators {
    pub fn get(&self, label: OpLabel) -> &OperatorMatrix {
        match label {
            OpLabel::A => &self.a,
            OpLabel::ADagger => &self.a_dagger,
            OpLabel::SigmaMinus => &self.sigma_minus,
            OpLabel::SigmaPlus => &self.sigma_plus,
            OpLabel::SigmaZ => &self.sigma_z,
            OpLabel::Number => &self.number,
            OpLabel::Identity => &self.identity,
        }
    }

    /// `σ₊σ₋`, the excited-state projector.
    pub fn excited_projector(&self) -> DMatrix<C64> {
        &self.sigma_plus.matrix * &self.sigma_minus.matrix
    }

    /// Field quadrature `(a e^{−iθ} + a† e^{iθ}) / 2`.
    pub fn quadrature(&self, theta: f64) -> DMatrix<C64> {
        let ph = C64::from_polar(1.0, -theta);
        (&self.a.matrix * ph + &self.a_dagger.matrix * ph.conj()) * C64::from(0.5)
    }
}

pub fn build_operators(spec: SpaceSpec) -> Operators {
    let d = spec.dim();
    let mut a = DMatrix::zeros(d, d);
    let mut sm = DMatrix::zeros(d, d);
    let mut num = DMatrix::zeros(d, d);
    let mut sz = DMatrix::zeros(d, d);
    for atom in 0..2 {
        for n in 0..=spec.n_max() {
            let i = spec.index(atom, n);
            if n >= 1 {
                a[(spec.index(atom, n - 1), i)] = C64::from((n as f64).sqrt());
            }
            num[(i, i)] = C64::from(n as f64);
            sz[(i, i)] = C64::from(if atom == EXCITED { 1.0 } else { -1.0 });
        }
    }
    for n in 0..=spec.n_max() {
        sm[(spec.index(GROUND, n), spec.index(EXCITED, n))] = ONE;
    }
    let a_dagger = a.adjoint();
    let sp = sm.adjoint();
    Operators {
        spec,
        a: OperatorMatrix { label: OpLabel::A, matrix: a },
        a_dagger: OperatorMatrix { label: OpLabel::ADagger, matrix: a_dagger },
        sigma_minus: OperatorMatrix { label: OpLabel::SigmaMinus, matrix: sm },
        sigma_plus: OperatorMatrix { label: OpLabel::SigmaPlus, matrix: sp },
        sigma_z: OperatorMatrix { label: OpLabel::SigmaZ, matrix: sz },
        number: OperatorMatrix { label: OpLabel::Number, matrix: num },
        identity: OperatorMatrix { label: OpLabel::Identity, matrix: DMatrix::identity(d, d) },
    }
}

/// Poisson mass `Σ_{n > n_max} e^{−|α|²} |α|^{2n} / n!`.
pub fn coherent_tail_mass(alpha: C64, n_max: usize) -> f64 {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return 0.0;
    }
    let lx = x.ln();
    // log p_n by recursion, so large |α| never overflows
    let mut lp = -x;
    for n in 1..=n_max {
        lp += lx - (n as f64).ln();
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        lp += lx - (n as f64).ln();
        let p = lp.exp();
        tail += p;
        if (n as f64) > x && p < 1e-300_f64.max(tail * 1e-17) {
            break;
        }
        n += 1;
    }
    tail
}

/// Fock amplitudes `e^{−|α|²/2} αⁿ / √n!`, renormalized on the truncated
/// space.
pub fn coherent_state(alpha: C64, spec: SpaceSpec) -> Result<DVector<C64>> {
    let tail = coherent_tail_mass(alpha, spec.n_max());
    if tail > COHERENT_TAIL_TOL {
        return Err(Error::Truncation { what: "coherent state", mass: tail, n_max: spec.n_max() });
    }
    if alpha == C64::new(0.0, 0.0) {
        let mut c = DVector::zeros(spec.fock_dim());
        c[0] = ONE;
        return Ok(c);
    }
    // log-magnitudes, so e^{−|α|²/2} cannot underflow for large amplitudes
    let (r, theta) = alpha.to_polar();
    let mut lm = Vec::with_capacity(spec.fock_dim());
    lm.push(-0.5 * r * r);
    for n in 1..spec.fock_dim() {
        lm.push(lm[n - 1] + r.ln() - 0.5 * (n as f64).ln());
    }
    let peak = lm.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c = DVector::from_fn(spec.fock_dim(), |n, _| C64::from_polar((lm[n] - peak).exp(), n as f64 * theta));
    let norm = c.norm();
    Ok(c / C64::from(norm))
}

/// Kronecker product `|atom⟩ ⊗ |field⟩`, renormalized.
pub fn atom_field_product(
    atom: &Vector2<C64>,
    field: &DVector<C64>,
    spec: SpaceSpec,
) -> Result<StateVector> {
    check_dim(spec.fock_dim(), field.len())?;
    let mut amps = DVector::zeros(spec.dim());
    for s in 0..2 {
        for n in 0..spec.fock_dim() {
            amps[spec.index(s, n)] = atom[s] * field[n];
        }
    }
    StateVector { spec, amps }.normalized()
}

/// Reduced atomic density matrix `Tr_field ρ`, indexed (g, e).
pub fn partial_trace_field(rho: &DensityOperator) -> Matrix2<C64> {
    let spec = rho.spec;
    let m = &rho.matrix;
    Matrix2::from_fn(|i, k| {
        (0..spec.fock_dim()).map(|n| m[(spec.index(i, n), spec.index(k, n))]).sum()
    })
}

/// Same as [`partial_trace_field`] on `|ψ⟩⟨ψ|`, without forming the projector.
pub fn reduced_atom_state(psi: &StateVector) -> Matrix2<C64> {
    let spec = psi.spec;
    Matrix2::from_fn(|i, k| {
        (0..spec.fock_dim())
            .map(|n| psi.amplitude(i, n) * psi.amplitude(k, n).conj())
            .sum()
    })
}

/// Reduced field density matrix `Tr_atom ρ`.
pub fn partial_trace_atom(rho: &DensityOperator) -> DMatrix<C64> {
    let spec = rho.spec;
    let m = &rho.matrix;
    DMatrix::from_fn(spec.fock_dim(), spec.fock_dim(), |n, k| {
        (0..2).map(|s| m[(spec.index(s, n), spec.index(s, k))]).sum()
    })
}

pub fn expectation<S: QuantumState>(op: &OperatorMatrix, state: &S) -> Result<C64> {
    state.expect(&op.matrix)
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    // Symmetrize first so round-off asymmetry cannot leak into the spectrum.
    let h = (m + m.adjoint()) * C64::from(0.5);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize) -> SpaceSpec {
        SpaceSpec::new(n).unwrap()
    }

    // Poisson weights summed term by term in plain f64, independent of the
    // log-space recursion used by `coherent_tail_mass`.
    fn poisson_head(x: f64, n_max: usize) -> f64 {
        let mut p = (-x).exp();
        let mut s = p;
        for n in 1..=n_max {
            p *= x / n as f64;
            s += p;
        }
        s
    }

    #[test]
    fn vacuum_coherent_state() {
        let c = coherent_state(C64::new(0.0, 0.0), spec(5)).unwrap();
        assert_eq!(c[0], ONE);
        assert!(c.iter().skip(1).all(|x| *x == ZERO));
    }

    #[test]
    fn coherent_state_at_steady_amplitude_is_normalized() {
        let alpha = C64::new(3.92, 0.0);
        let c = coherent_state(alpha, spec(60)).unwrap();
        assert!((c.norm() - 1.0).abs() < 1e-8);
        // the unrenormalized head already carries all but a negligible tail
        let head = poisson_head(alpha.norm_sqr(), 60);
        assert!((1.0 - head).abs() < 1e-8);
        assert!(coherent_tail_mass(alpha, 60) < 1e-8);
    }

    #[test]
    fn tail_mass_matches_direct_summation() {
        for &(x, n) in &[(4.0, 10usize), (15.36, 30), (1.0, 3), (25.0, 40)] {
            let direct = 1.0 - poisson_head(x, n);
            let tail = coherent_tail_mass(C64::new(x.sqrt(), 0.0), n);
            assert!((tail - direct).abs() < 1e-13, "x={x} n={n}: {tail} vs {direct}");
        }
    }

    #[test]
    fn truncation_is_refused() {
        let err = coherent_state(C64::new(5.0, 0.0), spec(20)).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn coherent_overlap_closed_form() {
        let s = spec(40);
        let a = coherent_state(C64::new(2.0, 0.0), s).unwrap();
        let b = coherent_state(C64::new(0.0, 2.0), s).unwrap();
        let ov = a.dotc(&b).norm();
        assert!((ov - (-4.0f64).exp()).abs() < 1e-8);
        assert!((ov - 0.0183).abs() < 1e-4);
    }

    #[test]
    fn ladder_commutator_is_identity_except_corner() {
        let s = spec(6);
        let ops = build_operators(s);
        let comm = &ops.a.matrix * &ops.a_dagger.matrix - &ops.a_dagger.matrix * &ops.a.matrix;
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let corner = i == j && i % s.fock_dim() == s.n_max();
                let expected = if i == j && !corner {
                    ONE
                } else if corner {
                    C64::from(-(s.n_max() as f64))
                } else {
                    ZERO
                };
                assert!((comm[(i, j)] - expected).norm() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn sigma_plus_sigma_minus_projects_on_excited() {
        let s = spec(3);
        let ops = build_operators(s);
        let p = ops.excited_projector();
        for atom in 0..2 {
            for n in 0..=3 {
                let i = s.index(atom, n);
                let expected = if atom == EXCITED { ONE } else { ZERO };
                assert_eq!(p[(i, i)], expected);
            }
        }
        assert_eq!(p.trace(), C64::from(4.0));
    }

    #[test]
    fn adjoints_are_exact() {
        let ops = build_operators(spec(10));
        assert_eq!(ops.a_dagger.matrix, ops.a.matrix.adjoint());
        assert_eq!(ops.sigma_plus.matrix, ops.sigma_minus.matrix.adjoint());
    }

    #[test]
    fn coherent_eigenvalue_relation() {
        let s = spec(40);
        let alpha = C64::new(1.0, 0.5);
        let psi = atom_field_product(
            &Vector2::new(ONE, ZERO),
            &coherent_state(alpha, s).unwrap(),
            s,
        )
        .unwrap();
        let ops = build_operators(s);
        let mean = expectation(&ops.a, &psi).unwrap();
        assert!((mean - alpha).norm() < 1e-8);
    }

    #[test]
    fn product_basics() {
        let s = spec(12);
        let vac = coherent_state(ZERO, s).unwrap();
        let psi = atom_field_product(&Vector2::new(ONE, ZERO), &vac, s).unwrap();
        assert_eq!(psi.amplitude(GROUND, 0), ONE);
        assert_eq!(psi.amplitudes().iter().filter(|x| **x != ZERO).count(), 1);

        let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let field = coherent_state(C64::new(0.7, -0.2), s).unwrap();
        let psi = atom_field_product(&Vector2::new(h, h), &field, s).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        let ra = reduced_atom_state(&psi);
        let purity = (ra * ra).trace().re;
        assert!((purity - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_dimension_mismatch() {
        let err = atom_field_product(
            &Vector2::new(ONE, ZERO),
            &DVector::from_element(3, ONE),
            spec(4),
        )
        .unwrap_err();
        assert_eq!(err, Error::Dimension { expected: 5, got: 3 });
    }

    #[test]
    fn bell_like_state_reduces_to_maximally_mixed() {
        let s = spec(3);
        let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let mut amps = DVector::zeros(s.dim());
        amps[s.index(EXCITED, 0)] = h;
        amps[s.index(GROUND, 1)] = h;
        let psi = StateVector::from_amplitudes(s, amps).unwrap();
        let ra = partial_trace_field(&psi.projector());
        assert!((ra - Matrix2::identity() * C64::from(0.5)).norm() < 1e-12);
        assert!((ra - reduced_atom_state(&psi)).norm() < 1e-15);
    }

    #[test]
    fn number_operator_expectations() {
        let s = spec(30);
        let ops = build_operators(s);
        let vac = StateVector::basis(s, GROUND, 0);
        assert_eq!(expectation(&ops.number, &vac).unwrap(), ZERO);

        let field = coherent_state(C64::new(2.0, 0.0), s).unwrap();
        let psi = atom_field_product(&Vector2::new(ONE, ZERO), &field, s).unwrap();
        // Poisson mean by direct summation
        let mean: f64 = field.iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum();
        assert!((mean - 4.0).abs() < 1e-6);
        let n = expectation(&ops.number, &psi).unwrap();
        assert!((n.re - 4.0).abs() < 1e-6 && n.im.abs() < 1e-9);
        let rho = psi.projector();
        assert!((expectation(&ops.identity, &rho).unwrap() - ONE).norm() < 1e-12);
        assert!((expectation(&ops.number, &rho).unwrap() - n).norm() < 1e-10);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let ops = build_operators(spec(3));
        let psi = StateVector::basis(spec(4), GROUND, 0);
        assert!(matches!(expectation(&ops.a, &psi), Err(Error::Dimension { .. })));
    }

    #[test]
    fn validate_flags_bad_density_matrices() {
        let s = spec(2);
        let good = StateVector::basis(s, EXCITED, 1).projector();
        good.validate(true).unwrap();
        let mut bad = good.clone();
        bad.matrix_mut()[(0, 1)] = C64::new(0.1, 0.0);
        assert!(bad.validate(false).is_err());
        let twice = DensityOperator::new(s, good.matrix() * C64::from(2.0)).unwrap();
        assert!(twice.validate(false).is_err());
    }
}
