//! Nonzero-entry form of the fixed generators, used by the integrators.
//!
//! Public operators stay dense; this only speeds up the hot loops, where the
//! ladder and atomic operators have O(dim) nonzeros.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

#[derive(Clone, Debug)]
pub(crate) struct SparseOp {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    pub(crate) fn from_dense(m: &DMatrix<C64>) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let dim = m.nrows();
        let mut entries = Vec::new();
        for col in 0..dim {
            for row in 0..dim {
                let v = m[(row, col)];
                if v != C64::new(0.0, 0.0) {
                    entries.push((row, col, v));
                }
            }
        }
        Self { dim, entries }
    }

    /// out = self · v
    pub(crate) fn apply(&self, v: &DVector<C64>, out: &mut DVector<C64>) {
        out.fill(C64::new(0.0, 0.0));
        for &(i, j, x) in &self.entries {
            out[i] += x * v[j];
        }
    }

    /// out += scale · self · m
    pub(crate) fn left_mul_acc(&self, m: &DMatrix<C64>, scale: C64, out: &mut DMatrix<C64>) {
        let d = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for &(i, j, x) in &self.entries {
            let xs = x * scale;
            for c in 0..d {
                dst[c * d + i] += xs * src[c * d + j];
            }
        }
    }

    /// out += scale · m · self†
    pub(crate) fn right_mul_adjoint_acc(
        &self,
        m: &DMatrix<C64>,
        scale: C64,
        out: &mut DMatrix<C64>,
    ) {
        // (m self†)[r, i] = Σ_j m[r, j] conj(self[i, j]); column j of m is contiguous.
        let d = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for &(i, j, x) in &self.entries {
            let xs = x.conj() * scale;
            let (s, t) = (j * d, i * d);
            for r in 0..d {
                dst[t + r] += xs * src[s + r];
            }
        }
    }

    /// out += scale · self · m · self†
    pub(crate) fn sandwich_acc(&self, m: &DMatrix<C64>, scale: f64, out: &mut DMatrix<C64>) {
        let d = self.dim;
        let src = m.as_slice();
        let dst = out.as_mut_slice();
        for &(i, j, x) in &self.entries {
            for &(k, l, y) in &self.entries {
                dst[k * d + i] += x * src[l * d + j] * y.conj() * scale;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(d: usize, seed: u64) -> DMatrix<C64> {
        let mut s = seed;
        DMatrix::from_fn(d, d, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            if a.abs() < 0.2 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(a, b)
            }
        })
    }

    #[test]
    fn sparse_products_match_dense() {
        let op = random_matrix(7, 1);
        let m = random_matrix(7, 2);
        let sp = SparseOp::from_dense(&op);
        let scale = C64::new(0.3, -1.1);

        let mut out = DMatrix::zeros(7, 7);
        sp.left_mul_acc(&m, scale, &mut out);
        assert!((out - &op * &m * scale).norm() < 1e-12);

        let mut out = DMatrix::zeros(7, 7);
        sp.right_mul_adjoint_acc(&m, scale, &mut out);
        assert!((out - &m * op.adjoint() * scale).norm() < 1e-12);

        let mut out = DMatrix::zeros(7, 7);
        sp.sandwich_acc(&m, 0.7, &mut out);
        assert!((out - &op * &m * op.adjoint() * C64::from(0.7)).norm() < 1e-12);

        let v = DVector::from_fn(7, |i, _| C64::new(i as f64, 1.0));
        let mut w = DVector::zeros(7);
        sp.apply(&v, &mut w);
        assert!((w - &op * &v).norm() < 1e-12);
    }
}
