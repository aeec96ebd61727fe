//! Fixed-step classical Runge–Kutta shared by the master equation and the
//! trajectory drift.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub trait OdeState: Clone {
    /// self += a · x
    fn axpy(&mut self, a: f64, x: &Self);
    fn zero_like(&self) -> Self;
}

impl OdeState for DMatrix<C64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.as_mut_slice().iter_mut().zip(x.as_slice()) {
            *s += v * a;
        }
    }

    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
}

impl OdeState for DVector<C64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.as_mut_slice().iter_mut().zip(x.as_slice()) {
            *s += v * a;
        }
    }

    fn zero_like(&self) -> Self {
        DVector::zeros(self.len())
    }
}

/// Scratch buffers for [`Rk4::step`].
pub struct Rk4<S> {
    k: [S; 4],
    tmp: S,
}

impl<S: OdeState> Rk4<S> {
    pub fn new(like: &S) -> Self {
        Self {
            k: [like.zero_like(), like.zero_like(), like.zero_like(), like.zero_like()],
            tmp: like.zero_like(),
        }
    }

    /// Advances `y` by `dt` in place. `f(y, out)` must overwrite `out` with
    /// dy/dt.
    pub fn step<F>(&mut self, y: &mut S, dt: f64, mut f: F)
    where
        F: FnMut(&S, &mut S),
    {
        let [k1, k2, k3, k4] = &mut self.k;
        f(y, k1);
        self.tmp.clone_from(y);
        self.tmp.axpy(0.5 * dt, k1);
        f(&self.tmp, k2);
        self.tmp.clone_from(y);
        self.tmp.axpy(0.5 * dt, k2);
        f(&self.tmp, k3);
        self.tmp.clone_from(y);
        self.tmp.axpy(dt, k3);
        f(&self.tmp, k4);
        y.axpy(dt / 6.0, k1);
        y.axpy(dt / 3.0, k2);
        y.axpy(dt / 3.0, k3);
        y.axpy(dt / 6.0, k4);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_order_on_a_rotation() {
        // y' = -i ω y, exact y(t) = e^{-iωt}
        let omega = 2.3;
        let err = |dt: f64| {
            let mut y = DVector::from_element(1, C64::new(1.0, 0.0));
            let mut rk = Rk4::new(&y);
            let n = (1.0 / dt).round() as usize;
            for _ in 0..n {
                rk.step(&mut y, dt, |y, out| {
                    out[0] = C64::new(0.0, -omega) * y[0];
                });
            }
            (y[0] - C64::from_polar(1.0, -omega)).norm()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }
}
