//! Classical fourth-order Runge–Kutta one-step update, shared by every integrator.

use nalgebra::SMatrix;

use crate::real::Real;

/// A state an explicit one-step method can advance.
pub trait OdeState<T: Real>: Clone {
    /// `self + a * k`.
    fn axpy(&self, a: T, k: &Self) -> Self;
    fn all_finite(&self) -> bool;
}

impl<T: Real, const R: usize, const C: usize> OdeState<T> for SMatrix<T, R, C> {
    fn axpy(&self, a: T, k: &Self) -> Self {
        self + k * a
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl<T: Real> OdeState<T> for Vec<T> {
    fn axpy(&self, a: T, k: &Self) -> Self {
        debug_assert_eq!(self.len(), k.len());
        self.iter().zip(k).map(|(&y, &d)| y + a * d).collect()
    }
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("non-finite derivative at t = {t}")]
pub struct NonFiniteDerivative {
    pub t: f64,
}

/// One RK4 step of `ẏ = f(t, y)` for a fallible right-hand side.
pub fn try_rk4_step<T, S, E, F>(mut f: F, y: &S, t: T, h: T) -> Result<S, E>
where
    T: Real,
    S: OdeState<T>,
    E: From<NonFiniteDerivative>,
    F: FnMut(T, &S) -> Result<S, E>,
{
    let half = h * T::half();
    let mut eval = |tt: T, yy: &S| -> Result<S, E> {
        let k = f(tt, yy)?;
        if !k.all_finite() {
            return Err(NonFiniteDerivative { t: tt.to_f64().unwrap_or(f64::NAN) }.into());
        }
        Ok(k)
    };
    let k1 = eval(t, y)?;
    let k2 = eval(t + half, &y.axpy(half, &k1))?;
    let k3 = eval(t + half, &y.axpy(half, &k2))?;
    let k4 = eval(t + h, &y.axpy(h, &k3))?;
    let sixth = h / T::lit(6.0);
    let third = h / T::lit(3.0);
    Ok(y.axpy(sixth, &k1).axpy(third, &k2).axpy(third, &k3).axpy(sixth, &k4))
}

/// One RK4 step of `ẏ = f(t, y)`.
pub fn rk4_step<T, S, F>(mut f: F, y: &S, t: T, h: T) -> Result<S, NonFiniteDerivative>
where
    T: Real,
    S: OdeState<T>,
    F: FnMut(T, &S) -> S,
{
    try_rk4_step(|tt, yy: &S| Ok::<S, NonFiniteDerivative>(f(tt, yy)), y, t, h)
}
