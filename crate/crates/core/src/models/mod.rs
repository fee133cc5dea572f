//! Vector-field models with exact Jacobians.
//!
//! Built-ins: the ribosome flow model (constant and periodically modulated
//! rates), a two-neuron tanh network, a 2π-periodic linear system with a
//! closed-form transition matrix, constant and band-callback linear
//! systems, and the zero field.

mod linear;
mod neural;
mod rfm;
mod schwarz;
mod spec;

pub use self::linear::{LinearConstant, PeriodicTridiagonalLinear, ZeroField};
pub use neural::{neural_model, Neural};
pub use rfm::{
    least_squares_slope, rfm_field, rfm_jacobian, rfm_scaling_experiment, rfm_steady_state,
    toeplitz_reference, RateFamily, Rfm, RfmPeriodic, RfmSteadyState, ScalingRow,
};
pub use schwarz::{schwarz_model, schwarz_transition, Schwarz};
pub use spec::{MatrixInput, ModelSpec};

use serde::Serialize;

use crate::linalg::{Matrix, TridiagonalSpec};

/// Axis-aligned box `lower <= x <= upper`; infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        BoxDomain { lower, upper }
    }

    pub fn unbounded(n: usize) -> Self {
        BoxDomain::new(vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        BoxDomain::new(vec![lo; n], vec![hi; n])
    }

    /// Membership with an absolute tolerance band around every face.
    pub fn contains(&self, x: &[f64], band: f64) -> bool {
        x.len() == self.lower.len()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= lo - band && *v <= hi + band)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// A named, parameterized vector field `f(t, x)` with exact Jacobian
/// `J(t, x)`. A period of `0` marks a time-invariant field.
pub trait VectorFieldModel: Send + Sync {
    fn id(&self) -> &str;

    fn dim(&self) -> usize;

    fn period(&self) -> f64 {
        0.0
    }

    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]);

    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix;

    /// Band form of the Jacobian for models whose Jacobian is tridiagonal.
    fn tridiagonal_jacobian(&self, _t: f64, _x: &[f64]) -> Option<TridiagonalSpec> {
        None
    }

    fn domain(&self) -> BoxDomain;

    /// `f` is linear in `x` (possibly time-varying).
    fn is_linear(&self) -> bool {
        false
    }

    /// Free-form remarks on how the model departs from its textbook form.
    fn notes(&self) -> Option<&str> {
        None
    }

    fn eval(&self, t: f64, x: &[f64]) -> Vec<f64> {
        let mut dx = vec![0.0; x.len()];
        self.rhs(t, x, &mut dx);
        dx
    }
}

impl<M: VectorFieldModel + ?Sized> VectorFieldModel for &M {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn period(&self) -> f64 {
        (**self).period()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (**self).jacobian(t, x)
    }
    fn tridiagonal_jacobian(&self, t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        (**self).tridiagonal_jacobian(t, x)
    }
    fn domain(&self) -> BoxDomain {
        (**self).domain()
    }
    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
    fn notes(&self) -> Option<&str> {
        (**self).notes()
    }
}

impl<M: VectorFieldModel + ?Sized> VectorFieldModel for Box<M> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn period(&self) -> f64 {
        (**self).period()
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        (**self).rhs(t, x, dx)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        (**self).jacobian(t, x)
    }
    fn tridiagonal_jacobian(&self, t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        (**self).tridiagonal_jacobian(t, x)
    }
    fn domain(&self) -> BoxDomain {
        (**self).domain()
    }
    fn is_linear(&self) -> bool {
        (**self).is_linear()
    }
    fn notes(&self) -> Option<&str> {
        (**self).notes()
    }
}

/// Treats a model as periodic with an imposed period, typically a
/// time-invariant model analysed over an artificial period.
pub struct WithPeriod<M> {
    inner: M,
    period: f64,
}

impl<M: VectorFieldModel> WithPeriod<M> {
    pub fn new(inner: M, period: f64) -> Self {
        WithPeriod { inner, period }
    }
}

impl<M: VectorFieldModel> VectorFieldModel for WithPeriod<M> {
    fn id(&self) -> &str {
        self.inner.id()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn period(&self) -> f64 {
        self.period
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        self.inner.rhs(t, x, dx)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        self.inner.jacobian(t, x)
    }
    fn tridiagonal_jacobian(&self, t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        self.inner.tridiagonal_jacobian(t, x)
    }
    fn domain(&self) -> BoxDomain {
        self.inner.domain()
    }
    fn is_linear(&self) -> bool {
        self.inner.is_linear()
    }
    fn notes(&self) -> Option<&str> {
        self.inner.notes()
    }
}

/// Largest relative discrepancy between the analytic Jacobian and central
/// finite differences of `f` at `(t, x)`.
pub fn jacobian_fd_error<M: VectorFieldModel + ?Sized>(model: &M, t: f64, x: &[f64]) -> f64 {
    let n = model.dim();
    let analytic = model.jacobian(t, x);
    let scale = analytic.max_abs().max(1.0);
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1.0);
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let fp = model.eval(t, &xp);
        let fm = model.eval(t, &xm);
        for i in 0..n {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            worst = worst.max((fd - analytic[(i, j)]).abs() / scale);
        }
    }
    worst
}

/// `J(t, x)` is tridiagonal with strictly positive off-diagonals (the Jacobi
/// sign pattern of a totally positive differential system).
pub fn jacobian_in_jacobi_pattern<M: VectorFieldModel + ?Sized>(
    model: &M,
    t: f64,
    x: &[f64],
) -> bool {
    let j = model.jacobian(t, x);
    let n = j.rows();
    for r in 0..n {
        for c in 0..n {
            let v = j[(r, c)];
            let ok = match r.abs_diff(c) {
                0 => true,
                1 => v > 0.0,
                _ => v == 0.0,
            };
            if !ok {
                return false;
            }
        }
    }
    true
}
