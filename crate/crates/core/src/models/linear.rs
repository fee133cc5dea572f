//! Linear systems: constant matrices, periodic band callbacks, and the zero
//! field.

use std::sync::Arc;

use super::{BoxDomain, VectorFieldModel};
use crate::error::{Result, TpdsError};
use crate::linalg::{Matrix, TridiagonalSpec};

/// `ẋ = A x` for a constant square matrix `A`.
#[derive(Debug, Clone)]
pub struct LinearConstant {
    a: Matrix,
    bands: Option<TridiagonalSpec>,
}

fn bands_of(a: &Matrix) -> Option<TridiagonalSpec> {
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 && a[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    Some(TridiagonalSpec {
        a: (0..n).map(|i| a[(i, i)]).collect(),
        b: (0..n.saturating_sub(1)).map(|i| a[(i, i + 1)]).collect(),
        c: (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect(),
    })
}

impl LinearConstant {
    pub fn new(a: Matrix) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(TpdsError::Dimension(
                "linear model needs a non-empty square matrix".into(),
            ));
        }
        if a.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(TpdsError::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        let bands = bands_of(&a);
        Ok(LinearConstant { a, bands })
    }

    pub fn from_tridiagonal(t: &TridiagonalSpec) -> Result<Self> {
        t.validate()?;
        Self::new(t.to_dense())
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }
}

impl VectorFieldModel for LinearConstant {
    fn id(&self) -> &str {
        "linear"
    }
    fn dim(&self) -> usize {
        self.a.rows()
    }
    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        match &self.bands {
            Some(t) => dx.copy_from_slice(&t.mul_vec(x)),
            None => dx.copy_from_slice(&self.a.mul_vec(x)),
        }
    }
    fn jacobian(&self, _t: f64, _x: &[f64]) -> Matrix {
        self.a.clone()
    }
    fn tridiagonal_jacobian(&self, _t: f64, _x: &[f64]) -> Option<TridiagonalSpec> {
        self.bands.clone()
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::unbounded(self.dim())
    }
    fn is_linear(&self) -> bool {
        true
    }
}

type BandFn = dyn Fn(f64) -> TridiagonalSpec + Send + Sync;

/// `ẋ = A(t) x` with `A(t)` given as a `T`-periodic band callback.
#[derive(Clone)]
pub struct PeriodicTridiagonalLinear {
    n: usize,
    period: f64,
    bands: Arc<BandFn>,
}

impl PeriodicTridiagonalLinear {
    pub fn new<F>(n: usize, period: f64, bands: F) -> Result<Self>
    where
        F: Fn(f64) -> TridiagonalSpec + Send + Sync + 'static,
    {
        if n == 0 {
            return Err(TpdsError::Dimension("n must be positive".into()));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(TpdsError::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        let probe = bands(0.0);
        probe.validate()?;
        if probe.n() != n {
            return Err(TpdsError::Dimension(format!(
                "callback returns n = {}, expected {n}",
                probe.n()
            )));
        }
        Ok(PeriodicTridiagonalLinear {
            n,
            period,
            bands: Arc::new(bands),
        })
    }
}

impl std::fmt::Debug for PeriodicTridiagonalLinear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicTridiagonalLinear")
            .field("n", &self.n)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl VectorFieldModel for PeriodicTridiagonalLinear {
    fn id(&self) -> &str {
        "linear_periodic"
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn period(&self) -> f64 {
        self.period
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        dx.copy_from_slice(&(self.bands)(t).mul_vec(x));
    }
    fn jacobian(&self, t: f64, _x: &[f64]) -> Matrix {
        (self.bands)(t).to_dense()
    }
    fn tridiagonal_jacobian(&self, t: f64, _x: &[f64]) -> Option<TridiagonalSpec> {
        Some((self.bands)(t))
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::unbounded(self.n)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

/// `ẋ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField {
    pub n: usize,
}

impl VectorFieldModel for ZeroField {
    fn id(&self) -> &str {
        "zero"
    }
    fn dim(&self) -> usize {
        self.n
    }
    fn rhs(&self, _t: f64, _x: &[f64], dx: &mut [f64]) {
        dx.fill(0.0);
    }
    fn jacobian(&self, _t: f64, _x: &[f64]) -> Matrix {
        Matrix::zeros(self.n, self.n)
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::unbounded(self.n)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_detects_bands() {
        let m = LinearConstant::new(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap())
            .unwrap();
        assert!(m.tridiagonal_jacobian(0.0, &[0.0; 2]).is_some());
        assert_eq!(m.eval(0.0, &[1.0, 1.0]), vec![3.0, 7.0]);
        let full = Matrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        let m = LinearConstant::new(full).unwrap();
        assert!(m.tridiagonal_jacobian(0.0, &[0.0; 3]).is_none());
        assert_eq!(m.eval(0.0, &[1.0, 2.0, 3.0]), vec![4.0, 2.0, 3.0]);
    }

    #[test]
    fn periodic_callback_validation() {
        let ok = PeriodicTridiagonalLinear::new(2, 1.0, |t| {
            TridiagonalSpec::toeplitz(2, -1.0, 1.0 + t.sin(), 1.0)
        });
        assert!(ok.is_ok());
        let wrong_n = PeriodicTridiagonalLinear::new(3, 1.0, |_| {
            TridiagonalSpec::toeplitz(2, -1.0, 1.0, 1.0)
        });
        assert!(wrong_n.is_err());
        assert!(
            PeriodicTridiagonalLinear::new(2, 0.0, |_| TridiagonalSpec::toeplitz(
                2, -1.0, 1.0, 1.0
            ))
            .is_err()
        );
    }

    #[test]
    fn zero_field_is_zero() {
        let z = ZeroField { n: 3 };
        assert_eq!(z.eval(1.0, &[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }
}
