//! The 2π-periodic linear system `ẋ = A(t) x` with
//! `A(t) = [[-2, 2 + sin t], [2 + sin t, -2]]`.

use std::f64::consts::PI;

use super::{BoxDomain, VectorFieldModel};
use crate::linalg::{Matrix, TridiagonalSpec};

#[derive(Debug, Clone, Copy, Default)]
pub struct Schwarz;

pub fn schwarz_model() -> Schwarz {
    Schwarz
}

/// Closed-form transition matrix
/// `Φ(t) = e^{-2t} [[cosh c, sinh c], [sinh c, cosh c]]`, `c = 2t - cos t + 1`.
pub fn schwarz_transition(t: f64) -> Matrix {
    let c = 2.0 * t - t.cos() + 1.0;
    let s = (-2.0 * t).exp();
    let (ch, sh) = (s * c.cosh(), s * c.sinh());
    Matrix::from_row_major(2, 2, vec![ch, sh, sh, ch]).expect("2x2")
}

impl VectorFieldModel for Schwarz {
    fn id(&self) -> &str {
        "schwarz"
    }
    fn dim(&self) -> usize {
        2
    }
    fn period(&self) -> f64 {
        2.0 * PI
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        let off = 2.0 + t.sin();
        dx[0] = -2.0 * x[0] + off * x[1];
        dx[1] = off * x[0] - 2.0 * x[1];
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        self.tridiagonal_jacobian(t, x)
            .expect("2x2 is tridiagonal")
            .to_dense()
    }
    fn tridiagonal_jacobian(&self, t: f64, _x: &[f64]) -> Option<TridiagonalSpec> {
        let off = 2.0 + t.sin();
        Some(TridiagonalSpec {
            a: vec![-2.0, -2.0],
            b: vec![off],
            c: vec![off],
        })
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::unbounded(2)
    }
    fn is_linear(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_at_zero_is_identity() {
        assert_eq!(schwarz_transition(0.0), Matrix::identity(2));
    }

    #[test]
    fn oracle_solves_the_ode() {
        // Φ'(t) ≈ A(t) Φ(t) by central differences
        for &t in &[0.3, 1.0, 2.5, 5.9] {
            let h = 1e-5;
            let d = schwarz_transition(t + h)
                .add(&schwarz_transition(t - h).scaled(-1.0))
                .scaled(0.5 / h);
            let rhs = Schwarz.jacobian(t, &[0.0, 0.0]).mul(&schwarz_transition(t));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((d[(i, j)] - rhs[(i, j)]).abs() < 1e-6 * rhs.max_abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn monodromy_has_unit_multiplier() {
        let b = schwarz_transition(2.0 * PI);
        let v = b.mul_vec(&[1.0, 1.0]);
        assert!((v[0] - 1.0).abs() < 1e-12 && (v[1] - 1.0).abs() < 1e-12);
        let w = b.mul_vec(&[-1.0, 1.0]);
        let l2 = (-8.0 * PI).exp();
        assert!((w[1] / l2 - 1.0).abs() < 1e-3);
    }
}
