//! Two-neuron network with tanh activation.

use super::{BoxDomain, VectorFieldModel};
use crate::linalg::{Matrix, TridiagonalSpec};

/// Half-width of the box used as the integration domain.
const NEURAL_BOX: f64 = 1e3;

/// `ẋ_1 = -2x_1 + tanh x_1 + 2 tanh x_2`, `ẋ_2 = -x_2 + tanh(x_1)/2 + tanh x_2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neural;

pub fn neural_model() -> Neural {
    Neural
}

fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

impl VectorFieldModel for Neural {
    fn id(&self) -> &str {
        "neural"
    }
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        let (t1, t2) = (x[0].tanh(), x[1].tanh());
        dx[0] = -2.0 * x[0] + t1 + 2.0 * t2;
        dx[1] = -x[1] + 0.5 * t1 + t2;
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        self.tridiagonal_jacobian(t, x)
            .expect("2x2 is tridiagonal")
            .to_dense()
    }
    fn tridiagonal_jacobian(&self, _t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        let (s1, s2) = (sech2(x[0]), sech2(x[1]));
        Some(TridiagonalSpec {
            a: vec![-2.0 + s1, -1.0 + s2],
            b: vec![2.0 * s2],
            c: vec![0.5 * s1],
        })
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::cube(2, -NEURAL_BOX, NEURAL_BOX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eig_jacobi;

    #[test]
    fn origin_is_equilibrium_with_golden_spectrum() {
        assert_eq!(Neural.eval(0.0, &[0.0, 0.0]), vec![0.0, 0.0]);
        let t = Neural.tridiagonal_jacobian(0.0, &[0.0, 0.0]).unwrap();
        let d = eig_jacobi(&t).unwrap();
        let s5 = 5f64.sqrt();
        assert!((d.eigenvalues[0] - (s5 - 1.0) / 2.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] + (s5 + 1.0) / 2.0).abs() < 1e-12);
        // v1 ∝ (√5 - 1, 1)
        let v = &d.eigenvectors[0];
        assert!((v[0] / v[1] - (s5 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn field_is_odd() {
        let x = [0.3, -1.7];
        let fx = Neural.eval(0.0, &x);
        let fm = Neural.eval(0.0, &[-x[0], -x[1]]);
        assert_eq!(fx, vec![-fm[0], -fm[1]]);
    }
}
