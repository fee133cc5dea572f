//! Implicit QL with Wilkinson-type shifts for symmetric tridiagonal matrices
//! (the EISPACK `tql2` scheme).

use crate::error::{Result, TpdsError};
use crate::linalg::Matrix;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues (ascending) and, if requested, orthonormal eigenvectors as
/// the columns of the returned matrix.
pub(crate) fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
    want_vectors: bool,
) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = diag.len();
    debug_assert_eq!(off.len() + 1, n);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut v = want_vectors.then(|| Matrix::identity(n));

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(TpdsError::NoConvergence {
                        iterations: sweeps,
                        residual: e[l].abs(),
                        best: d.clone(),
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_mut() {
                        for k in 0..n {
                            let h = v[(k, i + 1)];
                            v[(k, i + 1)] = s * v[(k, i)] + c * h;
                            v[(k, i)] = c * v[(k, i)] - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = v.map(|v| {
        let mut out = Matrix::zeros(n, n);
        for (col, &src) in order.iter().enumerate() {
            for k in 0..n {
                out[(k, col)] = v[(k, src)];
            }
        }
        out
    });
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn two_by_two() {
        let (w, v) = symmetric_tridiagonal_eigen(&[3.0, 3.0], &[1.0], true).unwrap();
        assert!((w[0] - 2.0).abs() < 1e-14 && (w[1] - 4.0).abs() < 1e-14);
        let v = v.unwrap();
        // (1, 1)/sqrt 2 for 4
        assert!((v[(0, 1)].abs() - v[(1, 1)].abs()).abs() < 1e-14);
    }

    #[test]
    fn toeplitz_closed_form() {
        for n in [1, 2, 5, 17, 64] {
            let (w, v) =
                symmetric_tridiagonal_eigen(&vec![-1.0; n], &vec![0.5; n - 1], true).unwrap();
            let v = v.unwrap();
            for k in 1..=n {
                let exact = -1.0 + (k as f64 * PI / (n as f64 + 1.0)).cos();
                // ascending order: k-th largest sits at index n - k
                assert!((w[n - k] - exact).abs() < 1e-13, "n={n} k={k}");
            }
            // orthonormal columns
            let vtv = v.transpose().mul(&v);
            for i in 0..n {
                for j in 0..n {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((vtv[(i, j)] - target).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn values_without_vectors_agree() {
        let d = [1.0, -2.0, 0.5, 4.0, 3.0];
        let o = [0.3, 1.2, -0.7, 0.9];
        let (w1, _) = symmetric_tridiagonal_eigen(&d, &o, true).unwrap();
        let (w2, v) = symmetric_tridiagonal_eigen(&d, &o, false).unwrap();
        assert!(v.is_none());
        for (a, b) in w1.iter().zip(&w2) {
            assert!((a - b).abs() < 1e-14);
        }
        let trace: f64 = d.iter().sum();
        assert!((w1.iter().sum::<f64>() - trace).abs() < 1e-12);
    }
}
