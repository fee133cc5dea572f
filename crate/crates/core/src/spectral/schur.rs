//! Eigenvalues of a general real matrix: Householder reduction to upper
//! Hessenberg form, then Francis double-shift QR down to real Schur form.
//! Any surviving 2x2 block with a complex pair is reported as an error.

use crate::error::{Result, TpdsError};
use crate::linalg::Matrix;

const MAX_ITER_PER_EIGENVALUE: usize = 40;

pub(crate) fn hessenberg(a: &Matrix) -> Matrix {
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<f64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let Some((v, beta)) = householder(&x) else {
            continue;
        };
        // left: rows k+1.., all columns
        for j in 0..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi * h[(k + 1 + i, j)])
                .sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= beta * vi * s;
            }
        }
        // right: columns k+1.., all rows
        for i in 0..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(j, vj)| vj * h[(i, k + 1 + j)])
                .sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= beta * vj * s;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = 0.0;
        }
    }
    h
}

/// Reflector `I - beta v v^T` mapping `x` onto a multiple of `e_1`.
fn householder(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let alpha = if x[0] >= 0.0 { norm } else { -norm };
    let mut v = x.to_vec();
    v[0] += alpha;
    let vtv: f64 = v.iter().map(|t| t * t).sum();
    if vtv == 0.0 {
        return None;
    }
    Some((v, 2.0 / vtv))
}

fn reflect_rows(
    h: &mut Matrix,
    v: &[f64],
    beta: f64,
    row0: usize,
    cols: std::ops::RangeInclusive<usize>,
) {
    for j in cols {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(i, vi)| vi * h[(row0 + i, j)])
            .sum();
        for (i, vi) in v.iter().enumerate() {
            h[(row0 + i, j)] -= beta * vi * s;
        }
    }
}

fn reflect_cols(
    h: &mut Matrix,
    v: &[f64],
    beta: f64,
    col0: usize,
    rows: std::ops::RangeInclusive<usize>,
) {
    for i in rows {
        let s: f64 = v
            .iter()
            .enumerate()
            .map(|(j, vj)| vj * h[(i, col0 + j)])
            .sum();
        for (j, vj) in v.iter().enumerate() {
            h[(i, col0 + j)] -= beta * vj * s;
        }
    }
}

/// Real eigenvalues of the 2x2 block `[[a, b], [c, d]]`.
fn block_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> Result<(f64, f64)> {
    let mid = 0.5 * (a + d);
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    if disc < 0.0 {
        return Err(TpdsError::SpectrumNotReal {
            re: mid,
            im: (-disc).sqrt(),
        });
    }
    let sq = disc.sqrt();
    let big = if mid >= 0.0 { mid + sq } else { mid - sq };
    let det = a * d - b * c;
    let small = if big != 0.0 { det / big } else { mid - sq };
    Ok((big, small))
}

fn francis_step(h: &mut Matrix, lo: usize, hi: usize, exceptional: bool) {
    let m = hi;
    let (s, t) = if exceptional {
        let w = h[(m, m - 1)].abs() + h[(m - 1, m - 2)].abs();
        (1.5 * w, w * w)
    } else {
        (
            h[(m - 1, m - 1)] + h[(m, m)],
            h[(m - 1, m - 1)] * h[(m, m)] - h[(m - 1, m)] * h[(m, m - 1)],
        )
    };
    let mut x = h[(lo, lo)] * h[(lo, lo)] + h[(lo, lo + 1)] * h[(lo + 1, lo)] - s * h[(lo, lo)] + t;
    let mut y = h[(lo + 1, lo)] * (h[(lo, lo)] + h[(lo + 1, lo + 1)] - s);
    let mut z = h[(lo + 1, lo)] * h[(lo + 2, lo + 1)];
    for k in lo..=m - 2 {
        if let Some((v, beta)) = householder(&[x, y, z]) {
            let q = if k > lo { k - 1 } else { lo };
            reflect_rows(h, &v, beta, k, q..=m);
            let r = (k + 3).min(m);
            reflect_cols(h, &v, beta, k, lo..=r);
        }
        x = h[(k + 1, k)];
        y = h[(k + 2, k)];
        if k + 3 <= m {
            z = h[(k + 3, k)];
        }
    }
    if let Some((v, beta)) = householder(&[x, y]) {
        reflect_rows(h, &v, beta, m - 1, (m - 2)..=m);
        reflect_cols(h, &v, beta, m - 1, lo..=m);
    }
}

/// All eigenvalues of `a`, in no particular order. Fails if the real Schur
/// form contains a complex-conjugate pair.
pub(crate) fn real_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.rows();
    let mut h = hessenberg(a);
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let mut values = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut iter = 0;
    while hi >= 0 {
        let hu = hi as usize;
        let mut l = hu;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() < eps * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        if l == hu {
            values.push(h[(hu, hu)]);
            hi -= 1;
            iter = 0;
        } else if l + 1 == hu {
            let (x, y) = block_eigenvalues(h[(l, l)], h[(l, hu)], h[(hu, l)], h[(hu, hu)])?;
            values.push(x);
            values.push(y);
            hi -= 2;
            iter = 0;
        } else {
            iter += 1;
            if iter > MAX_ITER_PER_EIGENVALUE {
                return Err(TpdsError::NoConvergence {
                    iterations: iter,
                    residual: h[(hu, hu - 1)].abs(),
                    best: values,
                });
            }
            francis_step(&mut h, l, hu, iter % 10 == 0);
        }
    }
    Ok(values)
}
