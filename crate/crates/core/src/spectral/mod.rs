//! Eigen-decompositions for the matrix classes that carry a real, simple
//! spectrum: Jacobi matrices (through diagonal symmetrization and implicit
//! QL) and general oscillatory or totally positive matrices (through
//! Hessenberg + Francis QR and inverse iteration). Also checks the
//! eigenvector sign structure of such spectra.

mod schur;
mod tridiag;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, TpdsError};
use crate::linalg::{norm_inf, Matrix, TridiagonalSpec};
use crate::signvar::{self, SignCount};

pub(crate) use schur::real_eigenvalues;

/// Simplicity and residual tolerances.
#[derive(Debug, Clone, Copy)]
pub struct SpectralTolerances {
    /// Eigenvalues must be separated by more than `gap_rel * ||A||_inf`.
    pub gap_rel: f64,
    /// Residuals must satisfy `||Av - αv||_inf <= resid_rel * ||A||_inf`.
    pub resid_rel: f64,
}

impl Default for SpectralTolerances {
    fn default() -> Self {
        SpectralTolerances {
            gap_rel: 1e-10,
            resid_rel: 1e-9,
        }
    }
}

/// Eigenvalues sorted strictly decreasing, with eigenvectors of unit
/// infinity norm whose first non-negligible entry is positive.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Matrix whose columns are the eigenvectors.
    pub fn eigenvector_matrix(&self) -> Matrix {
        let n = self.n();
        let mut m = Matrix::zeros(n, n);
        for (j, v) in self.eigenvectors.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = v[i];
            }
        }
        m
    }
}

/// Scales `v` to unit infinity norm with its first entry above the relative
/// zero threshold positive.
pub(crate) fn normalize_eigenvector(v: &mut [f64]) {
    let m = norm_inf(v);
    if m == 0.0 {
        return;
    }
    let lead = v
        .iter()
        .find(|x| x.abs() > signvar::DEFAULT_EPS_SIGN * m)
        .copied()
        .unwrap_or(1.0);
    let s = lead.signum() / m;
    for x in v.iter_mut() {
        *x *= s;
    }
}

fn check_gaps(values: &[f64], norm: f64, tol: &SpectralTolerances) -> Result<()> {
    let tol_gap = tol.gap_rel * norm;
    for (i, w) in values.windows(2).enumerate() {
        let gap = w[0] - w[1];
        if !(gap > tol_gap) {
            return Err(TpdsError::NotSimple {
                index: i + 1,
                gap,
                tol: tol_gap,
            });
        }
    }
    Ok(())
}

fn assemble(
    values: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    apply: impl Fn(&[f64]) -> Vec<f64>,
    norm: f64,
    tol: &SpectralTolerances,
) -> Result<SpectralDecomposition> {
    let bound = tol.resid_rel * norm.max(f64::MIN_POSITIVE);
    let mut residuals = Vec::with_capacity(values.len());
    for (i, (alpha, v)) in values.iter().zip(vectors.iter_mut()).enumerate() {
        normalize_eigenvector(v);
        let av = apply(v);
        let r = av
            .iter()
            .zip(v.iter())
            .map(|(x, y)| (x - alpha * y).abs())
            .fold(0.0, f64::max);
        if !(r <= bound) {
            return Err(TpdsError::ResidualTooLarge {
                index: i + 1,
                residual: r,
                tol: bound,
            });
        }
        residuals.push(r);
    }
    Ok(SpectralDecomposition {
        eigenvalues: values,
        eigenvectors: vectors,
        residuals,
    })
}

fn check_jacobi(t: &TridiagonalSpec) -> Result<()> {
    t.validate()?;
    if let Some(i) = (0..t.n() - 1).find(|&i| !(t.b[i] * t.c[i] > 0.0)) {
        return Err(TpdsError::Precondition(format!(
            "symmetrization needs b_i c_i > 0; band {} has b = {}, c = {}",
            i + 1,
            t.b[i],
            t.c[i]
        )));
    }
    Ok(())
}

/// Eigenvalues of a Jacobi matrix in decreasing order, without
/// eigenvectors and without certifying that every gap is resolved.
pub fn eigenvalues_jacobi(t: &TridiagonalSpec) -> Result<Vec<f64>> {
    check_jacobi(t)?;
    let off: Vec<f64> = t.b.iter().zip(&t.c).map(|(b, c)| (b * c).sqrt()).collect();
    let (mut w, _) = tridiag::symmetric_tridiagonal_eigen(&t.a, &off, false)?;
    w.reverse();
    Ok(w)
}

pub fn eig_jacobi(t: &TridiagonalSpec) -> Result<SpectralDecomposition> {
    eig_jacobi_with(t, &SpectralTolerances::default())
}

/// Eigen-decomposition of a Jacobi matrix `T(a, b, c)` with `b_i c_i > 0`.
///
/// `D^{-1} T D` is symmetric tridiagonal with off-diagonals `sqrt(b_i c_i)`
/// for `d_{i+1} / d_i = sqrt(c_i / b_i)`; eigenvectors of `T` are `D u`.
/// The scaling is accumulated in log space to avoid overflow.
pub fn eig_jacobi_with(
    t: &TridiagonalSpec,
    tol: &SpectralTolerances,
) -> Result<SpectralDecomposition> {
    check_jacobi(t)?;
    let n = t.n();
    let off: Vec<f64> = t.b.iter().zip(&t.c).map(|(b, c)| (b * c).sqrt()).collect();
    let (w, u) = tridiag::symmetric_tridiagonal_eigen(&t.a, &off, true)?;
    let u = u.expect("vectors requested");

    let mut log_d = vec![0.0; n];
    for i in 0..n - 1 {
        log_d[i + 1] = log_d[i] + 0.5 * (t.c[i].ln() - t.b[i].ln());
    }
    let top = log_d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d: Vec<f64> = log_d.iter().map(|l| (l - top).exp()).collect();

    let values: Vec<f64> = w.iter().rev().copied().collect();
    let vectors: Vec<Vec<f64>> = (0..n)
        .rev()
        .map(|col| (0..n).map(|i| d[i] * u[(i, col)]).collect())
        .collect();
    let norm = t.norm_inf();
    check_gaps(&values, norm, tol)?;
    assemble(values, vectors, |v| t.mul_vec(v), norm, tol)
}

pub fn eig_real_spectrum(a: &Matrix) -> Result<SpectralDecomposition> {
    eig_real_spectrum_with(a, &SpectralTolerances::default())
}

const INVERSE_ITERATIONS: usize = 3;

/// Eigen-decomposition of a general square matrix expected to have a real,
/// simple spectrum (oscillatory and TP matrices, monodromy matrices).
pub fn eig_real_spectrum_with(
    a: &Matrix,
    tol: &SpectralTolerances,
) -> Result<SpectralDecomposition> {
    if !a.is_square() || a.rows() == 0 {
        return Err(TpdsError::Dimension(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(TpdsError::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let n = a.rows();
    let norm = a.norm_inf();
    let mut values = real_eigenvalues(a)?;
    values.sort_by(|x, y| y.total_cmp(x));
    check_gaps(&values, norm, tol)?;

    let start: Vec<f64> = (0..n)
        .map(|j| 1.0 + (j as f64 * 0.618_033_988_75).fract())
        .collect();
    let mut vectors = Vec::with_capacity(n);
    for &alpha in &values {
        let lu = match a.shifted(-alpha).lu() {
            Ok(lu) => lu,
            Err(TpdsError::Singular) => {
                let nudge = alpha.abs() * 1e-14 + norm * 1e-14;
                a.shifted(-(alpha + nudge)).lu()?
            }
            Err(e) => return Err(e),
        };
        let mut x = start.clone();
        for _ in 0..INVERSE_ITERATIONS {
            x = lu.solve(&x);
            let m = norm_inf(&x);
            if !(m.is_finite() && m > 0.0) {
                return Err(TpdsError::NoConvergence {
                    iterations: INVERSE_ITERATIONS,
                    residual: f64::NAN,
                    best: vec![alpha],
                });
            }
            x.iter_mut().for_each(|v| *v /= m);
        }
        vectors.push(x);
    }
    assemble(values, vectors, |v| a.mul_vec(v), norm, tol)
}

/// Per-eigenvector sign counts against the oscillatory pattern
/// `s⁻(v^i) = s⁺(v^i) = i - 1`.
#[derive(Debug, Clone, Serialize)]
pub struct SignPatternReport {
    /// `(s_minus, s_plus)` for each eigenvector in eigenvalue order.
    pub counts: Vec<(usize, usize)>,
    /// First and last eigenvectors contain no zero-classified entries.
    pub extremes_zero_free: bool,
    pub pass: bool,
}

pub fn verify_sign_pattern(
    dec: &SpectralDecomposition,
    eps_sign: f64,
) -> Result<SignPatternReport> {
    let counts: Vec<SignCount> = dec
        .eigenvectors
        .iter()
        .map(|v| signvar::sign_count(v, eps_sign))
        .collect::<Result<_>>()?;
    let pattern_ok = counts
        .iter()
        .enumerate()
        .all(|(i, c)| c.s_minus == i && c.s_plus == i);
    let extremes_zero_free = match (counts.first(), counts.last()) {
        (Some(f), Some(l)) => f.effective_zeros.is_empty() && l.effective_zeros.is_empty(),
        _ => true,
    };
    Ok(SignPatternReport {
        counts: counts.iter().map(|c| (c.s_minus, c.s_plus)).collect(),
        extremes_zero_free,
        pass: pattern_ok && extremes_zero_free,
    })
}

/// Sign counts of `z = Σ coeffs[k] v^{i+k}` and whether they satisfy
/// `i - 1 <= s⁻(z) <= s⁺(z) <= j - 1`. `i` and `j` are 1-based eigenvalue
/// indices and `coeffs` has length `j - i + 1`.
pub fn span_member_counts(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
    coeffs: &[f64],
    eps_sign: f64,
) -> Result<(SignCount, bool)> {
    let n = dec.n();
    if !(1 <= i && i <= j && j <= n) {
        return Err(TpdsError::InvalidArgument(format!(
            "need 1 <= i <= j <= {n}, got i = {i}, j = {j}"
        )));
    }
    if coeffs.len() != j - i + 1 {
        return Err(TpdsError::Dimension(format!(
            "expected {} coefficients, got {}",
            j - i + 1,
            coeffs.len()
        )));
    }
    let mut z = vec![0.0; n];
    for (c, v) in coeffs.iter().zip(&dec.eigenvectors[i - 1..j]) {
        for (zk, vk) in z.iter_mut().zip(v) {
            *zk += c * vk;
        }
    }
    if z.iter().all(|&v| v == 0.0) {
        return Err(TpdsError::Precondition(
            "span member is the zero vector".into(),
        ));
    }
    let count = signvar::sign_count(&z, eps_sign)?;
    let ok = i - 1 <= count.s_minus && count.s_minus <= count.s_plus && count.s_plus <= j - 1;
    Ok((count, ok))
}

/// Draws `trials` random combinations of `v^i..v^j` (uniform coefficients in
/// `[-1, 1]`, seeded) and checks the span sign bounds on each.
pub fn verify_span_bounds(
    dec: &SpectralDecomposition,
    i: usize,
    j: usize,
    trials: usize,
    eps_sign: f64,
    seed: u64,
) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let coeffs: Vec<f64> = (i..=j).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        match span_member_counts(dec, i, j, &coeffs, eps_sign) {
            Ok((_, true)) => {}
            Ok((_, false)) => return Ok(false),
            Err(TpdsError::Precondition(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signvar::DEFAULT_EPS_SIGN;
    use std::f64::consts::PI;

    fn example1() -> Matrix {
        Matrix::from_rows(&[
            vec![3.0, 2.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.1, 1.0, 4.0],
        ])
        .unwrap()
    }

    fn assert_parallel(v: &[f64], w: &[f64], tol: f64) {
        let nv = crate::linalg::dot(v, v).sqrt();
        let nw = crate::linalg::dot(w, w).sqrt();
        let cos = crate::linalg::dot(v, w) / (nv * nw);
        assert!(
            (cos.abs() - 1.0).abs() < tol,
            "{v:?} not parallel to {w:?} (cos {cos})"
        );
    }

    #[test]
    fn example1_spectrum() {
        let dec = eig_real_spectrum(&example1()).unwrap();
        for (x, y) in dec.eigenvalues.iter().zip([5.03851, 3.55435, 1.40714]) {
            assert!((x - y).abs() < 1e-4);
        }
        assert_parallel(&dec.eigenvectors[0], &[0.55898, 0.569742, 0.602442], 1e-9);
        assert_parallel(&dec.eigenvectors[1], &[0.746782, 0.206989, -0.632038], 1e-9);
        assert_parallel(&dec.eigenvectors[2], &[0.765516, -0.609679, 0.205614], 1e-9);
        let rep = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.counts, vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn identity_is_not_simple() {
        assert!(matches!(
            eig_real_spectrum(&Matrix::identity(3)),
            Err(TpdsError::NotSimple { .. })
        ));
    }

    #[test]
    fn jacobi_two_by_two() {
        let t = TridiagonalSpec::new(vec![3.0, 3.0], vec![1.0], vec![1.0]).unwrap();
        let dec = eig_jacobi(&t).unwrap();
        assert!((dec.eigenvalues[0] - 4.0).abs() < 1e-14);
        assert!((dec.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert_eq!(dec.eigenvectors[0], vec![1.0, 1.0]);
    }

    #[test]
    fn jacobi_requires_positive_products() {
        let t = TridiagonalSpec::new(vec![3.0, 3.0], vec![1.0], vec![-1.0]).unwrap();
        assert!(matches!(eig_jacobi(&t), Err(TpdsError::Precondition(_))));
        let t = TridiagonalSpec::new(vec![3.0, 3.0], vec![0.0], vec![1.0]).unwrap();
        assert!(eig_jacobi(&t).is_err());
    }

    #[test]
    fn jacobi_nonsymmetric_eigenvectors_map_back() {
        let t = TridiagonalSpec::new(
            vec![-1.0, 0.5, 2.0, -3.0],
            vec![0.1, 4.0, 0.7],
            vec![2.0, 0.3, 5.0],
        )
        .unwrap();
        let dec = eig_jacobi(&t).unwrap();
        let dense = t.to_dense();
        for (alpha, v) in dec.eigenvalues.iter().zip(&dec.eigenvectors) {
            let av = dense.mul_vec(v);
            for (x, y) in av.iter().zip(v) {
                assert!((x - alpha * y).abs() < 1e-12);
            }
        }
        // cross-solver agreement
        let gen = eig_real_spectrum(&dense).unwrap();
        for (x, y) in dec.eigenvalues.iter().zip(&gen.eigenvalues) {
            assert!((x - y).abs() < 1e-9 * t.norm_inf());
        }
        assert!(verify_sign_pattern(&dec, DEFAULT_EPS_SIGN).unwrap().pass);
    }

    #[test]
    fn toeplitz_signs_n5() {
        let n = 5;
        let dec = eig_jacobi(&TridiagonalSpec::toeplitz(n, -1.0, 0.5, 0.5)).unwrap();
        // oracle: signs of sin(j k π / 6)
        let sign = |x: f64| if x.abs() < 1e-9 { 0.0 } else { x.signum() };
        for k in 1..=n {
            let signs: Vec<f64> = (1..=n)
                .map(|j| sign((j as f64 * k as f64 * PI / 6.0).sin()))
                .collect();
            let got: Vec<f64> = dec.eigenvectors[k - 1].iter().map(|&v| sign(v)).collect();
            assert_eq!(got, signs, "k = {k}");
        }
        let rep = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN).unwrap();
        assert!(rep.pass);
        let (c, ok) = span_member_counts(&dec, 3, 3, &[1.0], DEFAULT_EPS_SIGN).unwrap();
        assert!(ok);
        assert_eq!((c.s_minus, c.s_plus), (2, 2));
    }

    #[test]
    fn span_bounds_on_example1() {
        let dec = eig_real_spectrum(&example1()).unwrap();
        assert!(verify_span_bounds(&dec, 1, 3, 200, DEFAULT_EPS_SIGN, 7).unwrap());
        assert!(verify_span_bounds(&dec, 2, 3, 200, DEFAULT_EPS_SIGN, 8).unwrap());
        assert!(verify_span_bounds(&dec, 1, 2, 200, DEFAULT_EPS_SIGN, 9).unwrap());
        let (c, ok) = span_member_counts(&dec, 2, 3, &[1.0, 1.0], DEFAULT_EPS_SIGN).unwrap();
        assert!(ok && c.s_minus >= 1);
        assert!(span_member_counts(&dec, 0, 3, &[1.0; 4], DEFAULT_EPS_SIGN).is_err());
        assert!(span_member_counts(&dec, 3, 2, &[], DEFAULT_EPS_SIGN).is_err());
    }

    #[test]
    fn symmetrization_preserves_eigenvalues() {
        let t = TridiagonalSpec::new(vec![1.0, -2.0, 0.3], vec![3.0, 0.2], vec![0.5, 1.7]).unwrap();
        let s = TridiagonalSpec {
            a: t.a.clone(),
            b: t.b.iter().zip(&t.c).map(|(b, c)| (b * c).sqrt()).collect(),
            c: t.b.iter().zip(&t.c).map(|(b, c)| (b * c).sqrt()).collect(),
        };
        let w1 = eig_real_spectrum(&t.to_dense()).unwrap().eigenvalues;
        let w2 = eig_real_spectrum(&s.to_dense()).unwrap().eigenvalues;
        for (x, y) in w1.iter().zip(&w2) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
