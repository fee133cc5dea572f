//! Sign-variation counts of real vectors.
//!
//! `s⁻(z)` counts sign changes after deleting zero entries; `s⁺(z)` is the
//! largest count obtainable by replacing every zero entry with `+1` or `-1`.
//! Entries with `|z_i| <= eps_sign * max_j |z_j|` are treated as zero, so the
//! counts are deterministic on floating-point data.

use serde::Serialize;

use crate::error::{Result, TpdsError};
use crate::linalg::Matrix;

/// Default relative zero tolerance for sign classification.
pub const DEFAULT_EPS_SIGN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignCount {
    pub s_minus: usize,
    pub s_plus: usize,
    /// Indices classified as zero under the active tolerance.
    pub effective_zeros: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Neg,
    Zero,
    Pos,
}

fn classify(z: &[f64], eps_sign: f64) -> Result<Vec<Sign>> {
    if z.is_empty() {
        return Err(TpdsError::Dimension("sign count of an empty vector".into()));
    }
    if !(eps_sign >= 0.0) {
        return Err(TpdsError::InvalidArgument(format!(
            "eps_sign must be non-negative, got {eps_sign}"
        )));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(TpdsError::InvalidArgument(
            "vector has non-finite entries".into(),
        ));
    }
    let threshold = eps_sign * crate::linalg::norm_inf(z);
    Ok(z.iter()
        .map(|&v| {
            if v.abs() <= threshold {
                Sign::Zero
            } else if v > 0.0 {
                Sign::Pos
            } else {
                Sign::Neg
            }
        })
        .collect())
}

fn count_minus(signs: &[Sign]) -> usize {
    let mut changes = 0;
    let mut last = None;
    for &s in signs.iter().filter(|&&s| s != Sign::Zero) {
        if last.is_some_and(|l| l != s) {
            changes += 1;
        }
        last = Some(s);
    }
    changes
}

fn count_plus(signs: &[Sign]) -> usize {
    // best[k]: max changes over prefixes ending in sign k (0 = neg, 1 = pos)
    let allowed = |s: Sign| match s {
        Sign::Neg => [true, false],
        Sign::Pos => [false, true],
        Sign::Zero => [true, true],
    };
    let mut best: [Option<usize>; 2] = {
        let a = allowed(signs[0]);
        [a[0].then_some(0), a[1].then_some(0)]
    };
    for &s in &signs[1..] {
        let a = allowed(s);
        let mut next = [None, None];
        for k in 0..2 {
            if !a[k] {
                continue;
            }
            let stay = best[k];
            let flip = best[1 - k].map(|v| v + 1);
            next[k] = stay.max(flip);
        }
        best = next;
    }
    best[0].max(best[1]).unwrap_or(0)
}

/// Both counts and the effective zero set in one pass.
pub fn sign_count(z: &[f64], eps_sign: f64) -> Result<SignCount> {
    let signs = classify(z, eps_sign)?;
    Ok(SignCount {
        s_minus: count_minus(&signs),
        s_plus: count_plus(&signs),
        effective_zeros: signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == Sign::Zero)
            .map(|(i, _)| i)
            .collect(),
    })
}

pub fn s_minus(z: &[f64], eps_sign: f64) -> Result<usize> {
    Ok(count_minus(&classify(z, eps_sign)?))
}

pub fn s_plus(z: &[f64], eps_sign: f64) -> Result<usize> {
    Ok(count_plus(&classify(z, eps_sign)?))
}

/// Outcome of checking `s⁺(Ax) <= s⁻(x)`.
#[derive(Debug, Clone, Serialize)]
pub struct SvdCheck {
    pub holds: bool,
    pub input: SignCount,
    pub image: SignCount,
}

/// Checks the sign-variation diminishing inequality `s⁺(Ax) <= s⁻(x)`.
///
/// The inequality is guaranteed only for totally positive `A`; the caller is
/// responsible for that.
pub fn check_svd_property(a: &Matrix, x: &[f64], eps_sign: f64) -> Result<SvdCheck> {
    if !a.is_square() || a.cols() != x.len() {
        return Err(TpdsError::Dimension(format!(
            "matrix {}x{} incompatible with vector of length {}",
            a.rows(),
            a.cols(),
            x.len()
        )));
    }
    if x.iter().all(|&v| v == 0.0) {
        return Err(TpdsError::Precondition("x must be non-zero".into()));
    }
    let input = sign_count(x, eps_sign)?;
    let image = sign_count(&a.mul_vec(x), eps_sign)?;
    Ok(SvdCheck {
        holds: image.s_plus <= input.s_minus,
        input,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force s⁺: enumerate every ±1 replacement of the zero entries.
    fn s_plus_brute(z: &[f64]) -> usize {
        let zeros: Vec<usize> = (0..z.len()).filter(|&i| z[i] == 0.0).collect();
        let mut best = 0;
        for mask in 0..(1u32 << zeros.len()) {
            let mut w = z.to_vec();
            for (bit, &i) in zeros.iter().enumerate() {
                w[i] = if mask & (1 << bit) != 0 { 1.0 } else { -1.0 };
            }
            let changes = w.windows(2).filter(|p| p[0] * p[1] < 0.0).count();
            best = best.max(changes);
        }
        best
    }

    #[test]
    fn worked_vector() {
        let z = [1.0, -2.0, 0.0, 0.0, 3.0];
        assert_eq!(s_minus(&z, 0.0).unwrap(), 2);
        assert_eq!(s_plus(&z, 0.0).unwrap(), 4);
        assert_eq!(sign_count(&z, 0.0).unwrap().effective_zeros, vec![2, 3]);
    }

    #[test]
    fn zero_vector_conventions() {
        assert_eq!(s_minus(&[0.0, 0.0, 0.0], 0.0).unwrap(), 0);
        assert_eq!(s_plus(&[0.0, 0.0, 0.0], 0.0).unwrap(), 2);
        assert_eq!(s_plus(&[0.0, 0.0], 0.0).unwrap(), 1);
        assert_eq!(s_plus(&[0.0], 0.0).unwrap(), 0);
    }

    #[test]
    fn relative_tolerance_deletes_tiny_entries() {
        let z = [1.0, 1e-15, -1.0];
        assert_eq!(s_minus(&z, 1e-9).unwrap(), 1);
        assert_eq!(sign_count(&z, 1e-9).unwrap().effective_zeros, vec![1]);
        assert_eq!(
            sign_count(&z, 0.0).unwrap().effective_zeros,
            Vec::<usize>::new()
        );
    }

    #[test]
    fn positive_vector_has_no_changes() {
        assert_eq!(s_plus(&[1.0, 2.0, 3.0], 0.0).unwrap(), 0);
    }

    #[test]
    fn empty_vector_is_dimension_error() {
        assert!(matches!(s_minus(&[], 0.0), Err(TpdsError::Dimension(_))));
        assert!(matches!(s_plus(&[], 0.0), Err(TpdsError::Dimension(_))));
    }

    #[test]
    fn negative_tolerance_rejected() {
        assert!(s_minus(&[1.0], -1.0).is_err());
        assert!(s_minus(&[1.0], f64::NAN).is_err());
    }

    #[test]
    fn svd_on_identity_and_tp_2x2() {
        let id = Matrix::identity(3);
        let r = check_svd_property(&id, &[1.0, -1.0, 1.0], DEFAULT_EPS_SIGN).unwrap();
        assert!(r.holds);
        assert_eq!((r.image.s_plus, r.input.s_minus), (2, 2));

        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let r = check_svd_property(&a, &[1.0, -1.0], DEFAULT_EPS_SIGN).unwrap();
        // Ax = (1, 0): the zero can be replaced by -1
        assert_eq!(r.image.s_plus, 1);
        assert!(r.holds);
    }

    #[test]
    fn svd_on_squared_example_matrix() {
        let a = Matrix::from_rows(&[
            vec![3.0, 2.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.1, 1.0, 4.0],
        ])
        .unwrap();
        let a2 = a.mul(&a);
        let x = [1.0, -1.0, 1.0];
        // A²x computed by hand: A x = (1, -1, 3.1), A(Ax) = (1, 1.1, 11.5)
        let ax = a2.mul_vec(&x);
        assert!((ax[0] - 1.0).abs() < 1e-12 && (ax[1] - 1.1).abs() < 1e-12);
        assert!((ax[2] - 11.5).abs() < 1e-12);
        let r = check_svd_property(&a2, &x, DEFAULT_EPS_SIGN).unwrap();
        assert!(r.holds);
        assert_eq!((r.image.s_plus, r.input.s_minus), (0, 2));
    }

    #[test]
    fn svd_rejects_zero_vector() {
        let id = Matrix::identity(2);
        assert!(matches!(
            check_svd_property(&id, &[0.0, 0.0], 0.0),
            Err(TpdsError::Precondition(_))
        ));
    }

    fn small_vec() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(
            prop_oneof![Just(0.0), -5.0..5.0f64, Just(1.0), Just(-1.0)],
            1..9,
        )
    }

    proptest! {
        #[test]
        fn bounds_hold(z in small_vec()) {
            let c = sign_count(&z, 0.0).unwrap();
            prop_assert!(c.s_minus <= c.s_plus);
            prop_assert!(c.s_plus <= z.len() - 1);
        }

        #[test]
        fn dp_matches_brute_force(z in small_vec()) {
            prop_assert_eq!(s_plus(&z, 0.0).unwrap(), s_plus_brute(&z));
        }

        #[test]
        fn scaling_and_flip_invariance(z in small_vec(), s in 0.01..100.0f64) {
            let scaled: Vec<f64> = z.iter().map(|v| v * s).collect();
            let flipped: Vec<f64> = z.iter().map(|v| -v).collect();
            let base = sign_count(&z, 1e-9).unwrap();
            prop_assert_eq!(&sign_count(&scaled, 1e-9).unwrap(), &base);
            prop_assert_eq!(&sign_count(&flipped, 1e-9).unwrap(), &base);
        }

        #[test]
        fn no_zeros_means_equal_counts(z in prop::collection::vec(prop_oneof![0.1..3.0f64, -3.0..-0.1f64], 1..9)) {
            let c = sign_count(&z, 1e-9).unwrap();
            prop_assert_eq!(c.s_minus, c.s_plus);
        }
    }
}
