//! Ribosome flow model: field, tridiagonal Jacobian, steady state, the
//! constant-band reference spectrum, and the relaxation-time scaling sweep.

use std::f64::consts::PI;

use serde::Serialize;

use super::{BoxDomain, VectorFieldModel};
use crate::error::{Result, TpdsError};
use crate::linalg::{Matrix, TridiagonalSpec};
use crate::spectral::{self, SpectralDecomposition, SpectralTolerances};

/// Tolerance band for `x ∈ [0, 1]^n` checks.
const CUBE_BAND: f64 = 1e-9;

fn check_rates(rates: &[f64]) -> Result<()> {
    if rates.len() < 2 {
        return Err(TpdsError::Dimension(format!(
            "an RFM with n sites needs n + 1 >= 2 rates, got {}",
            rates.len()
        )));
    }
    if rates.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(TpdsError::InvalidArgument(
            "RFM rates must be positive and finite".into(),
        ));
    }
    Ok(())
}

fn check_state(rates: &[f64], x: &[f64]) -> Result<()> {
    check_rates(rates)?;
    if x.len() + 1 != rates.len() {
        return Err(TpdsError::Dimension(format!(
            "state has {} sites but {} rates were given",
            x.len(),
            rates.len()
        )));
    }
    if !BoxDomain::cube(x.len(), 0.0, 1.0).contains(x, CUBE_BAND) {
        return Err(TpdsError::Precondition("RFM state outside [0, 1]^n".into()));
    }
    Ok(())
}

/// `ẋ_i = λ_{i-1} x_{i-1} (1 - x_i) - λ_i x_i (1 - x_{i+1})`, `x_0 = 1`,
/// `x_{n+1} = 0`, each rate scaled by `factor`.
fn field_into(rates: &[f64], factor: f64, x: &[f64], dx: &mut [f64]) {
    let n = x.len();
    let site = |i: usize| -> f64 {
        match i {
            0 => 1.0,
            i if i == n + 1 => 0.0,
            i => x[i - 1],
        }
    };
    for i in 1..=n {
        let inflow = rates[i - 1] * site(i - 1) * (1.0 - site(i));
        let outflow = rates[i] * site(i) * (1.0 - site(i + 1));
        dx[i - 1] = factor * (inflow - outflow);
    }
}

fn jacobian_bands(rates: &[f64], factor: f64, x: &[f64]) -> TridiagonalSpec {
    let n = x.len();
    let site = |i: usize| -> f64 {
        match i {
            0 => 1.0,
            i if i == n + 1 => 0.0,
            i => x[i - 1],
        }
    };
    let a = (1..=n)
        .map(|i| -factor * (rates[i - 1] * site(i - 1) + rates[i] * (1.0 - site(i + 1))))
        .collect();
    let b = (1..n).map(|i| factor * rates[i] * site(i)).collect();
    let c = (1..n)
        .map(|i| factor * rates[i] * (1.0 - site(i + 1)))
        .collect();
    TridiagonalSpec { a, b, c }
}

/// RFM vector field for rates `λ_0..λ_n`.
pub fn rfm_field(rates: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_state(rates, x)?;
    let mut dx = vec![0.0; x.len()];
    field_into(rates, 1.0, x, &mut dx);
    Ok(dx)
}

/// RFM Jacobian bands: `a_i = -λ_{i-1} x_{i-1} - λ_i (1 - x_{i+1})`,
/// `b_i = λ_i x_i`, `c_i = λ_i (1 - x_{i+1})`.
pub fn rfm_jacobian(rates: &[f64], x: &[f64]) -> Result<TridiagonalSpec> {
    check_state(rates, x)?;
    Ok(jacobian_bands(rates, 1.0, x))
}

/// Time-invariant RFM on `[0, 1]^n`.
#[derive(Debug, Clone)]
pub struct Rfm {
    rates: Vec<f64>,
}

impl Rfm {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        check_rates(&rates)?;
        Ok(Rfm { rates })
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
}

impl VectorFieldModel for Rfm {
    fn id(&self) -> &str {
        "rfm"
    }
    fn dim(&self) -> usize {
        self.rates.len() - 1
    }
    fn rhs(&self, _t: f64, x: &[f64], dx: &mut [f64]) {
        field_into(&self.rates, 1.0, x, dx)
    }
    fn jacobian(&self, _t: f64, x: &[f64]) -> Matrix {
        jacobian_bands(&self.rates, 1.0, x).to_dense()
    }
    fn tridiagonal_jacobian(&self, _t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        Some(jacobian_bands(&self.rates, 1.0, x))
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::cube(self.dim(), 0.0, 1.0)
    }
}

/// RFM whose rates share the periodic factor `1 + amplitude sin(2πt/T)`.
#[derive(Debug, Clone)]
pub struct RfmPeriodic {
    rates: Vec<f64>,
    period: f64,
    amplitude: f64,
}

impl RfmPeriodic {
    pub fn new(rates: Vec<f64>, period: f64, amplitude: f64) -> Result<Self> {
        check_rates(&rates)?;
        if !(period > 0.0 && period.is_finite()) {
            return Err(TpdsError::InvalidArgument(format!(
                "period must be positive, got {period}"
            )));
        }
        if !(amplitude.abs() < 1.0) {
            return Err(TpdsError::InvalidArgument(format!(
                "amplitude must satisfy |a| < 1 to keep rates positive, got {amplitude}"
            )));
        }
        Ok(RfmPeriodic {
            rates,
            period,
            amplitude,
        })
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    fn factor(&self, t: f64) -> f64 {
        1.0 + self.amplitude * (2.0 * PI * t / self.period).sin()
    }
}

impl VectorFieldModel for RfmPeriodic {
    fn id(&self) -> &str {
        "rfm_periodic"
    }
    fn dim(&self) -> usize {
        self.rates.len() - 1
    }
    fn period(&self) -> f64 {
        self.period
    }
    fn rhs(&self, t: f64, x: &[f64], dx: &mut [f64]) {
        field_into(&self.rates, self.factor(t), x, dx)
    }
    fn jacobian(&self, t: f64, x: &[f64]) -> Matrix {
        jacobian_bands(&self.rates, self.factor(t), x).to_dense()
    }
    fn tridiagonal_jacobian(&self, t: f64, x: &[f64]) -> Option<TridiagonalSpec> {
        Some(jacobian_bands(&self.rates, self.factor(t), x))
    }
    fn domain(&self) -> BoxDomain {
        BoxDomain::cube(self.dim(), 0.0, 1.0)
    }
    fn notes(&self) -> Option<&str> {
        Some("all rates modulated by a common positive periodic factor; entrainment variant, not the base RFM")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RfmSteadyState {
    pub rates: Vec<f64>,
    pub e: Vec<f64>,
    /// Steady production rate `λ_n e_n`.
    pub r: f64,
}

impl RfmSteadyState {
    /// Largest violation of `λ_i e_i (1 - e_{i+1}) = R` over `i = 0..=n`.
    pub fn flow_residual(&self) -> f64 {
        let n = self.e.len();
        let site = |i: usize| match i {
            0 => 1.0,
            i if i == n + 1 => 0.0,
            i => self.e[i - 1],
        };
        (0..=n)
            .map(|i| (self.rates[i] * site(i) * (1.0 - site(i + 1)) - self.r).abs())
            .fold(0.0, f64::max)
    }
}

/// Back-substitution for a trial production rate. `None` when some `e_i`
/// leaves `(0, 1)`.
fn back_substitute(rates: &[f64], r: f64) -> Option<Vec<f64>> {
    let n = rates.len() - 1;
    let mut e = vec![0.0; n];
    e[n - 1] = r / rates[n];
    for i in (0..n - 1).rev() {
        e[i] = r / (rates[i + 1] * (1.0 - e[i + 1]));
    }
    e.iter().all(|&v| v > 0.0 && v < 1.0).then_some(e)
}

const STEADY_STATE_MAX_BISECTIONS: usize = 200;

/// Steady state of the RFM by bisection on the production rate `R`,
/// followed by Newton refinement of `f(e) = 0`.
///
/// For trial `R`, `e_n = R / λ_n` and `e_i = R / (λ_i (1 - e_{i+1}))`; the
/// remaining balance `g(R) = λ_0 (1 - e_1) - R` decreases in `R`, and trial
/// values that push some `e_i` out of `(0, 1)` lie above the root. `tol`
/// bounds the largest flow imbalance `|λ_i e_i (1 - e_{i+1}) - R|`.
pub fn rfm_steady_state(rates: &[f64], tol: f64) -> Result<RfmSteadyState> {
    check_rates(rates)?;
    let g = |r: f64| back_substitute(rates, r).map(|e| (rates[0] * (1.0 - e[0]) - r, e));

    let mut lo = 0.0;
    let mut hi = rates.iter().copied().fold(f64::INFINITY, f64::min) / 4.0;
    // grow until the trial is infeasible or past the root
    let mut growth = 0;
    while let Some((gv, _)) = g(hi) {
        if gv <= 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        growth += 1;
        if growth > 2000 {
            return Err(TpdsError::NoConvergence {
                iterations: growth,
                residual: gv,
                best: vec![],
            });
        }
    }
    for _ in 0..STEADY_STATE_MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match g(mid) {
            Some((gv, _)) if gv > 0.0 => lo = mid,
            _ => hi = mid,
        }
    }
    let candidates = [lo, hi];
    let (_, mut e) = candidates
        .iter()
        .filter_map(|&r| g(r).map(|(gv, e)| (gv, e)))
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()))
        .ok_or_else(|| {
            TpdsError::PropertyFailure("steady state not interior to (0, 1)^n".into())
        })?;
    polish(rates, &mut e);
    if !e.iter().all(|&v| v > 0.0 && v < 1.0) {
        return Err(TpdsError::PropertyFailure(
            "steady state not interior to (0, 1)^n".into(),
        ));
    }
    let n = e.len();
    let ss = RfmSteadyState {
        rates: rates.to_vec(),
        r: rates[n] * e[n - 1],
        e,
    };
    let residual = ss.flow_residual();
    if !(residual <= tol) {
        return Err(TpdsError::NoConvergence {
            iterations: STEADY_STATE_MAX_BISECTIONS,
            residual,
            best: ss.e,
        });
    }
    Ok(ss)
}

/// Newton refinement of `f(e) = 0` from the bisection estimate.
fn polish(rates: &[f64], e: &mut Vec<f64>) {
    let n = e.len();
    let mut dx = vec![0.0; n];
    field_into(rates, 1.0, e, &mut dx);
    let mut r = crate::linalg::norm_inf(&dx);
    for _ in 0..8 {
        let neg: Vec<f64> = dx.iter().map(|v| -v).collect();
        let Ok(step) = jacobian_bands(rates, 1.0, e).to_dense().solve(&neg) else {
            return;
        };
        let trial: Vec<f64> = e.iter().zip(&step).map(|(a, d)| a + d).collect();
        field_into(rates, 1.0, &trial, &mut dx);
        let rt = crate::linalg::norm_inf(&dx);
        if !(rt < r) {
            return;
        }
        *e = trial;
        r = rt;
    }
}

/// Closed-form spectrum of the `n x n` tridiagonal Toeplitz matrix with `-1`
/// on the diagonal and `1/2` off it: `α_k = -1 + cos(kπ/(n+1))`, eigenvector
/// entries `sin(jkπ/(n+1))`.
pub fn toeplitz_reference(n: usize) -> Result<SpectralDecomposition> {
    if n == 0 {
        return Err(TpdsError::Dimension(
            "toeplitz reference needs n >= 1".into(),
        ));
    }
    let t = TridiagonalSpec::toeplitz(n, -1.0, 0.5, 0.5);
    let h = PI / (n as f64 + 1.0);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for k in 1..=n {
        let alpha = -1.0 + (k as f64 * h).cos();
        let mut v: Vec<f64> = (1..=n).map(|j| (j as f64 * k as f64 * h).sin()).collect();
        spectral::normalize_eigenvector(&mut v);
        let tv = t.mul_vec(&v);
        residuals.push(
            tv.iter()
                .zip(&v)
                .map(|(x, y)| (x - alpha * y).abs())
                .fold(0.0, f64::max),
        );
        eigenvalues.push(alpha);
        eigenvectors.push(v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        residuals,
    })
}

/// Built-in rate families for the scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateFamily {
    /// `λ_0 = λ_n = 1/2`, all other rates 1; steady state `e_i = 1/2`.
    UniformHalf,
    /// All rates equal to 1.
    AllOnes,
}

impl RateFamily {
    pub fn rates(self, n: usize) -> Vec<f64> {
        match self {
            RateFamily::AllOnes => vec![1.0; n + 1],
            RateFamily::UniformHalf => {
                let mut r = vec![1.0; n + 1];
                r[0] = 0.5;
                r[n] = 0.5;
                r
            }
        }
    }
}

impl std::str::FromStr for RateFamily {
    type Err = TpdsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-half" => Ok(RateFamily::UniformHalf),
            "all-ones" => Ok(RateFamily::AllOnes),
            other => Err(TpdsError::InvalidArgument(format!(
                "unknown rate family `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub log_n: f64,
    pub alpha_1: f64,
    pub log_neg_alpha_1: f64,
    pub alpha_n: f64,
}

/// Tolerance on the steady-state balance used by the scaling sweep.
const SCALING_STEADY_TOL: f64 = 1e-12;

/// Largest and smallest Jacobian eigenvalue at the steady state, per `n`.
/// Only the separation of `α_1` from `α_2` is certified.
pub fn rfm_scaling_experiment(family: RateFamily, n_list: &[usize]) -> Result<Vec<ScalingRow>> {
    n_list
        .iter()
        .map(|&n| {
            if n == 0 {
                return Err(TpdsError::InvalidArgument("n must be positive".into()));
            }
            let rates = family.rates(n);
            let ss = rfm_steady_state(&rates, SCALING_STEADY_TOL)?;
            let bands = jacobian_bands(&rates, 1.0, &ss.e);
            let w = spectral::eigenvalues_jacobi(&bands)?;
            let alpha_1 = w[0];
            if n > 1 {
                let tol = SpectralTolerances::default().gap_rel * bands.norm_inf();
                if !(w[0] - w[1] > tol) {
                    return Err(TpdsError::NotSimple {
                        index: 1,
                        gap: w[0] - w[1],
                        tol,
                    });
                }
            }
            Ok(ScalingRow {
                n,
                log_n: (n as f64).ln(),
                alpha_1,
                log_neg_alpha_1: (-alpha_1).ln(),
                alpha_n: w[n - 1],
            })
        })
        .collect()
}

/// Least-squares slope of `log(-α_1)` against `log n`.
pub fn least_squares_slope(rows: &[ScalingRow]) -> f64 {
    let m = rows.len() as f64;
    let mx = rows.iter().map(|r| r.log_n).sum::<f64>() / m;
    let my = rows.iter().map(|r| r.log_neg_alpha_1).sum::<f64>() / m;
    let sxy: f64 = rows
        .iter()
        .map(|r| (r.log_n - mx) * (r.log_neg_alpha_1 - my))
        .sum();
    let sxx: f64 = rows.iter().map(|r| (r.log_n - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_by_hand() {
        // x_3 = 0 makes the exit term λ_2 x_2
        let dx = rfm_field(&[1.0, 1.0, 1.0], &[0.5, 0.5]).unwrap();
        assert_eq!(dx, vec![0.25, -0.25]);
    }

    #[test]
    fn field_rejects_outside_cube() {
        assert!(rfm_field(&[1.0, 1.0, 1.0], &[1.1, 0.5]).is_err());
        assert!(rfm_field(&[1.0, 1.0], &[0.5, 0.5]).is_err());
        assert!(rfm_field(&[1.0, -1.0, 1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn jacobian_at_half_is_toeplitz() {
        for n in [1, 2, 5, 9] {
            let rates = RateFamily::UniformHalf.rates(n);
            let t = rfm_jacobian(&rates, &vec![0.5; n]).unwrap();
            assert_eq!(t, TridiagonalSpec::toeplitz(n, -1.0, 0.5, 0.5));
        }
    }

    #[test]
    fn uniform_half_steady_state() {
        for n in [1, 3, 10, 50] {
            let ss = rfm_steady_state(&RateFamily::UniformHalf.rates(n), 1e-13).unwrap();
            assert!(ss.e.iter().all(|e| (e - 0.5).abs() < 1e-12), "n = {n}");
            assert!((ss.r - 0.25).abs() < 1e-13);
            assert!(ss.flow_residual() < 1e-12);
            let dx = rfm_field(&ss.rates, &ss.e).unwrap();
            assert!(dx.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn skewed_rates_steady_state() {
        let rates = [0.1, 3.0, 0.2, 5.0, 0.05];
        let ss = rfm_steady_state(&rates, 1e-13).unwrap();
        assert!(ss.flow_residual() < 1e-12);
        assert!(ss.e.iter().all(|&e| e > 0.0 && e < 1.0));
        assert!((ss.r - rates[4] * ss.e[3]).abs() < 1e-15);
    }

    #[test]
    fn toeplitz_reference_values() {
        let d = toeplitz_reference(1).unwrap();
        assert!((d.eigenvalues[0] + 1.0).abs() < 1e-15);
        let d = toeplitz_reference(3).unwrap();
        assert!((d.eigenvalues[0] - (-1.0 + (PI / 4.0).cos())).abs() < 1e-15);
        assert!((d.eigenvalues[0] + 0.292_893_218_813_452_5).abs() < 1e-15);
        let s: Vec<f64> = d.eigenvectors[2].iter().map(|v| v.signum()).collect();
        assert_eq!(s, vec![1.0, -1.0, 1.0]);
        assert!(d.residuals.iter().all(|&r| r < 1e-14));
        assert!(toeplitz_reference(0).is_err());
    }

    #[test]
    fn toeplitz_reference_agrees_with_eig_jacobi() {
        for n in [1, 2, 7, 40, 121, 200] {
            let reference = toeplitz_reference(n).unwrap();
            let dec = spectral::eig_jacobi(&TridiagonalSpec::toeplitz(n, -1.0, 0.5, 0.5)).unwrap();
            for (a, b) in reference.eigenvalues.iter().zip(&dec.eigenvalues) {
                assert!((a - b).abs() < 1e-10, "n = {n}: {a} vs {b}");
            }
            for (u, v) in reference.eigenvectors.iter().zip(&dec.eigenvectors) {
                let d = u
                    .iter()
                    .zip(v)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(d < 1e-8, "n = {n}: eigenvector deviation {d:e}");
            }
        }
    }

    #[test]
    fn uniform_half_scaling_matches_closed_form() {
        let rows = rfm_scaling_experiment(RateFamily::UniformHalf, &[5, 20, 80]).unwrap();
        for row in &rows {
            let n = row.n as f64;
            assert!((row.alpha_1 - (-1.0 + (PI / (n + 1.0)).cos())).abs() < 1e-10);
            assert!((row.alpha_n - (-1.0 + (n * PI / (n + 1.0)).cos())).abs() < 1e-10);
        }
    }

    #[test]
    fn family_parsing() {
        assert_eq!(
            "all-ones".parse::<RateFamily>().unwrap(),
            RateFamily::AllOnes
        );
        assert!("x".parse::<RateFamily>().is_err());
        assert_eq!(RateFamily::UniformHalf.rates(3), vec![0.5, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn periodic_rfm_validation() {
        assert!(RfmPeriodic::new(vec![1.0, 1.0], 1.0, 1.0).is_err());
        assert!(RfmPeriodic::new(vec![1.0, 1.0], 0.0, 0.1).is_err());
        let m = RfmPeriodic::new(vec![1.0, 1.0], 2.0, 0.5).unwrap();
        assert!(m.notes().is_some());
        assert_eq!(m.period(), 2.0);
    }
}
