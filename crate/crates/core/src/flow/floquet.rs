//! Monodromy matrices, Floquet multipliers, perturbation directions and
//! sign-variation monitoring along solutions.

use std::io::Write;

use serde::Serialize;

use super::{
    integrate_at, integrate_pair_at, period_map_with_copies, IntegratorOptions, IntegratorStats,
};
use crate::error::{Result, TpdsError};
use crate::linalg::{norm_inf, Matrix};
use crate::models::{jacobian_in_jacobi_pattern, VectorFieldModel};
use crate::signvar::{self, DEFAULT_EPS_SIGN};
use crate::spectral::{self, SignPatternReport, SpectralTolerances};
use crate::totalpos::{self, TpClass, DEFAULT_TOL_MINOR, N_MAX_EXHAUSTIVE};

pub const DEFAULT_TOL_UNIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct FloquetOptions {
    pub integrator: IntegratorOptions,
    pub tol_unit: f64,
    pub tol_minor: f64,
    pub eps_sign: f64,
    pub spectral: SpectralTolerances,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions {
            integrator: IntegratorOptions::default(),
            tol_unit: DEFAULT_TOL_UNIT,
            tol_minor: DEFAULT_TOL_MINOR,
            eps_sign: DEFAULT_EPS_SIGN,
            spectral: SpectralTolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StabilityCase {
    /// `λ_1 > 1`: the orbit is unstable and `v¹` is the worst direction.
    UnstableCase1,
    /// `λ_1 = 1`: orbitally stable; `v²` decays slowest.
    StableCase2,
    /// Neither; typically every multiplier is below 1.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonodromyReport {
    pub model_id: String,
    pub period: f64,
    pub gamma0: Vec<f64>,
    /// `‖x(T, γ0) - γ0‖∞`.
    pub fixed_point_residual: f64,
    #[serde(rename = "B")]
    pub b: Matrix,
    pub multipliers: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// 1-based index of the multiplier closest to 1.
    pub p_index: usize,
    pub unit_multiplier_gap: f64,
    pub case: StabilityCase,
    pub worst_direction: Option<Vec<f64>>,
    pub best_direction: Option<Vec<f64>>,
    pub sign_pattern: SignPatternReport,
    pub tp_check: Option<TpClass>,
    /// `exp(∫ trace J)` over one period along the orbit.
    pub liouville_det: f64,
    pub det_b: f64,
    pub tol_unit: f64,
    pub stats: IntegratorStats,
}

impl MonodromyReport {
    pub fn eigenvector_matrix(&self) -> Matrix {
        let n = self.eigenvectors.len();
        let mut v = Matrix::zeros(n, n);
        for (j, col) in self.eigenvectors.iter().enumerate() {
            for i in 0..n {
                v[(i, j)] = col[i];
            }
        }
        v
    }
}

pub fn monodromy<M: VectorFieldModel + ?Sized>(
    model: &M,
    gamma0: &[f64],
) -> Result<MonodromyReport> {
    monodromy_with(model, gamma0, &FloquetOptions::default())
}

/// Monodromy matrix `B = Φ(T)` along the periodic solution through `γ0`,
/// with its multipliers and the perturbation-direction classification.
pub fn monodromy_with<M: VectorFieldModel + ?Sized>(
    model: &M,
    gamma0: &[f64],
    opts: &FloquetOptions,
) -> Result<MonodromyReport> {
    let period = model.period();
    if !(period > 0.0) {
        return Err(TpdsError::Precondition(format!(
            "model `{}` has no period; impose one to analyse an equilibrium",
            model.id()
        )));
    }
    let sol = super::integrate_with_variational(model, gamma0, period, &opts.integrator)?;
    let fixed_point_residual = super::max_abs_diff(sol.trajectory.final_state(), gamma0);
    if fixed_point_residual > opts.tol_unit * norm_inf(gamma0).max(1.0) {
        return Err(TpdsError::Precondition(format!(
            "γ0 is not a fixed point of the period map: ‖x(T, γ0) - γ0‖∞ = {fixed_point_residual:e}"
        )));
    }
    let b = sol.phi.clone();
    let dec = spectral::eig_real_spectrum_with(&b, &opts.spectral).map_err(|e| match e {
        TpdsError::SpectrumNotReal { .. } => TpdsError::NotTpConsistent(Box::new(e)),
        other => other,
    })?;
    let n = dec.n();
    let lambda = &dec.eigenvalues;
    let p = (0..n)
        .min_by(|&i, &j| (lambda[i] - 1.0).abs().total_cmp(&(lambda[j] - 1.0).abs()))
        .expect("n >= 1");
    let tol = opts.tol_unit;
    let v = |i: usize| dec.eigenvectors.get(i).cloned();
    let (case, worst, best) = if lambda[0] > 1.0 + tol {
        let best = (lambda[n - 1] < 1.0 - tol).then(|| v(n - 1)).flatten();
        (StabilityCase::UnstableCase1, v(0), best)
    } else if (lambda[0] - 1.0).abs() <= tol {
        (
            StabilityCase::StableCase2,
            v(1),
            if n > 1 { v(n - 1) } else { None },
        )
    } else {
        (StabilityCase::Indeterminate, v(0), v(n - 1))
    };
    let sign_pattern = spectral::verify_sign_pattern(&dec, opts.eps_sign)?;
    let tp_check = if n <= N_MAX_EXHAUSTIVE {
        Some(totalpos::classify(&b, opts.tol_minor)?)
    } else {
        None
    };
    log::info!(
        "monodromy of `{}`: multipliers {:?}, case {:?}",
        model.id(),
        dec.eigenvalues,
        case
    );
    Ok(MonodromyReport {
        model_id: model.id().to_string(),
        period,
        gamma0: gamma0.to_vec(),
        fixed_point_residual,
        det_b: b.det(),
        b,
        p_index: p + 1,
        unit_multiplier_gap: (lambda[p] - 1.0).abs(),
        multipliers: dec.eigenvalues.clone(),
        eigenvectors: dec.eigenvectors.clone(),
        residuals: dec.residuals.clone(),
        case,
        worst_direction: worst,
        best_direction: best,
        sign_pattern,
        tp_check,
        liouville_det: sol.liouville_det(),
        tol_unit: tol,
        stats: sol.trajectory.stats,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbationResponse {
    pub direction: Vec<f64>,
    pub epsilon: f64,
    pub times: Vec<f64>,
    /// `z(kT) = x(kT, γ0 + εω) - x(kT, γ0)` for `k = 0..=K`.
    pub z: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
    /// `c` with `V c = ω` in the eigenbasis of `B`.
    pub coefficients: Vec<f64>,
    pub reconstruction_error: f64,
    /// `‖z(kT) - ε B^k ω‖∞ / ε`.
    pub first_order_residuals: Vec<f64>,
}

impl PerturbationResponse {
    /// CSV with header `k,norm,z_1,...,z_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.direction.len();
        let mut header = vec!["k".to_string(), "norm".to_string()];
        header.extend((1..=n).map(|i| format!("z_{i}")));
        w.write_record(&header)?;
        for (k, (z, norm)) in self.z.iter().zip(&self.norms).enumerate() {
            let mut row = vec![k.to_string(), super::fmt_float(*norm)];
            row.extend(z.iter().map(|v| super::fmt_float(*v)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Response to the initial perturbation `εω` of the periodic solution,
/// sampled at `t = kT`.
pub fn perturb_response<M: VectorFieldModel + ?Sized>(
    model: &M,
    report: &MonodromyReport,
    omega: &[f64],
    epsilon: f64,
    periods: usize,
    opts: &IntegratorOptions,
) -> Result<PerturbationResponse> {
    let n = model.dim();
    if omega.len() != n {
        return Err(TpdsError::Dimension(format!(
            "direction has {} entries, expected {n}",
            omega.len()
        )));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(TpdsError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let gamma0 = &report.gamma0;
    let start: Vec<f64> = gamma0
        .iter()
        .zip(omega)
        .map(|(g, w)| g + epsilon * w)
        .collect();
    if !model.domain().contains(&start, 0.0) {
        return Err(TpdsError::Precondition(
            "γ0 + εω lies outside the state space".into(),
        ));
    }
    let times: Vec<f64> = (0..=periods).map(|k| k as f64 * report.period).collect();
    let (pert, base) = integrate_pair_at(model, &start, gamma0, &times, opts)?;
    let z: Vec<Vec<f64>> = pert
        .states
        .iter()
        .zip(&base.states)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
        .collect();
    let norms = z.iter().map(|v| norm_inf(v)).collect();

    let vmat = report.eigenvector_matrix();
    let coefficients = vmat.solve(omega)?;
    let back = vmat.mul_vec(&coefficients);
    let reconstruction_error =
        super::max_abs_diff(&back, omega) / norm_inf(omega).max(f64::MIN_POSITIVE);

    let mut bk_omega = omega.to_vec();
    let mut first_order_residuals = Vec::with_capacity(z.len());
    for zk in &z {
        let r = zk
            .iter()
            .zip(&bk_omega)
            .map(|(a, b)| (a - epsilon * b).abs())
            .fold(0.0, f64::max);
        first_order_residuals.push(r / epsilon);
        bk_omega = report.b.mul_vec(&bk_omega);
    }
    Ok(PerturbationResponse {
        direction: omega.to_vec(),
        epsilon,
        times,
        z,
        norms,
        coefficients,
        reconstruction_error,
        first_order_residuals,
    })
}

/// `‖z(T) - ε B ω‖∞ / ε` after one period, with `z(T)` and `B` taken from
/// a single shared integration.
pub fn first_order_residual<M: VectorFieldModel + ?Sized>(
    model: &M,
    gamma0: &[f64],
    omega: &[f64],
    epsilon: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    let period = model.period();
    if !(period > 0.0) {
        return Err(TpdsError::Precondition(format!(
            "model `{}` has no period",
            model.id()
        )));
    }
    if omega.len() != gamma0.len() {
        return Err(TpdsError::Dimension(
            "direction and γ0 differ in length".into(),
        ));
    }
    let start: Vec<f64> = gamma0
        .iter()
        .zip(omega)
        .map(|(g, w)| g + epsilon * w)
        .collect();
    let (x_base, b, images) = period_map_with_copies(model, gamma0, &[&start], period, opts)?;
    let bw = b.mul_vec(omega);
    let r = images[0]
        .iter()
        .zip(&x_base)
        .zip(&bw)
        .map(|((p, q), l)| (p - q - epsilon * l).abs())
        .fold(0.0, f64::max);
    Ok(r / epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignSample {
    pub t: f64,
    pub s_minus: usize,
    pub s_plus: usize,
}

/// Sign variations of a solution of a linear system in the Jacobi pattern,
/// checking `s⁺(x(t_{k+1})) <= s⁻(x(t_k))` between consecutive samples.
pub fn signvar_monitor<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    t_grid: &[f64],
    eps_sign: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<SignSample>> {
    if !model.is_linear() {
        return Err(TpdsError::Precondition(format!(
            "model `{}` is not linear",
            model.id()
        )));
    }
    if x0.iter().all(|v| *v == 0.0) {
        return Err(TpdsError::Precondition(
            "initial state must be nonzero".into(),
        ));
    }
    let zero = vec![0.0; x0.len()];
    if let Some(&t) = t_grid
        .iter()
        .find(|&&t| !jacobian_in_jacobi_pattern(model, t, &zero))
    {
        return Err(TpdsError::Precondition(format!(
            "system matrix at t = {t} is not tridiagonal with positive off-diagonals"
        )));
    }
    let traj = integrate_at(model, x0, t_grid, opts)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let c = signvar::sign_count(x, eps_sign)?;
        out.push(SignSample {
            t: *t,
            s_minus: c.s_minus,
            s_plus: c.s_plus,
        });
    }
    for w in out.windows(2) {
        if w[1].t > w[0].t && w[1].s_plus > w[0].s_minus {
            return Err(TpdsError::PropertyFailure(format!(
                "sign variations increased: s⁺(x({})) = {} > s⁻(x({})) = {}",
                w[1].t, w[1].s_plus, w[0].t, w[0].s_minus
            )));
        }
    }
    Ok(out)
}
