//! Periodic orbits of `T`-periodic models: warm-up by iterating the period
//! map, then Newton on `x(T, a) - a = 0`.

use super::{flow_to, max_abs_diff, period_map_with_copies, state_norm, IntegratorOptions};
use crate::error::{Result, TpdsError};
use crate::linalg::{norm_inf, Matrix};
use crate::models::VectorFieldModel;

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    pub tol: f64,
    pub max_warmup_periods: usize,
    pub max_newton: usize,
    /// Warm-up aborts once `‖x(kT)‖∞` exceeds this multiple of `max(1, ‖guess‖∞)`.
    pub divergence_factor: f64,
    pub integrator: IntegratorOptions,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions {
            tol: 1e-9,
            max_warmup_periods: 200,
            max_newton: 30,
            divergence_factor: 1e8,
            integrator: IntegratorOptions::default(),
        }
    }
}

/// Initial point `γ(0)` of a `T`-periodic solution near `guess`, with
/// `‖x(T, γ(0)) - γ(0)‖∞ <= tol`.
pub fn find_periodic_orbit<M: VectorFieldModel + ?Sized>(
    model: &M,
    guess: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    find_periodic_orbit_with(
        model,
        guess,
        &OrbitOptions {
            tol,
            ..OrbitOptions::default()
        },
    )
}

pub fn find_periodic_orbit_with<M: VectorFieldModel + ?Sized>(
    model: &M,
    guess: &[f64],
    opts: &OrbitOptions,
) -> Result<Vec<f64>> {
    let period = model.period();
    if !(period > 0.0) {
        return Err(TpdsError::Precondition(format!(
            "model `{}` has no period; use an equilibrium search or impose a period",
            model.id()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(TpdsError::InvalidArgument("tol must be positive".into()));
    }
    let a = warm_up(model, guess, period, opts)?;
    newton(model, a, period, opts)
}

fn warm_up<M: VectorFieldModel + ?Sized>(
    model: &M,
    guess: &[f64],
    period: f64,
    opts: &OrbitOptions,
) -> Result<Vec<f64>> {
    let bound = opts.divergence_factor * state_norm(guess).max(1.0);
    let mut a = guess.to_vec();
    let mut prev = f64::INFINITY;
    for k in 1..=opts.max_warmup_periods {
        let next = flow_to(model, &a, period, &opts.integrator)?;
        let norm = state_norm(&next);
        if !(norm <= bound) {
            return Err(TpdsError::Divergence {
                t: k as f64 * period,
                norm,
            });
        }
        let diff = max_abs_diff(&next, &a);
        if diff >= prev {
            log::debug!("warm-up stopped after {k} periods, step {diff:e}");
            break;
        }
        a = next;
        prev = diff;
        if diff <= opts.tol {
            break;
        }
    }
    Ok(a)
}

fn newton<M: VectorFieldModel + ?Sized>(
    model: &M,
    mut a: Vec<f64>,
    period: f64,
    opts: &OrbitOptions,
) -> Result<Vec<f64>> {
    let domain = model.domain();
    let mut residual = f64::INFINITY;
    for it in 0..opts.max_newton {
        let (xt, phi, _) = period_map_with_copies(model, &a, &[], period, &opts.integrator)?;
        let g: Vec<f64> = xt.iter().zip(&a).map(|(x, y)| x - y).collect();
        residual = norm_inf(&g);
        if residual <= opts.tol {
            log::debug!("period-map newton converged after {it} iterations, residual {residual:e}");
            return Ok(a);
        }
        let delta = newton_direction(model, &a, &phi.shifted(-1.0), &g)?;
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial: Vec<f64> = a.iter().zip(&delta).map(|(x, d)| x + alpha * d).collect();
            if domain.contains(&trial, 0.0) {
                if let Ok(xt) = flow_to(model, &trial, period, &opts.integrator) {
                    if max_abs_diff(&xt, &trial) < residual {
                        a = trial;
                        accepted = true;
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Err(TpdsError::NewtonStall { residual, best: a })
}

/// Solves `(Φ - I) Δ = -g`, switching to the bordered system
/// `[[Φ - I, d], [dᵀ, 0]]` when `Φ - I` is numerically singular along `d`.
fn newton_direction<M: VectorFieldModel + ?Sized>(
    model: &M,
    a: &[f64],
    m: &Matrix,
    g: &[f64],
) -> Result<Vec<f64>> {
    let n = a.len();
    let scale = m.max_abs().max(1.0);
    let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
    if let Ok(lu) = m.lu() {
        if lu.min_pivot() > 1e-8 * scale {
            return Ok(lu.solve(&rhs));
        }
    }
    let d = singular_direction(model, a, m, scale)?;
    log::debug!("period map singular; solving in the complement of {d:?}");
    let mut k = Matrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = m[(i, j)];
        }
        k[(i, n)] = d[i];
        k[(n, i)] = d[i];
    }
    let mut b = rhs;
    b.push(0.0);
    let sol = k.solve(&b)?;
    Ok(sol[..n].to_vec())
}

/// The flow direction `f(0, a)` if it spans the near-null space of `Φ - I`,
/// otherwise a null vector from inverse iteration.
fn singular_direction<M: VectorFieldModel + ?Sized>(
    model: &M,
    a: &[f64],
    m: &Matrix,
    scale: f64,
) -> Result<Vec<f64>> {
    let fa = model.eval(0.0, a);
    let fnorm = norm_inf(&fa);
    if fnorm > 1e-8 * state_norm(a).max(1.0) {
        let d: Vec<f64> = fa.iter().map(|v| v / fnorm).collect();
        if norm_inf(&m.mul_vec(&d)) <= 1e-4 * scale {
            return Ok(d);
        }
    }
    let lu = m.shifted(1e-10 * scale).lu()?;
    let mut v = vec![1.0; a.len()];
    for _ in 0..3 {
        v = lu.solve(&v);
        let s = norm_inf(&v);
        if !(s > 0.0 && s.is_finite()) {
            return Err(TpdsError::Singular);
        }
        v.iter_mut().for_each(|x| *x /= s);
    }
    Ok(v)
}
