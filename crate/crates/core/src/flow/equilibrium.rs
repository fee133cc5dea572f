//! Equilibria of time-invariant models by damped Newton, with a
//! relax-then-polish fallback.

use super::{flow_to, state_norm, IntegratorOptions};
use crate::error::{Result, TpdsError};
use crate::models::VectorFieldModel;

#[derive(Debug, Clone, Copy)]
pub struct EquilibriumOptions {
    pub tol: f64,
    pub max_newton: usize,
    /// Length of the relaxation run used when Newton fails from the guess.
    pub relax_time: f64,
    pub integrator: IntegratorOptions,
}

impl Default for EquilibriumOptions {
    fn default() -> Self {
        EquilibriumOptions {
            tol: 1e-12,
            max_newton: 100,
            relax_time: 1e3,
            integrator: IntegratorOptions::default(),
        }
    }
}

struct NewtonOutcome {
    x: Vec<f64>,
    residual: f64,
    converged: bool,
}

fn damped_newton<M: VectorFieldModel + ?Sized>(
    model: &M,
    start: &[f64],
    opts: &EquilibriumOptions,
) -> NewtonOutcome {
    let domain = model.domain();
    let mut x = start.to_vec();
    domain.clamp(&mut x);
    let mut fx = model.eval(0.0, &x);
    let mut r = state_norm(&fx);
    for it in 0..opts.max_newton {
        if r <= opts.tol {
            log::debug!("newton converged after {it} iterations, residual {r:e}");
            return NewtonOutcome {
                x,
                residual: r,
                converged: true,
            };
        }
        let neg: Vec<f64> = fx.iter().map(|v| -v).collect();
        let Ok(dx) = model.jacobian(0.0, &x).solve(&neg) else {
            break;
        };
        let mut alpha = 1.0;
        let mut accepted = false;
        while alpha >= 1e-10 {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + alpha * d).collect();
            if domain.contains(&trial, 0.0) {
                let ft = model.eval(0.0, &trial);
                let rt = state_norm(&ft);
                if rt < (1.0 - 1e-4 * alpha) * r || rt <= opts.tol {
                    x = trial;
                    fx = ft;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    NewtonOutcome {
        converged: r <= opts.tol,
        x,
        residual: r,
    }
}

/// Point `e` with `‖f(e)‖∞ <= tol` near `guess`.
pub fn find_equilibrium<M: VectorFieldModel + ?Sized>(
    model: &M,
    guess: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    find_equilibrium_with(
        model,
        guess,
        &EquilibriumOptions {
            tol,
            ..EquilibriumOptions::default()
        },
    )
}

pub fn find_equilibrium_with<M: VectorFieldModel + ?Sized>(
    model: &M,
    guess: &[f64],
    opts: &EquilibriumOptions,
) -> Result<Vec<f64>> {
    if model.period() != 0.0 {
        return Err(TpdsError::Precondition(format!(
            "model `{}` is time-varying; equilibria need a time-invariant model",
            model.id()
        )));
    }
    if guess.len() != model.dim() {
        return Err(TpdsError::Dimension(format!(
            "guess has {} entries, model has dimension {}",
            guess.len(),
            model.dim()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(TpdsError::InvalidArgument("tol must be positive".into()));
    }
    if guess.iter().any(|v| !v.is_finite()) {
        return Err(TpdsError::InvalidArgument("guess must be finite".into()));
    }
    let first = damped_newton(model, guess, opts);
    if first.converged {
        return Ok(first.x);
    }
    log::info!(
        "newton stalled at residual {:e}; relaxing for t = {}",
        first.residual,
        opts.relax_time
    );
    let mut start = guess.to_vec();
    model.domain().clamp(&mut start);
    let relaxed = flow_to(model, &start, opts.relax_time, &opts.integrator)?;
    let second = damped_newton(model, &relaxed, opts);
    if second.converged {
        return Ok(second.x);
    }
    let best = if second.residual < first.residual {
        second
    } else {
        first
    };
    Err(TpdsError::NoConvergence {
        iterations: 2 * opts.max_newton,
        residual: best.residual,
        best: best.x,
    })
}
