//! Trajectories, variational equations, equilibria, periodic orbits and
//! Floquet analysis of time-varying systems.

mod dopri;
mod equilibrium;
mod floquet;
mod orbit;

pub use equilibrium::{find_equilibrium, find_equilibrium_with, EquilibriumOptions};
pub use floquet::{
    first_order_residual, monodromy, monodromy_with, perturb_response, signvar_monitor,
    FloquetOptions, MonodromyReport, PerturbationResponse, SignSample, StabilityCase,
    DEFAULT_TOL_UNIT,
};
pub use orbit::{find_periodic_orbit, find_periodic_orbit_with, OrbitOptions};

use std::io::Write;

use serde::Serialize;

use crate::error::{Result, TpdsError};
use crate::linalg::{norm_inf, Matrix};
use crate::models::VectorFieldModel;

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;
/// Allowed excursion beyond the faces of a model's box domain.
pub const DEFAULT_DOMAIN_BAND: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub domain_band: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            max_steps: 5_000_000,
            domain_band: DEFAULT_DOMAIN_BAND,
        }
    }
}

impl IntegratorOptions {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        IntegratorOptions {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.rtol) || !ok(self.atol) || self.max_steps == 0 || !(self.domain_band >= 0.0) {
            return Err(TpdsError::InvalidArgument(format!(
                "integrator tolerances must be positive (rtol = {}, atol = {})",
                self.rtol, self.atol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evaluations: usize,
    pub rtol: f64,
    pub atol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub model_id: String,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory holds the initial time")
    }

    /// CSV with header `t,x_1,...,x_n`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x_{i}")));
        w.write_record(&header)?;
        for (t, x) in self.times.iter().zip(&self.states) {
            let mut row = Vec::with_capacity(n + 1);
            row.push(*t);
            row.extend_from_slice(x);
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of co-integrating a state with its variational equation.
#[derive(Debug, Clone)]
pub struct VariationalSolution {
    pub trajectory: Trajectory,
    /// `Φ(t_final) = ∂x(t_final, x0)/∂x0`.
    pub phi: Matrix,
    /// `∫ trace J(s, x(s)) ds` over `[0, t_final]`.
    pub trace_integral: f64,
}

impl VariationalSolution {
    pub fn liouville_det(&self) -> f64 {
        self.trace_integral.exp()
    }
}

fn check_start<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    opts: &IntegratorOptions,
) -> Result<()> {
    opts.validate()?;
    if x0.len() != model.dim() {
        return Err(TpdsError::Dimension(format!(
            "model `{}` has dimension {}, initial state has {}",
            model.id(),
            model.dim(),
            x0.len()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(TpdsError::InvalidArgument(
            "initial state must be finite".into(),
        ));
    }
    if !model.domain().contains(x0, opts.domain_band) {
        return Err(TpdsError::Precondition(format!(
            "initial state lies outside the state space of `{}`",
            model.id()
        )));
    }
    Ok(())
}

fn check_horizon(t_final: f64) -> Result<()> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(TpdsError::InvalidArgument(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    Ok(())
}

/// Rejects a step whose state leaves the domain band or stops being finite.
/// `blocks` lists offsets of model-state copies inside the augmented vector.
fn guard<M: VectorFieldModel + ?Sized>(
    model: &M,
    band: f64,
    blocks: &[usize],
) -> impl Fn(f64, &[f64]) -> Result<()> {
    let domain = model.domain();
    let n = model.dim();
    let blocks = blocks.to_vec();
    move |t, y| {
        if y.iter().any(|v| !v.is_finite()) {
            return Err(TpdsError::Divergence {
                t,
                norm: f64::INFINITY,
            });
        }
        for &off in &blocks {
            let x = &y[off..off + n];
            if !domain.contains(x, band) {
                return Err(TpdsError::DomainExit {
                    t,
                    state: x.to_vec(),
                });
            }
        }
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(TpdsError::InvalidArgument(
            "need at least one sample time".into(),
        ));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0])
    {
        return Err(TpdsError::InvalidArgument(
            "sample times must be finite, non-negative and non-decreasing".into(),
        ));
    }
    Ok(())
}

/// Runs the integrator over an augmented system and returns its state at
/// every requested time.
fn sample<F, G>(
    f: F,
    y0: &[f64],
    times: &[f64],
    opts: &IntegratorOptions,
    check: G,
) -> Result<(Vec<Vec<f64>>, IntegratorStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> Result<()>,
{
    let t_end = *times.last().expect("checked non-empty");
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(times.len());
    while out.len() < times.len() && times[out.len()] <= 0.0 {
        out.push(y0.to_vec());
    }
    let (y_end, stats) = dopri::solve(f, 0.0, y0, t_end, opts, |step| {
        check(step.t1, step.y1)?;
        while out.len() < times.len() && times[out.len()] <= step.t1 {
            let t = times[out.len()];
            if t == step.t1 {
                out.push(step.y1.to_vec());
            } else {
                let mut buf = vec![0.0; step.y1.len()];
                step.interpolate(t, &mut buf);
                out.push(buf);
            }
        }
        Ok(())
    })?;
    while out.len() < times.len() {
        out.push(y_end.clone());
    }
    Ok((out, stats))
}

/// Solution recorded at every accepted step, starting with `(0, x0)`.
pub fn integrate<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_start(model, x0, opts)?;
    check_horizon(t_final)?;
    let check = guard(model, opts.domain_band, &[0]);
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let (_, stats) = dopri::solve(
        |t, x, dx| model.rhs(t, x, dx),
        0.0,
        x0,
        t_final,
        opts,
        |step| {
            check(step.t1, step.y1)?;
            times.push(step.t1);
            states.push(step.y1.to_vec());
            Ok(())
        },
    )?;
    log::debug!(
        "integrated `{}` to t = {t_final}: {} steps, {} rejected",
        model.id(),
        stats.accepted_steps,
        stats.rejected_steps
    );
    Ok(Trajectory {
        model_id: model.id().to_string(),
        times,
        states,
        stats,
    })
}

/// Solution sampled at the given non-decreasing times via dense output.
pub fn integrate_at<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    check_start(model, x0, opts)?;
    check_times(times)?;
    let check = guard(model, opts.domain_band, &[0]);
    let (states, stats) = sample(|t, x, dx| model.rhs(t, x, dx), x0, times, opts, check)?;
    Ok(Trajectory {
        model_id: model.id().to_string(),
        times: times.to_vec(),
        states,
        stats,
    })
}

/// Integrates two initial conditions as one stacked system, so both share
/// the step sequence.
pub fn integrate_pair_at<M: VectorFieldModel + ?Sized>(
    model: &M,
    a: &[f64],
    b: &[f64],
    times: &[f64],
    opts: &IntegratorOptions,
) -> Result<(Trajectory, Trajectory)> {
    check_start(model, a, opts)?;
    check_start(model, b, opts)?;
    check_times(times)?;
    let n = model.dim();
    let y0: Vec<f64> = a.iter().chain(b).copied().collect();
    let check = guard(model, opts.domain_band, &[0, n]);
    let (states, stats) = sample(
        |t, y, dy| {
            let (ya, yb) = y.split_at(n);
            let (da, db) = dy.split_at_mut(n);
            model.rhs(t, ya, da);
            model.rhs(t, yb, db);
        },
        &y0,
        times,
        opts,
        check,
    )?;
    let build = |range: std::ops::Range<usize>| Trajectory {
        model_id: model.id().to_string(),
        times: times.to_vec(),
        states: states.iter().map(|s| s[range.clone()].to_vec()).collect(),
        stats,
    };
    Ok((build(0..n), build(n..2 * n)))
}

/// Right-hand side of `(x, H, ℓ)' = (f, J H, trace J)`, for `copies` extra
/// state blocks that follow `ℓ` and evolve under `f` alone.
fn variational_rhs<M: VectorFieldModel + ?Sized>(
    model: &M,
    copies: usize,
) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    let n = model.dim();
    move |t, y, dy| {
        let x = &y[..n];
        model.rhs(t, x, &mut dy[..n]);
        let j = model.jacobian(t, x);
        let h = &y[n..n + n * n];
        let dh = &mut dy[n..n + n * n];
        dh.fill(0.0);
        for i in 0..n {
            for k in 0..n {
                let jik = j[(i, k)];
                if jik == 0.0 {
                    continue;
                }
                for c in 0..n {
                    dh[i * n + c] += jik * h[k * n + c];
                }
            }
        }
        dy[n + n * n] = j.trace();
        for c in 0..copies {
            let off = n + n * n + 1 + c * n;
            let (src, dst) = (&y[off..off + n], &mut dy[off..off + n]);
            model.rhs(t, src, dst);
        }
    }
}

fn variational_start(x0: &[f64], extra: &[&[f64]]) -> Vec<f64> {
    let n = x0.len();
    let mut y0 = Vec::with_capacity(n + n * n + 1 + extra.len() * n);
    y0.extend_from_slice(x0);
    y0.extend_from_slice(Matrix::identity(n).as_slice());
    y0.push(0.0);
    for e in extra {
        y0.extend_from_slice(e);
    }
    y0
}

/// Co-integrates `x` with `H' = J(t, x) H`, `H(0) = I`, and with the trace
/// integral that gives `det H` through the Liouville formula.
pub fn integrate_with_variational<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<VariationalSolution> {
    check_start(model, x0, opts)?;
    check_horizon(t_final)?;
    let n = model.dim();
    let check = guard(model, opts.domain_band, &[0]);
    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    let y0 = variational_start(x0, &[]);
    let (y, stats) = dopri::solve(variational_rhs(model, 0), 0.0, &y0, t_final, opts, |step| {
        check(step.t1, step.y1)?;
        times.push(step.t1);
        states.push(step.y1[..n].to_vec());
        Ok(())
    })?;
    let phi = Matrix::from_row_major(n, n, y[n..n + n * n].to_vec())?;
    Ok(VariationalSolution {
        trajectory: Trajectory {
            model_id: model.id().to_string(),
            times,
            states,
            stats,
        },
        phi,
        trace_integral: y[n + n * n],
    })
}

/// Period map and its derivative at `a`, together with the image of each
/// point in `others`, all from one shared step sequence.
pub(crate) fn period_map_with_copies<M: VectorFieldModel + ?Sized>(
    model: &M,
    a: &[f64],
    others: &[&[f64]],
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<f64>, Matrix, Vec<Vec<f64>>)> {
    check_start(model, a, opts)?;
    for o in others {
        check_start(model, o, opts)?;
    }
    check_horizon(t_final)?;
    let n = model.dim();
    let base = n + n * n + 1;
    let mut blocks = vec![0];
    blocks.extend((0..others.len()).map(|c| base + c * n));
    let check = guard(model, opts.domain_band, &blocks);
    let y0 = variational_start(a, others);
    let (y, _) = dopri::solve(
        variational_rhs(model, others.len()),
        0.0,
        &y0,
        t_final,
        opts,
        |step| check(step.t1, step.y1),
    )?;
    let phi = Matrix::from_row_major(n, n, y[n..n + n * n].to_vec())?;
    let images = (0..others.len())
        .map(|c| y[base + c * n..base + (c + 1) * n].to_vec())
        .collect();
    Ok((y[..n].to_vec(), phi, images))
}

/// `x(t_final, x0)` without recording the path.
pub(crate) fn flow_to<M: VectorFieldModel + ?Sized>(
    model: &M,
    x0: &[f64],
    t_final: f64,
    opts: &IntegratorOptions,
) -> Result<Vec<f64>> {
    check_start(model, x0, opts)?;
    let check = guard(model, opts.domain_band, &[0]);
    let (y, _) = dopri::solve(
        |t, x, dx| model.rhs(t, x, dx),
        0.0,
        x0,
        t_final,
        opts,
        |step| check(step.t1, step.y1),
    )?;
    Ok(y)
}

/// Shortest round-trip decimal form.
pub(crate) fn fmt_float(v: f64) -> String {
    ryu::Buffer::new().format(v).to_string()
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn state_norm(x: &[f64]) -> f64 {
    norm_inf(x)
}
