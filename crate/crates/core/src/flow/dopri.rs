//! Dormand–Prince 5(4) with PI step-size control and 4th-order dense output
//! (Hairer–Nørsett–Wanner `dopri5` scheme).

use super::{IntegratorOptions, IntegratorStats};
use crate::error::{Result, TpdsError};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// One accepted step, with the dense-output polynomial on `[t0, t1]`.
pub(crate) struct Step<'a> {
    pub t0: f64,
    pub t1: f64,
    pub y1: &'a [f64],
    rcont: &'a [Vec<f64>; 5],
}

impl Step<'_> {
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let theta = (t - self.t0) / h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

fn error_scale(opts: &IntegratorOptions, a: f64, b: f64) -> f64 {
    opts.atol + opts.rtol * a.abs().max(b.abs())
}

fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    h_max: f64,
    opts: &IntegratorOptions,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..n {
        let sk = error_scale(opts, y0[i], y0[i]);
        dnf += (f0[i] / sk).powi(2);
        dny += (y0[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(h_max);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + h * d).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h, &y1, &mut f1);
    let mut der2 = 0.0;
    for i in 0..n {
        let sk = error_scale(opts, y0[i], y0[i]);
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.abs().max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        1e-6f64.max(h * 1e-3)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(h_max)
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end > t0`, calling `observer`
/// after every accepted step. Returns the final state.
pub(crate) fn solve<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &IntegratorOptions,
    mut observer: O,
) -> Result<(Vec<f64>, IntegratorStats)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(&Step) -> Result<()>,
{
    let n = y0.len();
    let mut stats = IntegratorStats {
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evaluations: 0,
        rtol: opts.rtol,
        atol: opts.atol,
    };
    let mut y = y0.to_vec();
    if t_end <= t0 {
        return Ok((y, stats));
    }
    let h_max = t_end - t0;
    let expo1 = 0.2 - BETA * 0.75;

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    let mut ys = vec![0.0; n];
    let mut rcont: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);

    f(t0, &y, &mut k1);
    stats.rhs_evaluations += 1;
    let mut h = initial_step(&mut f, t0, &y, &k1, h_max, opts);
    stats.rhs_evaluations += 1;

    let mut t = t0;
    let mut fac_old: f64 = 1e-4;
    let mut last = false;
    let mut reject = false;

    loop {
        if stats.accepted_steps + stats.rejected_steps >= opts.max_steps {
            return Err(TpdsError::MaxStepsExceeded {
                t,
                max_steps: opts.max_steps,
            });
        }
        if 0.1 * h.abs() <= t.abs() * f64::EPSILON || h < f64::MIN_POSITIVE {
            return Err(TpdsError::StepSizeUnderflow { t, h });
        }
        if t + 1.01 * h >= t_end {
            h = t_end - t;
            last = true;
        }

        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t_end } else { t + h };
        f(t_new, &ys, &mut k6);
        for i in 0..n {
            y1[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &y1, &mut k7);
        stats.rhs_evaluations += 6;

        let mut err = 0.0;
        for i in 0..n {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / error_scale(opts, y[i], y1[i])).powi(2);
        }
        let err = (err / n as f64).sqrt();

        if !err.is_finite() {
            stats.rejected_steps += 1;
            h *= FAC_MIN;
            last = false;
            reject = true;
            continue;
        }

        let fac11 = err.powf(expo1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            fac_old = err.max(1e-4);
            stats.accepted_steps += 1;
            for i in 0..n {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            observer(&Step {
                t0: t,
                t1: t_new,
                y1: &y1,
                rcont: &rcont,
            })?;
            std::mem::swap(&mut y, &mut y1);
            std::mem::swap(&mut k1, &mut k7);
            t = t_new;
            if last {
                return Ok((y, stats));
            }
            if reject {
                h_new = h_new.min(h);
            }
            reject = false;
            h = h_new.min(h_max);
        } else {
            h_new = h / (1.0 / FAC_MIN).min(fac11 / SAFE);
            stats.rejected_steps += 1;
            reject = true;
            last = false;
            h = h_new;
        }
    }
}
