//! Sign variations along solutions of a linear system with a Jacobi
//! coefficient matrix never increase.

use tpds::flow::{signvar_monitor, IntegratorOptions};
use tpds::linalg::TridiagonalSpec;
use tpds::models::PeriodicTridiagonalLinear;
use tpds::signvar::DEFAULT_EPS_SIGN;

fn main() -> tpds::Result<()> {
    let model = PeriodicTridiagonalLinear::new(5, 3.0, |t| {
        let s = 1.0 + 0.5 * (2.0 * std::f64::consts::PI * t / 3.0).sin();
        TridiagonalSpec::toeplitz(5, -2.0, s, 0.5)
    })?;
    let x0 = [1.0, -1.0, 1.0, -1.0, 1.0];
    let grid: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
    let samples = signvar_monitor(
        &model,
        &x0,
        &grid,
        DEFAULT_EPS_SIGN,
        &IntegratorOptions::default(),
    )?;
    let mut last = None;
    for s in samples {
        if last != Some((s.s_minus, s.s_plus)) {
            println!("t = {:5.2}: s- = {}, s+ = {}", s.t, s.s_minus, s.s_plus);
            last = Some((s.s_minus, s.s_plus));
        }
    }
    Ok(())
}
