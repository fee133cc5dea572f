//! Integrates an RFM with the variational equation and compares det Φ(t)
//! with the Liouville integral of the trace.

use tpds::flow::{integrate_at, integrate_with_variational, IntegratorOptions};
use tpds::models::Rfm;

fn main() -> tpds::Result<()> {
    let model = Rfm::new(vec![1.0, 0.6, 1.4, 0.8, 1.1])?;
    let x0 = [0.9, 0.1, 0.5, 0.3];
    let opts = IntegratorOptions::default();

    let times: Vec<f64> = (0..=5).map(|k| k as f64 * 2.0).collect();
    let traj = integrate_at(&model, &x0, &times, &opts)?;
    traj.write_csv(std::io::stdout().lock())?;

    let sol = integrate_with_variational(&model, &x0, 10.0, &opts)?;
    println!(
        "det Φ(10) = {:e}, exp(∫ trace J) = {:e}, steps {}",
        sol.phi.det(),
        sol.liouville_det(),
        sol.trajectory.stats.accepted_steps
    );
    Ok(())
}
