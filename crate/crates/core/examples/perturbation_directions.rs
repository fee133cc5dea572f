//! Growth of perturbations of an entrained RFM orbit along the best, the
//! worst and a mixed direction.

use tpds::flow::{find_periodic_orbit, monodromy, perturb_response, IntegratorOptions};
use tpds::models::RfmPeriodic;

fn main() -> tpds::Result<()> {
    let model = RfmPeriodic::new(vec![1.0, 0.8, 1.2, 1.0], 2.0, 0.4)?;
    let gamma0 = find_periodic_orbit(&model, &[0.5; 3], 1e-11)?;
    let report = monodromy(&model, &gamma0)?;
    println!(
        "multipliers {:.6?}, case {:?}",
        report.multipliers, report.case
    );

    let mixed = vec![1.0, -1.0, 0.5];
    let worst = report
        .worst_direction
        .clone()
        .unwrap_or_else(|| report.eigenvectors[0].clone());
    let best = report
        .best_direction
        .clone()
        .unwrap_or_else(|| report.eigenvectors[2].clone());
    let opts = IntegratorOptions::default();
    for (name, omega) in [("worst", worst), ("best", best), ("mixed", mixed)] {
        let resp = perturb_response(&model, &report, &omega, 1e-5, 3, &opts)?;
        let rates: Vec<f64> = resp.norms.windows(2).map(|w| w[1] / w[0]).collect();
        println!(
            "{name:>5}: ‖z(kT)‖/‖z((k-1)T)‖ = {rates:.4?}; coefficients {:.4?}",
            resp.coefficients
        );
    }
    Ok(())
}
