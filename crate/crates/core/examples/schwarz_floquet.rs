//! Floquet analysis of a 2π-periodic linear system whose transition matrix
//! is known in closed form.

use std::f64::consts::PI;

use tpds::flow::{find_periodic_orbit, integrate_with_variational, monodromy, IntegratorOptions};
use tpds::models::{schwarz_model, schwarz_transition};

fn main() -> tpds::Result<()> {
    let model = schwarz_model();
    let sol =
        integrate_with_variational(&model, &[1.0, 1.0], 2.0 * PI, &IntegratorOptions::default())?;
    let exact = schwarz_transition(2.0 * PI);
    let err = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (sol.phi[(i, j)] - exact[(i, j)]).abs())
        .fold(0.0, f64::max);
    println!("max |Φ(2π) - closed form| = {err:e}");

    let gamma0 = find_periodic_orbit(&model, &[2.0, 0.5], 1e-10)?;
    let r = monodromy(&model, &gamma0)?;
    println!("γ(0) = {:?}", r.gamma0);
    println!(
        "multipliers = {:?} (e^(-8π) = {:e})",
        r.multipliers,
        (-8.0 * PI).exp()
    );
    println!(
        "det via Liouville = {:e}, det B = {:e}",
        r.liouville_det, r.det_b
    );
    println!("eigenvectors = {:?}", r.eigenvectors);
    println!(
        "case = {:?}, worst = {:?}, best = {:?}",
        r.case, r.worst_direction, r.best_direction
    );
    Ok(())
}
