//! Entrainment of the RFM to periodic rates: the periodic orbit, its
//! monodromy matrix, and the total positivity of that matrix.

use tpds::flow::{find_periodic_orbit, integrate, monodromy, IntegratorOptions};
use tpds::models::{RfmPeriodic, VectorFieldModel};

fn main() -> tpds::Result<()> {
    let model = RfmPeriodic::new(vec![1.2, 0.9, 1.1, 0.7, 1.0], 2.0, 0.3)?;
    if let Some(note) = model.notes() {
        println!("model: {note}");
    }
    let traj = integrate(
        &model,
        &[0.1, 0.9, 0.1, 0.9],
        40.0,
        &IntegratorOptions::default(),
    )?;
    println!(
        "state after 20 periods from (0.1, 0.9, 0.1, 0.9): {:.6?}",
        traj.final_state()
    );

    let gamma0 = find_periodic_orbit(&model, &[0.5; 4], 1e-11)?;
    let r = monodromy(&model, &gamma0)?;
    println!("γ(0) = {:.6?}", r.gamma0);
    println!("multipliers = {:?}", r.multipliers);
    if let Some(tp) = &r.tp_check {
        println!("monodromy TP: {}, closest minor {:?}", tp.is_tp, tp.witness);
    }
    Ok(())
}
