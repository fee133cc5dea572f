//! Relaxation rate of the RFM against chain length: log(-α_1) is close to a
//! line of slope -2 in log n. Writes the table as CSV to stdout.

use tpds::models::{least_squares_slope, rfm_scaling_experiment, RateFamily};

fn main() -> tpds::Result<()> {
    let n_list: Vec<usize> = (20..=400).step_by(20).collect();
    for family in [RateFamily::UniformHalf, RateFamily::AllOnes] {
        let rows = rfm_scaling_experiment(family, &n_list)?;
        println!("# {family:?}: slope {:.4}", least_squares_slope(&rows));
        println!("n,log_n,alpha_1,log_neg_alpha_1,alpha_n");
        for r in &rows {
            println!(
                "{},{},{},{},{}",
                r.n, r.log_n, r.alpha_1, r.log_neg_alpha_1, r.alpha_n
            );
        }
    }
    Ok(())
}
