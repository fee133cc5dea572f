//! Minors, classification and eigenvector sign structure of a 3x3
//! oscillatory matrix.

use tpds::linalg::Matrix;
use tpds::signvar::DEFAULT_EPS_SIGN;
use tpds::spectral::{eig_real_spectrum, verify_sign_pattern};
use tpds::totalpos::{all_minors, classify, DEFAULT_TOL_MINOR};

fn main() -> tpds::Result<()> {
    let a = Matrix::from_rows(&[
        vec![3.0, 2.0, 0.0],
        vec![1.0, 3.0, 1.0],
        vec![0.1, 1.0, 4.0],
    ])?;
    let minors: Vec<f64> = all_minors(&a, 2)?.iter().map(|m| m.value).collect();
    println!("order-2 minors: {minors:?}");
    println!("det = {}", a.det());

    let c = classify(&a, DEFAULT_TOL_MINOR)?;
    println!(
        "A:   TN {}, TP {}, oscillatory {}",
        c.is_tn, c.is_tp, c.is_oscillatory
    );
    let c2 = classify(&a.mul(&a), DEFAULT_TOL_MINOR)?;
    println!("A^2: TP {}", c2.is_tp);

    let dec = eig_real_spectrum(&a)?;
    let pattern = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN)?;
    for (k, (w, v)) in dec.eigenvalues.iter().zip(&dec.eigenvectors).enumerate() {
        println!(
            "α_{} = {w:.5}, v = {v:.6?}, (s-, s+) = {:?}",
            k + 1,
            pattern.counts[k]
        );
    }
    println!("sign pattern holds: {}", pattern.pass);
    Ok(())
}
