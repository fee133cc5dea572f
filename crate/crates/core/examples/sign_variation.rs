//! Sign-variation counts and the variation-diminishing property of a
//! totally positive matrix.

use tpds::linalg::Matrix;
use tpds::signvar::{check_svd_property, sign_count, DEFAULT_EPS_SIGN};

fn main() -> tpds::Result<()> {
    let z = [1.0, -2.0, 0.0, 0.0, 3.0];
    let c = sign_count(&z, 0.0)?;
    println!(
        "z = {z:?}: s- = {}, s+ = {}, zeros at {:?}",
        c.s_minus, c.s_plus, c.effective_zeros
    );

    // a Vandermonde-type kernel exp(x_i y_j) with increasing nodes is TP
    let nodes = [0.0, 0.5, 1.0, 1.5];
    let rows: Vec<Vec<f64>> = nodes
        .iter()
        .map(|x| nodes.iter().map(|y| f64::exp(x * y)).collect())
        .collect();
    let a = Matrix::from_rows(&rows)?;
    for x in [
        [1.0, -1.0, 1.0, -1.0],
        [1.0, 0.0, -1.0, 2.0],
        [-3.0, 1.0, 1.0, 1.0],
    ] {
        let r = check_svd_property(&a, &x, DEFAULT_EPS_SIGN)?;
        println!(
            "x = {x:?}: s-(x) = {}, s+(Ax) = {}, holds = {}",
            r.input.s_minus, r.image.s_plus, r.holds
        );
    }
    Ok(())
}
