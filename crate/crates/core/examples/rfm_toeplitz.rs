//! RFM with rates (1/2, 1, ..., 1, 1/2): the steady state is 1/2 everywhere
//! and the Jacobian there is Toeplitz with closed-form spectrum.

use tpds::models::{rfm_jacobian, rfm_steady_state, toeplitz_reference, RateFamily};
use tpds::spectral::eig_jacobi;

fn main() -> tpds::Result<()> {
    for n in [3, 10, 50, 200] {
        let rates = RateFamily::UniformHalf.rates(n);
        let ss = rfm_steady_state(&rates, 1e-12)?;
        let dev = ss.e.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
        let dec = eig_jacobi(&rfm_jacobian(&rates, &ss.e)?)?;
        let reference = toeplitz_reference(n)?;
        let err = dec
            .eigenvalues
            .iter()
            .zip(&reference.eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "n = {n:3}: R = {}, max|e - 1/2| = {dev:e}, α_1 = {:.6e}, α_n = {:.8}, max eigenvalue error {err:e}",
            ss.r,
            dec.eigenvalues[0],
            dec.eigenvalues[n - 1]
        );
    }
    Ok(())
}
