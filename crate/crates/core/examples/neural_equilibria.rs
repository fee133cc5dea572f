//! Equilibria of the two-neuron tanh network and the spectra of the
//! Jacobian at each of them.

use tpds::flow::find_equilibrium;
use tpds::models::{neural_model, VectorFieldModel};
use tpds::signvar::DEFAULT_EPS_SIGN;
use tpds::spectral::{eig_jacobi, verify_sign_pattern};

fn main() -> tpds::Result<()> {
    let model = neural_model();
    for guess in [[0.1, -0.1], [1.0, 1.0], [-1.0, -1.0]] {
        let e = find_equilibrium(&model, &guess, 1e-12)?;
        let j = model.tridiagonal_jacobian(0.0, &e).expect("tridiagonal");
        let dec = eig_jacobi(&j)?;
        let p = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN)?;
        println!(
            "guess {guess:?} -> e = ({:.6}, {:.6}); J eigenvalues {:.6?}; sign pattern {}",
            e[0], e[1], dec.eigenvalues, p.pass
        );
    }
    Ok(())
}
