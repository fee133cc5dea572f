//! A random Jacobi matrix, its oscillatory shift, and the sign bounds on
//! spans of consecutive eigenvectors.

use rand::{Rng, SeedableRng};
use tpds::linalg::TridiagonalSpec;
use tpds::signvar::DEFAULT_EPS_SIGN;
use tpds::spectral::{eig_jacobi, verify_sign_pattern, verify_span_bounds};
use tpds::totalpos::{classify, dominance_holds, oscillatory_shift, DEFAULT_TOL_MINOR};

fn main() -> tpds::Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let n = 6;
    let t = TridiagonalSpec::new(
        (0..n).map(|_| rng.gen_range(-3.0..1.0)).collect(),
        (0..n - 1).map(|_| rng.gen_range(0.2..2.0)).collect(),
        (0..n - 1).map(|_| rng.gen_range(0.2..2.0)).collect(),
    )?;
    let (s, m) = oscillatory_shift(&t)?;
    let c = classify(&m, DEFAULT_TOL_MINOR)?;
    println!(
        "shift s = {s:.4}: dominance {}, oscillatory {}",
        dominance_holds(&t.shifted(s))?,
        c.is_oscillatory
    );

    let dec = eig_jacobi(&t)?;
    println!("eigenvalues: {:.6?}", dec.eigenvalues);
    let p = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN)?;
    println!("sign counts {:?}, pass {}", p.counts, p.pass);
    for (i, j) in [(1, 1), (1, 3), (2, 5), (4, 6)] {
        let ok = verify_span_bounds(&dec, i, j, 500, DEFAULT_EPS_SIGN, 9)?;
        println!(
            "span v^{i}..v^{j}: {} <= s- <= s+ <= {} on 500 samples: {ok}",
            i - 1,
            j - 1
        );
    }
    Ok(())
}
