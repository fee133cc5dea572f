//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tpds::flow::{
    find_equilibrium, find_periodic_orbit, first_order_residual, integrate_pair_at,
    integrate_with_variational, monodromy, signvar_monitor, IntegratorOptions, StabilityCase,
};
use tpds::linalg::{Matrix, TridiagonalSpec};
use tpds::models::{
    neural_model, rfm_jacobian, rfm_scaling_experiment, rfm_steady_state, schwarz_model,
    schwarz_transition, LinearConstant, PeriodicTridiagonalLinear, RateFamily, Rfm, RfmPeriodic,
    VectorFieldModel,
};
use tpds::signvar::{check_svd_property, s_minus, s_plus, DEFAULT_EPS_SIGN};
use tpds::spectral::{eig_jacobi, eig_real_spectrum, verify_sign_pattern};
use tpds::totalpos::{all_minors, classify, oscillatory_shift, DEFAULT_TOL_MINOR};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn example1() -> Matrix {
    Matrix::from_rows(&[
        vec![3.0, 2.0, 0.0],
        vec![1.0, 3.0, 1.0],
        vec![0.1, 1.0, 4.0],
    ])
    .unwrap()
}

/// Angle between the lines spanned by two planar vectors.
fn line_angle(u: &[f64], v: &[f64]) -> f64 {
    let dot = u[0] * v[0] + u[1] * v[1];
    let cross = u[0] * v[1] - u[1] * v[0];
    cross.abs().atan2(dot.abs())
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn random_jacobi(rng: &mut ChaCha8Rng, n: usize) -> TridiagonalSpec {
    TridiagonalSpec::new(
        (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect(),
        (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect(),
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let z = [1.0, -2.0, 0.0, 0.0, 3.0];
    let (lo, hi) = (
        s_minus(&z, 0.0).map_err(fail)?,
        s_plus(&z, 0.0).map_err(fail)?,
    );
    ensure!(lo == 2 && hi == 4, "got s- = {lo}, s+ = {hi}");
    Ok(format!("s- = {lo}, s+ = {hi}"))
}

fn criterion_2() -> Outcome {
    let a = example1();
    let expected = [7.0, 3.0, 2.0, 2.8, 12.0, 8.0, 0.7, 3.9, 11.0];
    let minors = all_minors(&a, 2).map_err(fail)?;
    ensure!(minors.len() == 9, "expected 9 minors, got {}", minors.len());
    for (m, e) in minors.iter().zip(expected) {
        ensure!(
            (m.value - e).abs() <= 4.0 * f64::EPSILON * e,
            "minor {:?}x{:?} = {} vs {e}",
            m.row_set,
            m.col_set,
            m.value
        );
    }
    let det = all_minors(&a, 3).map_err(fail)?[0].value;
    ensure!(
        (det - 25.2).abs() <= 4.0 * f64::EPSILON * 25.2,
        "det = {det}"
    );

    let class = classify(&a, DEFAULT_TOL_MINOR).map_err(fail)?;
    ensure!(
        class.is_tn && class.is_oscillatory && !class.is_tp,
        "classification {class:?}"
    );
    let sq = classify(&a.mul(&a), DEFAULT_TOL_MINOR).map_err(fail)?;
    ensure!(sq.is_tp, "A^2 not TP: {:?}", sq.witness);

    let dec = eig_real_spectrum(&a).map_err(fail)?;
    for (w, e) in dec.eigenvalues.iter().zip([5.03851, 3.55435, 1.40714]) {
        ensure!((w - e).abs() <= 1e-4, "eigenvalue {w} vs {e}");
    }
    let pattern = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN).map_err(fail)?;
    ensure!(
        pattern.counts == vec![(0, 0), (1, 1), (2, 2)] && pattern.pass,
        "sign counts {:?}",
        pattern.counts
    );
    Ok(format!("det = {det}, eigenvalues {:?}", dec.eigenvalues))
}

fn criterion_3() -> Outcome {
    let model = neural_model();
    let e1 = find_equilibrium(&model, &[0.1, -0.1], 1e-12).map_err(fail)?;
    ensure!(e1.iter().all(|v| v.abs() <= 1e-10), "e1 = {e1:?}");
    let e2 = find_equilibrium(&model, &[1.0, 1.0], 1e-12).map_err(fail)?;
    ensure!(
        e2.iter().all(|v| (v - 1.28784).abs() <= 1e-4),
        "e2 = {e2:?}"
    );

    let s5 = 5f64.sqrt();
    let checks: [(&[f64], [f64; 2], f64); 2] = [
        (&e1, [(s5 - 1.0) / 2.0, -(s5 + 1.0) / 2.0], 1e-10),
        (&e2, [-0.672232, -1.80202], 1e-4),
    ];
    for (x, expected, tol) in checks {
        let t = model
            .tridiagonal_jacobian(0.0, x)
            .ok_or("neural Jacobian has no band form")?;
        let dec = eig_jacobi(&t).map_err(fail)?;
        for (w, e) in dec.eigenvalues.iter().zip(expected) {
            ensure!((w - e).abs() <= tol, "J({x:?}) eigenvalue {w} vs {e}");
        }
        ensure!(
            verify_sign_pattern(&dec, DEFAULT_EPS_SIGN)
                .map_err(fail)?
                .pass,
            "sign pattern at {x:?}"
        );
    }
    Ok(format!("e2 = ({:.6}, {:.6})", e2[0], e2[1]))
}

fn criterion_4() -> Outcome {
    let model = schwarz_model();
    let opts = IntegratorOptions::default();
    let sol = integrate_with_variational(&model, &[1.0, 1.0], 2.0 * PI, &opts).map_err(fail)?;
    let exact = schwarz_transition(2.0 * PI);
    for i in 0..2 {
        for j in 0..2 {
            let d = (sol.phi[(i, j)] - exact[(i, j)]).abs();
            ensure!(d <= 1e-8, "Φ(2π)[{i},{j}] off by {d:e}");
        }
    }

    let gamma0 = find_periodic_orbit(&model, &[2.0, 0.5], 1e-10).map_err(fail)?;
    let report = monodromy(&model, &gamma0).map_err(fail)?;
    let small = (-8.0 * PI).exp();
    let (l1, l2) = (report.multipliers[0], report.multipliers[1]);
    ensure!((l1 - 1.0).abs() <= 1e-6, "λ1 = {l1}");
    ensure!(
        (report.liouville_det / small - 1.0).abs() <= 1e-4,
        "Liouville det {} vs {small:e}",
        report.liouville_det
    );
    ensure!(
        l2 > small / 2.0 && l2 < small * 2.0,
        "λ2 = {l2:e} vs {small:e}"
    );
    let a1 = line_angle(&report.eigenvectors[0], &[1.0, 1.0]);
    let a2 = line_angle(&report.eigenvectors[1], &[-1.0, 1.0]);
    ensure!(
        a1 <= 1e-5 && a2 <= 1e-5,
        "eigenvector angles {a1:e}, {a2:e}"
    );
    ensure!(
        report.case == StabilityCase::StableCase2,
        "case {:?}",
        report.case
    );
    Ok(format!(
        "λ = ({l1}, {l2:e}), det = {:e}",
        report.liouville_det
    ))
}

fn criterion_5() -> Outcome {
    for n in [3, 10, 50] {
        let ss = rfm_steady_state(&RateFamily::UniformHalf.rates(n), 1e-12).map_err(fail)?;
        let worst = ss.e.iter().map(|v| (v - 0.5).abs()).fold(0.0, f64::max);
        ensure!(worst <= 1e-12, "n = {n}: |e - 1/2| = {worst:e}");
    }
    let mut prev_gap = f64::INFINITY;
    let mut worst_alpha: f64 = 0.0;
    for n in 1..=200 {
        let rates = RateFamily::UniformHalf.rates(n);
        let ss = rfm_steady_state(&rates, 1e-12).map_err(fail)?;
        let dec = eig_jacobi(&rfm_jacobian(&rates, &ss.e).map_err(fail)?).map_err(fail)?;
        for (k, w) in dec.eigenvalues.iter().enumerate() {
            let exact = -1.0 + ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            worst_alpha = worst_alpha.max((w - exact).abs());
        }
        let gap = (dec.eigenvalues[n - 1] + 2.0).abs();
        ensure!(
            gap < prev_gap,
            "|α_n + 2| not decreasing at n = {n}: {gap:e} >= {prev_gap:e}"
        );
        prev_gap = gap;
    }
    ensure!(worst_alpha <= 1e-10, "eigenvalue error {worst_alpha:e}");
    Ok(format!(
        "max eigenvalue error {worst_alpha:e}, |α_200 + 2| = {prev_gap:e}"
    ))
}

fn criterion_6() -> Outcome {
    let rows = rfm_scaling_experiment(RateFamily::AllOnes, &[50, 100, 200, 400]).map_err(fail)?;
    let x: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| (-r.alpha_1).ln()).collect();
    let slope = fit_slope(&x, &y);
    ensure!((-2.15..=-1.85).contains(&slope), "slope {slope}");
    Ok(format!("slope {slope:.4}"))
}

fn svd_pairs(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let mut checked = 0;
    while checked < 1000 {
        let n = rng.gen_range(2..=5);
        let (_, m) = oscillatory_shift(&random_jacobi(rng, n)).map_err(fail)?;
        let m = m.scaled(1.0 / m.norm_inf());
        let a = m.pow(n as u32 - 1);
        ensure!(
            classify(&a, 1e-12).map_err(fail)?.is_tp,
            "M^(n-1) not TP for {m:?}"
        );
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
        if x.iter().all(|v| *v == 0.0) {
            continue;
        }
        let r = check_svd_property(&a, &x, DEFAULT_EPS_SIGN).map_err(fail)?;
        ensure!(
            r.holds,
            "s+(Ax) = {} > s-(x) = {} for x = {x:?}",
            r.image.s_plus,
            r.input.s_minus
        );
        checked += 1;
    }
    Ok(checked)
}

fn svd_trajectories(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.05).collect();
    let opts = IntegratorOptions::default();
    for trial in 0..100 {
        let n = rng.gen_range(2..=6);
        let base = random_jacobi(rng, n);
        let model: Box<dyn VectorFieldModel> = if trial % 2 == 0 {
            Box::new(LinearConstant::from_tridiagonal(&base).map_err(fail)?)
        } else {
            let (w, phase) = (rng.gen_range(0.5..3.0), rng.gen_range(0.0..2.0 * PI));
            Box::new(
                PeriodicTridiagonalLinear::new(n, 2.0 * PI / w, move |t| {
                    let s = 1.0 + 0.5 * (w * t + phase).sin();
                    TridiagonalSpec {
                        a: base.a.iter().map(|v| v * s).collect(),
                        b: base.b.iter().map(|v| v * s).collect(),
                        c: base.c.clone(),
                    }
                })
                .map_err(fail)?,
            )
        };
        let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let samples = signvar_monitor(&model, &x0, &grid, DEFAULT_EPS_SIGN, &opts).map_err(fail)?;
        for (i, early) in samples.iter().enumerate() {
            for late in &samples[i + 1..] {
                ensure!(
                    late.s_plus <= early.s_minus,
                    "trial {trial}: s+(x({})) = {} > s-(x({})) = {}",
                    late.t,
                    late.s_plus,
                    early.t,
                    early.s_minus
                );
            }
        }
    }
    Ok(100)
}

fn oscillatory_spectra(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let b: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect();
        let c: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.1..2.0)).collect();
        let a: Vec<f64> = (0..n)
            .map(|i| {
                let right = if i + 1 < n { b[i] } else { 0.0 };
                let left = if i > 0 { c[i - 1] } else { 0.0 };
                right + left + rng.gen_range(0.05..2.0)
            })
            .collect();
        let t = TridiagonalSpec::new(a, b, c).map_err(fail)?;
        let dec = eig_jacobi(&t).map_err(fail)?;
        ensure!(
            dec.eigenvalues.iter().all(|w| *w > 0.0),
            "non-positive eigenvalue {:?}",
            dec.eigenvalues
        );
        ensure!(
            dec.eigenvalues.windows(2).all(|w| w[0] > w[1]),
            "not simple {:?}",
            dec.eigenvalues
        );
        let p = verify_sign_pattern(&dec, DEFAULT_EPS_SIGN).map_err(fail)?;
        ensure!(p.pass, "sign pattern {:?} for {t:?}", p.counts);
    }
    Ok(200)
}

fn rfm_cooperativity(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    let times = [0.1, 1.0, 10.0];
    let opts = IntegratorOptions::default();
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(2..=5);
        let rates: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let model = Rfm::new(rates).map_err(fail)?;
        let low: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.7)).collect();
        let high: Vec<f64> = low
            .iter()
            .map(|v| {
                if rng.gen_bool(0.5) {
                    v + rng.gen_range(0.01..0.25)
                } else {
                    *v
                }
            })
            .collect();
        if high == low {
            continue;
        }
        let (ta, tb) = integrate_pair_at(&model, &high, &low, &times, &opts).map_err(fail)?;
        for (k, t) in times.iter().enumerate() {
            let diff: Vec<f64> = ta.states[k]
                .iter()
                .zip(&tb.states[k])
                .map(|(p, q)| p - q)
                .collect();
            ensure!(
                diff.iter().all(|d| *d > 0.0),
                "t = {t}: difference {diff:?} from {high:?} vs {low:?}"
            );
        }
        done += 1;
    }
    Ok(done)
}

fn monodromy_tp(rng: &mut ChaCha8Rng) -> std::result::Result<usize, String> {
    for _ in 0..20 {
        let n = rng.gen_range(2..=6);
        let rates: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let model = RfmPeriodic::new(rates, rng.gen_range(1.5..2.5), rng.gen_range(0.1..0.5))
            .map_err(fail)?;
        let gamma0 = find_periodic_orbit(&model, &vec![0.5; n], 1e-10).map_err(fail)?;
        let report = monodromy(&model, &gamma0).map_err(fail)?;
        let tp = report.tp_check.as_ref().ok_or("no TP check performed")?;
        ensure!(tp.is_tp, "B not TP for n = {n}: witness {:?}", tp.witness);
    }
    Ok(20)
}

fn first_order(rng: &mut ChaCha8Rng) -> std::result::Result<f64, String> {
    let model = RfmPeriodic::new(vec![2.0, 1.6, 2.4, 2.0], 2.0, 0.4).map_err(fail)?;
    let gamma0 = find_periodic_orbit(&model, &[0.5; 3], 1e-12).map_err(fail)?;
    let opts = IntegratorOptions::with_tolerances(1e-12, 1e-14);
    let eps: Vec<f64> = (0..=10).map(|k| 1e-3 / 2f64.powi(k)).collect();
    let log_eps: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let scale = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let omega: Vec<f64> = raw.iter().map(|v| v / scale).collect();
        let resid: Vec<f64> = eps
            .iter()
            .map(|&e| first_order_residual(&model, &gamma0, &omega, e, &opts))
            .collect::<tpds::Result<_>>()
            .map_err(fail)?;
        let slope = fit_slope(&log_eps, &resid.iter().map(|r| r.ln()).collect::<Vec<_>>());
        worst = worst.min(slope);
        ensure!(
            slope >= 0.9,
            "ω = {omega:?}: residual slope {slope} ({resid:?})"
        );
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7d5);
    let pairs = svd_pairs(&mut rng)?;
    let trajectories = svd_trajectories(&mut rng)?;
    let spectra = oscillatory_spectra(&mut rng)?;
    let coop = rfm_cooperativity(&mut rng)?;
    let mono = monodromy_tp(&mut rng)?;
    let slope = first_order(&mut rng)?;
    Ok(format!(
        "{pairs} TP pairs, {trajectories} trajectories, {spectra} spectra, {coop} RFM pairs, {mono} monodromies, min residual slope {slope:.3}"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("1 sign variation", criterion_1),
        ("2 oscillatory 3x3 matrix", criterion_2),
        ("3 neural equilibria", criterion_3),
        ("4 periodic 2x2 Floquet", criterion_4),
        ("5 Toeplitz RFM", criterion_5),
        ("6 RFM relaxation scaling", criterion_6),
        ("7 property suites", criterion_7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
