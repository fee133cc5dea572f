//! The `tpds` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{ErrorKind, Result, TpdsError};
use crate::flow::{
    self, FloquetOptions, IntegratorOptions, MonodromyReport, OrbitOptions, DEFAULT_ATOL,
    DEFAULT_RTOL,
};
use crate::linalg::norm_inf;
use crate::models::{self, MatrixInput, ModelSpec, RateFamily, VectorFieldModel, WithPeriod};
use crate::signvar::{self, DEFAULT_EPS_SIGN};
use crate::spectral::{self, SignPatternReport, SpectralDecomposition};
use crate::totalpos::{self, DEFAULT_TOL_MINOR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_PROPERTY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "tpds",
    version,
    about = "Totally positive differential systems toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sign variations s⁻ and s⁺ of a vector.
    Signvar {
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        vector: Reals,
        #[arg(long, default_value_t = DEFAULT_EPS_SIGN)]
        eps: f64,
    },
    /// TN / TP / oscillatory classification of a matrix file.
    CheckMatrix {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL_MINOR)]
        tol: f64,
    },
    /// Real spectrum with sign-normalized eigenvectors.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        verify_sign_pattern: bool,
        #[arg(long, default_value_t = DEFAULT_EPS_SIGN)]
        eps_sign: f64,
    },
    /// Integrate a model and write `t,x_1..x_n` as CSV.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        x0: Reals,
        #[arg(long)]
        tfinal: f64,
        /// Sample on a uniform grid with this spacing instead of at solver steps.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Equilibrium of a time-invariant model and the spectrum of its Jacobian.
    Equilibrium {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
        guess: Reals,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Monodromy matrix, Floquet multipliers and perturbation directions.
    Monodromy {
        #[command(flatten)]
        orbit: OrbitArgs,
    },
    /// Response to a perturbation of the periodic solution, as CSV.
    Perturb {
        #[command(flatten)]
        orbit: OrbitArgs,
        #[arg(long, value_enum)]
        direction: Direction,
        /// Direction vector for `--direction custom`.
        #[arg(long, value_parser = parse_vector, allow_hyphen_values = true, required_if_eq("direction", "custom"))]
        omega: Option<Reals>,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
        #[arg(long, default_value_t = 10)]
        periods: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Slowest relaxation rate of the RFM against chain length, as CSV.
    RfmScaling {
        #[arg(long, value_parser = parse_family)]
        family: RateFamily,
        #[arg(long, default_value_t = 20)]
        nmin: usize,
        #[arg(long, default_value_t = 400)]
        nmax: usize,
        #[arg(long, default_value_t = 10)]
        step: usize,
        /// Explicit list of chain lengths; overrides the range.
        #[arg(long, value_parser = parse_sizes)]
        n_list: Option<Sizes>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Tolerances {
    #[arg(long, default_value_t = DEFAULT_RTOL)]
    rtol: f64,
    #[arg(long, default_value_t = DEFAULT_ATOL)]
    atol: f64,
}

impl Tolerances {
    fn integrator(&self) -> Result<IntegratorOptions> {
        let o = IntegratorOptions::with_tolerances(self.rtol, self.atol);
        o.validate()?;
        Ok(o)
    }
}

#[derive(Debug, Args)]
#[group(id = "start", required = true, multiple = false, args = ["find_orbit", "gamma0"])]
struct OrbitArgs {
    #[arg(long)]
    model: PathBuf,
    /// Impose a period on a time-invariant model.
    #[arg(long)]
    period: Option<f64>,
    /// Locate the periodic solution from `--guess` first.
    #[arg(long, requires = "guess")]
    find_orbit: bool,
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    guess: Option<Reals>,
    /// Initial point of a known periodic solution.
    #[arg(long, value_parser = parse_vector, allow_hyphen_values = true)]
    gamma0: Option<Reals>,
    #[arg(long, default_value_t = 1e-10)]
    orbit_tol: f64,
    #[arg(long, default_value_t = flow::DEFAULT_TOL_UNIT)]
    tol_unit: f64,
    #[arg(long, default_value_t = DEFAULT_TOL_MINOR)]
    tol_minor: f64,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Best,
    Worst,
    Custom,
}

/// Comma-separated list of reals, e.g. `1,-2,0.5`.
#[derive(Debug, Clone)]
struct Reals(Vec<f64>);

/// Comma-separated list of sizes.
#[derive(Debug, Clone)]
struct Sizes(Vec<usize>);

fn parse_vector(s: &str) -> std::result::Result<Reals, String> {
    let v: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(Reals(v)),
        Ok(_) => Err("empty vector".into()),
        Err(e) => Err(format!(
            "`{s}` is not a comma-separated list of numbers: {e}"
        )),
    }
}

fn parse_sizes(s: &str) -> std::result::Result<Sizes, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<std::result::Result<_, _>>()
        .map(Sizes)
}

fn parse_family(s: &str) -> std::result::Result<RateFamily, String> {
    s.parse().map_err(|e: TpdsError| e.to_string())
}

/// Installs the stderr logger, with the level taken from `TPDS_LOG`.
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or("TPDS_LOG", "error");
    let _ = env_logger::Builder::from_env(env)
        .target(env_logger::Target::Stderr)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            return match e.kind() {
                K::DisplayHelp
                | K::DisplayVersion
                | K::DisplayHelpOnMissingArgumentOrSubcommand
                    if e.exit_code() == 0 =>
                {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_json(&err));
            match err.kind() {
                ErrorKind::Domain => EXIT_DOMAIN,
                ErrorKind::Property => EXIT_PROPERTY,
            }
        }
    }
}

fn error_json(err: &TpdsError) -> serde_json::Value {
    let kind = match err.kind() {
        ErrorKind::Domain => "domain",
        ErrorKind::Property => "property",
    };
    let details = match err {
        TpdsError::NoConvergence {
            iterations,
            residual,
            best,
        } => json!({"iterations": iterations, "residual": residual, "best": best}),
        TpdsError::NewtonStall { residual, best } => json!({"residual": residual, "best": best}),
        TpdsError::DomainExit { t, state } => json!({"t": t, "state": state}),
        TpdsError::StepSizeUnderflow { t, h } => json!({"t": t, "h": h}),
        TpdsError::MaxStepsExceeded { t, max_steps } => json!({"t": t, "max_steps": max_steps}),
        TpdsError::Divergence { t, norm } => json!({"t": t, "norm": norm}),
        TpdsError::NotSimple { index, gap, tol } => json!({"index": index, "gap": gap, "tol": tol}),
        TpdsError::SpectrumNotReal { re, im } => json!({"re": re, "im": im}),
        TpdsError::ResidualTooLarge {
            index,
            residual,
            tol,
        } => {
            json!({"index": index, "residual": residual, "tol": tol})
        }
        TpdsError::TooLarge { n, max } => json!({"n": n, "max": max}),
        _ => serde_json::Value::Null,
    };
    json!({"error": {"type": err.tag(), "kind": kind, "message": err.to_string(), "details": details}})
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, f: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => f(stdout),
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TpdsError::InvalidArgument(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TpdsError::InvalidArgument(format!(
            "{name} must be non-negative, got {v}"
        )))
    }
}

#[derive(Serialize)]
struct SpectrumOutput {
    #[serde(flatten)]
    decomposition: SpectralDecomposition,
    solver: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_pattern: Option<SignPatternReport>,
}

#[derive(Serialize)]
struct EquilibriumOutput {
    model: String,
    equilibrium: Vec<f64>,
    residual: f64,
    jacobian: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spectrum: Option<SpectralDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_pattern: Option<SignPatternReport>,
}

#[derive(Serialize)]
struct ScalingSummary {
    family: RateFamily,
    n_list: Vec<usize>,
    slope: f64,
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Signvar {
            vector: Reals(vector),
            eps,
        } => {
            check_nonneg("eps", eps)?;
            print_json(stdout, &signvar::sign_count(&vector, eps)?)
        }
        Command::CheckMatrix { input, tol } => {
            check_nonneg("tol", tol)?;
            let m = MatrixInput::from_path(&input)?;
            print_json(stdout, &totalpos::classify(&m.to_matrix()?, tol)?)
        }
        Command::Spectrum {
            input,
            verify_sign_pattern,
            eps_sign,
        } => {
            check_nonneg("eps-sign", eps_sign)?;
            let m = MatrixInput::from_path(&input)?;
            let (decomposition, solver) = match m.as_tridiagonal() {
                Some(t) => (spectral::eig_jacobi(t)?, "jacobi"),
                None => (spectral::eig_real_spectrum(&m.to_matrix()?)?, "real_schur"),
            };
            let sign_pattern = if verify_sign_pattern {
                Some(spectral::verify_sign_pattern(&decomposition, eps_sign)?)
            } else {
                None
            };
            let failed = sign_pattern.as_ref().is_some_and(|s| !s.pass);
            print_json(
                stdout,
                &SpectrumOutput {
                    decomposition,
                    solver,
                    sign_pattern,
                },
            )?;
            if failed {
                return Err(TpdsError::PropertyFailure(
                    "eigenvector sign pattern differs from s⁻(vⁱ) = s⁺(vⁱ) = i - 1".into(),
                ));
            }
            Ok(())
        }
        Command::Simulate {
            model,
            x0: Reals(x0),
            tfinal,
            dt,
            out,
            tol,
        } => {
            let model = ModelSpec::from_path(&model)?.build()?;
            let opts = tol.integrator()?;
            let traj = match dt {
                Some(dt) => {
                    check_positive("dt", dt)?;
                    check_positive("tfinal", tfinal)?;
                    let k = (tfinal / dt).ceil() as usize;
                    let times: Vec<f64> = (0..=k).map(|i| (i as f64 * dt).min(tfinal)).collect();
                    flow::integrate_at(&*model, &x0, &times, &opts)?
                }
                None => flow::integrate(&*model, &x0, tfinal, &opts)?,
            };
            with_output(out.as_deref(), stdout, |w| traj.write_csv(w))
        }
        Command::Equilibrium {
            model,
            guess: Reals(guess),
            tol,
        } => {
            check_positive("tol", tol)?;
            let model = ModelSpec::from_path(&model)?.build()?;
            let e = flow::find_equilibrium(&*model, &guess, tol)?;
            let residual = norm_inf(&model.eval(0.0, &e));
            let spectrum = model
                .tridiagonal_jacobian(0.0, &e)
                .filter(|t| t.b.iter().zip(&t.c).all(|(b, c)| b * c > 0.0))
                .map(|t| spectral::eig_jacobi(&t))
                .transpose()?;
            let sign_pattern = spectrum
                .as_ref()
                .map(|d| spectral::verify_sign_pattern(d, DEFAULT_EPS_SIGN))
                .transpose()?;
            print_json(
                stdout,
                &EquilibriumOutput {
                    model: model.id().to_string(),
                    residual,
                    jacobian: model.jacobian(0.0, &e).to_rows(),
                    equilibrium: e,
                    spectrum,
                    sign_pattern,
                },
            )
        }
        Command::Monodromy { orbit } => {
            let (model, report) = orbit_report(&orbit)?;
            drop(model);
            print_json(stdout, &report)
        }
        Command::Perturb {
            orbit,
            direction,
            omega,
            eps,
            periods,
            out,
        } => {
            check_positive("eps", eps)?;
            let (model, report) = orbit_report(&orbit)?;
            let omega = match direction {
                Direction::Best => report.best_direction.clone().ok_or_else(|| {
                    TpdsError::Precondition(
                        "no best direction: smallest multiplier is not below 1".into(),
                    )
                })?,
                Direction::Worst => report.worst_direction.clone().ok_or_else(|| {
                    TpdsError::Precondition("no worst direction for a scalar system".into())
                })?,
                Direction::Custom => omega.expect("clap enforces --omega").0,
            };
            let resp = flow::perturb_response(
                &*model,
                &report,
                &omega,
                eps,
                periods,
                &orbit.tol.integrator()?,
            )?;
            with_output(out.as_deref(), stdout, |w| resp.write_csv(w))
        }
        Command::RfmScaling {
            family,
            nmin,
            nmax,
            step,
            n_list,
            out,
        } => {
            let n_list = match n_list {
                Some(Sizes(v)) => v,
                None => {
                    if nmin == 0 || nmax < nmin || step == 0 {
                        return Err(TpdsError::InvalidArgument(
                            "need 1 <= nmin <= nmax and a positive step".into(),
                        ));
                    }
                    (nmin..=nmax).step_by(step).collect()
                }
            };
            if n_list.len() < 2 {
                return Err(TpdsError::InvalidArgument(
                    "need at least two chain lengths".into(),
                ));
            }
            let rows = models::rfm_scaling_experiment(family, &n_list)?;
            let slope = models::least_squares_slope(&rows);
            log::info!("least-squares slope of log(-alpha_1) vs log n: {slope}");
            let write = |w: &mut dyn Write| -> Result<()> {
                let mut csv = csv::Writer::from_writer(w);
                for r in &rows {
                    csv.serialize(r)?;
                }
                csv.flush()?;
                Ok(())
            };
            match out {
                Some(p) => {
                    with_output(Some(&p), stdout, write)?;
                    print_json(
                        stdout,
                        &ScalingSummary {
                            family,
                            n_list,
                            slope,
                        },
                    )
                }
                None => write(stdout),
            }
        }
    }
}

fn orbit_report(args: &OrbitArgs) -> Result<(Box<dyn VectorFieldModel>, MonodromyReport)> {
    check_positive("orbit-tol", args.orbit_tol)?;
    check_positive("tol-unit", args.tol_unit)?;
    check_nonneg("tol-minor", args.tol_minor)?;
    let base = ModelSpec::from_path(&args.model)?.build()?;
    let model: Box<dyn VectorFieldModel> = match args.period {
        Some(p) => {
            check_positive("period", p)?;
            if base.period() != 0.0 {
                return Err(TpdsError::InvalidArgument(format!(
                    "model `{}` already has period {}",
                    base.id(),
                    base.period()
                )));
            }
            Box::new(WithPeriod::new(base, p))
        }
        None => base,
    };
    let integrator = args.tol.integrator()?;
    let gamma0 = if args.find_orbit {
        let guess = &args.guess.as_ref().expect("clap enforces --guess").0;
        let opts = OrbitOptions {
            tol: args.orbit_tol,
            integrator,
            ..OrbitOptions::default()
        };
        flow::find_periodic_orbit_with(&*model, guess, &opts)?
    } else {
        args.gamma0.clone().expect("clap enforces one start").0
    };
    let opts = FloquetOptions {
        integrator,
        tol_unit: args.tol_unit,
        tol_minor: args.tol_minor,
        ..FloquetOptions::default()
    };
    let report = flow::monodromy_with(&*model, &gamma0, &opts)?;
    Ok((model, report))
}
