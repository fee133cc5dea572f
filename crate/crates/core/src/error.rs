use thiserror::Error;

/// Errors raised by every operation in the crate.
///
/// Variants split into two families: bad input or a numerical procedure that
/// could not finish (`ErrorKind::Domain`), and a theoretical property that the
/// computed result violates (`ErrorKind::Property`). The CLI maps these to
/// exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum TpdsError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix of order {n} exceeds the exhaustive-minor limit {max}")]
    TooLarge { n: usize, max: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("eigenvalues {index} and {next} are not separated: gap {gap:e} <= {tol:e}", next = index + 1)]
    NotSimple { index: usize, gap: f64, tol: f64 },

    #[error("spectrum not real: complex pair {re} +/- {im}i")]
    SpectrumNotReal { re: f64, im: f64 },

    #[error("eigenpair {index} residual {residual:e} exceeds {tol:e}")]
    ResidualTooLarge {
        index: usize,
        residual: f64,
        tol: f64,
    },

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("state left the model domain at t = {t}")]
    DomainExit { t: f64, state: Vec<f64> },

    #[error("step size underflow at t = {t} (h = {h:e}); problem may be stiff")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    MaxStepsExceeded { t: f64, max_steps: usize },

    #[error("trajectory diverged at t = {t} (norm {norm:e})")]
    Divergence { t: f64, norm: f64 },

    #[error("period-map Newton stalled with residual {residual:e}")]
    NewtonStall { residual: f64, best: Vec<f64> },

    #[error("monodromy not TP-consistent: {0}")]
    NotTpConsistent(Box<TpdsError>),

    #[error("property failure: {0}")]
    PropertyFailure(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Domain,
    Property,
}

impl TpdsError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            TpdsError::NotSimple { .. }
            | TpdsError::SpectrumNotReal { .. }
            | TpdsError::ResidualTooLarge { .. }
            | TpdsError::NotTpConsistent(_)
            | TpdsError::PropertyFailure(_) => ErrorKind::Property,
            _ => ErrorKind::Domain,
        }
    }

    /// Short machine-readable tag used in structured error output.
    pub fn tag(&self) -> &'static str {
        match self {
            TpdsError::Dimension(_) => "dimension",
            TpdsError::InvalidArgument(_) => "invalid_argument",
            TpdsError::Precondition(_) => "precondition",
            TpdsError::TooLarge { .. } => "too_large",
            TpdsError::Singular => "singular",
            TpdsError::NotSimple { .. } => "not_simple",
            TpdsError::SpectrumNotReal { .. } => "spectrum_not_real",
            TpdsError::ResidualTooLarge { .. } => "residual_too_large",
            TpdsError::NoConvergence { .. } => "no_convergence",
            TpdsError::DomainExit { .. } => "domain_exit",
            TpdsError::StepSizeUnderflow { .. } => "step_size_underflow",
            TpdsError::MaxStepsExceeded { .. } => "max_steps_exceeded",
            TpdsError::Divergence { .. } => "divergence",
            TpdsError::NewtonStall { .. } => "newton_stall",
            TpdsError::NotTpConsistent(_) => "monodromy_not_tp_consistent",
            TpdsError::PropertyFailure(_) => "property_failure",
            TpdsError::Io(_) => "io",
            TpdsError::Json(_) => "json",
            TpdsError::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, TpdsError>;
