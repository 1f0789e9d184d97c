use thiserror::Error;

/// Errors raised by the solver, the diagnostics and the stability tools.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scheme pairing violation: {0}")]
    Pairing(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("non-positive state in cell {cell:?}: rho = {rho}, T = {temperature}")]
    NonpositiveState {
        cell: Option<usize>,
        rho: f64,
        temperature: f64,
    },

    #[error("velocity grid needs at least 3 distinct nodes, got {nodes}")]
    RankDeficientGrid { nodes: usize },

    #[error(
        "Newton iteration did not converge in cell {cell:?}: residual {residual:e} after {iterations} iterations"
    )]
    NewtonDiverged {
        cell: Option<usize>,
        residual: f64,
        iterations: usize,
    },

    #[error("singular Newton Jacobian in cell {cell:?} (pivot ratio {pivot_ratio:e})")]
    SingularJacobian {
        cell: Option<usize>,
        pivot_ratio: f64,
    },

    #[error("discrete Maxwellian in cell {cell:?} does not decay in v (a[2] = {quadratic})")]
    NonDecaying { cell: Option<usize>, quadratic: f64 },

    #[error("characteristic foot at offset {offset} cells leaves the halo of width {halo}")]
    StencilOutOfDomain { offset: f64, halo: usize },

    #[error("gamma = {gamma} is a root of the tableau denominators")]
    DegenerateGamma { gamma: f64 },

    #[error("polynomial root finder failed: {0}")]
    RootFinder(String),

    #[error("exact Riemann solver: {0}")]
    Riemann(String),

    #[error("vacuum forms between the Riemann states")]
    VacuumFormed,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("malformed file: {0}")]
    Parse(String),

    #[error("step {step} (t = {t}) failed: {source}")]
    StepFailed {
        step: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attaches a cell index to the per-cell Maxwellian failures.
    pub fn in_cell(self, index: usize) -> Self {
        match self {
            Error::NewtonDiverged {
                residual,
                iterations,
                ..
            } => Error::NewtonDiverged {
                cell: Some(index),
                residual,
                iterations,
            },
            Error::SingularJacobian { pivot_ratio, .. } => Error::SingularJacobian {
                cell: Some(index),
                pivot_ratio,
            },
            Error::NonDecaying { quadratic, .. } => Error::NonDecaying {
                cell: Some(index),
                quadratic,
            },
            Error::NonpositiveState {
                rho, temperature, ..
            } => Error::NonpositiveState {
                cell: Some(index),
                rho,
                temperature,
            },
            other => other,
        }
    }

    /// True for failures of the numerical method itself, as opposed to bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        if let Error::StepFailed { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::NonpositiveState { .. }
                | Error::NewtonDiverged { .. }
                | Error::SingularJacobian { .. }
                | Error::NonDecaying { .. }
                | Error::StencilOutOfDomain { .. }
                | Error::RootFinder(_)
                | Error::Riemann(_)
                | Error::VacuumFormed
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Parse(e.to_string())
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
