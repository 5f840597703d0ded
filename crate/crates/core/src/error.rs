use num_complex::Complex64;

/// Errors raised by the simulator.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("translation offset {offset} out of range for extent {extent}")]
    OffsetOutOfRange { offset: i64, extent: usize },

    #[error("total probability is zero")]
    ZeroProbability,

    #[error("dense dimension {dim} exceeds the limit of {limit}")]
    DenseTooLarge { dim: usize, limit: usize },

    #[error("QR iteration did not converge after {iterations} iterations ({converged} of {dim} eigenvalues found)")]
    QrNoConvergence {
        iterations: usize,
        converged: usize,
        dim: usize,
    },

    #[error(
        "eigensolver failed: best Ritz value {best} (distance {distance:.3e} from target, residual {residual:.3e}) after {iterations} iterations"
    )]
    EigenSolver {
        best: Complex64,
        distance: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("vanishing left/right overlap {0:.3e}")]
    VanishingOverlap(f64),

    #[error("non-finite amplitude detected at step {step}")]
    NonFinite { step: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code for the CLI.
    ///
    /// 2 configuration, 3 solver, 4 numerical blow-up, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidLattice(_)
            | Error::LatticeMismatch(_)
            | Error::InvalidParameter { .. }
            | Error::OffsetOutOfRange { .. }
            | Error::DenseTooLarge { .. }
            | Error::Config { .. } => 2,
            Error::QrNoConvergence { .. } | Error::EigenSolver { .. } | Error::VanishingOverlap(_) => 3,
            Error::ZeroProbability | Error::NonFinite { .. } => 4,
            Error::Io(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
