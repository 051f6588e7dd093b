use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The result would overflow `f64`.
    #[error("range error: {0}")]
    Range(String),

    #[error("invalid intensity model: {0}")]
    Model(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Whitening met a (numerically) rank-deficient Gram matrix.
    #[error(
        "singular Gram matrix: {null_dims} near-null direction(s) out of {dim} \
         (smallest eigenvalue {smallest:.3e}, largest {largest:.3e})"
    )]
    Singular {
        dim: usize,
        null_dims: usize,
        smallest: f64,
        largest: f64,
    },

    #[error("PLV undefined: the spike data contain no spikes")]
    UndefinedPlv,

    #[error("degenerate rate: {0}")]
    DegenerateRate(String),

    #[error("cannot normalize: units with zero spikes {0:?}")]
    ZeroRateUnits(Vec<u64>),

    #[error(
        "eigensolver did not converge after {sweeps} sweeps \
         (off-diagonal norm {off_norm:.3e}, matrix norm {norm:.3e})"
    )]
    NoConvergence {
        sweeps: usize,
        off_norm: f64,
        norm: f64,
    },

    /// Malformed input file; `location` names the line or JSON field.
    #[error("{file}: {location}: {message}")]
    Parse {
        file: String,
        location: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by the numerics rather than by invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NoConvergence { .. }
                | Error::Range(_)
                | Error::DegenerateRate(_)
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
