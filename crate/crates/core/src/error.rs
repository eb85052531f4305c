use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The input has no amplitude inside the photon window the teleporters
    /// can carry, so post-selection never succeeds.
    #[error("no successful branch: success probability is {0:e}")]
    NoSuccessfulBranch(f64),

    #[error("matrix is not Hermitian: max |M - M^H| = {0:e}")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("photon cap exceeded: {total} photons > cap {cap}")]
    CapExceeded { total: usize, cap: usize },

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
