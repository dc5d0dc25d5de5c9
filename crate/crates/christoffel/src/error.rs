//! Error type shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("measure has no nodes")]
    EmptyMeasure,

    #[error("weight {value} at node {index} is not positive")]
    NonpositiveWeight { index: usize, value: f64 },

    #[error("node {index} is not finite")]
    NonfiniteNode { index: usize },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(
        "orthogonalization pivot {index} collapsed (ratio {ratio:.3e}); \
         the measure cannot support {dim} orthonormal sections"
    )]
    RankDeficient {
        index: usize,
        ratio: f64,
        dim: usize,
    },

    #[error("vanishing order {order} must be smaller than the section count {k}")]
    OrderTooLarge { order: usize, k: usize },

    #[error("{op} did not converge within {sweeps} sweeps")]
    NoConvergence { op: &'static str, sweeps: usize },

    #[error("matrix deviates from Hermitian symmetry by {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("first measure is not nodewise dominated by the second")]
    DominationViolated,

    #[error("kernel diagonal vanishes at {point} (base locus)")]
    BaseLocus { point: Complex64 },

    #[error("denominator symbol vanishes at node {index}")]
    DenominatorVanishes { index: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit code the command-line driver maps this error to: 2 for
    /// configuration and input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Config(_) | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
