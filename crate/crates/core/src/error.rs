use thiserror::Error;

/// Errors raised across the crate.
///
/// The variants map onto the three failure classes of the command line tool:
/// configuration problems (bad flags, unreadable or malformed input), contract
/// violations raised by a computation, and failed verification checks.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown simplex {0:?}")]
    UnknownSimplex(Vec<usize>),

    #[error("simplex budget of {budget} exceeded while enumerating cliques")]
    Budget { budget: usize },

    #[error("ill-conditioned reduction: entry magnitude {magnitude:e} exceeds 1/eps")]
    IllConditioned { magnitude: f64 },

    #[error("vertices {0} and {1} share no simplex")]
    EmptyIntersection(usize, usize),

    #[error("class is essential and has no death simplex")]
    Essential,

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
