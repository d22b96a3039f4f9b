use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("index out of range: {0}")]
    Range(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("combinatorial explosion: C({p}, {m}) = {count} does not fit in 64 bits")]
    CombinatorialExplosion { p: usize, m: usize, count: String },

    #[error("subset budget exceeded: scan needs {required} subsets, budget is {budget}")]
    Budget { required: u64, budget: u64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize, best: Vec<f64> },

    #[error("closed-form eigenvalues are only available for sizes 1..=3, got {0}")]
    UnsupportedSize(usize),

    #[error("net construction failed: {0}")]
    NetConstruction(String),

    #[error("degenerate estimate: no tail hits in {reps} replications; increase reps or decrease n")]
    DegenerateEstimate { reps: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("replication {rep}: {source}")]
    Replication {
        rep: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The innermost error, looking through replication wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Replication { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
