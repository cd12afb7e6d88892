use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vector: {0}")]
    InvalidVector(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("support overflow: {0} atoms exceeds cap {1}")]
    SupportOverflow(usize, usize),
    #[error("test function not evaluable: {0}")]
    EvalFailure(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("zero mean: Paley-Zygmund requires E|Xi| > 0")]
    ZeroMean,
    #[error("bound violation: atom with norm {0} >= L = {1}")]
    BoundViolation(f64, f64),
    #[error("no feasible constant c <= {0}")]
    Infeasible(f64),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("replay mismatch: {0}")]
    ReplayMismatch(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable process exit code contract: 0 pass, 1 check failed,
    /// 2 config error, 3 internal/overflow error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConfigInvalid(_) => 2,
            _ => 3,
        }
    }
}
