use thiserror::Error;

/// Errors produced by the library. Each variant carries enough context to
/// say which input was rejected.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not normalized (trace {trace})")]
    NotNormalized { trace: f64 },
    #[error("invalid rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },
    #[error("purity {purity} cannot be reached with rank {rank}")]
    UnachievablePurity { purity: f64, rank: usize },
    #[error("purity {purity} is outside the branch domain {lo}..={hi}")]
    PurityOutOfBranch { purity: f64, lo: f64, hi: f64 },
    #[error("purity {purity} is outside {lo}..={hi}")]
    PurityOutOfRange { purity: f64, lo: f64, hi: f64 },
    #[error("operation requires a {expected} system, got dimension {got}")]
    WrongDimension { expected: String, got: usize },
    #[error("bad probability distribution: {0}")]
    BadDistribution(String),
    #[error("unsupported dimension n_a = {n_a}: {what}")]
    UnsupportedDimension { n_a: usize, what: String },
    #[error("optimizer did not converge (best objective {best:.6e}, {evaluations} evaluations)")]
    OptimizerNotConverged { best: f64, evaluations: usize },
    #[error("marginals are not maximally mixed (deviation {deviation:.3e})")]
    MarginalsNotMaximallyMixed { deviation: f64 },
    #[error("argument {value} outside the domain of {function}")]
    DomainError { function: &'static str, value: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("channel is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
