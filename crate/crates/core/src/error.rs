use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state has zero norm or dimension below 2")]
    InvalidState,
    #[error("operator residual {residual:e} exceeds tolerance")]
    NotUnitary { residual: f64 },
    #[error("tracked eigenphase is degenerate at s = {s}")]
    Degenerate { s: f64 },
    #[error("refinement depth cap {cap} exceeded")]
    DepthCap { cap: usize },
    #[error("selected measurement branch has zero norm")]
    ZeroNormBranch,
    #[error("state leaves the two-dimensional span (residual {residual:e})")]
    OutsideSpan { residual: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("procedure did not terminate within {0} steps")]
    NonTermination(u64),
    #[error("ancilla is entangled with the system register")]
    Entangled,
}

pub type Result<T> = std::result::Result<T, Error>;
