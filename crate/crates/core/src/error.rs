use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("moment {index} requested from measure {measure}, but its table only has {len} entries")]
    OutOfTable { measure: usize, index: usize, len: usize },

    #[error("unknown analytic moment formula {0:?}")]
    UnknownFormula(String),

    #[error("invalid measure system: {0}")]
    InvalidSystem(String),

    #[error("multi-index for n = {n} is not normal (moment matrix rank {rank} < {n})")]
    NotNormal { n: usize, rank: usize },

    #[error("linear system broke down during elimination ({0})")]
    SingularSystem(String),

    #[error("vanishing pivot: {0}")]
    ZeroPivot(String),

    #[error("recurrence table has rows 0..{available}, but row {needed} is required")]
    TableTooShort { needed: usize, available: usize },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    QrNoConvergence { sweeps: usize },

    #[error("zeros of P_{n} are not simple (minimum gap {gap:e})")]
    NonSimpleZeros { n: usize, gap: f64 },

    #[error("eigenvector residual {residual:e} exceeds bound {bound:e}")]
    ResidualTooLarge { residual: f64, bound: f64 },

    #[error("no index i with P_(n-i) non-vanishing at the node")]
    NoValidIndex,

    #[error("independent formulas disagree: {0}")]
    FormulaMismatch(String),

    #[error("triangular system has a zero diagonal entry at position {0}")]
    SingularTriangular(usize),

    #[error("quadrature nodes are not pairwise distinct")]
    DuplicateNodes,

    #[error("left/right eigenvector inner product is degenerate")]
    DegenerateInnerProduct,

    #[error("weight routes disagree: gap {gap:e} exceeds tolerance {tol:e}")]
    WeightMismatch { gap: f64, tol: f64 },

    #[error("rule has complex nodes; a discrete real measure cannot be formed")]
    ComplexNodes,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// `true` for failures caused by malformed or unusable input rather than by a
    /// failed numerical verification.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::OutOfTable { .. } | Error::UnknownFormula(_) | Error::InvalidSystem(_) | Error::Parse(_)
        )
    }
}
