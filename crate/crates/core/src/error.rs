use thiserror::Error;

/// Errors produced by the factorization kernels, problem generators and
/// solvers in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be nonempty")]
    EmptyMatrix,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("SVD did not converge for a {rows}x{cols} matrix")]
    SvdFailed { rows: usize, cols: usize },

    #[error("stacked matrix [A; L] is rank deficient: null spaces intersect nontrivially")]
    RankDeficientStack,

    #[error("stacked [Qa; Ql] does not have orthonormal columns (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown test problem `{0}`")]
    UnknownProblem(String),

    #[error("cannot add relative noise to a zero right-hand side")]
    ZeroRhsNoise,

    #[error("parameter selection failed: {0}")]
    SelectionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
