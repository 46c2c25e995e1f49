use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid precision context: {0}")]
    InvalidContext(String),

    #[error("operands live in different precision contexts")]
    ContextMismatch,

    #[error("one-form is not integrable over W at coefficient index {index}")]
    NonIntegrable { index: usize },

    #[error("p-adic precision exhausted (needed {needed} digits, have {available})")]
    PrecisionExhausted { needed: u32, available: u32 },

    #[error("height {0} outside the supported range 2..=10")]
    UnsupportedHeight(usize),

    #[error("presentation is not constant: {0}")]
    NotConstant(String),

    #[error("Newton polygon is not determined at the working precision: {0}")]
    PrecisionInsufficient(String),

    #[error("matrix is not invertible at the working precision")]
    NonInvertible,

    #[error("Tate twist {twist} too small to clear denominators (need at least {required})")]
    TwistTooSmall { twist: i64, required: i64 },

    #[error("pairing restricted to the subspace is not perfect")]
    NotPerfect,

    #[error("submodule is not stable: {0}")]
    NotStable(String),

    #[error("presentation does not have extension shape: {0}")]
    NotExtensionShaped(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("witness does not satisfy the trivialization equations for p*e: {0}")]
    WitnessInvalid(String),

    #[error("geometric hypothesis missing: {0}")]
    HypothesisMissing(String),

    #[error("tangent coordinates need base degree 2, got {0}")]
    WrongBase(usize),

    #[error("deformation point invariant violated: {0}")]
    InvalidPoint(String),

    #[error("malformed document: {0}")]
    Parse(String),
}
