use num_rational::BigRational;
use thiserror::Error;

/// Errors surfaced by every layer of the crate. The variants mirror the
/// failure modes of the operations that raise them; `NeedsRefinement` and
/// `Unstabilized` are recoverable signals that callers answer by retrying
/// with a larger precision target or stage cap.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("mixed value-group contexts (rank-1 vs lexicographic)")]
    ContextMismatch,
    #[error("PosInf + NegInf is undefined")]
    UndefinedSum,
    #[error("operation undefined on an infinite value")]
    InvalidValue,
    #[error("residue undefined: element has negative valuation")]
    NegativeValue,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("zero element has no value")]
    ZeroElement,
    #[error("key polynomial must be monic of degree >= 1")]
    NonMonicKey,
    #[error("pairs have different gamma; the equivalence criterion applies at fixed gamma")]
    GammaMismatch,
    #[error("insufficient precision, need at least {0}")]
    NeedsRefinement(BigRational),
    #[error("approximation certificate does not select a root: {0}")]
    BadCertificate(String),
    #[error("value did not stabilize within stage cap {0}")]
    Unstabilized(usize),
    #[error("unsupported tower step: {0}")]
    UnsupportedTower(String),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("inseparable polynomial: cannot enumerate roots")]
    Inseparable,
    #[error("residual factorisation not supported over this residue field: {0}")]
    UnsupportedResidual(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Machine-readable kind tag used by the CLI reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ContextMismatch => "ContextMismatch",
            Error::UndefinedSum => "UndefinedSum",
            Error::InvalidValue => "InvalidValue",
            Error::NegativeValue => "NegativeValue",
            Error::DivisionByZeroPoly => "DivisionByZeroPoly",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::ZeroElement => "ZeroElement",
            Error::NonMonicKey => "NonMonicKey",
            Error::GammaMismatch => "GammaMismatch",
            Error::NeedsRefinement(_) => "NeedsRefinement",
            Error::BadCertificate(_) => "BadCertificate",
            Error::Unstabilized(_) => "Unstabilized",
            Error::UnsupportedTower(_) => "UnsupportedTower",
            Error::RingMismatch => "RingMismatch",
            Error::Inseparable => "Inseparable",
            Error::UnsupportedResidual(_) => "UnsupportedResidual",
            Error::Invalid(_) => "Invalid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
