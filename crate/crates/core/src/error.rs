use alloc::string::String;
use thiserror::Error;

/// Failures raised by the algebra, calculus and reconstruction layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("factor mismatch: {0}")]
    FactorMismatch(String),
    #[error("invalid factor descriptor: {0}")]
    InvalidFactor(String),
    #[error("invalid element: {0}")]
    InvalidElement(String),
    #[error("not a tripotent (residual {residual:.3e})")]
    NotTripotent { residual: f64 },
    #[error("Peirce spectrum leaves the {{0, 1/2, 1}} grid at eigenvalue {eigenvalue}")]
    PeirceDegenerate { eigenvalue: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A step of a reconstruction proof failed on the supplied map.
    #[error("{step} violated: {detail}")]
    Structure { step: String, detail: String },
    #[error("phase map value f(i) = {re:.6} + {im:.6}i is neither i nor -i")]
    DiscontinuousPhase { re: f64, im: f64 },
    #[error("factor routing violated: {0}")]
    FactorRouting(String),
    #[error("no automorphism form fits: {0}")]
    Classification(String),
    #[error("oracle table has no entry for the requested tripotent")]
    OracleMiss,
}

impl Error {
    pub(crate) fn structure(step: &str, detail: String) -> Self {
        Error::Structure { step: step.into(), detail }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
