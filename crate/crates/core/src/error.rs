use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("support is not pseudo-homogeneous: 1 is not in the row span")]
    NotPseudoHomogeneous,

    #[error("support columns {0} and {1} coincide")]
    DuplicateColumn(usize, usize),

    #[error("not a lift: the row space of the base is not contained in the row space of the lift")]
    NotALift,

    #[error("not representable over the declared basis: {0}")]
    NotRepresentable(String),

    #[error("support does not match the base of the lift")]
    SupportMismatch,

    #[error("could not parse {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero polynomial has no roots")]
    ZeroPolynomial,

    #[error("root finder did not converge: {0}")]
    NoConvergence(String),

    #[error("x = {x} lies within {tolerance:e} of log|root| = {log_modulus}")]
    OnAmoeba {
        x: f64,
        log_modulus: f64,
        tolerance: f64,
    },

    #[error("point is on the amoeba or ill-conditioned: {0}")]
    OnAmoebaOrIllConditioned(String),

    #[error("support is not algebraic (integer exponents required)")]
    NotAlgebraic,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable variant name for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::BasisMismatch(_) => "BasisMismatch",
            Self::ShapeMismatch(_) => "ShapeMismatch",
            Self::NotPseudoHomogeneous => "NotPseudoHomogeneous",
            Self::DuplicateColumn(..) => "DuplicateColumn",
            Self::NotALift => "NotALift",
            Self::NotRepresentable(_) => "NotRepresentable",
            Self::SupportMismatch => "SupportMismatch",
            Self::Parse(_) => "Parse",
            Self::InvalidInput(_) => "InvalidInput",
            Self::ZeroPolynomial => "ZeroPolynomial",
            Self::NoConvergence(_) => "NoConvergence",
            Self::OnAmoeba { .. } => "OnAmoeba",
            Self::OnAmoebaOrIllConditioned(_) => "OnAmoebaOrIllConditioned",
            Self::NotAlgebraic => "NotAlgebraic",
        }
    }
}
