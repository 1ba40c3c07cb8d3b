use thiserror::Error;

pub type Result<T> = std::result::Result<T, FormError>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("discriminant {0} is a perfect square")]
    SquareDiscriminant(String),
    #[error("the zero form has no content")]
    ZeroForm,
    #[error("form {0} is not primitive")]
    Imprimitive(String),
    #[error("{0} is not a discriminant (must be 0 or 1 mod 4)")]
    BadResidue(String),
    #[error("{what} = {value} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        value: String,
        bound: String,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("continued fraction period exceeded {0} steps")]
    PeriodCap(u64),
    #[error("value {0} does not fit the scalar type")]
    Overflow(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

impl FormError {
    /// Stable machine-readable code used by the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            FormError::SquareDiscriminant(_) => "square_discriminant",
            FormError::ZeroForm => "zero_form",
            FormError::Imprimitive(_) => "imprimitive",
            FormError::BadResidue(_) => "bad_residue",
            FormError::BoundExceeded { .. } => "bound_exceeded",
            FormError::Precondition(_) => "precondition",
            FormError::PeriodCap(_) => "period_cap",
            FormError::Overflow(_) => "overflow",
            FormError::NotPrime(_) => "not_prime",
            FormError::Parse { .. } => "parse",
        }
    }
}
