use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("undefined denominator: {0}")]
    UndefinedDenominator(String),
    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("q-parameter mismatch between modules")]
    QParamMismatch,
    #[error("vanishing q-factorial at order {0} before the series truncates")]
    VanishingFactorial(usize),
    #[error("singular denominator at weight pair ({i}, {j})")]
    SingularDenominator { i: usize, j: usize },
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("no intertwiner: nullspace is empty")]
    EmptyNullspace,
    #[error("coefficients fail to commute (residual {0:e})")]
    NonCommuting(f64),
    #[error("order limit exceeded: {0}")]
    OrderLimit(String),
    #[error("malformed document: {0}")]
    Format(String),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UndefinedDenominator(_) => "undefined-denominator",
            Error::UnsupportedOrder(_) => "unsupported-order",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::OutOfRange(_) => "out-of-range",
            Error::QParamMismatch => "qparam-mismatch",
            Error::VanishingFactorial(_) => "vanishing-factorial",
            Error::SingularDenominator { .. } => "singular-denominator",
            Error::Inadmissible(_) => "inadmissible-parameters",
            Error::Divergent(_) => "divergent",
            Error::EmptyNullspace => "empty-nullspace",
            Error::NonCommuting(_) => "non-commuting",
            Error::OrderLimit(_) => "order-limit",
            Error::Format(_) => "format",
        }
    }

    /// Poles and singular evaluations, as opposed to bad input.
    pub fn is_singularity(&self) -> bool {
        matches!(
            self,
            Error::SingularDenominator { .. }
                | Error::VanishingFactorial(_)
                | Error::UndefinedDenominator(_)
                | Error::Divergent(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
