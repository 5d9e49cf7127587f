use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("beta vector rejected: {0}")]
    InvalidBeta(String),

    #[error("search space too large: {0}")]
    SearchTooLarge(String),

    #[error("place is not regular: {0}")]
    NotRegular(String),

    #[error("analytic continuation failed: {0}")]
    Continuation(String),

    #[error("homology construction failed: {0}")]
    Homology(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("theta evaluation: {0}")]
    Theta(String),

    #[error("riemann constant search: {0}")]
    RiemannConstant(String),

    #[error("characteristic recovery: {0}")]
    Characteristic(String),

    #[error("series fit: {0}")]
    SeriesFit(String),

    #[error("verification: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
