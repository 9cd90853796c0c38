use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdqError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: pochhammer({a}, {n}) overflows")]
    Range { a: f64, n: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("weight/eta incompatible: {0}")]
    WeightEta(String),

    #[error("series S divergence: {0}; use Abel mode")]
    SeriesDivergence(String),

    #[error("S undefined: {0}")]
    SeriesUndefined(String),

    #[error("Abel sum unreliable: {0}")]
    AbelUnreliable(String),

    #[error("kappa not constant: {0}")]
    KappaNotConstant(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for AdqError {
    fn from(e: std::io::Error) -> Self {
        AdqError::Io(e.to_string())
    }
}

impl AdqError {
    /// True for failures of an iterative or limiting procedure, as opposed to bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            AdqError::Numeric(_)
                | AdqError::SeriesDivergence(_)
                | AdqError::SeriesUndefined(_)
                | AdqError::AbelUnreliable(_)
                | AdqError::KappaNotConstant(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, AdqError>;
