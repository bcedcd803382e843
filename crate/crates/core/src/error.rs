use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate interpolation: evaluation point {0} repeated or zero")]
    DegenerateInterpolation(u64),

    #[error("participant set {0} is not qualified")]
    NotQualified(String),

    #[error("enumeration of {size} outcomes exceeds budget of {budget}")]
    EnumerationTooLarge { size: u128, budget: u128 },

    #[error("LP over {elements} ground elements exceeds the cap of {cap}")]
    ProblemTooLarge { elements: usize, cap: usize },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
