use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator word of length {len} exceeds the limit of {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("moment order k+l = {order} exceeds the limit of {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("the parity evaluation path needs a definite-parity profile")]
    ParityPathInvalid,

    #[error("displacement truncated at n = {cap}: tail norm {tail:e} exceeds {limit:e}")]
    TruncationError { cap: usize, tail: f64, limit: f64 },

    #[error("basis index {index} exceeds the basis cap {cap}")]
    BasisOverflow { index: usize, cap: usize },

    #[error("indices {lower} and {upper} are closer than the required spacing {required}")]
    SpacingViolation { lower: usize, upper: usize, required: usize },

    #[error("the lower-order moment block (order {order}) was not supplied")]
    MissingLowerOrder { order: usize },

    #[error("time step too large: {reason}")]
    StepTooLarge { reason: String },

    #[error("samples are not uniformly spaced over one window of power-of-two length")]
    NonUniformSampling,

    #[error("grid too small: {reason}")]
    GridTooSmall { reason: String },

    #[error("momentum power {l} exceeds the limit of {max}")]
    MomentumOrderTooHigh { l: usize, max: usize },

    #[error("the {engine} engine cannot produce {quantity}")]
    Unsupported { engine: String, quantity: String },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
