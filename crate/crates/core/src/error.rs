use num_bigint::BigInt;
use thiserror::Error;

use crate::element::Element;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("denominator c must be nonzero")]
    ZeroDenominator,
    #[error("c = {c} does not divide a^2 - n = {numerator}")]
    NotDivisible { c: BigInt, numerator: BigInt },
    #[error(
        "triple ({a},{b},{c}) is not primitive (gcd = {})",
        crate::arith::gcd3(a, b, c)
    )]
    NotPrimitive { a: BigInt, b: BigInt, c: BigInt },
    #[error("n = {0} is a perfect square")]
    SquareN(BigInt),
    #[error("n = {0} must be positive")]
    NonPositiveN(BigInt),
    #[error("negative input {0}")]
    NegativeInput(BigInt),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("n = {n} exceeds the configured cap {cap}")]
    LimitExceeded { n: BigInt, cap: BigInt },
    #[error("{0} is not ambiguous")]
    NotAmbiguous(Element),
    #[error("{0}")]
    DichotomyViolation(Box<DichotomyViolation>),
    #[error("no cycle closed within {limit} steps from {start}")]
    CycleLimitExceeded { start: Element, limit: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("no orbit contains {0}")]
    UnknownOrbit(String),
    #[error("elements belong to different n ({0} vs {1})")]
    MismatchedN(BigInt, BigInt),
    #[error("{0} is not an odd prime")]
    NotOddPrime(BigInt),
    #[error("p = {p} does not divide n = {n}")]
    PNotDividesN { p: BigInt, n: BigInt },
    #[error("n = {0} is not divisible by 8")]
    NNotDivisibleBy8(BigInt),
    #[error("parse error at position {position}: {message}")]
    ParseError { position: usize, message: String },
    #[error("circuit has an odd number of blocks ({0})")]
    OddBlockCount(usize),
    #[error("no ambiguous element of class {class} exists for n = {n}")]
    EmptyClass { class: String, n: BigInt },
    #[error("format {0} is not supported for this report")]
    UnsupportedFormat(String),
    #[error("invalid theorem case: {0}")]
    InvalidCase(String),
    #[error("serialization failed: {0}")]
    Serialization(String),
}

/// Both or neither of `y(x(e))` and `y²(x(e))` are ambiguous.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error(
    "dichotomy violated at {element}: y(x(e)) = {via_y} ({y_amb}), y^2(x(e)) = {via_yy} ({yy_amb})",
    y_amb = if *.via_y_ambiguous { "ambiguous" } else { "not ambiguous" },
    yy_amb = if *.via_yy_ambiguous { "ambiguous" } else { "not ambiguous" }
)]
pub struct DichotomyViolation {
    pub element: Element,
    pub via_y: Element,
    pub via_yy: Element,
    pub via_y_ambiguous: bool,
    pub via_yy_ambiguous: bool,
}
