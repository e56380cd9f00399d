//! Shared error type. Domain errors carry enough context to locate the
//! offending index; syntax errors carry a byte offset into the input.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field size {p}^{nu} exceeds 2^16")]
    FieldTooLarge { p: u64, nu: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not a q-th power")]
    QthRootNotExist,
    #[error("negative tau power needs zero coefficients below level {level}")]
    ConstantTermObstruction { level: usize },
    #[error("quotient is not a polynomial ({context})")]
    NotPolynomial { context: String },
    #[error("enumeration of q^{count} polynomials exceeds the supported range")]
    EnumerationTooLarge { count: u64 },
    #[error("S_{0} = 0: the sigma sequence does not define a delta operator")]
    NotDeltaOperator(usize),
    #[error("requested index {requested} exceeds cached order {cached}")]
    OrderExceeded { requested: usize, cached: usize },
    #[error("series argument diverges: term {j} fails the valuation growth test")]
    DivergentAtPoint { j: usize },
    #[error("operand is zero to working precision")]
    ZeroToPrecision,
    #[error("exponent overflow: q^{k} does not fit in 64 bits")]
    ExponentOverflow { k: u64 },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown symbol `{name}` at byte {pos}")]
    UnknownSymbol { pos: usize, name: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
