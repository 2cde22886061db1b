use thiserror::Error;

/// Errors raised by the engine. Each variant has a stable name (see
/// [`Error::name`]) that the command-line front end prints on failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands mix exact and numeric scalars")]
    ModeMismatch,
    #[error("{0} has no exact rational value")]
    ExactInfeasible(String),
    #[error("zero base in q-power")]
    ZeroBase,
    #[error("inner series has a nonzero constant term")]
    ConstantTermNonzero,
    #[error("series is not invertible: need c0 = 0 and c1 != 0")]
    NotInvertible,
    #[error("shift point is not a fixed point of the series")]
    NotFixedPoint,
    #[error("derivative vanishes at the fixed point")]
    DerivativeZero,
    #[error("index out of range: {0}")]
    BadRange(String),
    #[error("q is a root of unity: [{0}]_q vanishes")]
    QDegenerate(i64),
    #[error("exponent must be nonnegative for this method (got {0})")]
    NegativeExponent(i64),
    #[error("exponent must be an integer for this method")]
    IntegerExponentRequired,
    #[error("method requires f'(0) = 1")]
    UnitaryRequired,
    #[error("operation requires numeric mode")]
    NumericRequired,
    #[error("extracted form has a pole at p = {0}")]
    ExtractedPole(usize),
    #[error("triangle sizes differ ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("truncation order {0} exceeds the cap of {max}", max = crate::series::MAX_ORDER)]
    OrderTooLarge(usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0}")]
    Parse(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::ModeMismatch => "ModeMismatch",
            Error::ExactInfeasible(_) => "ExactInfeasible",
            Error::ZeroBase => "ZeroBase",
            Error::ConstantTermNonzero => "ConstantTermNonzero",
            Error::NotInvertible => "NotInvertible",
            Error::NotFixedPoint => "NotFixedPoint",
            Error::DerivativeZero => "DerivativeZero",
            Error::BadRange(_) => "BadRange",
            Error::QDegenerate(_) => "QDegenerate",
            Error::NegativeExponent(_) => "NegativeExponent",
            Error::IntegerExponentRequired => "IntegerExponentRequired",
            Error::UnitaryRequired => "UnitaryRequired",
            Error::NumericRequired => "NumericRequired",
            Error::ExtractedPole(_) => "ExtractedPole",
            Error::SizeMismatch(..) => "SizeMismatch",
            Error::OrderTooLarge(_) => "OrderTooLarge",
            Error::DivisionByZero => "DivisionByZero",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
