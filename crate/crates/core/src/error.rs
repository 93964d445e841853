use thiserror::Error;

/// Errors raised by the algebra, blow-up and quotient layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field F_{p}^{k} is too large (at most 65536 elements supported)")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("extension degree must be at least 1")]
    ZeroExtension,
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("operands have different variable counts ({left} vs {right})")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("series is not a unit (zero constant term)")]
    NotAUnit,
    #[error("{what} has no root of index {r} in F_{p}^{k}; rerun with a larger extension degree (--ext-k)")]
    NoRootInField { what: String, r: u64, p: u32, k: u32 },
    #[error("root index {r} is divisible by the characteristic {p}")]
    RDivisibleByP { r: u64, p: u32 },
    #[error("exponent not divisible by p in {0}")]
    ExponentNotDivisible(String),
    #[error("gcd of an all-zero list")]
    AllZero,
    #[error("derivation is not p-closed")]
    NotPClosed,
    #[error("p-closedness witness is not regular at the origin: {0}")]
    NonDivisible(String),
    #[error("zero derivation")]
    ZeroDerivation,
    #[error("pullback is not polynomial: {0}")]
    NonPolynomialResult(String),
    #[error("center is not on the exceptional divisor")]
    CenterNotOnExceptional,
    #[error("center coordinates lie outside the coefficient field")]
    CoordinatesOutsideField,
    #[error("normal form not reachable: {0}")]
    NotInNormalFormReach(String),
    #[error("classification is implemented for p in {{2, 3, 5}} only, got p = {0}")]
    UnsupportedCharacteristic(u32),
    #[error("basis conditions unattainable: {0}")]
    BasisConditionsUnattainable(String),
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("no relation found up to weighted degree {0}")]
    NoRelationFound(u64),
    #[error("lambda must satisfy 1 <= lambda <= p-1, got {lambda} for p = {p}")]
    InvalidLambda { p: u32, lambda: u32 },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InsufficientPrecision(_)
            | Error::PrecisionTooLow(_)
            | Error::NoRelationFound(_) => 2,
            Error::NoRootInField { .. } | Error::CoordinatesOutsideField => 3,
            Error::InternalConsistency(_) => 4,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
