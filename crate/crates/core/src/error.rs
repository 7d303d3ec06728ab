use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mu/nu have no real solution: discriminant {discriminant:e} < 0")]
    ComplexRoots { discriminant: f64 },

    #[error("mu/nu would be negative: roots ({lo}, {hi})")]
    NegativeRoot { lo: f64, hi: f64 },

    #[error("series constant term must be 1, got {re}+{im}i")]
    NonUnitConstantTerm { re: f64, im: f64 },

    #[error("series constant term must be 0, got {re}+{im}i")]
    NonZeroConstantTerm { re: f64, im: f64 },

    #[error("denominator vanishes at z = {re}+{im}i")]
    ZeroDenominator { re: f64, im: f64 },

    #[error("hypergeometric denominator parameter {0} is a non-positive integer")]
    BadDenominator(f64),

    #[error("series does not converge: {0}")]
    DivergentSeries(String),

    #[error("log-gamma needs a positive argument, got {0}")]
    NonPositiveArgument(f64),

    #[error("quadrature on [{lo}, {hi}] did not converge (estimate {value}, error {err:e})")]
    NoConvergence {
        lo: f64,
        hi: f64,
        value: f64,
        err: f64,
    },

    #[error("weight parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("beta/(1-beta) = {0} is at or below -1; no admissible beta")]
    RatioIsMinusOne(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("no parameter table for operator `{0}`")]
    UnknownOperator(String),

    #[error("not covered: {0}")]
    NotCovered(String),

    #[error("series tail {tail:e} too large at radius {radius}")]
    TailTooLarge { tail: f64, radius: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
