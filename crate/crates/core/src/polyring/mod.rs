//! Exact arithmetic substrate: rationals, sparse commutative polynomials and
//! truncated bivariate power series.

mod poly;
mod rational;
mod series;

pub use poly::{CommPoly, Monomial, VarSet, MAX_EXPONENT, MAX_VARS};
pub use rational::{ParseRationalError, Rational};
pub use series::{BiSeries, DEFAULT_SERIES_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomials live over different variable sets")]
    VarSetMismatch,
    #[error("series truncation bounds differ ({0} vs {1})")]
    BoundMismatch(u32, u32),
    #[error("1/(1 - t^0 u^0) diverges")]
    DivergentSeries,
    #[error("too many variables ({0}); at most {max} supported", max = MAX_VARS)]
    TooManyVariables(usize),
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("exponent exceeds {max}", max = MAX_EXPONENT)]
    ExponentOverflow,
    #[error("malformed canonical polynomial text at line {line}")]
    Parse { line: usize },
}
