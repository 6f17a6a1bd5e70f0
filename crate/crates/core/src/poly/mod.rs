//! Exact multivariate polynomials over the rationals in named variables.

mod monomial;
mod parse;
mod polynomial;
mod variable;

use thiserror::Error;

pub use monomial::{grevlex_cmp, Monomial};
pub use parse::parse;
pub use polynomial::Polynomial;
pub use variable::{Context, Variable};

pub(crate) use variable::is_identifier;

/// Coefficient field.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("variable context mismatch: [{left}] vs [{right}]")]
    ContextMismatch { left: String, right: String },
    #[error("no image given for variable {0}")]
    MissingImage(String),
    #[error("expected {expected} images, found {found}")]
    ImageCount { expected: usize, found: usize },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("unknown identifier '{name}' at offset {position}")]
    UnknownIdentifier { name: String, position: usize },
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("duplicate variable {0}")]
    DuplicateVariable(String),
    #[error("invalid variable name '{0}'")]
    InvalidName(String),
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
