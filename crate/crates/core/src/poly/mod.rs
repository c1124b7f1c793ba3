//! Exact multi-index and sparse polynomial arithmetic over the rationals.

mod format;
mod multiindex;
mod polynomial;
mod rotation;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use format::{format_rational, parse_polynomial, parse_rational, write_polynomial};
pub(crate) use format::{parse_document, write_terms};
pub use multiindex::{indices_of_degree, indices_up_to, order_compare, MultiIndex};
pub use polynomial::{FloatPoly, Polynomial};
pub use rotation::{rotate, RationalMatrix, RationalOrthogonalMatrix};

pub type Rational = BigRational;

/// `num / den` as a [`Rational`].
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero polynomial has no leading part")]
    ZeroPolynomial,
    #[error("matrix is not orthogonal")]
    NotOrthogonal,
    #[error("matrix is singular")]
    Singular,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
