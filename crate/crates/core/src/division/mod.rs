//! Exact division by harmonic divisors.
//!
//! * [`divide_by_harmonic`]: polynomial division by a homogeneous harmonic
//!   polynomial, by leading-term reduction.
//! * [`series_ratio`]: the Taylor series of `u / v` about a common zero,
//!   computed coefficient by coefficient in the trailing order and then
//!   checked against the full product.
//! * [`bound_certificate`] / [`verify_certificate`]: constants `A, R` with
//!   `|f_β| ≤ A R^β`, giving a polydisc of convergence for the ratio.

mod certificate;
mod polynomial_division;
mod ratio;
mod series;

use thiserror::Error;

use crate::poly::{MultiIndex, PolyError, Polynomial, RationalOrthogonalMatrix};

pub use certificate::{
    bound_certificate, certify_ratio, coefficient_bound_check, measure_coefficient_bound,
    verify_certificate, BoundCertificate, CertifiedRatio,
};
pub use polynomial_division::divide_by_harmonic;
pub(crate) use ratio::ratio_coefficients;
pub use ratio::{multi_divide, normalize_rotation, normalize_rotation_with, series_ratio, RotationSearch};
pub use series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quotient {
    Polynomial(Polynomial),
    Series(TruncatedSeries),
}

impl Quotient {
    pub fn as_polynomial(&self) -> &Polynomial {
        match self {
            Quotient::Polynomial(p) => p,
            Quotient::Series(s) => s.coefficients(),
        }
    }

    pub fn as_series(&self) -> Option<&TruncatedSeries> {
        match self {
            Quotient::Series(s) => Some(s),
            Quotient::Polynomial(_) => None,
        }
    }
}

/// Result of a successful division.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionOutcome {
    pub quotient: Quotient,
    /// Multiplying back reproduced the dividend exactly (up to the truncation
    /// degree for series).
    pub residual_verified: bool,
    pub certificate: Option<BoundCertificate>,
    /// Change of variables used to make the divisor's `(k,0,…,0)` coefficient
    /// non-zero, if one was needed.
    pub rotation: Option<RationalOrthogonalMatrix>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DivisionError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("divisor is identically zero")]
    ZeroDivisor,
    #[error("divisor is not homogeneous")]
    NotHomogeneous,
    #[error("divisor is not harmonic")]
    NotHarmonic,
    #[error("not divisible: {reason}")]
    NotDivisible { degree: u32, monomial: Option<MultiIndex>, reason: String },
    #[error("series centers differ")]
    CenterMismatch,
    #[error("inputs truncated at degree {available}, need at least {required}")]
    InsufficientDegree { required: u32, available: u32 },
    #[error("residual u - v*f is non-zero at {index} (degree {degree})")]
    ResidualNonzero { index: MultiIndex, degree: u32 },
    #[error("input is identically zero")]
    ZeroInput,
    #[error("rotation search exhausted after {tried} candidates (bound {bound})")]
    SearchExhausted { tried: usize, bound: usize },
    #[error("divisor {index}: {source}")]
    AtDivisor {
        index: usize,
        #[source]
        source: Box<DivisionError>,
    },
    #[error("invalid certificate input: {0}")]
    InvalidInput(String),
}

impl DivisionError {
    /// Strips divisor annotations.
    pub fn root_cause(&self) -> &DivisionError {
        match self {
            DivisionError::AtDivisor { source, .. } => source.root_cause(),
            other => other,
        }
    }
}
