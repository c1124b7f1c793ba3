//! Floating-point checks of analytic properties of ratios `u / v`.
//!
//! Tolerances are stated in every report. Zero detection defaults to
//! `|w| < 1e-10 · magnitude(w)` with gradient tolerance `1e-8`.

mod checks;
mod nodal;
mod quadrature;
mod ratio_field;
mod zeroset;

use num_bigint::BigInt;
use thiserror::Error;

use crate::division::DivisionError;
use crate::poly::Rational;
use crate::region::RegionError;

pub use checks::{
    elliptic_convergence, elliptic_residual, harnack_constant, leading_zero_inclusion, max_principle_check,
    sign_change_check, sphere_orthogonality,
};
pub use nodal::{
    critical_set_sample, depth_of_series, depth_of_zero, nodal_domain_count, CriticalPoint, NodalAnalysisReport,
    NodalCount,
};
pub use quadrature::gauss_legendre;
pub use ratio_field::{RatioField, RatioValue};
pub use zeroset::{zero_set_sample, zero_set_slice, ZeroSet};

pub const ZERO_TOL: f64 = 1e-10;
pub const GRADIENT_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("ratio vanishes at {at:?} (|f| = {value:e}); the pair does not share its zero set")]
    RatioVanishes { at: Vec<f64>, value: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point is not a zero (value {0})")]
    NotAZero(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Division(#[from] DivisionError),
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|t| t * t).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    crate::region::dist(a, b)
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions), accepted if within `tol` of `x`.
pub(crate) fn snap_rational(x: f64, max_den: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    let mut best = None;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        best = Some((h1, k1));
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol * 1e-3 {
            break;
        }
        let frac = r - a;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    let (h, k) = best?;
    if ((h as f64) / (k as f64) - x).abs() > tol {
        return None;
    }
    Some(Rational::new(BigInt::from(h), BigInt::from(k)))
}

pub(crate) fn snap_point(x: &[f64], max_den: i64, tol: f64) -> Option<Vec<Rational>> {
    x.iter().map(|&t| snap_rational(t, max_den, tol)).collect()
}
