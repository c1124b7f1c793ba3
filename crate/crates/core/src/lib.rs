//! Exact division of harmonic polynomials and Taylor series, convergence
//! certificates for the resulting ratios, and floating-point checks of the
//! analytic properties of ratios of harmonic functions sharing a nodal set.

pub mod poly;
pub mod division;
pub mod catalog;
pub mod linalg;
pub mod region;
pub mod report;
pub mod verify;
