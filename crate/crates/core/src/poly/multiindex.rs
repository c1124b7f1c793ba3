//! Multi-indices and the orderings used throughout the crate.
//!
//! Two orders matter:
//!
//! * the *trailing* order `≺`, which compares exponent vectors starting from
//!   the last coordinate (`γ ≺ β` iff at the last position where they differ,
//!   `γ_i < β_i`). It is the order in which ratio coefficients are computed.
//! * the *graded* order: total degree first, ties broken by `≺`. This is the
//!   `Ord` impl of [`MultiIndex`] and therefore the iteration order of every
//!   sparse map in the crate. It is a monomial order (compatible with
//!   multiplication), so it also drives leading-term division.

use std::cmp::Ordering;
use std::fmt;

use super::PolyError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The index `(k, 0, …, 0)`.
    pub fn first_axis(dim: usize, k: u32) -> Self {
        let mut e = vec![0; dim];
        if dim > 0 {
            e[0] = k;
        }
        MultiIndex(e)
    }

    /// Unit index `δ_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some coordinate would go negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// Componentwise partial order `self ≤ other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// The trailing order `≺`. Panics in debug builds on a dimension mismatch;
    /// use [`order_compare`] for the checked variant.
    pub fn trailing_cmp(&self, other: &MultiIndex) -> Ordering {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }

    pub fn factorial(&self) -> num_bigint::BigUint {
        let mut acc = num_bigint::BigUint::from(1u32);
        for &e in &self.0 {
            for j in 2..=e {
                acc *= j;
            }
        }
        acc
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim()
            .cmp(&other.dim())
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| self.trailing_cmp(other))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl<const N: usize> From<[u32; N]> for MultiIndex {
    fn from(v: [u32; N]) -> Self {
        MultiIndex(v.to_vec())
    }
}

/// Checked comparison under `≺`.
pub fn order_compare(a: &MultiIndex, b: &MultiIndex) -> Result<Ordering, PolyError> {
    if a.dim() != b.dim() {
        return Err(PolyError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.trailing_cmp(b))
}

/// All multi-indices of dimension `dim` with total degree exactly `degree`,
/// in graded order.
pub fn indices_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    fill(&mut cur, 0, degree, &mut out);
    out.sort();
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    if cur.is_empty() {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        fill(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

/// All multi-indices with total degree at most `max_degree`, in graded order.
pub fn indices_up_to(dim: usize, max_degree: u32) -> Vec<MultiIndex> {
    (0..=max_degree)
        .flat_map(|d| indices_of_degree(dim, d))
        .collect()
}
