use std::collections::BTreeMap;

use num_traits::{Num, Zero};

use crate::poly::{indices_up_to, rat, MultiIndex, Polynomial, Rational, RationalOrthogonalMatrix};

use super::{DivisionError, DivisionOutcome, Quotient, TruncatedSeries};

/// Bounds for the search in [`normalize_rotation_with`].
#[derive(Clone, Debug)]
pub struct RotationSearch {
    /// Values tried for each skew-symmetric Cayley parameter.
    pub grid: Vec<Rational>,
    /// Total number of candidate matrices examined before giving up.
    pub max_candidates: usize,
}

impl Default for RotationSearch {
    fn default() -> Self {
        let grid = [2, 3, 4, 5].iter().flat_map(|&d| [rat(1, d), rat(-1, d)]).collect();
        RotationSearch {
            grid,
            max_candidates: 200_000,
        }
    }
}

/// Finds `O` such that `v ∘ O` has a non-zero coefficient at `(k,0,…,0)`,
/// `k` being the degree of the leading homogeneous part of `v`.
pub fn normalize_rotation(v: &Polynomial) -> Result<(RationalOrthogonalMatrix, u32), DivisionError> {
    normalize_rotation_with(v, &RotationSearch::default())
}

pub fn normalize_rotation_with(
    v: &Polynomial,
    search: &RotationSearch,
) -> Result<(RationalOrthogonalMatrix, u32), DivisionError> {
    let n = v.dim();
    let k = v.min_degree().ok_or(DivisionError::ZeroInput)?;
    let lead = v.homogeneous_part(k);
    // coefficient of x_1^k in lead ∘ O is lead(first column of O)
    let hits = |o: &RationalOrthogonalMatrix| !lead.evaluate(&o.column(0)).expect("dimension matches").is_zero();

    let mut tried = 0usize;
    for o in rotation_candidates(n, &search.grid) {
        if tried >= search.max_candidates {
            break;
        }
        tried += 1;
        if hits(&o) {
            return Ok((o, k));
        }
    }
    Err(DivisionError::SearchExhausted {
        tried,
        bound: search.max_candidates,
    })
}

/// Identity, the transpositions `(0 i)`, then every Cayley matrix over the
/// grid (mixed-radix over the skew entries), each alone and composed with
/// the transpositions.
fn rotation_candidates(n: usize, grid: &[Rational]) -> impl Iterator<Item = RationalOrthogonalMatrix> + '_ {
    let swaps: Vec<RationalOrthogonalMatrix> = (1..n)
        .map(|i| {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.swap(0, i);
            RationalOrthogonalMatrix::permutation(&perm)
        })
        .collect();
    let m = n * n.saturating_sub(1) / 2;
    let total = if m == 0 || grid.is_empty() {
        0
    } else {
        grid.len().checked_pow(m as u32).unwrap_or(usize::MAX)
    };
    let plain = std::iter::once(RationalOrthogonalMatrix::identity(n)).chain(swaps.clone());
    let cayley = (0..total).flat_map(move |mut code| {
        let params: Vec<Rational> = (0..m)
            .map(|_| {
                let d = code % grid.len();
                code /= grid.len();
                grid[d].clone()
            })
            .collect();
        let c = RationalOrthogonalMatrix::cayley(n, &params).expect("skew parameters give an invertible I + S");
        let composed: Vec<RationalOrthogonalMatrix> = swaps.iter().map(|s| c.compose(s)).collect();
        std::iter::once(c).chain(composed)
    });
    plain.chain(cayley)
}

/// Coefficients `f_β`, `|β| ≤ max_degree`, of `f` with `u = v f`, assuming
/// `v` vanishes to order exactly `k` with `v_{(k,0,…,0)} ≠ 0`.
///
/// Solves `u_{β+k̃} = Σ f_γ v_{β+k̃-γ}` for `f_β`, visiting `β` in the
/// trailing order; every `f_γ` read on the right has `γ ≺ β`. `observe` is
/// called with `(β, γ)` for each such read.
pub(crate) fn ratio_coefficients<T, U>(
    dim: usize,
    k: u32,
    max_degree: u32,
    u_coeff: U,
    v_terms: &[(MultiIndex, T)],
    mut observe: impl FnMut(&MultiIndex, &MultiIndex),
) -> BTreeMap<MultiIndex, T>
where
    T: Num + Clone,
    U: Fn(&MultiIndex) -> T,
{
    let ktilde = MultiIndex::first_axis(dim, k);
    let pivot = v_terms
        .iter()
        .find(|(d, _)| *d == ktilde)
        .map(|(_, c)| c.clone())
        .expect("caller guarantees a non-zero (k,0,…,0) coefficient");

    let mut order = indices_up_to(dim, max_degree);
    order.sort_by(|a, b| a.trailing_cmp(b));

    let mut f: BTreeMap<MultiIndex, T> = BTreeMap::new();
    for beta in order {
        let top = beta.add(&ktilde);
        let mut acc = u_coeff(&top);
        for (delta, vd) in v_terms {
            if *delta == ktilde {
                continue;
            }
            if let Some(gamma) = top.checked_sub(delta) {
                observe(&beta, &gamma);
                let fg = f.get(&gamma).expect("γ precedes β in the trailing order").clone();
                acc = acc - fg * vd.clone();
            }
        }
        f.insert(beta, acc / pivot.clone());
    }
    f
}

/// Series of `f = u / v` about the common center, to total degree `n`.
///
/// `u` and `v` must be known to degree at least `n + k`, where `k` is the
/// order of vanishing of `v`. If `v` has no `(k,0,…,0)` term the problem is
/// first moved to a rotated frame (see [`normalize_rotation`]) and the
/// quotient rotated back. Every coefficient of `u - v f` up to degree
/// `n + k` is then checked to be exactly zero; only the `k̃`-shifted
/// equations are enforced by the recursion, so the rest are genuine checks.
pub fn series_ratio(u: &TruncatedSeries, v: &TruncatedSeries, n: u32) -> Result<DivisionOutcome, DivisionError> {
    series_ratio_observed(u, v, n, |_, _| {})
}

pub(crate) fn series_ratio_observed(
    u: &TruncatedSeries,
    v: &TruncatedSeries,
    n: u32,
    observe: impl FnMut(&MultiIndex, &MultiIndex),
) -> Result<DivisionOutcome, DivisionError> {
    if u.dim() != v.dim() {
        return Err(crate::poly::PolyError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        }
        .into());
    }
    if u.center() != v.center() {
        return Err(DivisionError::CenterMismatch);
    }
    let k = v.leading_degree().ok_or(DivisionError::ZeroDivisor)?;
    let required = n + k;
    let available = u.max_degree().min(v.max_degree());
    if available < required {
        return Err(DivisionError::InsufficientDegree { required, available });
    }
    if let Some(ku) = u.truncate(required).leading_degree() {
        if ku < k {
            return Err(DivisionError::NotDivisible {
                degree: ku,
                monomial: None,
                reason: format!("dividend vanishes to order {ku}, divisor to order {k}"),
            });
        }
    }

    let dim = v.dim();
    let ktilde = MultiIndex::first_axis(dim, k);
    let rotation = if v.coeff(&ktilde).is_zero() {
        Some(normalize_rotation(v.coefficients())?.0)
    } else {
        None
    };
    let (uf, vf) = match &rotation {
        Some(o) => (u.coefficients_rotated(o)?, v.coefficients_rotated(o)?),
        None => (u.coefficients().clone(), v.coefficients().clone()),
    };

    let v_terms: Vec<(MultiIndex, Rational)> = vf
        .terms()
        .filter(|(i, _)| i.degree() <= required)
        .map(|(i, c)| (i.clone(), c.clone()))
        .collect();
    let coeffs = ratio_coefficients(dim, k, n, |i| uf.coeff(i), &v_terms, observe);
    let f_frame = Polynomial::from_terms(dim, coeffs)?;
    let f_local = match &rotation {
        Some(o) => crate::poly::rotate(&f_frame, &o.transpose())?,
        None => f_frame,
    };
    let f = TruncatedSeries::new(u.center().to_vec(), n, f_local)?;

    check_residual(u, &[v], &f, required)?;
    Ok(DivisionOutcome {
        quotient: Quotient::Series(f),
        residual_verified: true,
        certificate: None,
        rotation,
    })
}

/// Checks `u - f ∏ divisors` vanishes through degree `degree`.
fn check_residual(
    u: &TruncatedSeries,
    divisors: &[&TruncatedSeries],
    f: &TruncatedSeries,
    degree: u32,
) -> Result<(), DivisionError> {
    let mut prod = f.coefficients().clone();
    for d in divisors {
        prod = prod.mul_truncated(d.coefficients(), degree)?;
    }
    let residual = u.coefficients().truncate(degree).checked_sub(&prod)?;
    let first = residual.terms().next().map(|(i, _)| i.clone());
    match first {
        None => Ok(()),
        Some(index) => Err(DivisionError::ResidualNonzero {
            degree: index.degree(),
            index,
        }),
    }
}

/// `u = f ∏ v_i`: divides by each divisor in turn and checks the residual
/// against the full product. Errors carry the 1-based index of the divisor
/// at which division failed.
pub fn multi_divide(
    u: &TruncatedSeries,
    divisors: &[TruncatedSeries],
    n: u32,
) -> Result<DivisionOutcome, DivisionError> {
    let orders = divisors
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.leading_degree().ok_or(DivisionError::AtDivisor {
                index: i + 1,
                source: Box::new(DivisionError::ZeroDivisor),
            })
        })
        .collect::<Result<Vec<u32>, _>>()?;
    let total: u32 = orders.iter().sum();
    if u.max_degree() < n + total {
        return Err(DivisionError::InsufficientDegree {
            required: n + total,
            available: u.max_degree(),
        });
    }

    let mut current = u.truncate(n + total);
    let mut rotations = Vec::new();
    for (i, d) in divisors.iter().enumerate() {
        let remaining: u32 = orders[i + 1..].iter().sum();
        let step = series_ratio(&current, d, n + remaining).map_err(|e| DivisionError::AtDivisor {
            index: i + 1,
            source: Box::new(e),
        })?;
        rotations.push(step.rotation);
        current = match step.quotient {
            Quotient::Series(s) => s,
            Quotient::Polynomial(_) => unreachable!("series_ratio returns a series"),
        };
    }

    let refs: Vec<&TruncatedSeries> = divisors.iter().collect();
    check_residual(u, &refs, &current, n + total)?;
    Ok(DivisionOutcome {
        quotient: Quotient::Series(current),
        residual_verified: true,
        certificate: None,
        rotation: None,
    })
}

impl TruncatedSeries {
    fn coefficients_rotated(&self, o: &RationalOrthogonalMatrix) -> Result<Polynomial, DivisionError> {
        Ok(crate::poly::rotate(self.coefficients(), o)?)
    }
}
