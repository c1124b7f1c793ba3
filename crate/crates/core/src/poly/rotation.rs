//! Exact orthogonal changes of variables.
//!
//! Orthogonal matrices with rational entries come from the Cayley transform
//! `O = (I - S)(I + S)^{-1}` of a rational skew-symmetric `S`, optionally
//! composed with axis permutations.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};

use super::{PolyError, Polynomial, Rational};

/// Dense square matrix of rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, PolyError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(PolyError::DimensionMismatch { left: n, right: r.len() });
            }
            entries.extend(r);
        }
        Ok(RationalMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        RationalMatrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Rational {
        &mut self.entries[i * self.n + j]
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = self.clone();
        for i in 0..n {
            for j in 0..n {
                *t.get_mut(i, j) = self.get(j, i).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![Rational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.get(k, j);
                }
            }
        }
        RationalMatrix { n, entries: out }
    }

    pub fn is_identity(&self) -> bool {
        *self == RationalMatrix::identity(self.n)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<RationalMatrix, PolyError> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = RationalMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero()).ok_or(PolyError::Singular)?;
            if pivot != col {
                for j in 0..n {
                    a.entries.swap(pivot * n + j, col * n + j);
                    inv.entries.swap(pivot * n + j, col * n + j);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                *a.get_mut(col, j) /= &p;
                *inv.get_mut(col, j) /= &p;
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let da = &f * a.get(col, j);
                    let di = &f * inv.get(col, j);
                    *a.get_mut(r, j) -= da;
                    *inv.get_mut(r, j) -= di;
                }
            }
        }
        Ok(inv)
    }
}

/// An exactly orthogonal rational matrix (`M Mᵀ = I`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalOrthogonalMatrix(RationalMatrix);

impl RationalOrthogonalMatrix {
    pub fn new(m: RationalMatrix) -> Result<Self, PolyError> {
        if m.mul(&m.transpose()).is_identity() {
            Ok(RationalOrthogonalMatrix(m))
        } else {
            Err(PolyError::NotOrthogonal)
        }
    }

    pub fn identity(n: usize) -> Self {
        RationalOrthogonalMatrix(RationalMatrix::identity(n))
    }

    /// Permutation matrix sending coordinate `perm[j]` to column `j`:
    /// `(P x)_i = x_j` where `perm[j] = i`, so the first column is `e_{perm[0]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (j, &i) in perm.iter().enumerate() {
            m[i][j] = Rational::one();
        }
        RationalOrthogonalMatrix(RationalMatrix::from_rows(m).expect("square"))
    }

    /// Cayley transform of the skew matrix whose strict upper triangle is
    /// `params`, listed row by row: `(0,1), (0,2), …, (1,2), …`.
    pub fn cayley(n: usize, params: &[Rational]) -> Result<Self, PolyError> {
        let expected = n * n.saturating_sub(1) / 2;
        if params.len() != expected {
            return Err(PolyError::DimensionMismatch {
                left: expected,
                right: params.len(),
            });
        }
        let mut s = RationalMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
        };
        let mut it = params.iter();
        for i in 0..n {
            for j in i + 1..n {
                let p = it.next().expect("counted").clone();
                *s.get_mut(j, i) = -p.clone();
                *s.get_mut(i, j) = p;
            }
        }
        let mut minus = RationalMatrix::identity(n);
        let mut plus = RationalMatrix::identity(n);
        for k in 0..n * n {
            minus.entries[k] -= &s.entries[k];
            plus.entries[k] += &s.entries[k];
        }
        let o = minus.mul(&plus.inverse()?);
        RationalOrthogonalMatrix::new(o)
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.n
    }

    pub fn transpose(&self) -> Self {
        RationalOrthogonalMatrix(self.0.transpose())
    }

    pub fn compose(&self, other: &RationalOrthogonalMatrix) -> Self {
        RationalOrthogonalMatrix(self.0.mul(&other.0))
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + self.0.get(i, j) * &x[j]))
            .collect()
    }

    pub fn apply_f64(&self, x: &[f64]) -> Vec<f64> {
        let n = self.size();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.0.get(i, j).to_f64().unwrap_or(f64::NAN) * x[j])
                    .sum()
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.size()).map(|i| self.0.get(i, j).clone()).collect()
    }
}

impl fmt::Display for RationalOrthogonalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.size();
        for i in 0..n {
            let row: Vec<String> = (0..n).map(|j| super::format_rational(self.0.get(i, j))).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `P ∘ O`, i.e. the polynomial `x ↦ P(O x)`.
pub fn rotate(p: &Polynomial, o: &RationalOrthogonalMatrix) -> Result<Polynomial, PolyError> {
    let n = p.dim();
    if o.size() != n {
        return Err(PolyError::DimensionMismatch { left: n, right: o.size() });
    }
    let forms: Vec<Polynomial> = (0..n)
        .map(|i| {
            Polynomial::from_terms(
                n,
                (0..n).map(|j| (super::MultiIndex::unit(n, j), o.0.get(i, j).clone())),
            )
            .expect("dimension checked")
        })
        .collect();
    Ok(p.substitute_linear(&forms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, MultiIndex};
    use proptest::prelude::*;

    fn saddle() -> Polynomial {
        Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])])
    }

    #[test]
    fn swap_negates_saddle() {
        let swap = RationalOrthogonalMatrix::permutation(&[1, 0]);
        assert_eq!(rotate(&saddle(), &swap).unwrap(), saddle().scale(&rat(-1, 1)));
    }

    #[test]
    fn cayley_half_matches_hand_substitution() {
        let o = RationalOrthogonalMatrix::cayley(2, &[rat(1, 2)]).unwrap();
        let expected = RationalMatrix::from_rows(vec![
            vec![rat(3, 5), rat(-4, 5)],
            vec![rat(4, 5), rat(3, 5)],
        ])
        .unwrap();
        assert_eq!(o.matrix(), &expected);
        let xy = Polynomial::from_int_terms(2, &[(1, &[1, 1])]);
        let r = rotate(&xy, &o).unwrap();
        assert_eq!(r.coeff(&MultiIndex::from([2, 0])), rat(12, 25));
    }

    #[test]
    fn identity_rotation_is_noop() {
        let p = Polynomial::from_int_terms(3, &[(1, &[2, 0, 0]), (-1, &[0, 2, 0]), (1, &[0, 0, 3]), (-3, &[2, 0, 1])]);
        assert_eq!(rotate(&p, &RationalOrthogonalMatrix::identity(3)).unwrap(), p);
    }

    #[test]
    fn non_orthogonal_rejected() {
        let m = RationalMatrix::from_rows(vec![vec![rat(1, 1), rat(1, 1)], vec![rat(0, 1), rat(1, 1)]]).unwrap();
        assert_eq!(RationalOrthogonalMatrix::new(m), Err(PolyError::NotOrthogonal));
    }

    fn arb_cayley3() -> impl Strategy<Value = RationalOrthogonalMatrix> {
        prop::collection::vec((-6i64..=6, 1i64..=7), 3).prop_map(|ps| {
            let params: Vec<Rational> = ps.into_iter().map(|(a, b)| rat(a, b)).collect();
            RationalOrthogonalMatrix::cayley(3, &params).unwrap()
        })
    }

    fn arb_poly3() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec((prop::collection::vec(0u32..4, 3), -9i64..9), 1..8).prop_map(|t| {
            Polynomial::from_terms(3, t.into_iter().map(|(e, c)| (MultiIndex::new(e), rat(c, 1)))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rotation_commutes_with_laplacian(p in arb_poly3(), o in arb_cayley3()) {
            let lhs = rotate(&p, &o).unwrap().laplacian();
            let rhs = rotate(&p.laplacian(), &o).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(rotate(&p, &o).unwrap().total_degree(), p.total_degree());
        }

        #[test]
        fn rotation_preserves_harmonicity(o in arb_cayley3(), c in -5i64..5) {
            let h = Polynomial::from_int_terms(3, &[(1, &[2, 0, 0]), (-1, &[0, 2, 0]), (1, &[0, 0, 3]), (-3, &[2, 0, 1])]);
            let p = &h + &Polynomial::from_int_terms(3, &[(c, &[1, 1, 1])]);
            prop_assert!(rotate(&p, &o).unwrap().is_harmonic());
        }

        #[test]
        fn rotate_then_inverse_is_identity(p in arb_poly3(), o in arb_cayley3()) {
            let back = rotate(&rotate(&p, &o).unwrap(), &o.transpose()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
