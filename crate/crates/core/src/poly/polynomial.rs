use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::multiindex::MultiIndex;
use super::{PolyError, Rational};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, and every key has length `dim`.
/// Iteration follows the graded order of [`MultiIndex`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    pub fn monomial(index: MultiIndex, c: Rational) -> Self {
        let dim = index.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(index, c);
        }
        Polynomial { dim, terms }
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), Rational::one())
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing
    /// repeated exponents and dropping zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = Polynomial::zero(dim);
        for (idx, c) in terms {
            if idx.dim() != dim {
                return Err(PolyError::DimensionMismatch {
                    left: dim,
                    right: idx.dim(),
                });
            }
            p.add_term(idx, c);
        }
        Ok(p)
    }

    /// Shorthand for tests and catalogs: integer coefficients.
    pub fn from_int_terms(dim: usize, terms: &[(i64, &[u32])]) -> Self {
        Self::from_terms(
            dim,
            terms
                .iter()
                .map(|(c, e)| (MultiIndex::new(e.to_vec()), Rational::from_integer(BigInt::from(*c)))),
        )
        .expect("exponent vectors must match the dimension")
    }

    pub(crate) fn add_term(&mut self, idx: MultiIndex, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rational {
        self.terms.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff_ref(&self, idx: &MultiIndex) -> Option<&Rational> {
        self.terms.get(idx)
    }

    /// Largest total degree of a stored term, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Smallest total degree of a stored term (the order of vanishing at 0).
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(MultiIndex::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.min_degree() == self.total_degree()
    }

    /// Greatest term under the graded order.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &Rational)> {
        self.terms.iter().next_back()
    }

    fn check_dim(&self, other: &Polynomial) -> Result<(), PolyError> {
        if self.dim != other.dim {
            Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.add_term(i.add(j), a * b);
            }
        }
        Ok(out)
    }

    /// Product keeping only terms of total degree `<= max_degree`.
    pub fn mul_truncated(&self, other: &Polynomial, max_degree: u32) -> Result<Polynomial, PolyError> {
        self.check_dim(other)?;
        let mut out = Polynomial::zero(self.dim);
        for (i, a) in &self.terms {
            let di = i.degree();
            if di > max_degree {
                break;
            }
            for (j, b) in &other.terms {
                if di + j.degree() > max_degree {
                    break;
                }
                out.add_term(i.add(j), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(i, a)| (i.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.dim);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn partial_derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (idx, c) in &self.terms {
            let e = idx.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut ex = idx.exponents().to_vec();
            ex[var] -= 1;
            out.add_term(MultiIndex::new(ex), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Polynomial> {
        (0..self.dim).map(|i| self.partial_derivative(i)).collect()
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (idx, c) in &self.terms {
            for var in 0..self.dim {
                let e = idx.exponents()[var];
                if e < 2 {
                    continue;
                }
                let mut ex = idx.exponents().to_vec();
                ex[var] -= 2;
                let factor = Rational::from_integer(BigInt::from(e) * BigInt::from(e - 1));
                out.add_term(MultiIndex::new(ex), c * factor);
            }
        }
        out
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_zero()
    }

    /// Part of total degree exactly `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.degree() == degree)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    /// Decomposition into homogeneous parts, by strictly increasing degree.
    /// The first entry is the leading (lowest-degree) part.
    pub fn homogeneous_parts(&self) -> Result<Vec<(u32, Polynomial)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut parts: Vec<(u32, Polynomial)> = Vec::new();
        for (idx, c) in &self.terms {
            let d = idx.degree();
            match parts.last_mut() {
                Some((deg, p)) if *deg == d => {
                    p.terms.insert(idx.clone(), c.clone());
                }
                _ => {
                    let mut p = Polynomial::zero(self.dim);
                    p.terms.insert(idx.clone(), c.clone());
                    parts.push((d, p));
                }
            }
        }
        Ok(parts)
    }

    pub fn truncate(&self, max_degree: u32) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(i, _)| i.degree() <= max_degree)
                .map(|(i, c)| (i.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_point<T>(&self, x: &[T]) -> Result<(), PolyError> {
        if x.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[Rational]) -> Result<Rational, PolyError> {
        self.check_point(x)?;
        let mut acc = Rational::zero();
        for (idx, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &e) in x.iter().zip(idx.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(xi.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact value and gradient at a rational point.
    pub fn evaluate_and_gradient(&self, x: &[Rational]) -> Result<(Rational, Vec<Rational>), PolyError> {
        let value = self.evaluate(x)?;
        let grad = self
            .gradient()
            .iter()
            .map(|g| g.evaluate(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((value, grad))
    }

    /// Taylor shift: the polynomial `y ↦ P(center + y)`.
    pub fn taylor_shift(&self, center: &[Rational]) -> Result<Polynomial, PolyError> {
        self.check_point(center)?;
        if center.iter().all(Zero::is_zero) {
            return Ok(self.clone());
        }
        let linear: Vec<Polynomial> = (0..self.dim)
            .map(|i| {
                let mut p = Polynomial::variable(self.dim, i);
                p.add_term(MultiIndex::zero(self.dim), center[i].clone());
                p
            })
            .collect();
        Ok(self.substitute_linear(&linear))
    }

    /// Substitutes `x_i ↦ forms[i]` where every form has degree ≤ 1.
    pub(crate) fn substitute_linear(&self, forms: &[Polynomial]) -> Polynomial {
        let mut powers: Vec<Vec<Polynomial>> = forms.iter().map(|f| vec![Polynomial::one(f.dim)]).collect();
        let out_dim = forms.first().map(|f| f.dim).unwrap_or(self.dim);
        let mut out = Polynomial::zero(out_dim);
        for (idx, c) in &self.terms {
            let mut term = Polynomial::constant(out_dim, c.clone());
            for (var, &e) in idx.exponents().iter().enumerate() {
                let e = e as usize;
                while powers[var].len() <= e {
                    let next = &powers[var][powers[var].len() - 1] * &forms[var];
                    powers[var].push(next);
                }
                if e > 0 {
                    term = &term * &powers[var][e];
                }
            }
            for (i, a) in term.terms {
                out.add_term(i, a);
            }
        }
        out
    }

    /// Floating-point copy for fast repeated evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(self)
    }

    /// Maximum absolute coefficient.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.checked_add(rhs).expect("dimension mismatch in polynomial addition")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.checked_sub(rhs).expect("dimension mismatch in polynomial subtraction")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.checked_mul(rhs).expect("dimension mismatch in polynomial multiplication")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(i, c)| (i.clone(), -c.clone())).collect(),
        }
    }
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn var_name(dim: usize, i: usize) -> String {
    if dim <= VAR_NAMES.len() {
        VAR_NAMES[i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first reads more naturally
        for (n, (idx, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono: Vec<String> = idx
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        var_name(self.dim, i)
                    } else {
                        format!("{}^{}", var_name(self.dim, i), e)
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", abs, mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Float image of a [`Polynomial`], for sampling loops.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    dim: usize,
    terms: Vec<(Vec<u32>, f64)>,
    max_exp: Vec<u32>,
}

impl FloatPoly {
    pub fn new(p: &Polynomial) -> Self {
        let mut max_exp = vec![0u32; p.dim];
        let terms = p
            .terms()
            .map(|(i, c)| {
                for (m, &e) in max_exp.iter_mut().zip(i.exponents()) {
                    *m = (*m).max(e);
                }
                (i.exponents().to_vec(), c.to_f64().unwrap_or(f64::NAN))
            })
            .collect();
        FloatPoly {
            dim: p.dim,
            terms,
            max_exp,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn power_table(&self, x: &[f64]) -> Vec<Vec<f64>> {
        x.iter()
            .zip(&self.max_exp)
            .map(|(&xi, &m)| {
                let mut row = Vec::with_capacity(m as usize + 1);
                let mut acc = 1.0;
                row.push(1.0);
                for _ in 0..m {
                    acc *= xi;
                    row.push(acc);
                }
                row
            })
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let pw = self.power_table(x);
        self.terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(*c, |t, (i, &ei)| t * pw[i][ei as usize]))
            .sum()
    }

    /// Sum of absolute term values; the natural rounding scale of `value`.
    pub fn magnitude(&self, x: &[f64]) -> f64 {
        let pw = self.power_table(x);
        self.terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(c.abs(), |t, (i, &ei)| t * pw[i][ei as usize].abs()))
            .sum()
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let pw = self.power_table(x);
        let mut v = 0.0;
        let mut g = vec![0.0; self.dim];
        for (e, c) in &self.terms {
            let t: f64 = e.iter().enumerate().fold(*c, |t, (i, &ei)| t * pw[i][ei as usize]);
            v += t;
            for k in 0..self.dim {
                if e[k] == 0 {
                    continue;
                }
                let mut d = *c * e[k] as f64;
                for (i, &ei) in e.iter().enumerate() {
                    let p = if i == k { ei - 1 } else { ei };
                    d *= pw[i][p as usize];
                }
                g[k] += d;
            }
        }
        (v, g)
    }

    /// Coefficients of the expansion in `y = x - center`, up to total degree
    /// `degree`, by binomial expansion of each term.
    pub fn taylor(&self, center: &[f64], degree: u32) -> Vec<(MultiIndex, f64)> {
        let pw = self.power_table(center);
        let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (e, c) in &self.terms {
            // per axis: (j, C(e_i, j) c_i^{e_i - j})
            let axes: Vec<Vec<(u32, f64)>> = e
                .iter()
                .enumerate()
                .map(|(i, &ei)| {
                    let mut binom = 1.0;
                    (0..=ei)
                        .map(|j| {
                            let t = (j, binom * pw[i][(ei - j) as usize]);
                            binom = binom * (ei - j) as f64 / (j + 1) as f64;
                            t
                        })
                        .collect()
                })
                .collect();
            let mut idx = vec![0usize; self.dim];
            'outer: loop {
                let exps: Vec<u32> = idx.iter().enumerate().map(|(i, &j)| axes[i][j].0).collect();
                if exps.iter().sum::<u32>() <= degree {
                    let w = idx.iter().enumerate().fold(*c, |t, (i, &j)| t * axes[i][j].1);
                    *out.entry(MultiIndex::new(exps)).or_insert(0.0) += w;
                }
                for pos in 0..self.dim {
                    idx[pos] += 1;
                    if idx[pos] < axes[pos].len() {
                        continue 'outer;
                    }
                    idx[pos] = 0;
                }
                break;
            }
        }
        out.into_iter().collect()
    }

    pub fn hessian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let pw = self.power_table(x);
        let n = self.dim;
        let mut h = vec![vec![0.0; n]; n];
        for (e, c) in &self.terms {
            for a in 0..n {
                for b in a..n {
                    let mut ex = e.clone();
                    let mut coef = *c;
                    if ex[a] == 0 {
                        continue;
                    }
                    coef *= ex[a] as f64;
                    ex[a] -= 1;
                    if ex[b] == 0 {
                        continue;
                    }
                    coef *= ex[b] as f64;
                    ex[b] -= 1;
                    let t = ex.iter().enumerate().fold(coef, |t, (i, &ei)| t * pw[i][ei as usize]);
                    h[a][b] += t;
                    if a != b {
                        h[b][a] += t;
                    }
                }
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn h() -> Polynomial {
        // x^2 - y^2 + z^3 - 3x^2 z
        Polynomial::from_int_terms(3, &[(1, &[2, 0, 0]), (-1, &[0, 2, 0]), (1, &[0, 0, 3]), (-3, &[2, 0, 1])])
    }

    #[test]
    fn products() {
        let x = Polynomial::variable(2, 0);
        let y = Polynomial::variable(2, 1);
        assert_eq!(&x * &x, Polynomial::from_int_terms(2, &[(1, &[2, 0])]));
        let xy = &x * &y;
        let saddle = &(&x * &x) - &(&y * &y);
        assert_eq!(&xy * &saddle, Polynomial::from_int_terms(2, &[(1, &[3, 1]), (-1, &[1, 3])]));
        let p = &saddle + &xy;
        assert!((&p + &p.scale(&rat(-1, 1))).is_zero());
    }

    #[test]
    fn mismatched_dimensions_are_errors() {
        let a = Polynomial::variable(2, 0);
        let b = Polynomial::variable(3, 0);
        assert!(a.checked_add(&b).is_err());
        assert!(a.checked_mul(&b).is_err());
        assert!(a.evaluate(&[rat(1, 1)]).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let saddle = Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        assert!(saddle.laplacian().is_zero());
        let x2 = Polynomial::from_int_terms(2, &[(1, &[2, 0])]);
        assert_eq!(x2.laplacian(), Polynomial::constant(2, rat(2, 1)));
        assert!(h().laplacian().is_zero());
    }

    #[test]
    fn homogeneous_parts_examples() {
        let p = Polynomial::from_int_terms(2, &[(1, &[1, 0]), (1, &[1, 1])]);
        let parts = p.homogeneous_parts().unwrap();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0], (1, Polynomial::variable(2, 0)));
        assert_eq!(parts[1].0, 2);

        let parts = h().homogeneous_parts().unwrap();
        assert_eq!(parts[0].1, Polynomial::from_int_terms(3, &[(1, &[2, 0, 0]), (-1, &[0, 2, 0])]));
        assert_eq!(parts[1].1, Polynomial::from_int_terms(3, &[(1, &[0, 0, 3]), (-3, &[2, 0, 1])]));

        let c = Polynomial::constant(2, rat(7, 1));
        assert_eq!(c.homogeneous_parts().unwrap(), vec![(0, c.clone())]);
        assert!(matches!(Polynomial::zero(2).homogeneous_parts(), Err(PolyError::ZeroPolynomial)));
    }

    #[test]
    fn value_and_gradient_of_cubic_example() {
        let pt = [rat(1, 1), rat(1, 1), rat(0, 1)];
        let (v, g) = h().evaluate_and_gradient(&pt).unwrap();
        assert!(v.is_zero());
        assert_eq!(g, vec![rat(2, 1), rat(-2, 1), rat(-3, 1)]);

        let fp = h().to_float();
        let (fv, fg) = fp.value_and_gradient(&[1.0, 1.0, 0.0]);
        assert_eq!(fv, 0.0);
        assert_eq!(fg, vec![2.0, -2.0, -3.0]);
    }

    #[test]
    fn value_at_origin_is_constant_term() {
        let p = Polynomial::from_int_terms(2, &[(5, &[0, 0]), (3, &[1, 0]), (-2, &[0, 1]), (7, &[2, 1])]);
        let (v, g) = p.evaluate_and_gradient(&[rat(0, 1), rat(0, 1)]).unwrap();
        assert_eq!(v, rat(5, 1));
        assert_eq!(g, vec![rat(3, 1), rat(-2, 1)]);
    }

    #[test]
    fn taylor_shift_recenters() {
        let shifted = h().taylor_shift(&[rat(1, 1), rat(1, 1), rat(0, 1)]).unwrap();
        assert!(shifted.coeff(&MultiIndex::zero(3)).is_zero());
        assert_eq!(shifted.min_degree(), Some(1));
        // shifting back recovers the original
        let back = shifted.taylor_shift(&[rat(-1, 1), rat(-1, 1), rat(0, 1)]).unwrap();
        assert_eq!(back, h());
    }

    #[test]
    fn float_hessian_matches_exact() {
        let p = h();
        let fp = p.to_float();
        let x = [0.3, -0.2, 0.7];
        let hess = fp.hessian(&x);
        for a in 0..3 {
            for b in 0..3 {
                let exact = p.partial_derivative(a).partial_derivative(b).to_float().value(&x);
                assert!((hess[a][b] - exact).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn float_taylor_matches_exact_shift() {
        let p = h();
        let c = [rat(1, 2), rat(-1, 4), rat(3, 8)];
        let exact = p.taylor_shift(&c).unwrap();
        let approx = p.to_float().taylor(&[0.5, -0.25, 0.375], 2);
        for (i, v) in approx {
            assert!((v - exact.coeff(&i).to_f64().unwrap()).abs() < 1e-14, "{i}");
        }
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(h().to_string(), "z^3 - 3*x^2*z - y^2 + x^2");
    }
}
