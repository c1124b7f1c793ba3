use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{
    format_rational, indices_up_to, parse_rational, MultiIndex, Rational, RationalOrthogonalMatrix,
};
use crate::report::VerificationReport;

use super::{normalize_rotation, series_ratio, DivisionError, TruncatedSeries};

/// Constants `A`, `R = (R₁,…,Rₙ)` with `|f_β| ≤ A R^β` for the ratio of two
/// series whose coefficients obey `|u_α|, |v_α| ≤ a r^|α|` and
/// `|v_{(k,0,…,0)}| = c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    /// `a / c`.
    pub a0: Rational,
    pub r: Rational,
    pub k: u32,
    pub n: usize,
    pub a_const: Rational,
    pub radii: Vec<Rational>,
    /// `(1/R₁,…,1/Rₙ)`: the series converges on `{|x_i| < 1/R_i}`.
    pub polydisc: Vec<Rational>,
}

fn pow(x: &Rational, e: u32) -> Rational {
    num_traits::pow(x.clone(), e as usize)
}

fn positive(name: &str, x: &Rational) -> Result<(), DivisionError> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(DivisionError::InvalidInput(format!("{name} must be positive, got {x}")))
    }
}

/// `Π_{i≥2} (1 − R₁/Rᵢ)⁻¹ · (1 − r/R₁)⁻¹ − 1`, or `None` if some ratio is ≥ 1.
fn product_sum(r: &Rational, radii: &[Rational]) -> Option<Rational> {
    let one = Rational::one();
    let mut prod = Rational::one();
    let mut factors = vec![r / &radii[0]];
    factors.extend(radii[1..].iter().map(|ri| &radii[0] / ri));
    for q in factors {
        if q >= one {
            return None;
        }
        prod /= &one - q;
    }
    Some(prod - one)
}

/// Builds a certificate with `A = 2 a₀ r^k`, `R₁ = t r`, `R₂ = … = Rₙ = s R₁`,
/// doubling `t` and `s` alternately (t first) from `t = s = 2` until the
/// geometric product bound is at most `1 / (2 a₀ r^k)`.
pub fn bound_certificate(
    a: &Rational,
    c: &Rational,
    r: &Rational,
    k: u32,
    n: usize,
) -> Result<BoundCertificate, DivisionError> {
    positive("a", a)?;
    positive("c", c)?;
    positive("r", r)?;
    if n == 0 {
        return Err(DivisionError::InvalidInput("dimension must be positive".into()));
    }
    let a0 = a / c;
    let head = &a0 * pow(r, k);
    let a_const = &head * Rational::from_integer(2.into());
    let threshold = Rational::one() / &a_const;

    let two = Rational::from_integer(2.into());
    let (mut t, mut s) = (two.clone(), two.clone());
    let radii_for = |t: &Rational, s: &Rational| {
        let r1 = r * t;
        let mut radii = vec![r1.clone()];
        radii.extend(std::iter::repeat_n(&r1 * s, n - 1));
        radii
    };
    let mut step = 0u32;
    loop {
        let radii = radii_for(&t, &s);
        if product_sum(r, &radii).is_some_and(|p| p <= threshold) {
            let polydisc = radii.iter().map(|x| Rational::one() / x).collect();
            return Ok(BoundCertificate {
                a0,
                r: r.clone(),
                k,
                n,
                a_const,
                radii,
                polydisc,
            });
        }
        if step.is_multiple_of(2) {
            t *= &two;
        } else {
            s *= &two;
        }
        step += 1;
        if step > 4096 {
            return Err(DivisionError::InvalidInput("certificate search did not terminate".into()));
        }
    }
}

impl BoundCertificate {
    /// `R^β`.
    pub fn radius_power(&self, beta: &MultiIndex) -> Rational {
        self.radii
            .iter()
            .zip(beta.exponents())
            .map(|(ri, &e)| pow(ri, e))
            .product()
    }

    /// Checks the stated invariants: `a₀ r^k / A ≤ 1/2`, `r < R₁ < R₂`,
    /// `Rᵢ ≥ r`, the product condition, and `polydisc = 1/R`.
    pub fn invariants_hold(&self) -> bool {
        if self.radii.len() != self.n || self.polydisc.len() != self.n || self.n == 0 {
            return false;
        }
        let head = &self.a0 * pow(&self.r, self.k);
        let half = Rational::new(1.into(), 2.into());
        if !self.a_const.is_positive() || &head / &self.a_const > half {
            return false;
        }
        if self.radii.iter().any(|ri| ri < &self.r) || self.radii[0] <= self.r {
            return false;
        }
        if self.n > 1 && self.radii[1] <= self.radii[0] {
            return false;
        }
        if self.radii.iter().zip(&self.polydisc).any(|(ri, p)| ri * p != Rational::one()) {
            return false;
        }
        let threshold = Rational::one() / (head * Rational::from_integer(2.into()));
        product_sum(&self.r, &self.radii).is_some_and(|p| p <= threshold)
    }

    pub fn to_text(&self) -> String {
        let join = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        let _ = writeln!(out, "a0 = {}", format_rational(&self.a0));
        let _ = writeln!(out, "r = {}", format_rational(&self.r));
        let _ = writeln!(out, "k = {}", self.k);
        let _ = writeln!(out, "n = {}", self.n);
        let _ = writeln!(out, "A = {}", format_rational(&self.a_const));
        let _ = writeln!(out, "R = {}", join(&self.radii));
        let _ = writeln!(out, "polydisc = {}", join(&self.polydisc));
        out
    }

    pub fn parse(text: &str) -> Result<Self, crate::poly::PolyError> {
        use crate::poly::PolyError;
        let mut fields = std::collections::BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(PolyError::Parse {
                line: i + 1,
                message: "expected `key = value`".into(),
            })?;
            if fields.insert(key.trim().to_string(), (i + 1, value.trim().to_string())).is_some() {
                return Err(PolyError::Parse {
                    line: i + 1,
                    message: format!("duplicate key `{}`", key.trim()),
                });
            }
        }
        let get = |key: &str| {
            fields.get(key).cloned().ok_or(PolyError::Parse {
                line: 0,
                message: format!("missing key `{key}`"),
            })
        };
        let rational = |key: &str| -> Result<Rational, PolyError> {
            let (line, v) = get(key)?;
            parse_rational(&v).map_err(|message| PolyError::Parse { line, message })
        };
        let list = |key: &str| -> Result<Vec<Rational>, PolyError> {
            let (line, v) = get(key)?;
            v.split_whitespace()
                .map(|x| parse_rational(x).map_err(|message| PolyError::Parse { line, message }))
                .collect()
        };
        let integer = |key: &str| -> Result<u64, PolyError> {
            let (line, v) = get(key)?;
            v.parse().map_err(|_| PolyError::Parse {
                line,
                message: format!("bad integer `{v}`"),
            })
        };
        let cert = BoundCertificate {
            a0: rational("a0")?,
            r: rational("r")?,
            k: integer("k")? as u32,
            n: integer("n")? as usize,
            a_const: rational("A")?,
            radii: list("R")?,
            polydisc: list("polydisc")?,
        };
        if cert.radii.len() != cert.n || cert.polydisc.len() != cert.n {
            return Err(PolyError::Parse {
                line: 0,
                message: format!("expected {} radii", cert.n),
            });
        }
        Ok(cert)
    }
}

/// `a₀ r^{|β|+k} + a₀ A Σ_★ R^γ r^{|β|+k−|γ|}` where `★` is
/// `γ ≤ β + k̃, |γ| ≤ |β|, γ ≠ β`.
///
/// For fixed `(γ₂,…,γₙ)` the admissible `γ₁` run over `0..=m` with
/// `m = min(β₁ + k, |β| − Σ_{i≥2} γᵢ)`, so the inner sum is geometric in
/// `R₁ / r`.
pub(crate) fn certificate_lhs(cert: &BoundCertificate, beta: &MultiIndex) -> Rational {
    let e = beta.exponents();
    let bdeg = beta.degree();
    let top = bdeg + cert.k;
    let r = &cert.r;
    let q = &cert.radii[0] / r;
    let q_minus_one = &q - Rational::one();

    let mut sum = Rational::zero();
    let tail = &e[1..];
    let mut gamma_tail = vec![0u32; tail.len()];
    loop {
        let g: u32 = gamma_tail.iter().sum();
        if g <= bdeg {
            let m = (e[0] + cert.k).min(bdeg - g);
            let tail_pow: Rational = cert.radii[1..]
                .iter()
                .zip(&gamma_tail)
                .map(|(ri, &x)| pow(ri, x))
                .product();
            // Σ_{j=0}^{m} R₁^j r^{top−g−j} = r^{top−g} Σ (R₁/r)^j
            let geometric = (pow(&q, m + 1) - Rational::one()) / &q_minus_one;
            sum += tail_pow * pow(r, top - g) * geometric;
        }
        let mut pos = 0;
        loop {
            if pos == tail.len() {
                let excluded = cert.radius_power(beta) * pow(r, cert.k);
                return &cert.a0 * pow(r, top) + &cert.a0 * &cert.a_const * (sum - excluded);
            }
            gamma_tail[pos] += 1;
            if gamma_tail[pos] <= tail[pos] {
                break;
            }
            gamma_tail[pos] = 0;
            pos += 1;
        }
    }
}

/// Checks the defining inequality of the certificate for every `|β| ≤ n_check`
/// in exact arithmetic.
pub fn verify_certificate(cert: &BoundCertificate, n_check: u32) -> VerificationReport {
    let mut report = VerificationReport::new("certificate", 0.0);
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0u64;
    let mut checked = 0u64;
    if cert.radii.len() != cert.n || cert.radii[0] <= cert.r {
        report.note("malformed certificate: need n radii and R1 > r");
        return report;
    }
    for beta in indices_up_to(cert.n, n_check) {
        let lhs = certificate_lhs(cert, &beta);
        let rhs = &cert.a_const * cert.radius_power(&beta);
        let ratio = (&lhs / &rhs).to_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(ratio);
        checked += 1;
        if lhs > rhs {
            violations += 1;
            if report.witnesses.len() < 16 {
                report.witnesses.push(beta.exponents().iter().map(|&x| x as f64).collect());
            }
        }
    }
    report.measure("worst_lhs_over_rhs", worst);
    report.measure("violations", violations as f64);
    report.count("multi_indices", checked);
    report.passed = violations == 0;
    if !report.passed {
        report.note(format!("{violations} multi-indices violate the inequality"));
    }
    report
}

/// `|f_β| ≤ A R^β` for every stored coefficient of `f`.
pub fn coefficient_bound_check(f: &TruncatedSeries, cert: &BoundCertificate) -> VerificationReport {
    let mut report = VerificationReport::new("coefficient_bound", 0.0);
    if f.dim() != cert.n {
        report.note(format!("dimension {} does not match certificate dimension {}", f.dim(), cert.n));
        return report;
    }
    let mut worst = 0.0f64;
    let mut violations = 0u64;
    for (beta, c) in f.coefficients().terms() {
        let bound = &cert.a_const * cert.radius_power(beta);
        let ratio = (c.abs() / &bound).to_f64().unwrap_or(f64::INFINITY);
        worst = worst.max(ratio);
        if c.abs() > bound {
            violations += 1;
            if report.witnesses.len() < 16 {
                report.witnesses.push(beta.exponents().iter().map(|&x| x as f64).collect());
            }
        }
    }
    report.measure("worst_coeff_over_bound", worst);
    report.measure("violations", violations as f64);
    report.count("coefficients", f.coefficients().num_terms() as u64);
    report.passed = violations == 0;
    report
}

/// Smallest `a` with `|s_α| ≤ a r^|α|` over the stored coefficients.
pub fn measure_coefficient_bound(s: &TruncatedSeries, r: &Rational) -> Rational {
    s.coefficients()
        .terms()
        .map(|(i, c)| c.abs() / pow(r, i.degree()))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// A ratio series together with a certificate for its coefficients.
#[derive(Clone, Debug)]
pub struct CertifiedRatio {
    /// Rotation applied so that `v` has a `(k,0,…,0)` term; `None` if the
    /// identity sufficed.
    pub rotation: Option<RationalOrthogonalMatrix>,
    /// Ratio in the original coordinates.
    pub quotient: TruncatedSeries,
    /// Ratio in the rotated frame, where the certificate applies.
    pub frame_quotient: TruncatedSeries,
    /// `(a, c)` measured from the rotated truncations.
    pub a: Rational,
    pub c: Rational,
    pub certificate: BoundCertificate,
    pub report: VerificationReport,
}

/// Runs [`series_ratio`], measures `a` and `c` from the (rotated) inputs at
/// radius parameter `r`, builds a certificate and checks the quotient
/// against it.
pub fn certify_ratio(
    u: &TruncatedSeries,
    v: &TruncatedSeries,
    n: u32,
    r: &Rational,
) -> Result<CertifiedRatio, DivisionError> {
    let k = v.leading_degree().ok_or(DivisionError::ZeroDivisor)?;
    let ktilde = MultiIndex::first_axis(v.dim(), k);
    let rotation = if v.coeff(&ktilde).is_zero() {
        Some(normalize_rotation(v.coefficients())?.0)
    } else {
        None
    };
    let (uf, vf) = match &rotation {
        Some(o) => (u.rotate(o)?, v.rotate(o)?),
        None => (u.clone(), v.clone()),
    };
    let outcome = series_ratio(&uf, &vf, n)?;
    let frame_quotient = outcome.quotient.as_series().expect("series quotient").clone();

    let (uf, vf) = (uf.truncate(n + k), vf.truncate(n + k));
    let a = measure_coefficient_bound(&uf, r).max(measure_coefficient_bound(&vf, r));
    let c = vf.coeff(&ktilde).abs();
    let certificate = bound_certificate(&a, &c, r, k, v.dim())?;
    let report = coefficient_bound_check(&frame_quotient, &certificate);
    let quotient = match &rotation {
        Some(o) => frame_quotient.rotate(&o.transpose())?,
        None => frame_quotient.clone(),
    };
    Ok(CertifiedRatio {
        rotation,
        quotient,
        frame_quotient,
        a,
        c,
        certificate,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, Polynomial};
    use proptest::prelude::*;

    /// Direct enumeration of the ★ set.
    fn lhs_brute_force(cert: &BoundCertificate, beta: &MultiIndex) -> Rational {
        let top = beta.degree() + cert.k;
        let shifted = beta.add(&MultiIndex::first_axis(cert.n, cert.k));
        let mut sum = Rational::zero();
        for gamma in indices_up_to(cert.n, beta.degree()) {
            if gamma == *beta || !gamma.divides(&shifted) {
                continue;
            }
            sum += cert.radius_power(&gamma) * pow(&cert.r, top - gamma.degree());
        }
        &cert.a0 * pow(&cert.r, top) + &cert.a0 * &cert.a_const * sum
    }

    #[test]
    fn small_example() {
        let cert = bound_certificate(&rat(1, 1), &rat(1, 1), &rat(1, 1), 1, 2).unwrap();
        assert_eq!(cert.a_const, rat(2, 1));
        assert_eq!(cert.radii, vec![rat(8, 1), rat(64, 1)]);
        assert_eq!(cert.polydisc, vec![rat(1, 8), rat(1, 64)]);
        assert!(cert.invariants_hold());
        assert!(verify_certificate(&cert, 10).passed);
    }

    #[test]
    fn hand_built_shape_also_verifies() {
        // A = 2, R = (4, 36): (9/8)(4/3) - 1 = 1/2
        let cert = BoundCertificate {
            a0: rat(1, 1),
            r: rat(1, 1),
            k: 1,
            n: 2,
            a_const: rat(2, 1),
            radii: vec![rat(4, 1), rat(36, 1)],
            polydisc: vec![rat(1, 4), rat(1, 36)],
        };
        assert!(cert.invariants_hold());
        assert!(verify_certificate(&cert, 10).passed);
    }

    #[test]
    fn broken_certificate_fails_at_origin() {
        let mut cert = bound_certificate(&rat(1, 1), &rat(1, 1), &rat(1, 1), 1, 2).unwrap();
        // A = a0 r^k: equality at β = 0, which still satisfies the inequality
        cert.a_const = rat(1, 1);
        let report = verify_certificate(&cert, 4);
        assert!(report.passed);
        assert_eq!(report.get("worst_lhs_over_rhs"), Some(1.0));
        assert!(!cert.invariants_hold());

        cert.a_const = rat(9, 10);
        let report = verify_certificate(&cert, 4);
        assert!(!report.passed);
        assert_eq!(report.witnesses[0], vec![0.0, 0.0]);
    }

    #[test]
    fn empty_star_set_at_origin_for_k0() {
        let cert = bound_certificate(&rat(3, 1), &rat(1, 1), &rat(1, 1), 0, 3).unwrap();
        let origin = MultiIndex::zero(3);
        assert_eq!(certificate_lhs(&cert, &origin), cert.a0);
    }

    #[test]
    fn scaling_rules() {
        let base = bound_certificate(&rat(1, 1), &rat(1, 1), &rat(1, 1), 2, 3).unwrap();
        let half = bound_certificate(&rat(1, 1), &rat(2, 1), &rat(1, 1), 2, 3).unwrap();
        assert_eq!(half.a_const * rat(2, 1), base.a_const);
        // with k = 0 the threshold does not depend on r, so t and s match
        let r1 = bound_certificate(&rat(1, 1), &rat(1, 1), &rat(1, 1), 0, 2).unwrap();
        let r2 = bound_certificate(&rat(1, 1), &rat(1, 1), &rat(2, 1), 0, 2).unwrap();
        assert_eq!(&r1.radii[0] * rat(2, 1), r2.radii[0]);
        assert_eq!(&r1.radii[1] * rat(2, 1), r2.radii[1]);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert!(bound_certificate(&rat(0, 1), &rat(1, 1), &rat(1, 1), 0, 2).is_err());
        assert!(bound_certificate(&rat(1, 1), &rat(-1, 1), &rat(1, 1), 0, 2).is_err());
        assert!(bound_certificate(&rat(1, 1), &rat(1, 1), &rat(0, 1), 0, 2).is_err());
        assert!(bound_certificate(&rat(1, 1), &rat(1, 1), &rat(1, 1), 0, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let cert = bound_certificate(&rat(10, 1), &rat(1, 2), &rat(2, 1), 3, 4).unwrap();
        assert_eq!(BoundCertificate::parse(&cert.to_text()).unwrap(), cert);
        assert!(BoundCertificate::parse("a0 = 1\n").is_err());
    }

    #[test]
    fn coefficient_checks() {
        let u = TruncatedSeries::at_origin(4, Polynomial::from_int_terms(2, &[(1, &[1, 0]), (1, &[1, 1])]));
        let v = TruncatedSeries::at_origin(4, Polynomial::variable(2, 0));
        let cr = certify_ratio(&u, &v, 3, &rat(1, 1)).unwrap();
        assert!(cr.report.passed);
        assert_eq!(cr.a, rat(1, 1));
        assert_eq!(cr.c, rat(1, 1));

        let cr = certify_ratio(&v, &v, 3, &rat(1, 1)).unwrap();
        assert!(cr.report.passed);

        let cert = cr.certificate;
        let beta = MultiIndex::from([1, 1]);
        let too_big = &cert.a_const * cert.radius_power(&beta) + rat(1, 1);
        let f = TruncatedSeries::at_origin(3, Polynomial::monomial(beta, too_big));
        let report = coefficient_bound_check(&f, &cert);
        assert!(!report.passed);
        assert_eq!(report.witnesses, vec![vec![1.0, 1.0]]);
    }

    #[test]
    fn certify_with_rotation_returns_original_frame() {
        let v = TruncatedSeries::at_origin(6, Polynomial::from_int_terms(2, &[(1, &[1, 1])]));
        let u = TruncatedSeries::at_origin(6, Polynomial::from_int_terms(2, &[(2, &[1, 1]), (1, &[2, 1])]));
        let cr = certify_ratio(&u, &v, 3, &rat(1, 1)).unwrap();
        assert!(cr.rotation.is_some());
        assert!(cr.report.passed);
        assert_eq!(
            cr.quotient.coefficients(),
            &Polynomial::from_int_terms(2, &[(2, &[0, 0]), (1, &[1, 0])])
        );
    }

    #[test]
    fn measured_bound_is_tight() {
        let s = TruncatedSeries::at_origin(3, Polynomial::from_int_terms(2, &[(3, &[0, 0]), (8, &[1, 2])]));
        assert_eq!(measure_coefficient_bound(&s, &rat(2, 1)), rat(3, 1));
        assert_eq!(measure_coefficient_bound(&s, &rat(1, 1)), rat(8, 1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn geometric_grouping_matches_enumeration(
            a in 1i64..20, c in 1i64..4, r in 1i64..4, k in 0u32..4, n in 1usize..4,
            beta in prop::collection::vec(0u32..5, 3),
        ) {
            let cert = bound_certificate(&rat(a, 1), &rat(1, c), &rat(r, 2), k, n).unwrap();
            let beta = MultiIndex::new(beta[..n].to_vec());
            prop_assert_eq!(certificate_lhs(&cert, &beta), lhs_brute_force(&cert, &beta));
        }

        #[test]
        fn emitted_certificates_hold_invariants(a in 1i64..50, c in 1i64..8, r in 1i64..6, k in 0u32..5, n in 1usize..6) {
            let cert = bound_certificate(&rat(a, 1), &rat(1, c), &rat(r, 3), k, n).unwrap();
            prop_assert!(cert.invariants_hold());
        }
    }
}
