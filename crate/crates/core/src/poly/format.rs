//! Plain-text polynomial format.
//!
//! ```text
//! # comment
//! dim 2
//! 1/1 : 3 1
//! -1/1 : 1 3
//! ```
//!
//! One term per line as `<num>/<den> : e1 … en`, sorted by the graded order.
//! Writing is canonical (reduced fractions, denominator always present), so
//! `write(parse(write(p))) == write(p)` byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{MultiIndex, PolyError, Polynomial, Rational};

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator `{num}`"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator `{den}`"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(num, den))
}

pub fn write_polynomial(p: &Polynomial) -> String {
    let mut out = format!("dim {}\n", p.dim());
    write_terms(&mut out, p);
    out
}

pub(crate) fn write_terms(out: &mut String, p: &Polynomial) {
    for (idx, c) in p.terms() {
        let exps: Vec<String> = idx.exponents().iter().map(u32::to_string).collect();
        let _ = writeln!(out, "{} : {}", format_rational(c), exps.join(" "));
    }
}

pub fn parse_polynomial(text: &str) -> Result<Polynomial, PolyError> {
    let doc = parse_document(text, &["dim"])?;
    doc.polynomial()
}

/// Headers plus term lines, shared by the polynomial and series formats.
pub(crate) struct Document {
    pub headers: BTreeMap<String, (usize, Vec<String>)>,
    terms: Vec<(usize, Rational, Vec<u32>)>,
}

impl Document {
    pub fn dim(&self) -> Result<usize, PolyError> {
        let (line, args) = self.headers.get("dim").ok_or(PolyError::Parse {
            line: 0,
            message: "missing `dim` header".into(),
        })?;
        match args.as_slice() {
            [n] => n.parse::<usize>().ok().filter(|&n| n > 0).ok_or(PolyError::Parse {
                line: *line,
                message: format!("bad dimension `{n}`"),
            }),
            _ => Err(PolyError::Parse {
                line: *line,
                message: "`dim` takes one argument".into(),
            }),
        }
    }

    pub fn polynomial(&self) -> Result<Polynomial, PolyError> {
        let dim = self.dim()?;
        let mut p = Polynomial::zero(dim);
        let mut seen = std::collections::BTreeSet::new();
        for (line, c, e) in &self.terms {
            if e.len() != dim {
                return Err(PolyError::Parse {
                    line: *line,
                    message: format!("expected {dim} exponents, found {}", e.len()),
                });
            }
            let idx = MultiIndex::new(e.clone());
            if !seen.insert(idx.clone()) {
                return Err(PolyError::Parse {
                    line: *line,
                    message: format!("repeated monomial {idx}"),
                });
            }
            p.add_term(idx, c.clone());
        }
        Ok(p)
    }
}

pub(crate) fn parse_document(text: &str, allowed_headers: &[&str]) -> Result<Document, PolyError> {
    let mut headers = BTreeMap::new();
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| PolyError::Parse { line: line_no, message };
        if let Some((coef, exps)) = line.split_once(':') {
            let c = parse_rational(coef).map_err(err)?;
            let e = exps
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| format!("bad exponent `{t}`")))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?;
            terms.push((line_no, c, e));
        } else {
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            if !allowed_headers.contains(&key) {
                return Err(err(format!("unknown header `{key}`")));
            }
            if headers
                .insert(key.to_string(), (line_no, words.map(str::to_string).collect()))
                .is_some()
            {
                return Err(err(format!("repeated header `{key}`")));
            }
        }
    }
    Ok(Document { headers, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use proptest::prelude::*;

    #[test]
    fn writes_canonical_text() {
        let p = Polynomial::from_int_terms(2, &[(1, &[3, 1]), (-1, &[1, 3])]).scale(&rat(1, 2));
        assert_eq!(write_polynomial(&p), "dim 2\n1/2 : 3 1\n-1/2 : 1 3\n");
    }

    #[test]
    fn parses_comments_and_integers() {
        let text = "# saddle\n\ndim 2\n1 : 2 0   # x^2\n-2/2 : 0 2\n";
        let p = parse_polynomial(text).unwrap();
        assert_eq!(p, Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_polynomial("1/1 : 1 0\n").is_err());
        assert!(parse_polynomial("dim 2\n1/0 : 1 0\n").is_err());
        assert!(parse_polynomial("dim 2\n1/1 : 1\n").is_err());
        assert!(parse_polynomial("dim 2\n1/1 : 1 0\n2/1 : 1 0\n").is_err());
        assert!(parse_polynomial("dim 2\nfoo 3\n").is_err());
        match parse_polynomial("dim 2\n1/1 : a b\n") {
            Err(PolyError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        (1usize..4).prop_flat_map(|dim| {
            prop::collection::vec(
                (prop::collection::vec(0u32..5, dim), -50i64..50, 1i64..20),
                0..12,
            )
            .prop_map(move |terms| {
                Polynomial::from_terms(
                    dim,
                    terms.into_iter().map(|(e, n, d)| (MultiIndex::new(e), rat(n, d))),
                )
                .unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(p in arb_poly()) {
            let text = write_polynomial(&p);
            let back = parse_polynomial(&text).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(write_polynomial(&back), text);
        }
    }
}
