use std::fmt::Write as _;

use num_traits::Zero;

use crate::poly::{
    format_rational, parse_rational, rotate, MultiIndex, PolyError, Polynomial, Rational,
    RationalOrthogonalMatrix,
};

/// Taylor coefficients of a function about `center`, kept up to total degree
/// `max_degree`. The coefficients are stored as a polynomial in the local
/// coordinates `x - center`; an absent index means a zero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    center: Vec<Rational>,
    max_degree: u32,
    coeffs: Polynomial,
}

impl TruncatedSeries {
    pub fn new(center: Vec<Rational>, max_degree: u32, coeffs: Polynomial) -> Result<Self, PolyError> {
        if center.len() != coeffs.dim() {
            return Err(PolyError::DimensionMismatch {
                left: coeffs.dim(),
                right: center.len(),
            });
        }
        Ok(TruncatedSeries {
            center,
            max_degree,
            coeffs: coeffs.truncate(max_degree),
        })
    }

    /// Series at the origin.
    pub fn at_origin(max_degree: u32, coeffs: Polynomial) -> Self {
        let center = vec![Rational::zero(); coeffs.dim()];
        Self::new(center, max_degree, coeffs).expect("dimension taken from coefficients")
    }

    /// Exact Taylor expansion of a polynomial about `center`.
    pub fn from_polynomial(p: &Polynomial, center: &[Rational], max_degree: u32) -> Result<Self, PolyError> {
        let shifted = p.taylor_shift(center)?;
        Self::new(center.to_vec(), max_degree, shifted)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn center(&self) -> &[Rational] {
        &self.center
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn coefficients(&self) -> &Polynomial {
        &self.coeffs
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Rational {
        self.coeffs.coeff(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    /// Degree of the first non-vanishing homogeneous part.
    pub fn leading_degree(&self) -> Option<u32> {
        self.coeffs.min_degree()
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        TruncatedSeries {
            center: self.center.clone(),
            max_degree: max_degree.min(self.max_degree),
            coeffs: self.coeffs.truncate(max_degree),
        }
    }

    /// The series of `y ↦ g(O y)` where `g` is the function this series
    /// represents. The center moves to `Oᵀ c`.
    pub fn rotate(&self, o: &RationalOrthogonalMatrix) -> Result<Self, PolyError> {
        Ok(TruncatedSeries {
            center: o.transpose().apply(&self.center),
            max_degree: self.max_degree,
            coeffs: rotate(&self.coeffs, o)?,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim());
        let c: Vec<String> = self.center.iter().map(format_rational).collect();
        let _ = writeln!(out, "center {}", c.join(" "));
        let _ = writeln!(out, "maxdeg {}", self.max_degree);
        crate::poly::write_terms(&mut out, &self.coeffs);
        out
    }

    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let doc = crate::poly::parse_document(text, &["dim", "center", "maxdeg"])?;
        let coeffs = doc.polynomial()?;
        let dim = coeffs.dim();
        let center = match doc.headers.get("center") {
            Some((line, args)) => {
                if args.len() != dim {
                    return Err(PolyError::Parse {
                        line: *line,
                        message: format!("center needs {dim} coordinates"),
                    });
                }
                args.iter()
                    .map(|a| parse_rational(a).map_err(|message| PolyError::Parse { line: *line, message }))
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => vec![Rational::zero(); dim],
        };
        let (line, args) = doc.headers.get("maxdeg").ok_or(PolyError::Parse {
            line: 0,
            message: "missing `maxdeg` header".into(),
        })?;
        let max_degree = match args.as_slice() {
            [d] => d.parse::<u32>().map_err(|_| PolyError::Parse {
                line: *line,
                message: format!("bad degree `{d}`"),
            })?,
            _ => {
                return Err(PolyError::Parse {
                    line: *line,
                    message: "`maxdeg` takes one argument".into(),
                })
            }
        };
        if let Some(d) = coeffs.total_degree() {
            if d > max_degree {
                return Err(PolyError::Parse {
                    line: *line,
                    message: format!("term of degree {d} exceeds maxdeg {max_degree}"),
                });
            }
        }
        Self::new(center, max_degree, coeffs)
    }
}
