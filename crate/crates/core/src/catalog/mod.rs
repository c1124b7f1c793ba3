//! Registry of harmonic functions with exact Taylor data, and pairs that
//! share a nodal set.

mod pairs;
mod separable;

use serde::Serialize;
use thiserror::Error;

use crate::division::TruncatedSeries;
use crate::linalg;
use crate::poly::{indices_of_degree, write_polynomial, FloatPoly, MultiIndex, PolyError, Polynomial, Rational};

pub(crate) use pairs::bisect_segment;
pub use pairs::{pair_get, pair_names, validate_shared_zeros, SharedZeroPair};
pub use separable::Factor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad parameter in `{0}`")]
    BadParameter(String),
    #[error("{name}: coefficients at this center are not rational (axis {axis})")]
    NonRationalCenter { name: String, axis: usize },
    #[error("value at anchor is zero")]
    ZeroAtAnchor,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Polynomial,
    Transcendental,
}

#[derive(Clone, Debug)]
pub enum Body {
    Polynomial { exact: Polynomial, float: FloatPoly },
    /// `Π_i F_i(x_i)`.
    Separable(Vec<Factor>),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    pub dim: usize,
    pub kind: Kind,
    pub body: Body,
    pub zero_set: String,
    pub provenance: String,
}

/// Something that can be sampled in floating point.
pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
    /// Scale for relative zero tests at `x` (e.g. the sum of absolute terms).
    fn magnitude(&self, x: &[f64]) -> f64;
    /// Taylor coefficients about `center` up to total degree `degree`.
    fn taylor_f64(&self, center: &[f64], degree: u32) -> Vec<(MultiIndex, f64)>;
    /// Exact polynomial form, if there is one.
    fn polynomial(&self) -> Option<&Polynomial> {
        None
    }
}

impl CatalogEntry {
    pub fn polynomial_entry(name: &str, p: Polynomial, zero_set: &str, provenance: &str) -> Self {
        CatalogEntry {
            name: name.to_string(),
            dim: p.dim(),
            kind: Kind::Polynomial,
            body: Body::Polynomial {
                float: p.to_float(),
                exact: p,
            },
            zero_set: zero_set.to_string(),
            provenance: provenance.to_string(),
        }
    }

    pub fn separable_entry(name: &str, factors: Vec<Factor>, zero_set: &str, provenance: &str) -> Self {
        CatalogEntry {
            name: name.to_string(),
            dim: factors.len(),
            kind: Kind::Transcendental,
            body: Body::Separable(factors),
            zero_set: zero_set.to_string(),
            provenance: provenance.to_string(),
        }
    }

    /// Exact Taylor coefficients about `center` up to total degree `n`.
    pub fn taylor_coeffs(&self, center: &[Rational], n: u32) -> Result<TruncatedSeries, CatalogError> {
        if center.len() != self.dim {
            return Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: center.len(),
            }
            .into());
        }
        match &self.body {
            Body::Polynomial { exact, .. } => Ok(TruncatedSeries::from_polynomial(exact, center, n)?),
            Body::Separable(factors) => {
                let per_axis = factors
                    .iter()
                    .zip(center)
                    .enumerate()
                    .map(|(axis, (f, c))| {
                        f.exact_coeffs(c, n).ok_or_else(|| CatalogError::NonRationalCenter {
                            name: self.name.clone(),
                            axis,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let terms = crate::poly::indices_up_to(self.dim, n).into_iter().map(|idx| {
                    let c: Rational = idx
                        .exponents()
                        .iter()
                        .zip(&per_axis)
                        .map(|(&e, coeffs)| coeffs[e as usize].clone())
                        .product();
                    (idx, c)
                });
                let p = Polynomial::from_terms(self.dim, terms)?;
                Ok(TruncatedSeries::new(center.to_vec(), n, p)?)
            }
        }
    }

    /// Polynomial body as text, if any.
    pub fn body_text(&self) -> Option<String> {
        match &self.body {
            Body::Polynomial { exact, .. } => Some(write_polynomial(exact)),
            Body::Separable(_) => None,
        }
    }
}

impl ScalarField for CatalogEntry {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        match &self.body {
            Body::Polynomial { float, .. } => float.value(x),
            Body::Separable(fs) => fs.iter().zip(x).map(|(f, &t)| f.derivative(0, t)).product(),
        }
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        match &self.body {
            Body::Polynomial { float, .. } => float.value_and_gradient(x),
            Body::Separable(fs) => {
                let vals: Vec<f64> = fs.iter().zip(x).map(|(f, &t)| f.derivative(0, t)).collect();
                let grad = (0..fs.len())
                    .map(|i| {
                        (0..fs.len())
                            .map(|j| if i == j { fs[j].derivative(1, x[j]) } else { vals[j] })
                            .product()
                    })
                    .collect();
                (vals.iter().product(), grad)
            }
        }
    }

    fn magnitude(&self, x: &[f64]) -> f64 {
        match &self.body {
            Body::Polynomial { float, .. } => float.magnitude(x),
            Body::Separable(fs) => fs.iter().zip(x).map(|(f, &t)| f.magnitude(t)).product(),
        }
    }

    fn taylor_f64(&self, center: &[f64], degree: u32) -> Vec<(MultiIndex, f64)> {
        match &self.body {
            Body::Polynomial { float, .. } => float.taylor(center, degree),
            Body::Separable(fs) => {
                let per_axis: Vec<Vec<f64>> = fs.iter().zip(center).map(|(f, &c)| f.float_coeffs(c, degree)).collect();
                crate::poly::indices_up_to(self.dim, degree)
                    .into_iter()
                    .map(|idx| {
                        let c = idx
                            .exponents()
                            .iter()
                            .zip(&per_axis)
                            .map(|(&e, cs)| cs[e as usize])
                            .product();
                        (idx, c)
                    })
                    .collect()
            }
        }
    }

    fn polynomial(&self) -> Option<&Polynomial> {
        match &self.body {
            Body::Polynomial { exact, .. } => Some(exact),
            Body::Separable(_) => None,
        }
    }
}

impl ScalarField for FloatPoly {
    fn dim(&self) -> usize {
        FloatPoly::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        FloatPoly::value(self, x)
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        FloatPoly::value_and_gradient(self, x)
    }

    fn magnitude(&self, x: &[f64]) -> f64 {
        FloatPoly::magnitude(self, x)
    }

    fn taylor_f64(&self, center: &[f64], degree: u32) -> Vec<(MultiIndex, f64)> {
        self.taylor(center, degree)
    }
}

/// `Re (x + i y)^k` (`real = true`) or `Im (x + i y)^k`, embedded in `dim`
/// variables.
pub fn complex_power(k: u32, real: bool, dim: usize) -> Polynomial {
    let mut terms = Vec::new();
    let mut binom: i64 = 1;
    for j in 0..=k {
        let wanted = if real { j % 2 == 0 } else { j % 2 == 1 };
        if wanted {
            let sign = if (j / 2) % 2 == 0 { 1 } else { -1 };
            let mut e = vec![0u32; dim];
            e[0] = k - j;
            e[1] = j;
            terms.push((MultiIndex::new(e), crate::poly::rat(sign * binom, 1)));
        }
        binom = binom * (k - j) as i64 / (j + 1) as i64;
    }
    Polynomial::from_terms(dim, terms).expect("dimension matches")
}

fn paper_h() -> Polynomial {
    Polynomial::from_int_terms(3, &[(1, &[2, 0, 0]), (-1, &[0, 2, 0]), (1, &[0, 0, 3]), (-3, &[2, 0, 1])])
}

const MAX_K: u32 = 40;

fn parse_k(name: &str, arg: &str) -> Result<u32, CatalogError> {
    arg.parse::<u32>()
        .ok()
        .filter(|k| (1..=MAX_K).contains(k))
        .ok_or_else(|| CatalogError::BadParameter(name.to_string()))
}

/// Looks up an entry by name. Parametric names take the form `rezk:3`.
pub fn catalog_get(name: &str) -> Result<CatalogEntry, CatalogError> {
    let poly = |p: Polynomial, zeros: &str, prov: &str| Ok(CatalogEntry::polynomial_entry(name, p, zeros, prov));
    match name {
        "saddle2d" => {
            return poly(
                Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]),
                "the diagonals y = x and y = -x",
                "classical harmonic polynomial",
            )
        }
        "imz2" => {
            return poly(
                complex_power(2, false, 2),
                "the coordinate axes",
                "Im (x + i y)^2 = 2xy",
            )
        }
        "paperH" => {
            return poly(
                paper_h(),
                "z = 0: two orthogonal lines x = ±y; z != 0: two hyperbolas; origin is the only critical zero",
                "worked 3D example with a depth-2 zero at the origin",
            )
        }
        "expsin" => {
            return Ok(CatalogEntry::separable_entry(
                name,
                vec![Factor::Sin, Factor::Exp],
                "lines x = m*pi",
                "e^y sin x; classical separable harmonic function",
            ))
        }
        "coshsin" => {
            return Ok(CatalogEntry::separable_entry(
                name,
                vec![Factor::Sin, Factor::Cosh],
                "lines x = m*pi",
                "cosh y sin x; classical separable harmonic function",
            ))
        }
        _ => {}
    }
    let (family, arg) = name
        .split_once(':')
        .ok_or_else(|| CatalogError::UnknownEntry(name.to_string()))?;
    match family {
        "rezk" => {
            let k = parse_k(name, arg)?;
            poly(
                complex_power(k, true, 2),
                &format!("{k} lines through the origin at angles (2j+1)pi/(2k)"),
                "Re (x + i y)^k",
            )
        }
        "imzk" => {
            let k = parse_k(name, arg)?;
            poly(
                complex_power(k, false, 2),
                &format!("{k} lines through the origin at angles j pi/k"),
                "Im (x + i y)^k",
            )
        }
        "rezk3" => {
            let k = parse_k(name, arg)?;
            poly(
                complex_power(k, true, 3),
                &format!("{k} planes through the z-axis"),
                "Re (x + i y)^k, constant in z",
            )
        }
        _ => Err(CatalogError::UnknownEntry(name.to_string())),
    }
}

/// Names of the registered entries, with parametric families at a
/// representative parameter.
pub fn catalog_names() -> Vec<&'static str> {
    vec![
        "saddle2d", "imz2", "rezk:3", "imzk:3", "rezk3:2", "paperH", "expsin", "coshsin",
    ]
}

/// Basis of homogeneous harmonic polynomials of degree `d` in `n`
/// variables: the kernel of the Laplacian restricted to degree `d`.
pub fn harmonic_basis(n: usize, d: u32) -> Vec<Polynomial> {
    let cols = indices_of_degree(n, d);
    if d < 2 {
        return cols
            .into_iter()
            .map(|c| Polynomial::monomial(c, Rational::from_integer(1.into())))
            .collect();
    }
    let rows = indices_of_degree(n, d - 2);
    let images: Vec<Polynomial> = cols
        .iter()
        .map(|c| Polynomial::monomial(c.clone(), Rational::from_integer(1.into())).laplacian())
        .collect();
    let a: Vec<Vec<Rational>> = rows.iter().map(|r| images.iter().map(|img| img.coeff(r)).collect()).collect();
    linalg::nullspace(&a, cols.len())
        .into_iter()
        .map(|v| Polynomial::from_terms(n, cols.iter().cloned().zip(v)).expect("dimension matches"))
        .collect()
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    name: &'a str,
    dimension: usize,
    kind: Kind,
    zero_set: &'a str,
    provenance: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    body: Option<String>,
}

#[derive(Serialize)]
struct ManifestPair {
    name: String,
    u: String,
    v: String,
    zero_set: String,
    region: crate::region::Region,
    provenance: String,
}

/// JSON manifest of entries and pairs.
pub fn manifest_json() -> String {
    let entries: Vec<CatalogEntry> = catalog_names().into_iter().map(|n| catalog_get(n).expect("registered")).collect();
    let list: Vec<ManifestEntry> = entries
        .iter()
        .map(|e| ManifestEntry {
            name: &e.name,
            dimension: e.dim,
            kind: e.kind,
            zero_set: &e.zero_set,
            provenance: &e.provenance,
            body: e.body_text(),
        })
        .collect();
    let pairs: Vec<ManifestPair> = pair_names()
        .into_iter()
        .map(|n| {
            let p = pair_get(n).expect("registered");
            ManifestPair {
                name: p.name.clone(),
                u: p.u.name.clone(),
                v: p.v.name.clone(),
                zero_set: p.zero_set.clone(),
                region: p.region.clone(),
                provenance: p.provenance.clone(),
            }
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "entries": list, "pairs": pairs })).expect("manifest serializes")
}
