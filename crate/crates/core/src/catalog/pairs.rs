use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::division::TruncatedSeries;
use crate::poly::{MultiIndex, Polynomial, Rational};
use crate::region::Region;
use crate::report::VerificationReport;

use super::{catalog_get, CatalogEntry, CatalogError, ScalarField};

/// Two harmonic functions claimed to have the same zero set in `region`.
/// The scales multiply the catalog functions (see [`SharedZeroPair::normalize_at`]).
#[derive(Clone, Debug)]
pub struct SharedZeroPair {
    pub name: String,
    pub u: CatalogEntry,
    pub v: CatalogEntry,
    pub u_scale: f64,
    pub v_scale: f64,
    pub zero_set: String,
    pub region: Region,
    pub provenance: String,
}

/// `factor · entry`.
#[derive(Clone, Copy, Debug)]
pub struct Scaled<'a> {
    pub entry: &'a CatalogEntry,
    pub factor: f64,
}

impl ScalarField for Scaled<'_> {
    fn dim(&self) -> usize {
        self.entry.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.factor * self.entry.value(x)
    }
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (v, g) = self.entry.value_and_gradient(x);
        (self.factor * v, g.into_iter().map(|t| self.factor * t).collect())
    }
    fn magnitude(&self, x: &[f64]) -> f64 {
        self.factor.abs() * self.entry.magnitude(x)
    }
    fn taylor_f64(&self, center: &[f64], degree: u32) -> Vec<(MultiIndex, f64)> {
        self.entry
            .taylor_f64(center, degree)
            .into_iter()
            .map(|(i, c)| (i, self.factor * c))
            .collect()
    }
}

impl SharedZeroPair {
    pub fn new(name: &str, u: CatalogEntry, v: CatalogEntry, zero_set: &str, region: Region, provenance: &str) -> Self {
        SharedZeroPair {
            name: name.to_string(),
            u,
            v,
            u_scale: 1.0,
            v_scale: 1.0,
            zero_set: zero_set.to_string(),
            region,
            provenance: provenance.to_string(),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.dim
    }

    pub fn u_field(&self) -> Scaled<'_> {
        Scaled {
            entry: &self.u,
            factor: self.u_scale,
        }
    }

    pub fn v_field(&self) -> Scaled<'_> {
        Scaled {
            entry: &self.v,
            factor: self.v_scale,
        }
    }

    /// Exact Taylor expansions of the scaled members about `center` to
    /// degree `n`.
    pub fn taylor_series(&self, center: &[Rational], n: u32) -> Result<(TruncatedSeries, TruncatedSeries), CatalogError> {
        let expand = |entry: &CatalogEntry, scale: f64| -> Result<TruncatedSeries, CatalogError> {
            let s = entry.taylor_coeffs(center, n)?;
            let q = Rational::from_float(scale)
                .ok_or_else(|| CatalogError::BadParameter(format!("scale {scale} is not finite")))?;
            Ok(TruncatedSeries::new(center.to_vec(), n, s.coefficients().scale(&q))?)
        };
        Ok((expand(&self.u, self.u_scale)?, expand(&self.v, self.v_scale)?))
    }

    pub fn with_region(mut self, region: Region) -> Self {
        self.region = region;
        self
    }

    /// Rescales both members to take the value 1 at `x0`. The new scales are
    /// computed from the unscaled functions, so normalizing twice at the same
    /// anchor changes nothing.
    pub fn normalize_at(&self, x0: &[f64]) -> Result<SharedZeroPair, CatalogError> {
        let mut out = self.clone();
        for (entry, scale) in [(&self.u, &mut out.u_scale), (&self.v, &mut out.v_scale)] {
            let val = entry.value(x0);
            if val.abs() <= 1e-12 * entry.magnitude(x0).max(f64::MIN_POSITIVE) || !val.is_finite() {
                return Err(CatalogError::ZeroAtAnchor);
            }
            *scale = 1.0 / val;
        }
        Ok(out)
    }
}

fn entry(name: &str) -> CatalogEntry {
    catalog_get(name).expect("registered entry")
}

/// Registered pair names.
pub fn pair_names() -> Vec<&'static str> {
    vec!["expsin/coshsin", "linear", "self:paperH", "double:rezk:3"]
}

/// Looks up a pair. Besides the registered names this accepts
/// `self:<entry>` (u = v), `double:<entry>` (u = 2v) and `<u>,<v>` for an
/// arbitrary caller-asserted pair on the unit ball.
pub fn pair_get(name: &str) -> Result<SharedZeroPair, CatalogError> {
    match name {
        "expsin/coshsin" => {
            return Ok(SharedZeroPair::new(
                name,
                entry("expsin"),
                entry("coshsin"),
                "x = 0 inside the box (both vanish exactly on x = m*pi)",
                Region::cube(2, 1.0),
                "classical separable pair with ratio e^y / cosh y; not taken from a specific source",
            ))
        }
        "linear" => {
            let u = CatalogEntry::polynomial_entry(
                "2x+xy",
                Polynomial::from_int_terms(2, &[(2, &[1, 0]), (1, &[1, 1])]),
                "x = 0 and y = -2",
                "x (2 + y)",
            );
            let v = CatalogEntry::polynomial_entry("x", Polynomial::variable(2, 0), "x = 0", "coordinate function");
            return Ok(SharedZeroPair::new(
                name,
                u,
                v,
                "x = 0 inside the unit disk",
                Region::unit_ball(2),
                "ratio 2 + y",
            ));
        }
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("self:") {
        let e = catalog_get(rest)?;
        let region = default_region(&e);
        return Ok(SharedZeroPair::new(name, e.clone(), e, "identical functions", region, "u = v"));
    }
    if let Some(rest) = name.strip_prefix("double:") {
        let e = catalog_get(rest)?;
        let region = default_region(&e);
        let mut p = SharedZeroPair::new(name, e.clone(), e, "identical zero sets", region, "u = 2v");
        p.u_scale = 2.0;
        return Ok(p);
    }
    if let Some((a, b)) = name.split_once(',') {
        let (u, v) = (catalog_get(a.trim())?, catalog_get(b.trim())?);
        if u.dim != v.dim {
            return Err(CatalogError::Poly(crate::poly::PolyError::DimensionMismatch {
                left: u.dim,
                right: v.dim,
            }));
        }
        if (u.name.as_str(), v.name.as_str()) == ("expsin", "coshsin") {
            return pair_get("expsin/coshsin");
        }
        let region = default_region(&v);
        return Ok(SharedZeroPair::new(name, u, v, "asserted by caller", region, "user supplied"));
    }
    Err(CatalogError::UnknownEntry(name.to_string()))
}

fn default_region(e: &CatalogEntry) -> Region {
    match e.kind {
        super::Kind::Transcendental => Region::cube(e.dim, 1.0),
        super::Kind::Polynomial => Region::unit_ball(e.dim),
    }
}

/// Samples zeros of each member along random chords of the region (sign
/// change plus bisection) and checks the other member vanishes there:
/// `|other(z)| ≤ tol · (magnitude + |∇|)` at the located zero.
pub fn validate_shared_zeros(pair: &SharedZeroPair, chords: usize, seed: u64, tol: f64) -> VerificationReport {
    let mut report = VerificationReport::new("shared_zeros", tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u, v) = (pair.u_field(), pair.v_field());
    let mut worst: f64 = 0.0;
    let mut found = 0u64;
    for _ in 0..chords {
        let a = pair.region.sample(&mut rng);
        let b = pair.region.sample(&mut rng);
        for (f, g) in [(&v as &dyn ScalarField, &u as &dyn ScalarField), (&u, &v)] {
            let Some(z) = bisect_segment(f, &a, &b) else { continue };
            found += 1;
            let (gv, grad) = g.value_and_gradient(&z);
            let scale = g.magnitude(&z) + grad.iter().map(|t| t * t).sum::<f64>().sqrt();
            let rel = gv.abs() / scale.max(f64::MIN_POSITIVE);
            if rel > worst {
                worst = rel;
            }
            if rel > tol && report.witnesses.len() < 8 {
                report.witnesses.push(z);
            }
        }
    }
    report.measure("max_relative_residual", worst);
    report.count("chords", chords as u64);
    report.count("zeros_located", found);
    report.passed = worst <= tol && found > 0;
    if found == 0 {
        report.note("no sign changes found along the sampled chords");
    }
    report
}

/// A zero of `f` on the segment `[a, b]` if `f` changes sign at the ends.
pub(crate) fn bisect_segment(f: &dyn ScalarField, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let point = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect() };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let flo = f.value(a);
    let fhi = f.value(b);
    if flo == 0.0 {
        return Some(a.to_vec());
    }
    if fhi == 0.0 {
        return Some(b.to_vec());
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f.value(&point(mid));
        if fm == 0.0 {
            return Some(point(mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(point(0.5 * (lo + hi)))
}
