use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::catalog::{ScalarField, SharedZeroPair};
use crate::division::TruncatedSeries;
use crate::poly::{FloatPoly, Polynomial};
use crate::region::Region;
use crate::report::VerificationReport;

use super::quadrature::sphere_integral;
use super::{norm, RatioField, RatioValue, VerifyError};

/// Parametrization of the boundary of a ball or box by `dim - 1` parameters.
enum Boundary<'a> {
    Circle { c: &'a [f64], r: f64 },
    Sphere2 { c: &'a [f64], r: f64 },
    Rect { lo: &'a [f64], hi: &'a [f64] },
    /// No parametrization; samples only.
    Sampled,
}

impl Boundary<'_> {
    fn point(&self, t: &[f64]) -> Vec<f64> {
        match self {
            Boundary::Circle { c, r } => {
                let a = 2.0 * PI * t[0];
                vec![c[0] + r * a.cos(), c[1] + r * a.sin()]
            }
            Boundary::Sphere2 { c, r } => {
                let th = PI * t[0].clamp(0.0, 1.0);
                let ph = 2.0 * PI * t[1];
                vec![
                    c[0] + r * th.sin() * ph.cos(),
                    c[1] + r * th.sin() * ph.sin(),
                    c[2] + r * th.cos(),
                ]
            }
            Boundary::Rect { lo, hi } => {
                // perimeter parameter in [0, 4)
                let s = t[0].rem_euclid(4.0);
                let side = s.floor() as usize;
                let f = s - side as f64;
                let (w, h) = (hi[0] - lo[0], hi[1] - lo[1]);
                match side {
                    0 => vec![lo[0] + f * w, lo[1]],
                    1 => vec![hi[0], lo[1] + f * h],
                    2 => vec![hi[0] - f * w, hi[1]],
                    _ => vec![lo[0], hi[1] - f * h],
                }
            }
            Boundary::Sampled => unreachable!("no parametrization"),
        }
    }

    /// `m` boundary points with their parameters (if parametrized).
    fn samples(&self, region: &Region, m: usize, rng: &mut ChaCha8Rng) -> Vec<(Option<Vec<f64>>, Vec<f64>)> {
        match self {
            Boundary::Circle { .. } => (0..m)
                .map(|j| {
                    let t = vec![j as f64 / m as f64];
                    (Some(t.clone()), self.point(&t))
                })
                .collect(),
            Boundary::Rect { .. } => (0..m)
                .map(|j| {
                    let t = vec![4.0 * j as f64 / m as f64];
                    (Some(t.clone()), self.point(&t))
                })
                .collect(),
            Boundary::Sphere2 { .. } => {
                // Fibonacci lattice
                let golden = (1.0 + 5f64.sqrt()) / 2.0;
                (0..m)
                    .map(|j| {
                        let z = 1.0 - (2.0 * j as f64 + 1.0) / m as f64;
                        let t = vec![z.acos() / PI, (j as f64 / golden).fract()];
                        (Some(t.clone()), self.point(&t))
                    })
                    .collect()
            }
            Boundary::Sampled => (0..m).map(|_| (None, boundary_point(region, rng))).collect(),
        }
    }
}

fn boundary_of(region: &Region) -> Result<Boundary<'_>, VerifyError> {
    region.validate()?;
    Ok(match region {
        Region::Ball { center, radius } if center.len() == 2 => Boundary::Circle { c: center, r: *radius },
        Region::Ball { center, radius } if center.len() == 3 => Boundary::Sphere2 { c: center, r: *radius },
        Region::Box { lo, hi } if lo.len() == 2 => {
            if lo.iter().zip(hi.iter()).any(|(a, b)| a == b) {
                return Err(VerifyError::Region(crate::region::RegionError::Degenerate(
                    "box has zero width".into(),
                )));
            }
            Boundary::Rect { lo, hi }
        }
        Region::Ball { .. } | Region::Box { .. } => Boundary::Sampled,
        _ => return Err(VerifyError::Unsupported("maximum principle needs a ball or a box".into())),
    })
}

/// A uniformly random point on the boundary of a ball or a box.
fn boundary_point(region: &Region, rng: &mut ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    match region {
        Region::Ball { center, radius } => {
            let d = crate::region::random_direction(center.len(), rng);
            center.iter().zip(d).map(|(c, u)| c + radius * u).collect()
        }
        Region::Box { lo, hi } => {
            let mut x: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..=*b)).collect();
            let axis = rng.gen_range(0..lo.len());
            x[axis] = if rng.gen::<bool>() { hi[axis] } else { lo[axis] };
            x
        }
        _ => unreachable!(),
    }
}

/// Compass search in parameter space from `t0`, maximizing `sign · f`.
fn refine(boundary: &Boundary, field: &RatioField, t0: &[f64], step0: f64, sign: f64) -> f64 {
    let eval = |t: &[f64]| field.eval(&boundary.point(t)).value().map(|v| sign * v).unwrap_or(f64::NEG_INFINITY);
    let mut t = t0.to_vec();
    let mut best = eval(&t);
    let mut step = step0;
    while step > 1e-13 {
        let mut moved = false;
        for i in 0..t.len() {
            for dir in [1.0, -1.0] {
                let mut cand = t.clone();
                cand[i] += dir * step;
                let val = eval(&cand);
                if val > best {
                    best = val;
                    t = cand;
                    moved = true;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    sign * best
}

#[derive(Default, Clone, Copy)]
struct Extremes {
    max: f64,
    min: f64,
    max_abs: f64,
    min_abs: f64,
    direct: u64,
    series: u64,
    skipped: u64,
}

impl Extremes {
    fn empty() -> Self {
        Extremes {
            max: f64::NEG_INFINITY,
            min: f64::INFINITY,
            max_abs: 0.0,
            min_abs: f64::INFINITY,
            ..Default::default()
        }
    }

    fn push(mut self, v: RatioValue) -> Self {
        match v {
            RatioValue::Direct(f) | RatioValue::Series(f) => {
                if matches!(v, RatioValue::Direct(_)) {
                    self.direct += 1;
                } else {
                    self.series += 1;
                }
                self.max = self.max.max(f);
                self.min = self.min.min(f);
                self.max_abs = self.max_abs.max(f.abs());
                self.min_abs = self.min_abs.min(f.abs());
            }
            RatioValue::Skipped => self.skipped += 1,
        }
        self
    }

    fn merge(self, o: Extremes) -> Self {
        Extremes {
            max: self.max.max(o.max),
            min: self.min.min(o.min),
            max_abs: self.max_abs.max(o.max_abs),
            min_abs: self.min_abs.min(o.min_abs),
            direct: self.direct + o.direct,
            series: self.series + o.series,
            skipped: self.skipped + o.skipped,
        }
    }
}

fn extremes(field: &RatioField, points: &[Vec<f64>]) -> Extremes {
    points
        .par_iter()
        .fold(Extremes::empty, |acc, x| acc.push(field.eval(x)))
        .reduce(Extremes::empty, Extremes::merge)
}

/// Compares the extremes of `f = u/v` over interior samples of `region` with
/// those over its boundary. Boundary extremes are refined from the best
/// samples by compass search along the boundary parametrization (circles,
/// 2-spheres, rectangles). Passes if, with `scale = max(|max_b|, |min_b|)`,
/// `max_int ≤ max_b + tol·scale` and `min_int ≥ min_b − tol·scale`.
pub fn max_principle_check(
    field: &RatioField,
    region: &Region,
    boundary_samples: usize,
    interior_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    let boundary = boundary_of(region)?;
    if region.dim() != field.dim() {
        return Err(VerifyError::Precondition("region dimension differs from the pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bsamples = boundary.samples(region, boundary_samples.max(8), &mut rng);
    let values: Vec<RatioValue> = bsamples.par_iter().map(|(_, x)| field.eval(x)).collect();
    let mut b = values.iter().fold(Extremes::empty(), |acc, v| acc.push(*v));

    if !matches!(boundary, Boundary::Sampled) {
        let spacing = match boundary {
            Boundary::Rect { .. } => 4.0 / bsamples.len() as f64,
            Boundary::Sphere2 { .. } => 2.0 / (bsamples.len() as f64).sqrt(),
            _ => 1.0 / bsamples.len() as f64,
        };
        let pick = |sign: f64| {
            bsamples
                .iter()
                .zip(&values)
                .filter_map(|((t, _), v)| v.value().map(|f| (t.clone().expect("parametrized"), sign * f)))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(t, _)| t)
        };
        if let Some(t) = pick(1.0) {
            b.max = b.max.max(refine(&boundary, field, &t, spacing, 1.0));
        }
        if let Some(t) = pick(-1.0) {
            b.min = b.min.min(refine(&boundary, field, &t, spacing, -1.0));
        }
    }

    let interior: Vec<Vec<f64>> = (0..interior_samples).map(|_| region.sample(&mut rng)).collect();
    let i = extremes(field, &interior);

    let scale = b.max.abs().max(b.min.abs());
    let mut report = VerificationReport::new("max_principle", tol);
    report
        .measure("boundary_max", b.max)
        .measure("boundary_min", b.min)
        .measure("interior_max", i.max)
        .measure("interior_min", i.min)
        .measure("boundary_max_abs", b.max.abs().max(b.min.abs()))
        .measure("interior_max_abs", i.max_abs)
        .measure("max_excess_relative", ((i.max - b.max) / scale).max((b.min - i.min) / scale))
        .count("boundary_samples", bsamples.len() as u64)
        .count("interior_samples", interior.len() as u64)
        .count("series_evaluations", b.series + i.series)
        .count("skipped", b.skipped + i.skipped);
    let ok_max = i.max <= b.max + tol * scale;
    let ok_min = i.min >= b.min - tol * scale;
    report.passed = ok_max && ok_min && scale.is_finite() && i.direct + i.series > 0;
    if b.skipped + i.skipped > 0 {
        report.note("samples at critical zeros without an exact expansion were skipped");
    }
    Ok(report)
}

/// Grid over `k` (tensor grid with endpoints for boxes; grid points of the
/// bounding box inside the region plus boundary points otherwise).
fn harnack_points(k: &Region, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = k.dim();
    let m = ((samples as f64).powf(1.0 / n as f64).round() as usize).max(1);
    let (lo, hi) = k.bounds();
    let axis = |i: usize| -> Vec<f64> {
        if m == 1 || lo[i] == hi[i] {
            vec![0.5 * (lo[i] + hi[i])]
        } else {
            (0..m).map(|j| lo[i] + (hi[i] - lo[i]) * j as f64 / (m - 1) as f64).collect()
        }
    };
    let axes: Vec<Vec<f64>> = (0..n).map(axis).collect();
    let mut pts = Vec::new();
    let mut idx = vec![0usize; n];
    'outer: loop {
        let x: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect();
        if k.contains(&x) {
            pts.push(x);
        }
        for pos in 0..n {
            idx[pos] += 1;
            if idx[pos] < axes[pos].len() {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    if !matches!(k, Region::Box { .. }) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra = match k {
            Region::Sphere { .. } => samples,
            _ => m.pow(n.saturating_sub(1) as u32).max(16),
        };
        for _ in 0..extra {
            pts.push(match k {
                Region::Ball { .. } => boundary_point(k, &mut rng),
                _ => k.sample(&mut rng),
            });
        }
    }
    pts
}

/// Empirical `C* = sup_K |f| / inf_K |f|` over a grid on `K`.
///
/// Fails with [`VerifyError::RatioVanishes`] if `|f|` drops below
/// `floor · sup|f|`, which would contradict equal zero sets.
pub fn harnack_constant(
    field: &RatioField,
    k: &Region,
    samples: usize,
    floor: f64,
) -> Result<VerificationReport, VerifyError> {
    k.validate()?;
    if k.dim() != field.dim() {
        return Err(VerifyError::Precondition("region dimension differs from the pair".into()));
    }
    let pts = harnack_points(k, samples, 0);
    let vals: Vec<(usize, RatioValue)> = pts.par_iter().enumerate().map(|(i, x)| (i, field.eval(x))).collect();
    let e = vals.iter().fold(Extremes::empty(), |acc, (_, v)| acc.push(*v));
    if e.direct + e.series == 0 {
        return Err(VerifyError::Precondition("no sample could be evaluated".into()));
    }
    if e.min_abs.is_nan() || e.min_abs <= floor * e.max_abs {
        let (i, v) = vals
            .iter()
            .filter_map(|(i, v)| v.value().map(|f| (*i, f.abs())))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one value");
        return Err(VerifyError::RatioVanishes {
            at: pts[i].clone(),
            value: v,
        });
    }
    let c = e.max_abs / e.min_abs;
    let mut report = VerificationReport::new("harnack", floor);
    report
        .measure("c_star", c)
        .measure("sup_abs_f", e.max_abs)
        .measure("inf_abs_f", e.min_abs)
        .count("samples", pts.len() as u64)
        .count("series_evaluations", e.series)
        .count("skipped", e.skipped);
    report.passed = c.is_finite();
    Ok(report)
}

/// `∫_{S_r} Q₂ Q dσ` for homogeneous harmonic `Q` and `deg Q₂ < deg Q`.
/// Passes if `|∫| ≤ tol · max(∫|Q₂ Q|, 1)`.
pub fn sphere_orthogonality(
    q: &Polynomial,
    q2: &Polynomial,
    r: f64,
    quad_points: usize,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    if q.dim() != q2.dim() {
        return Err(VerifyError::Precondition("dimension mismatch".into()));
    }
    if q.is_zero() || !q.is_homogeneous() || !q.is_harmonic() {
        return Err(VerifyError::Precondition("Q must be a non-zero homogeneous harmonic polynomial".into()));
    }
    let dq = q.total_degree().expect("non-zero");
    if let Some(d2) = q2.total_degree() {
        if d2 >= dq {
            return Err(VerifyError::Precondition(format!(
                "deg Q2 = {d2} must be below deg Q = {dq}"
            )));
        }
    }
    if r.is_nan() || r <= 0.0 {
        return Err(VerifyError::Precondition("radius must be positive".into()));
    }
    let prod = (q * q2).to_float();
    let (integral, abs_integral, used) = sphere_integral(q.dim(), r, quad_points, |x| prod.value(x))
        .ok_or_else(|| VerifyError::Unsupported("sphere quadrature is implemented for n = 2, 3".into()))?;
    let mut report = VerificationReport::new("sphere_orthogonality", tol);
    report
        .measure("integral", integral)
        .measure("abs_integral", abs_integral)
        .count("quadrature_points", used as u64);
    report.passed = integral.abs() <= tol * abs_integral.max(1.0);
    Ok(report)
}

/// Passes if `q1` takes both signs (beyond `1e-10 · magnitude`) on samples
/// of `region`. A definite `q1` failing is the expected outcome for a
/// polynomial that cannot divide a harmonic one.
pub fn sign_change_check(q1: &Polynomial, region: &Region, samples: usize, seed: u64) -> Result<VerificationReport, VerifyError> {
    region.validate()?;
    if q1.total_degree().unwrap_or(0) == 0 {
        return Err(VerifyError::Precondition("Q1 must be non-constant".into()));
    }
    let f = q1.to_float();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut pos, mut neg) = (0u64, 0u64);
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut report = VerificationReport::new("sign_change", super::ZERO_TOL);
    for _ in 0..samples {
        let x = region.sample(&mut rng);
        let v = f.value(&x);
        let m = f.magnitude(&x);
        max = max.max(v);
        min = min.min(v);
        if v > super::ZERO_TOL * m {
            if pos == 0 {
                report.witnesses.push(x.clone());
            }
            pos += 1;
        } else if v < -super::ZERO_TOL * m {
            if neg == 0 {
                report.witnesses.push(x.clone());
            }
            neg += 1;
        }
    }
    report
        .measure("max", max)
        .measure("min", min)
        .count("positive", pos)
        .count("negative", neg)
        .count("samples", samples as u64);
    report.passed = pos > 0 && neg > 0;
    if !report.passed {
        report.note("no sign change observed");
    }
    Ok(report)
}

/// Sample points of `region` whose estimated distance `|v| / |∇v|` from
/// `Z(v)` exceeds `guard`.
fn guarded_points(v: &dyn ScalarField, region: &Region, samples: usize, seed: u64, guard: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(samples);
    let mut tries = 0;
    while pts.len() < samples && tries < 100 * samples.max(1) {
        tries += 1;
        let x = region.sample(&mut rng);
        let (val, g) = v.value_and_gradient(&x);
        if val.abs() > guard * norm(&g) {
            pts.push(x);
        }
    }
    pts
}

/// `div(v² ∇f)` with `f = u/v` at `x` by the conservative central stencil
/// `Σ_i [v²(x + h/2 e_i)(f(x + h e_i) − f(x)) − v²(x − h/2 e_i)(f(x) − f(x − h e_i))] / h²`.
fn divergence_stencil(u: &dyn ScalarField, v: &dyn ScalarField, x: &[f64], h: f64) -> f64 {
    let f = |p: &[f64]| u.value(p) / v.value(p);
    let v2 = |p: &[f64]| {
        let t = v.value(p);
        t * t
    };
    let f0 = f(x);
    let mut acc = 0.0;
    for i in 0..x.len() {
        let shifted = |d: f64| {
            let mut p = x.to_vec();
            p[i] += d;
            p
        };
        let flux_plus = v2(&shifted(0.5 * h)) * (f(&shifted(h)) - f0);
        let flux_minus = v2(&shifted(-0.5 * h)) * (f0 - f(&shifted(-h)));
        acc += flux_plus - flux_minus;
    }
    acc / (h * h)
}

/// Maximum of `|div(v² ∇f)|` over guarded samples at step `h`.
pub fn elliptic_residual(
    pair: &SharedZeroPair,
    region: &Region,
    h: f64,
    samples: usize,
    seed: u64,
    guard: f64,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    region.validate()?;
    let (u, v) = (pair.u_field(), pair.v_field());
    let pts = guarded_points(&v, region, samples, seed, guard + 2.0 * h);
    if pts.is_empty() {
        return Err(VerifyError::Precondition("no samples outside the guard band".into()));
    }
    let max = pts
        .par_iter()
        .map(|x| divergence_stencil(&u, &v, x, h).abs())
        .reduce(|| 0.0, f64::max);
    let mut report = VerificationReport::new("elliptic_residual", tol);
    report.measure("h", h).measure("max_abs_residual", max).count("samples", pts.len() as u64);
    report.passed = max <= tol;
    Ok(report)
}

/// Residuals at each step in `hs` on common sample points and the observed
/// order `log(res_j / res_{j+1}) / log(h_j / h_{j+1})`. Passes if every
/// observed order is at least `min_order`.
pub fn elliptic_convergence(
    pair: &SharedZeroPair,
    region: &Region,
    hs: &[f64],
    samples: usize,
    seed: u64,
    guard: f64,
    min_order: f64,
) -> Result<VerificationReport, VerifyError> {
    region.validate()?;
    if hs.len() < 2 {
        return Err(VerifyError::Precondition("need at least two step sizes".into()));
    }
    let hmax = hs.iter().cloned().fold(0.0, f64::max);
    let (u, v) = (pair.u_field(), pair.v_field());
    let pts = guarded_points(&v, region, samples, seed, guard + 2.0 * hmax);
    if pts.is_empty() {
        return Err(VerifyError::Precondition("no samples outside the guard band".into()));
    }
    let residuals: Vec<f64> = hs
        .iter()
        .map(|&h| {
            pts.par_iter()
                .map(|x| divergence_stencil(&u, &v, x, h).abs())
                .reduce(|| 0.0, f64::max)
        })
        .collect();
    let mut report = VerificationReport::new("elliptic_convergence", min_order);
    let mut min_seen = f64::INFINITY;
    for (j, (h, r)) in hs.iter().zip(&residuals).enumerate() {
        report.measure(&format!("residual_{j}"), *r).measure(&format!("h_{j}"), *h);
        if j + 1 < hs.len() {
            let order = (r / residuals[j + 1]).ln() / (h / hs[j + 1]).ln();
            report.measure(&format!("order_{j}"), order);
            min_seen = min_seen.min(order);
        }
    }
    report.measure("min_order", min_seen).count("samples", pts.len() as u64);
    report.passed = min_seen >= min_order;
    Ok(report)
}

/// Zeros of `p` on great circles of the unit sphere.
fn sphere_zeros(p: &FloatPoly, dim: usize, samples: usize) -> Vec<Vec<f64>> {
    let circles: Vec<(Vec<f64>, Vec<f64>)> = match dim {
        2 => vec![(vec![1.0, 0.0], vec![0.0, 1.0])],
        _ => {
            let count = ((samples as f64).sqrt().ceil() as usize).max(3);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            (0..count)
                .map(|_| {
                    let a = crate::region::random_direction(dim, &mut rng);
                    let mut b = crate::region::random_direction(dim, &mut rng);
                    let d: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
                    for (bi, ai) in b.iter_mut().zip(&a) {
                        *bi -= d * ai;
                    }
                    let nb = norm(&b);
                    (a, b.into_iter().map(|t| t / nb).collect())
                })
                .collect()
        }
    };
    let per = (samples / circles.len()).max(16);
    let mut zeros = Vec::new();
    for (a, b) in &circles {
        let point = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * t.cos() + y * t.sin()).collect() };
        let val = |t: f64| p.value(&point(t));
        for j in 0..per {
            let (t0, t1) = (2.0 * PI * j as f64 / per as f64, 2.0 * PI * (j + 1) as f64 / per as f64);
            let (f0, f1) = (val(t0), val(t1));
            if f0 == 0.0 {
                zeros.push(point(t0));
                continue;
            }
            if f0.signum() == f1.signum() || f1 == 0.0 {
                continue;
            }
            let (mut lo, mut hi) = (t0, t1);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if val(mid).signum() == f0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            zeros.push(point(0.5 * (lo + hi)));
        }
    }
    zeros
}

/// Samples zeros of the leading part `v_l` on the unit sphere and checks the
/// leading part `u_k` vanishes there: `|u_k| ≤ tol · (magnitude + |∇u_k|)`.
pub fn leading_zero_inclusion(
    u: &TruncatedSeries,
    v: &TruncatedSeries,
    samples: usize,
    tol: f64,
) -> Result<VerificationReport, VerifyError> {
    if u.dim() != v.dim() {
        return Err(VerifyError::Precondition("dimension mismatch".into()));
    }
    let lead = |s: &TruncatedSeries| -> Result<Polynomial, VerifyError> {
        let k = s
            .leading_degree()
            .ok_or_else(|| VerifyError::Precondition("series is zero to its truncation degree".into()))?;
        Ok(s.coefficients().homogeneous_part(k))
    };
    let (uk, vl) = (lead(u)?, lead(v)?);
    let (uf, vf) = (uk.to_float(), vl.to_float());
    let zeros = if u.dim() >= 2 { sphere_zeros(&vf, u.dim(), samples) } else { Vec::new() };
    let mut report = VerificationReport::new("leading_zero_inclusion", tol);
    let mut worst: f64 = 0.0;
    for z in &zeros {
        let (val, g) = uf.value_and_gradient(z);
        let rel = val.abs() / (uf.magnitude(z) + norm(&g)).max(f64::MIN_POSITIVE);
        if rel > tol && report.witnesses.len() < 16 {
            report.witnesses.push(z.clone());
        }
        worst = worst.max(rel);
    }
    report
        .measure("max_relative_leading_u", worst)
        .measure("degree_u", uk.total_degree().unwrap_or(0) as f64)
        .measure("degree_v", vl.total_degree().unwrap_or(0) as f64)
        .count("zeros_of_v_leading", zeros.len() as u64);
    if zeros.is_empty() {
        report.note("leading part of v has no sampled zeros on the sphere; inclusion holds vacuously");
    }
    report.passed = worst <= tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_get, pair_get};
    use crate::poly::rat;
    use num_traits::Zero;

    #[test]
    fn max_principle_on_examples() {
        for name in ["expsin/coshsin", "self:rezk:3", "double:imz2", "linear", "self:paperH"] {
            let pair = pair_get(name).unwrap();
            let field = RatioField::new(&pair);
            let region = match pair.dim() {
                2 => Region::unit_ball(2),
                _ => Region::ball(vec![0.0; 3], 0.5),
            };
            let r = max_principle_check(&field, &region, 400, 2000, 3, 1e-9).unwrap();
            assert!(r.passed, "{name}: {}", r.summary());
        }
        // closed form on the unit disk: f = e^y / cosh y is increasing in y
        let pair = pair_get("expsin/coshsin").unwrap();
        let field = RatioField::new(&pair);
        let r = max_principle_check(&field, &Region::unit_ball(2), 400, 500, 1, 1e-9).unwrap();
        let f = |y: f64| y.exp() / y.cosh();
        assert!((r.get("boundary_max").unwrap() - f(1.0)).abs() < 1e-12);
        assert!((r.get("boundary_min").unwrap() - f(-1.0)).abs() < 1e-12);
    }

    #[test]
    fn max_principle_rejects_bad_regions() {
        let pair = pair_get("linear").unwrap();
        let field = RatioField::new(&pair);
        let annulus = Region::Annulus {
            center: vec![0.0, 0.0],
            inner: 0.2,
            outer: 0.5,
        };
        assert!(matches!(
            max_principle_check(&field, &annulus, 10, 10, 0, 1e-9),
            Err(VerifyError::Unsupported(_))
        ));
        assert!(max_principle_check(&field, &Region::ball(vec![0.0, 0.0], 0.0), 10, 10, 0, 1e-9).is_err());
    }

    #[test]
    fn harnack_examples() {
        let pair = pair_get("expsin/coshsin").unwrap();
        let field = RatioField::new(&pair);
        let r = harnack_constant(&field, &Region::cube(2, 1.0), 10_000, 1e-12).unwrap();
        assert!((r.get("c_star").unwrap() - 1f64.exp().powi(2)).abs() < 1e-9);

        let point = Region::Box {
            lo: vec![0.3, 0.2],
            hi: vec![0.3, 0.2],
        };
        let r = harnack_constant(&field, &point, 100, 1e-12).unwrap();
        assert_eq!(r.get("c_star"), Some(1.0));

        let same = pair_get("self:expsin").unwrap();
        let r = harnack_constant(&RatioField::new(&same), &Region::cube(2, 1.0), 10_000, 1e-12).unwrap();
        assert!((r.get("c_star").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn harnack_detects_vanishing_ratio() {
        // u = xy, v = x: ratio y vanishes on y = 0
        let bad = crate::catalog::SharedZeroPair::new(
            "bad",
            crate::catalog::CatalogEntry::polynomial_entry("xy", Polynomial::from_int_terms(2, &[(1, &[1, 1])]), "", ""),
            crate::catalog::CatalogEntry::polynomial_entry("x", Polynomial::variable(2, 0), "", ""),
            "",
            Region::unit_ball(2),
            "",
        );
        let err = harnack_constant(&RatioField::new(&bad), &Region::cube(2, 0.5), 441, 1e-12).unwrap_err();
        assert!(matches!(err, VerifyError::RatioVanishes { .. }));
    }

    #[test]
    fn orthogonality_examples() {
        let q = Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        let r = sphere_orthogonality(&q, &Polynomial::one(2), 1.0, 1000, 1e-10).unwrap();
        assert!(r.passed && r.get("integral").unwrap().abs() < 1e-12);

        let q3 = catalog_get("rezk:3").unwrap().polynomial().unwrap().clone();
        let r = sphere_orthogonality(&q3, &Polynomial::variable(2, 0), 1.0, 10_000, 1e-10).unwrap();
        assert!(r.get("integral").unwrap().abs() < 1e-10);

        assert!(matches!(sphere_orthogonality(&q, &q, 1.0, 100, 1e-10), Err(VerifyError::Precondition(_))));

        // 3D: paperH's cubic part is not harmonic alone, use Re(x+iy)^3 in 3D against z^2
        let q = catalog_get("rezk3:3").unwrap().polynomial().unwrap().clone();
        let z2 = Polynomial::from_int_terms(3, &[(1, &[0, 0, 2])]);
        let r = sphere_orthogonality(&q, &z2, 2.0, 5000, 1e-10).unwrap();
        assert!(r.passed, "{}", r.summary());
    }

    #[test]
    fn orthogonality_error_halves_with_points() {
        // trapezoid on the circle is exact once the points exceed the degree
        let q = catalog_get("rezk:4").unwrap().polynomial().unwrap().clone();
        let p = Polynomial::from_int_terms(2, &[(1, &[3, 0]), (1, &[0, 2])]);
        let coarse = sphere_orthogonality(&q, &p, 1.0, 4, 0.0).unwrap();
        let fine = sphere_orthogonality(&q, &p, 1.0, 8, 0.0).unwrap();
        assert!(fine.get("integral").unwrap().abs() <= 0.5 * coarse.get("integral").unwrap().abs() + 1e-14);
    }

    #[test]
    fn sign_changes() {
        let disk = Region::unit_ball(2);
        let x = Polynomial::variable(2, 0);
        assert!(sign_change_check(&x, &disk, 200, 1).unwrap().passed);
        let def = Polynomial::from_int_terms(2, &[(1, &[2, 0]), (1, &[0, 2])]);
        let r = sign_change_check(&def, &disk, 200, 1).unwrap();
        assert!(!r.passed);
        assert_eq!(r.samples["negative"], 0);
        let saddle = Polynomial::from_int_terms(2, &[(1, &[2, 0]), (-1, &[0, 2])]);
        assert!(sign_change_check(&saddle, &disk, 200, 1).unwrap().passed);
        assert!(sign_change_check(&Polynomial::one(2), &disk, 10, 1).is_err());
    }

    #[test]
    fn elliptic_residual_decays() {
        let pair = pair_get("expsin/coshsin").unwrap();
        let region = Region::cube(2, 1.0);
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let r = elliptic_convergence(&pair, &region, &hs, 200, 5, 0.2, 1.9).unwrap();
        assert!(r.passed, "{}", r.summary());

        let same = pair_get("self:coshsin").unwrap();
        let r = elliptic_residual(&same, &region, 0.01, 200, 5, 0.2, 1e-9).unwrap();
        assert!(r.get("max_abs_residual").unwrap() < 1e-10);
    }

    #[test]
    fn leading_inclusion_examples() {
        let s = |terms: &[(i64, &[u32])]| TruncatedSeries::at_origin(4, Polynomial::from_int_terms(2, terms));
        let r = leading_zero_inclusion(&s(&[(1, &[1, 0]), (1, &[1, 1])]), &s(&[(1, &[1, 0])]), 360, 1e-10).unwrap();
        assert!(r.passed);
        assert_eq!(r.samples["zeros_of_v_leading"], 2);

        let r = leading_zero_inclusion(&s(&[(1, &[1, 0])]), &s(&[(1, &[0, 1])]), 360, 1e-10).unwrap();
        assert!(!r.passed);
        assert!(r.witnesses.iter().any(|w| (w[0].abs() - 1.0).abs() < 1e-9));

        let origin = vec![crate::poly::Rational::zero(); 2];
        let u = catalog_get("expsin").unwrap().taylor_coeffs(&origin, 5).unwrap();
        let v = catalog_get("coshsin").unwrap().taylor_coeffs(&origin, 5).unwrap();
        assert!(leading_zero_inclusion(&u, &v, 360, 1e-10).unwrap().passed);

        // 3D: v = paperH leading part x^2 - y^2, u = 2 paperH
        let h = catalog_get("paperH").unwrap().polynomial().unwrap().clone();
        let v = TruncatedSeries::at_origin(3, h.clone());
        let u = TruncatedSeries::at_origin(3, h.scale(&rat(2, 1)));
        let r = leading_zero_inclusion(&u, &v, 400, 1e-10).unwrap();
        assert!(r.passed && r.samples["zeros_of_v_leading"] > 0);
    }
}
