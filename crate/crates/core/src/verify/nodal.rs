use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::ScalarField;
use crate::division::TruncatedSeries;
use crate::poly::{FloatPoly, Polynomial, Rational};
use crate::region::Region;

use super::{dist, norm, snap_point, VerifyError, GRADIENT_TOL, ZERO_TOL};

/// Depth `d(x)` of a zero of `w`: the degree of the first non-zero
/// homogeneous part of the Taylor shift of `w` to `x`.
pub fn depth_of_zero(w: &Polynomial, x: &[Rational]) -> Result<u32, VerifyError> {
    if x.len() != w.dim() {
        return Err(VerifyError::Precondition("point dimension differs from w".into()));
    }
    if w.is_zero() {
        return Err(VerifyError::Precondition("w is identically zero".into()));
    }
    let shifted = w.taylor_shift(x).map_err(|e| VerifyError::Precondition(e.to_string()))?;
    match shifted.min_degree() {
        Some(0) => Err(VerifyError::NotAZero(crate::poly::format_rational(
            &shifted.coeff(&crate::poly::MultiIndex::zero(w.dim())),
        ))),
        Some(d) => Ok(d),
        None => unreachable!("a shift of a non-zero polynomial is non-zero"),
    }
}

/// Depth of a zero of a truncated series. Only the expansion point itself
/// can be probed: elsewhere the truncation gives no exact information.
pub fn depth_of_series(s: &TruncatedSeries, x: &[Rational]) -> Result<u32, VerifyError> {
    if x != s.center() {
        return Err(VerifyError::Unsupported("a truncated series can only be probed at its center".into()));
    }
    match s.leading_degree() {
        Some(0) => Err(VerifyError::NotAZero(crate::poly::format_rational(
            &s.coeff(&crate::poly::MultiIndex::zero(s.dim())),
        ))),
        Some(d) => Ok(d),
        None => Err(VerifyError::Precondition(format!(
            "series vanishes to its truncation degree {}",
            s.max_degree()
        ))),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub w: f64,
    pub grad_norm: f64,
    /// `None` if the point did not snap to a rational zero.
    pub depth: Option<u32>,
    /// `"good"` or `"unclassified"`.
    pub label: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodalCount {
    pub count: usize,
    /// Grid points dropped because `|w|` is within the zero band.
    pub excluded: u64,
    pub resolution: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NodalAnalysisReport {
    pub zeros: Vec<Vec<f64>>,
    pub critical_points: Vec<CriticalPoint>,
    pub nodal_domains: Option<NodalCount>,
    pub zero_tol: f64,
    pub gradient_tol: f64,
    pub grid: usize,
}

impl NodalAnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Solves the square system `a x = b` by Gaussian elimination with partial
/// pivoting. `None` if singular.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Levenberg-Marquardt on `F = (w, ∇w)`.
fn refine_critical(w: &FloatPoly, x0: &[f64]) -> Vec<f64> {
    let n = x0.len();
    let residual = |x: &[f64]| -> Vec<f64> {
        let (v, g) = w.value_and_gradient(x);
        std::iter::once(v).chain(g).collect()
    };
    let cost = |f: &[f64]| f.iter().map(|t| t * t).sum::<f64>();
    let mut x = x0.to_vec();
    let mut f = residual(&x);
    let mut c = cost(&f);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        if c == 0.0 {
            break;
        }
        let (_, g) = w.value_and_gradient(&x);
        let h = w.hessian(&x);
        // Jacobian rows: ∇w, then the Hessian
        let jac: Vec<&[f64]> = std::iter::once(g.as_slice()).chain(h.iter().map(|r| r.as_slice())).collect();
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtf = vec![0.0; n];
        for (row, fi) in jac.iter().zip(&f) {
            for i in 0..n {
                jtf[i] -= row[i] * fi;
                for j in 0..n {
                    jtj[i][j] += row[i] * row[j];
                }
            }
        }
        let mut accepted = false;
        let mut step_norm = 0.0;
        for _ in 0..40 {
            let mut a = jtj.clone();
            let scale = (0..n).map(|i| jtj[i][i]).fold(0.0, f64::max).max(1e-300);
            for (i, row) in a.iter_mut().enumerate() {
                row[i] += lambda * scale.max(jtj[i][i]);
            }
            let Some(d) = solve(a, jtf.clone()) else {
                lambda *= 4.0;
                continue;
            };
            let cand: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            let fc = residual(&cand);
            let cc = cost(&fc);
            if cc < c {
                step_norm = norm(&d);
                x = cand;
                f = fc;
                c = cc;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 4.0;
        }
        if !accepted || step_norm < 1e-14 {
            break;
        }
    }
    x
}

/// Tensor grid with `m` points per axis (odd, so the center is included)
/// over the bounding box of `region`.
fn grid_axes(region: &Region, m: usize) -> Vec<Vec<f64>> {
    let (lo, hi) = region.bounds();
    lo.iter()
        .zip(&hi)
        .map(|(a, b)| (0..m).map(|j| a + (b - a) * j as f64 / (m - 1) as f64).collect())
        .collect()
}

fn unflatten(mut flat: usize, m: usize, n: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let i = flat % m;
            flat /= m;
            i
        })
        .collect()
}

/// Samples the critical zero set `Z₁ = {w = 0, ∇w = 0}` in `region`.
///
/// Grid local minima of `w² + |∇w|²` are refined by Levenberg-Marquardt on
/// `(w, ∇w)` and kept if `|w| < 1e-10` and `|∇w| < 1e-8` inside the region.
/// Depths come from snapping to a rational point and probing exactly.
/// Points on a detected critical curve with constant depth are labelled
/// `"good"`; everything else is `"unclassified"`.
pub fn critical_set_sample(w: &Polynomial, region: &Region, grid: usize) -> Result<NodalAnalysisReport, VerifyError> {
    region.validate()?;
    if region.dim() != w.dim() {
        return Err(VerifyError::Precondition("region dimension differs from w".into()));
    }
    let n = w.dim();
    let m = (grid.max(3)) | 1;
    let axes = grid_axes(region, m);
    let total = m.checked_pow(n as u32).ok_or_else(|| VerifyError::Precondition("grid too large".into()))?;
    let fw = w.to_float();
    let point = |idx: &[usize]| -> Vec<f64> { idx.iter().enumerate().map(|(i, &j)| axes[i][j]).collect() };
    let objective: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let x = point(&unflatten(flat, m, n));
            if !region.contains(&x) {
                return f64::INFINITY;
            }
            let (v, g) = fw.value_and_gradient(&x);
            v * v + g.iter().map(|t| t * t).sum::<f64>()
        })
        .collect();

    let offsets: Vec<Vec<i64>> = (0..3usize.pow(n as u32))
        .map(|k| unflatten(k, 3, n).into_iter().map(|t| t as i64 - 1).collect::<Vec<_>>())
        .filter(|o: &Vec<i64>| o.iter().any(|&t| t != 0))
        .collect();
    let minima: Vec<usize> = (0..total)
        .into_par_iter()
        .filter(|&flat| {
            let g = objective[flat];
            if !g.is_finite() {
                return false;
            }
            let idx = unflatten(flat, m, n);
            offsets.iter().all(|o| {
                let mut nb = 0usize;
                let mut stride = 1usize;
                for (i, &t) in idx.iter().enumerate() {
                    let j = t as i64 + o[i];
                    if j < 0 || j >= m as i64 {
                        return true;
                    }
                    nb += j as usize * stride;
                    stride *= m;
                }
                g <= objective[nb]
            })
        })
        .collect();

    let refined: Vec<Vec<f64>> = minima
        .par_iter()
        .map(|&flat| refine_critical(&fw, &point(&unflatten(flat, m, n))))
        .collect();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for x in refined {
        if !region.contains(&x) {
            continue;
        }
        let (v, g) = fw.value_and_gradient(&x);
        if v.abs() >= ZERO_TOL || norm(&g) >= GRADIENT_TOL {
            continue;
        }
        if found.iter().all(|y| dist(y, &x) > 1e-6) {
            found.push(x);
        }
    }

    let spacing = axes
        .iter()
        .map(|a| if a.len() > 1 { a[1] - a[0] } else { 0.0 })
        .fold(0.0, f64::max);
    let depths: Vec<Option<u32>> = found
        .iter()
        .map(|x| snap_point(x, 1 << 12, 1e-9).and_then(|q| depth_of_zero(w, &q).ok()))
        .collect();

    // chains of critical points closer than a grid diagonal
    let link = 1.5 * spacing * (n as f64).sqrt();
    let mut uf = UnionFind::new(found.len());
    for i in 0..found.len() {
        for j in 0..i {
            if dist(&found[i], &found[j]) <= link {
                uf.union(i, j);
            }
        }
    }
    let mut members: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..found.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut critical_points = Vec::with_capacity(found.len());
    for (i, x) in found.iter().enumerate() {
        let chain = &members[&uf.find(i)];
        let (label, reason) = if chain.len() < 3 {
            ("unclassified", "isolated critical point".to_string())
        } else {
            let ds: Vec<Option<u32>> = chain.iter().map(|&j| depths[j]).collect();
            match ds[0] {
                Some(d) if ds.iter().all(|e| *e == Some(d)) => {
                    ("good", format!("constant depth {d} along a critical curve of {} samples", chain.len()))
                }
                _ if ds.iter().any(|e| e.is_none()) => {
                    ("unclassified", "depth unavailable on part of the critical curve".to_string())
                }
                _ => ("unclassified", "depth varies along the critical curve".to_string()),
            }
        };
        let (v, g) = fw.value_and_gradient(x);
        critical_points.push(CriticalPoint {
            x: x.clone(),
            w: v,
            grad_norm: norm(&g),
            depth: depths[i],
            label: label.into(),
            reason,
        });
    }

    // zero samples: sign changes along the first axis, bisected
    let mut zeros = Vec::new();
    'scan: for flat in 0..total {
        let idx = unflatten(flat, m, n);
        if idx[0] + 1 >= m {
            continue;
        }
        let a = point(&idx);
        let mut next = idx.clone();
        next[0] += 1;
        let b = point(&next);
        if !(region.contains(&a) && region.contains(&b)) {
            continue;
        }
        if let Some(z) = crate::catalog::bisect_segment(w_field(&fw), &a, &b) {
            zeros.push(z);
            if zeros.len() >= 4096 {
                break 'scan;
            }
        }
    }

    Ok(NodalAnalysisReport {
        zeros,
        critical_points,
        nodal_domains: None,
        zero_tol: ZERO_TOL,
        gradient_tol: GRADIENT_TOL,
        grid: m,
    })
}

fn w_field(f: &FloatPoly) -> &dyn ScalarField {
    f
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.parent.len() - 1
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Sign (`±1`) and local component label of each point of one 2D slice;
/// `0` sign marks excluded points.
struct SliceLabels {
    signs: Vec<i8>,
    labels: Vec<u32>,
    components: u32,
    excluded: u64,
}

fn label_slice(w: &dyn ScalarField, region: &Region, axes: &[Vec<f64>], z: Option<f64>) -> SliceLabels {
    let m0 = axes[0].len();
    let m1 = axes[1].len();
    let mut signs = vec![0i8; m0 * m1];
    let mut excluded = 0;
    let mut x = vec![0.0; if z.is_some() { 3 } else { 2 }];
    if let Some(z) = z {
        x[2] = z;
    }
    for j in 0..m1 {
        for i in 0..m0 {
            x[0] = axes[0][i];
            x[1] = axes[1][j];
            if !region.contains(&x) {
                continue;
            }
            let v = w.value(&x);
            if v.abs() <= ZERO_TOL * w.magnitude(&x) || v == 0.0 {
                excluded += 1;
                continue;
            }
            signs[j * m0 + i] = if v > 0.0 { 1 } else { -1 };
        }
    }
    let mut uf = UnionFind::new(m0 * m1);
    for j in 0..m1 {
        for i in 0..m0 {
            let k = j * m0 + i;
            let s = signs[k];
            if s == 0 {
                continue;
            }
            if i > 0 && signs[k - 1] == s {
                uf.union(k, k - 1);
            }
            if j > 0 && signs[k - m0] == s {
                uf.union(k, k - m0);
            }
        }
    }
    let mut compact = vec![u32::MAX; m0 * m1];
    let mut labels = vec![u32::MAX; m0 * m1];
    let mut components = 0;
    for k in 0..m0 * m1 {
        if signs[k] == 0 {
            continue;
        }
        let r = uf.find(k);
        if compact[r] == u32::MAX {
            compact[r] = components;
            components += 1;
        }
        labels[k] = compact[r];
    }
    SliceLabels {
        signs,
        labels,
        components,
        excluded,
    }
}

/// Number of connected sign-constant components of `w` on a grid over
/// `region` with `resolution` intervals per axis (rounded up to even so the
/// center is a grid point). 4-connectivity in 2D, 6-connectivity in 3D.
/// Grid points with `|w| ≤ 1e-10 · magnitude` are excluded.
pub fn nodal_domain_count(w: &dyn ScalarField, region: &Region, resolution: usize) -> Result<NodalCount, VerifyError> {
    region.validate()?;
    if region.dim() != w.dim() {
        return Err(VerifyError::Precondition("region dimension differs from w".into()));
    }
    let res = resolution.max(2).next_multiple_of(2);
    let axes = grid_axes(region, res + 1);
    match w.dim() {
        2 => {
            let s = label_slice(w, region, &axes, None);
            Ok(NodalCount {
                count: s.components as usize,
                excluded: s.excluded,
                resolution: res,
            })
        }
        3 => {
            let mut uf = UnionFind::new(0);
            let mut prev: Option<(SliceLabels, usize)> = None;
            let mut excluded = 0;
            for chunk in axes[2].chunks(32) {
                let slices: Vec<SliceLabels> =
                    chunk.par_iter().map(|&z| label_slice(w, region, &axes, Some(z))).collect();
                for s in slices {
                    let offset = uf.parent.len();
                    for _ in 0..s.components {
                        uf.push();
                    }
                    if let Some((p, poff)) = &prev {
                        for k in 0..s.signs.len() {
                            if s.signs[k] != 0 && s.signs[k] == p.signs[k] {
                                uf.union(offset + s.labels[k] as usize, poff + p.labels[k] as usize);
                            }
                        }
                    }
                    excluded += s.excluded;
                    prev = Some((s, offset));
                }
            }
            let total = uf.parent.len();
            let count = (0..total).filter(|&i| uf.find(i) == i).count();
            Ok(NodalCount {
                count,
                excluded,
                resolution: res,
            })
        }
        d => Err(VerifyError::Unsupported(format!("nodal counting in dimension {d}"))),
    }
}
