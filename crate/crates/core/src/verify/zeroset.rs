use std::collections::HashMap;
use std::fmt::Write;

use serde::Serialize;

use crate::catalog::ScalarField;
use crate::region::Region;

use super::VerifyError;

/// Sampled zero set: bisected edge crossings and, in 2D (or on a slice),
/// polylines joining crossings through grid cells.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ZeroSet {
    pub points: Vec<Vec<f64>>,
    pub polylines: Vec<Vec<Vec<f64>>>,
}

impl ZeroSet {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let dim = self.points.first().map_or(2, Vec::len);
        let header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|t| format!("{t:.17e}")).collect();
            writeln!(out, "{}", row.join(",")).unwrap();
        }
        out
    }

    /// SVG of the polylines projected on coordinates `(a, b)` over the
    /// window `lo..hi`.
    pub fn to_svg(&self, axes: (usize, usize), lo: [f64; 2], hi: [f64; 2]) -> String {
        let size = 512.0;
        let sx = size / (hi[0] - lo[0]);
        let sy = size / (hi[1] - lo[1]);
        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        for line in &self.polylines {
            let pts: Vec<String> = line
                .iter()
                .map(|p| format!("{:.3},{:.3}", (p[axes.0] - lo[0]) * sx, size - (p[axes.1] - lo[1]) * sy))
                .collect();
            writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bisect(f: &dyn Fn(&[f64]) -> f64, a: &[f64], b: &[f64], a_positive: bool) -> Vec<f64> {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let at = |t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(&at(mid));
        if v == 0.0 {
            return at(mid);
        }
        if (v > 0.0) == a_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (pl, ph) = (at(lo), at(hi));
    if f(&pl).abs() <= f(&ph).abs() {
        pl
    } else {
        ph
    }
}

/// Marching squares on an `m × m` grid of the plane spanned by `lift`.
/// Zero values count as positive, so every crossing lies on an edge with
/// strictly opposite signs at its ends.
fn march(
    f: &dyn Fn(&[f64]) -> f64,
    inside: &dyn Fn(&[f64]) -> bool,
    lift: &dyn Fn(f64, f64) -> Vec<f64>,
    lo: [f64; 2],
    hi: [f64; 2],
    res: usize,
) -> ZeroSet {
    let m = res + 1;
    let coord = |i: usize, k: usize| lo[k] + (hi[k] - lo[k]) * i as f64 / res as f64;
    let pts: Vec<Vec<f64>> = (0..m * m).map(|k| lift(coord(k % m, 0), coord(k / m, 1))).collect();
    let vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let ok: Vec<bool> = pts.iter().map(|p| inside(p)).collect();
    let pos = |k: usize| vals[k] >= 0.0;

    let mut out = ZeroSet::default();
    // edge key (min vertex, max vertex) -> index in out.points
    let mut crossing: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edge = |a: usize, b: usize, out: &mut ZeroSet| -> Option<usize> {
        if !(ok[a] && ok[b]) || pos(a) == pos(b) {
            return None;
        }
        let key = (a.min(b), a.max(b));
        Some(*crossing.entry(key).or_insert_with(|| {
            out.points.push(bisect(f, &pts[a], &pts[b], pos(a)));
            out.points.len() - 1
        }))
    };

    let mut segments: Vec<(usize, usize)> = Vec::new();
    for j in 0..res {
        for i in 0..res {
            let c = [j * m + i, j * m + i + 1, (j + 1) * m + i + 1, (j + 1) * m + i];
            if c.iter().any(|&k| !ok[k]) {
                continue;
            }
            let hits: Vec<usize> = (0..4).filter_map(|e| edge(c[e], c[(e + 1) % 4], &mut out)).collect();
            match hits.len() {
                2 => segments.push((hits[0], hits[1])),
                4 => {
                    // saddle cell: pair crossings by the sign at the cell center
                    let mid = lift(
                        0.5 * (coord(i, 0) + coord(i + 1, 0)),
                        0.5 * (coord(j, 1) + coord(j + 1, 1)),
                    );
                    if (f(&mid) >= 0.0) == pos(c[0]) {
                        segments.push((hits[0], hits[1]));
                        segments.push((hits[2], hits[3]));
                    } else {
                        segments.push((hits[0], hits[3]));
                        segments.push((hits[1], hits[2]));
                    }
                }
                _ => {}
            }
        }
    }
    for k in 0..m * m {
        if ok[k] && vals[k] == 0.0 && !out.points.iter().any(|p| p == &pts[k]) {
            out.points.push(pts[k].clone());
        }
    }
    out.polylines = chain(&segments, &out.points);
    out
}

/// Joins segments sharing endpoints into polylines.
fn chain(segments: &[(usize, usize)], points: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adj.entry(a).or_default().push(s);
        adj.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let other = |s: usize, v: usize| if segments[s].0 == v { segments[s].1 } else { segments[s].0 };
    // start from endpoints of open chains first, then from any leftover
    let mut starts: Vec<usize> = adj.iter().filter(|(_, e)| e.len() == 1).map(|(v, _)| *v).collect();
    starts.sort_unstable();
    starts.extend(segments.iter().map(|s| s.0));
    for start in starts {
        while let Some(&s) = adj[&start].iter().find(|&&s| !used[s]) {
            let mut line = vec![start];
            let mut cur = start;
            let mut seg = s;
            loop {
                used[seg] = true;
                cur = other(seg, cur);
                line.push(cur);
                match adj[&cur].iter().find(|&&t| !used[t]) {
                    Some(&t) => seg = t,
                    None => break,
                }
            }
            lines.push(line.into_iter().map(|i| points[i].clone()).collect());
        }
    }
    lines
}

/// Samples `Z(w)` on a grid over `region` with `resolution` intervals per
/// axis. In 2D crossings are joined into polylines; in 3D the result is the
/// point cloud of crossings on all grid edges.
pub fn zero_set_sample(w: &dyn ScalarField, region: &Region, resolution: usize) -> Result<ZeroSet, VerifyError> {
    region.validate()?;
    if region.dim() != w.dim() {
        return Err(VerifyError::Precondition("region dimension differs from w".into()));
    }
    let res = resolution.max(1);
    let (lo, hi) = region.bounds();
    let f = |x: &[f64]| w.value(x);
    let inside = |x: &[f64]| region.contains(x);
    match w.dim() {
        2 => Ok(march(&f, &inside, &|a, b| vec![a, b], [lo[0], lo[1]], [hi[0], hi[1]], res)),
        3 => {
            let mut out = ZeroSet::default();
            let m = res + 1;
            let at = |i: usize, j: usize, k: usize| -> Vec<f64> {
                [i, j, k]
                    .iter()
                    .enumerate()
                    .map(|(a, &t)| lo[a] + (hi[a] - lo[a]) * t as f64 / res as f64)
                    .collect()
            };
            for k in 0..m {
                for j in 0..m {
                    for i in 0..m {
                        let p = at(i, j, k);
                        if !inside(&p) {
                            continue;
                        }
                        let fp = f(&p);
                        if fp == 0.0 {
                            out.points.push(p);
                            continue;
                        }
                        for q in [(i + 1, j, k), (i, j + 1, k), (i, j, k + 1)] {
                            if q.0 >= m || q.1 >= m || q.2 >= m {
                                continue;
                            }
                            let qp = at(q.0, q.1, q.2);
                            if inside(&qp) && (f(&qp) >= 0.0) != (fp > 0.0) && f(&qp) != 0.0 {
                                out.points.push(bisect(&f, &p, &qp, fp > 0.0));
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
        d => Err(VerifyError::Unsupported(format!("zero-set sampling in dimension {d}"))),
    }
}

/// Zero set of a 3D function on the slice `x[axis] = value` of `region`,
/// as 3D points and polylines.
pub fn zero_set_slice(
    w: &dyn ScalarField,
    region: &Region,
    axis: usize,
    value: f64,
    resolution: usize,
) -> Result<ZeroSet, VerifyError> {
    region.validate()?;
    if w.dim() != 3 || region.dim() != 3 || axis > 2 {
        return Err(VerifyError::Precondition("slices need a 3D function, a 3D region and axis 0, 1 or 2".into()));
    }
    let (lo, hi) = region.bounds();
    let free: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
    let lift = |a: f64, b: f64| {
        let mut x = vec![0.0; 3];
        x[axis] = value;
        x[free[0]] = a;
        x[free[1]] = b;
        x
    };
    let f = |x: &[f64]| w.value(x);
    let inside = |x: &[f64]| region.contains(x);
    Ok(march(
        &f,
        &inside,
        &lift,
        [lo[free[0]], lo[free[1]]],
        [hi[free[0]], hi[free[1]]],
        resolution.max(1),
    ))
}
