//! Sampling regions in `R^n`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("cannot parse region `{text}`: {message}")]
    Parse { text: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Sphere { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
}

impl Region {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    pub fn unit_ball(dim: usize) -> Self {
        Region::Ball {
            center: vec![0.0; dim],
            radius: 1.0,
        }
    }

    pub fn cube(dim: usize, half: f64) -> Self {
        Region::Box {
            lo: vec![-half; dim],
            hi: vec![half; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } | Region::Sphere { center, .. } | Region::Annulus { center, .. } => {
                center.len()
            }
            Region::Box { lo, .. } => lo.len(),
        }
    }

    /// Rejects empty or zero-measure regions. A point-like box (`lo == hi`)
    /// is allowed since it is a valid compact set for sampling.
    pub fn validate(&self) -> Result<(), RegionError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Region::Ball { center, radius } | Region::Sphere { center, radius } => {
                if center.is_empty() || !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(RegionError::Degenerate(format!("radius {radius}")));
                }
            }
            Region::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() || !finite(lo) || !finite(hi) {
                    return Err(RegionError::Degenerate("box bounds".into()));
                }
                if lo.iter().zip(hi).any(|(a, b)| a > b) {
                    return Err(RegionError::Degenerate("box has lo > hi".into()));
                }
            }
            Region::Annulus { center, inner, outer } => {
                if center.is_empty() || !finite(center) || !(*inner >= 0.0 && inner < outer && outer.is_finite()) {
                    return Err(RegionError::Degenerate(format!("annulus radii {inner}, {outer}")));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => dist(x, center) <= *radius,
            Region::Sphere { center, radius } => (dist(x, center) - radius).abs() <= 1e-12 * radius.max(1.0),
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *a <= *v && *v <= *b),
            Region::Annulus { center, inner, outer } => {
                let d = dist(x, center);
                *inner <= d && d <= *outer
            }
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Ball { center, radius } | Region::Sphere { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Region::Annulus { center, outer, .. } => (
                center.iter().map(|c| c - outer).collect(),
                center.iter().map(|c| c + outer).collect(),
            ),
            Region::Box { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    /// A uniformly distributed point (surface measure for spheres).
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            Region::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| if a == b { *a } else { rng.gen_range(*a..=*b) })
                .collect(),
            Region::Sphere { center, radius } => {
                let d = random_direction(center.len(), rng);
                center.iter().zip(d).map(|(c, u)| c + radius * u).collect()
            }
            Region::Ball { center, radius } => {
                let n = center.len() as f64;
                let rho = radius * rng.gen::<f64>().powf(1.0 / n);
                let d = random_direction(center.len(), rng);
                center.iter().zip(d).map(|(c, u)| c + rho * u).collect()
            }
            Region::Annulus { center, inner, outer } => {
                let n = center.len() as i32;
                let (a, b) = (inner.powi(n), outer.powi(n));
                let rho = (a + (b - a) * rng.gen::<f64>()).powf(1.0 / n as f64);
                let d = random_direction(center.len(), rng);
                center.iter().zip(d).map(|(c, u)| c + rho * u).collect()
            }
        }
    }

    /// Parses `c1,c2,…:radius`.
    pub fn parse_ball(text: &str) -> Result<Self, RegionError> {
        let err = |message: &str| RegionError::Parse {
            text: text.to_string(),
            message: message.to_string(),
        };
        let (c, r) = text.split_once(':').ok_or_else(|| err("expected `center:radius`"))?;
        let center = parse_list(c).map_err(|m| err(&m))?;
        let radius: f64 = r.trim().parse().map_err(|_| err("bad radius"))?;
        let region = Region::Ball { center, radius };
        region.validate()?;
        Ok(region)
    }

    /// Parses `lo1,hi1,lo2,hi2,…`.
    pub fn parse_box(text: &str) -> Result<Self, RegionError> {
        let err = |message: &str| RegionError::Parse {
            text: text.to_string(),
            message: message.to_string(),
        };
        let v = parse_list(text).map_err(|m| err(&m))?;
        if v.is_empty() || v.len() % 2 != 0 {
            return Err(err("expected an even number of bounds"));
        }
        let region = Region::Box {
            lo: v.iter().step_by(2).copied().collect(),
            hi: v.iter().skip(1).step_by(2).copied().collect(),
        };
        region.validate()?;
        Ok(region)
    }
}

pub(crate) fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad number `{}`", s.trim())))
        .collect()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn random_direction<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
