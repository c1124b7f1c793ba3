use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::catalog::{ScalarField, SharedZeroPair};
use crate::division::{ratio_coefficients, series_ratio, TruncatedSeries};
use crate::poly::{FloatPoly, MultiIndex, Rational};

use super::{norm, snap_point};

/// How a ratio sample was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatioValue {
    /// `u(x) / v(x)`.
    Direct(f64),
    /// Sum of the ratio series about a nearby zero of `v`.
    Series(f64),
    /// Near a zero of `v` where no expansion was available.
    Skipped,
}

impl RatioValue {
    pub fn value(self) -> Option<f64> {
        match self {
            RatioValue::Direct(f) | RatioValue::Series(f) => Some(f),
            RatioValue::Skipped => None,
        }
    }
}

/// Evaluates `f = u / v` for a shared-zero pair.
///
/// Away from `Z(v)` this is plain division. Within `guard` (estimated as
/// `|v| / |∇v|`) of the zero set, `x` is projected onto `Z(v)` by Newton
/// steps and `f` is summed from its Taylor series there. Regular zeros use a
/// float run of the ratio recursion (with the steepest axis moved first so
/// the `(1,0,…,0)` coefficient is non-zero). Critical zeros are handled only
/// for polynomial pairs whose zero snaps to a rational point, where the exact
/// series is used; anything else is reported as skipped.
pub struct RatioField<'a> {
    pair: &'a SharedZeroPair,
    pub guard: f64,
    pub series_degree: u32,
    exact_cache: Mutex<HashMap<Vec<Rational>, Option<FloatPoly>>>,
}

impl<'a> RatioField<'a> {
    pub fn new(pair: &'a SharedZeroPair) -> Self {
        RatioField {
            pair,
            guard: 1e-3,
            series_degree: 8,
            exact_cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_guard(mut self, guard: f64) -> Self {
        self.guard = guard;
        self
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    pub fn eval(&self, x: &[f64]) -> RatioValue {
        let (u, v) = (self.pair.u_field(), self.pair.v_field());
        let (vv, gv) = v.value_and_gradient(x);
        let gn = norm(&gv);
        if vv != 0.0 && vv.abs() > self.guard * gn {
            return RatioValue::Direct(u.value(x) / vv);
        }

        // Newton projection onto Z(v)
        let mut z = x.to_vec();
        for _ in 0..60 {
            let (val, g) = v.value_and_gradient(&z);
            let g2: f64 = g.iter().map(|t| t * t).sum();
            if val == 0.0 || g2 == 0.0 {
                break;
            }
            let mut step = 0.0;
            for (zi, gi) in z.iter_mut().zip(&g) {
                let d = val * gi / g2;
                *zi -= d;
                step += d * d;
            }
            if step.sqrt() <= 1e-16 * (1.0 + norm(&z)) {
                break;
            }
        }
        if super::dist(&z, x) > 10.0 * self.guard.max(1e-12) {
            return RatioValue::Skipped;
        }
        let (vz, gz) = v.value_and_gradient(&z);
        let mag = v.magnitude(&z).max(f64::MIN_POSITIVE);
        if vz.abs() > 1e-10 * mag {
            return RatioValue::Skipped;
        }
        let y: Vec<f64> = x.iter().zip(&z).map(|(a, b)| a - b).collect();
        if norm(&gz) > 1e-6 * mag {
            RatioValue::Series(self.float_series(&z, &gz, &y))
        } else {
            self.exact_series(&z, x)
        }
    }

    fn float_series(&self, z: &[f64], grad: &[f64], y: &[f64]) -> f64 {
        let n = z.len();
        let d = self.series_degree;
        let axis = (0..n)
            .max_by(|&a, &b| grad[a].abs().total_cmp(&grad[b].abs()))
            .unwrap_or(0);
        let swap = |i: MultiIndex| -> MultiIndex {
            let mut e = i.exponents().to_vec();
            e.swap(0, axis);
            MultiIndex::new(e)
        };
        // constant terms are rounding noise at a zero
        let collect = |terms: Vec<(MultiIndex, f64)>| -> Vec<(MultiIndex, f64)> {
            terms.into_iter().filter(|(i, _)| !i.is_zero()).map(|(i, c)| (swap(i), c)).collect()
        };
        let uc: BTreeMap<MultiIndex, f64> = collect(self.pair.u_field().taylor_f64(z, d + 1)).into_iter().collect();
        let vc = collect(self.pair.v_field().taylor_f64(z, d + 1));
        let f = ratio_coefficients(n, 1, d, |i| uc.get(i).copied().unwrap_or(0.0), &vc, |_, _| {});
        let mut ys = y.to_vec();
        ys.swap(0, axis);
        f.iter()
            .map(|(i, c)| c * i.exponents().iter().zip(&ys).map(|(&e, t)| t.powi(e as i32)).product::<f64>())
            .sum()
    }

    fn exact_series(&self, z: &[f64], x: &[f64]) -> RatioValue {
        let (Some(pu), Some(pv)) = (self.pair.u.polynomial(), self.pair.v.polynomial()) else {
            return RatioValue::Skipped;
        };
        let Some(center) = snap_point(z, 1 << 12, 1e-9) else {
            return RatioValue::Skipped;
        };
        let f = {
            let mut cache = self.exact_cache.lock().expect("cache lock");
            cache
                .entry(center.clone())
                .or_insert_with(|| {
                    let d = self.series_degree;
                    let vs = TruncatedSeries::from_polynomial(pv, &center, d + 8).ok()?;
                    let k = vs.leading_degree()?;
                    if k == 0 || k > 8 {
                        return None;
                    }
                    let us = TruncatedSeries::from_polynomial(pu, &center, d + k).ok()?;
                    let out = series_ratio(&us, &vs.truncate(d + k), d).ok()?;
                    Some(out.quotient.as_polynomial().to_float())
                })
                .clone()
        };
        let Some(f) = f else {
            return RatioValue::Skipped;
        };
        let c: Vec<f64> = center.iter().map(|q| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)).collect();
        let y: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
        RatioValue::Series(f.value(&y) * self.pair.u_scale / self.pair.v_scale)
    }
}
