use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::poly::Rational;

/// Univariate factor of a separable entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Factor {
    One,
    Sin,
    Cos,
    Exp,
    Cosh,
    Sinh,
}

impl Factor {
    /// `j`-th derivative at `t`.
    pub fn derivative(self, j: u32, t: f64) -> f64 {
        match self {
            Factor::One => {
                if j == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Factor::Sin => match j % 4 {
                0 => t.sin(),
                1 => t.cos(),
                2 => -t.sin(),
                _ => -t.cos(),
            },
            Factor::Cos => match j % 4 {
                0 => t.cos(),
                1 => -t.sin(),
                2 => -t.cos(),
                _ => t.sin(),
            },
            Factor::Exp => t.exp(),
            Factor::Cosh => {
                if j.is_multiple_of(2) {
                    t.cosh()
                } else {
                    t.sinh()
                }
            }
            Factor::Sinh => {
                if j.is_multiple_of(2) {
                    t.sinh()
                } else {
                    t.cosh()
                }
            }
        }
    }

    /// Upper bound for `|F|` and `|F'|` at `t`, used as a rounding scale.
    pub fn magnitude(self, t: f64) -> f64 {
        match self {
            Factor::One | Factor::Sin | Factor::Cos => 1.0,
            Factor::Exp => t.exp(),
            Factor::Cosh | Factor::Sinh => t.cosh(),
        }
    }

    /// `F^{(j)}(t) / j!` for `j = 0..=n`.
    pub fn float_coeffs(self, t: f64, n: u32) -> Vec<f64> {
        let mut fact = 1.0;
        (0..=n)
            .map(|j| {
                if j > 0 {
                    fact *= j as f64;
                }
                self.derivative(j, t) / fact
            })
            .collect()
    }

    /// Exact Taylor coefficients at `t`, available when every derivative at
    /// `t` is rational. For the transcendental factors that means `t = 0`.
    pub fn exact_coeffs(self, t: &Rational, n: u32) -> Option<Vec<Rational>> {
        if self == Factor::One {
            return Some((0..=n).map(|j| if j == 0 { Rational::one() } else { Rational::zero() }).collect());
        }
        if !t.is_zero() {
            return None;
        }
        // derivative at 0, in {-1, 0, 1}
        let d0 = |j: u32| -> i32 {
            match self {
                Factor::One => unreachable!(),
                Factor::Sin => [0, 1, 0, -1][(j % 4) as usize],
                Factor::Cos => [1, 0, -1, 0][(j % 4) as usize],
                Factor::Exp => 1,
                Factor::Cosh => j.is_multiple_of(2) as i32,
                Factor::Sinh => (j % 2 == 1) as i32,
            }
        };
        let mut fact = BigInt::one();
        Some(
            (0..=n)
                .map(|j| {
                    if j > 0 {
                        fact *= j;
                    }
                    Rational::new(BigInt::from(d0(j)), fact.clone())
                })
                .collect(),
        )
    }
}
