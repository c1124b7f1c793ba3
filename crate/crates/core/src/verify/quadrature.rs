use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// `P_n` from the Chebyshev initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (x, 1.0) } else { (p1, p0) };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integrates `f` over the sphere of radius `r` about the origin in 2 or 3
/// dimensions using about `points` evaluations: the trapezoid rule on the
/// circle, Gauss-Legendre in `cos θ` times the trapezoid rule in `φ` on the
/// 2-sphere. Returns `(∫ f, ∫ |f|, evaluations)`.
pub(crate) fn sphere_integral(dim: usize, r: f64, points: usize, f: impl Fn(&[f64]) -> f64) -> Option<(f64, f64, usize)> {
    match dim {
        2 => {
            let m = points.max(1);
            let h = 2.0 * PI / m as f64;
            let (mut s, mut a) = (0.0, 0.0);
            for j in 0..m {
                let t = h * j as f64;
                let v = f(&[r * t.cos(), r * t.sin()]);
                s += v;
                a += v.abs();
            }
            Some((s * h * r, a * h * r, m))
        }
        3 => {
            let nt = (((points as f64) / 2.0).sqrt().round() as usize).max(2);
            let np = 2 * nt;
            let (nodes, weights) = gauss_legendre(nt);
            let h = 2.0 * PI / np as f64;
            let (mut s, mut a) = (0.0, 0.0);
            for (c, w) in nodes.iter().zip(&weights) {
                let sn = (1.0 - c * c).sqrt();
                for j in 0..np {
                    let p = h * j as f64;
                    let v = f(&[r * sn * p.cos(), r * sn * p.sin(), r * c]);
                    s += w * v;
                    a += w * v.abs();
                }
            }
            Some((s * h * r * r, a * h * r * r, nt * np))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            // degree 2n-1 exact
            let deg = 2 * n as i32 - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - 2.0 / (deg + 1) as f64).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn sphere_areas() {
        let (s, _, _) = sphere_integral(2, 2.0, 64, |_| 1.0).unwrap();
        assert!((s - 4.0 * PI).abs() < 1e-12);
        let (s, _, _) = sphere_integral(3, 2.0, 200, |_| 1.0).unwrap();
        assert!((s - 16.0 * PI).abs() < 1e-12);
        // ∫ z^2 over the unit sphere = 4π/3
        let (s, _, _) = sphere_integral(3, 1.0, 200, |x| x[2] * x[2]).unwrap();
        assert!((s - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!(sphere_integral(4, 1.0, 10, |_| 1.0).is_none());
    }
}
