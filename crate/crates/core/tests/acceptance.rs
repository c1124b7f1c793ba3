//! Acceptance criteria 1-10, one PASS/FAIL line each.

use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use harmratio::catalog::{catalog_get, harmonic_basis, pair_get, pair_names, ScalarField};
use harmratio::division::{
    bound_certificate, certify_ratio, divide_by_harmonic, series_ratio, verify_certificate, TruncatedSeries,
};
use harmratio::poly::{indices_up_to, rat, rotate, Polynomial, Rational, RationalOrthogonalMatrix};
use harmratio::region::Region;
use harmratio::verify::{
    critical_set_sample, depth_of_zero, elliptic_convergence, harnack_constant, max_principle_check,
    nodal_domain_count, sphere_orthogonality, RatioField,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize, max_deg: u32) -> Polynomial {
    let terms = indices_up_to(n, max_deg)
        .into_iter()
        .filter_map(|i| {
            let c: i64 = rng.gen_range(-3..=3);
            (c != 0 && rng.gen_bool(0.5)).then(|| (i, rat(c, rng.gen_range(1..=4))))
        })
        .collect::<Vec<_>>();
    Polynomial::from_terms(n, terms).unwrap()
}

fn random_harmonic(rng: &mut ChaCha8Rng, n: usize, d: u32) -> Polynomial {
    loop {
        let mut q = Polynomial::zero(n);
        for b in harmonic_basis(n, d) {
            q = &q + &b.scale(&rat(rng.gen_range(-3..=3), 1));
        }
        if !q.is_zero() {
            return q;
        }
    }
}

fn criterion_1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    for case in 0..200 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let d = rng.gen_range(1..=5);
        let q = random_harmonic(&mut rng, n, d);
        ensure(q.is_harmonic() && q.is_homogeneous(), format!("case {case}: generated Q is not harmonic"))?;
        let d = rng.gen_range(0..=4);
        let r = random_poly(&mut rng, n, d);
        let p = &q * &r;
        let out = divide_by_harmonic(&p, &q).map_err(|e| format!("case {case}: {e}"))?;
        ensure(out.quotient.as_polynomial() == &r, format!("case {case}: quotient differs from R"))?;
        ensure(out.residual_verified, format!("case {case}: residual not verified"))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), format!("took {t:?}"))?;
    Ok(format!("200 cases exact in {:.2}s (limit 10s)", t.as_secs_f64()))
}

/// Coefficients of e^y / cosh y by univariate series division.
fn exp_sech_oracle(n: usize) -> Vec<Rational> {
    let mut fact = vec![Rational::one()];
    for j in 1..=n {
        let prev = fact[j - 1].clone();
        fact.push(prev * rat(j as i64, 1));
    }
    let e: Vec<Rational> = fact.iter().map(|f| Rational::one() / f).collect();
    let c: Vec<Rational> = (0..=n)
        .map(|j| if j % 2 == 0 { e[j].clone() } else { Rational::zero() })
        .collect();
    let mut f: Vec<Rational> = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let mut s = e[j].clone();
        for i in 0..j {
            s -= &c[j - i] * &f[i];
        }
        f.push(s / &c[0]);
    }
    f
}

fn criterion_2() -> Check {
    let pair = pair_get("expsin/coshsin").unwrap();
    let origin = vec![Rational::zero(); 2];
    let (u, v) = pair.taylor_series(&origin, 9).map_err(|e| e.to_string())?;
    let out = series_ratio(&u, &v, 8).map_err(|e| e.to_string())?;
    ensure(out.residual_verified, "residual not verified")?;
    let q = out.quotient.as_series().unwrap();
    let oracle = exp_sech_oracle(8);
    for beta in indices_up_to(2, 8) {
        let e = beta.exponents();
        let want = if e[0] == 0 { oracle[e[1] as usize].clone() } else { Rational::zero() };
        ensure(q.coeff(&beta) == want, format!("coefficient {beta}: got {}, want {want}", q.coeff(&beta)))?;
    }
    ensure(oracle[..4] == [rat(1, 1), rat(1, 1), rat(0, 1), rat(-1, 3)], "oracle prefix")?;
    Ok("45 coefficients to degree 8 equal the e^y sech y expansion (1, 1, 0, -1/3, ...)".into())
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let mut count = 0;
    for a in [rat(1, 1), rat(10, 1)] {
        for c in [rat(1, 1), rat(1, 2)] {
            for r in [rat(1, 1), rat(2, 1)] {
                for k in 0..=3 {
                    for n in 2..=4 {
                        let cert = bound_certificate(&a, &c, &r, k, n).map_err(|e| e.to_string())?;
                        let rep = verify_certificate(&cert, 12);
                        let v = rep.get("violations").unwrap_or(f64::NAN);
                        ensure(rep.passed && v == 0.0, format!("a={a} c={c} r={r} k={k} n={n}: {}", rep.summary()))?;
                        count += 1;
                    }
                }
            }
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!("{count} certificates, 0 violations at N=12 in {:.2}s (limit 60s)", t.as_secs_f64()))
}

fn criterion_4() -> Check {
    let h = catalog_get("paperH").unwrap();
    let ball = Region::ball(vec![0.0; 3], 0.5);
    let mut parts = Vec::new();
    for res in [256, 512] {
        let c = nodal_domain_count(&h, &ball, res).map_err(|e| e.to_string())?;
        ensure(c.count == 2, format!("paperH at resolution {res}: {} domains", c.count))?;
        parts.push(format!("paperH@{res}=2"));
    }
    let disk = Region::unit_ball(2);
    for k in 2..=4u32 {
        let e = catalog_get(&format!("rezk:{k}")).unwrap();
        for res in [256, 512] {
            let c = nodal_domain_count(&e, &disk, res).map_err(|e| e.to_string())?;
            ensure(c.count == 2 * k as usize, format!("Re z^{k} at {res}: {} domains", c.count))?;
        }
        parts.push(format!("Re z^{k}={}", 2 * k));
    }
    Ok(parts.join(", "))
}

fn criterion_5() -> Check {
    let pair = pair_get("expsin/coshsin").unwrap();
    let field = RatioField::new(&pair);
    let square = Region::cube(2, 1.0);
    let r = harnack_constant(&field, &square, 1_000_000, 1e-12).map_err(|e| e.to_string())?;
    let c = r.get("c_star").unwrap();
    let e2 = 1f64.exp().powi(2);
    ensure((c - e2).abs() < 1e-3, format!("C* = {c}, e^2 = {e2}"))?;
    let same = pair_get("self:expsin").unwrap();
    let r1 = harnack_constant(&RatioField::new(&same), &square, 10_000, 1e-12).map_err(|e| e.to_string())?;
    let c1 = r1.get("c_star").unwrap();
    ensure((c1 - 1.0).abs() < 1e-12, format!("u = v gives C* = {c1}"))?;
    Ok(format!("C* = {c:.9} (|C* - e^2| = {:.1e}, tol 1e-3); u = v gives {c1}", (c - e2).abs()))
}

/// Random ball inside `region` (a ball or a box).
fn sub_ball(region: &Region, rng: &mut ChaCha8Rng) -> Region {
    let center = region.sample(rng);
    let room = match region {
        Region::Ball { center: c, radius } => {
            radius - c.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
        }
        Region::Box { lo, hi } => center
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (l, h))| (x - l).min(h - x))
            .fold(f64::INFINITY, f64::min),
        _ => unreachable!("catalog regions are balls and boxes"),
    };
    Region::ball(center, room * rng.gen_range(0.1..0.99))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = f64::NEG_INFINITY;
    let names = pair_names();
    for name in &names {
        let pair = pair_get(name).unwrap();
        let field = RatioField::new(&pair);
        for trial in 0..100 {
            let disk = sub_ball(&pair.region, &mut rng);
            let rep = max_principle_check(&field, &disk, 200, 300, trial, 1e-9).map_err(|e| format!("{name}: {e}"))?;
            let bmax = rep.get("boundary_max_abs").unwrap();
            let imax = rep.get("interior_max_abs").unwrap();
            let excess = (imax - bmax) / bmax;
            worst = worst.max(excess);
            ensure(
                rep.passed && excess <= 1e-9,
                format!("{name}, trial {trial}: {}", rep.summary()),
            )?;
        }
    }
    Ok(format!(
        "{} pairs x 100 sub-disks, worst relative excess of interior max |f| = {worst:.1e} (tol 1e-9)",
        names.len()
    ))
}

fn criterion_7() -> Check {
    let q3 = catalog_get("rezk:3").unwrap().polynomial().unwrap().clone();
    let x = Polynomial::variable(2, 0);
    let r = sphere_orthogonality(&q3, &x, 1.0, 10_000, 1e-10).map_err(|e| e.to_string())?;
    let i1 = r.get("integral").unwrap();
    ensure(i1.abs() < 1e-10, format!("x (x^3 - 3xy^2): {i1:e}"))?;
    let q2 = catalog_get("saddle2d").unwrap().polynomial().unwrap().clone();
    let r = sphere_orthogonality(&q2, &Polynomial::one(2), 1.0, 10_000, 1e-10).map_err(|e| e.to_string())?;
    let i2 = r.get("integral").unwrap();
    ensure(i2.abs() < 1e-10, format!("mean value case: {i2:e}"))?;
    Ok(format!("|I| = {:.1e} and {:.1e} at 10^4 points (tol 1e-10)", i1.abs(), i2.abs()))
}

fn criterion_8() -> Check {
    let pair = pair_get("expsin/coshsin").unwrap();
    let hs = [0.1, 0.05, 0.025, 0.0125];
    let r = elliptic_convergence(&pair, &Region::cube(2, 1.0), &hs, 400, 8, 0.2, 1.9).map_err(|e| e.to_string())?;
    let orders: Vec<String> = (0..3).map(|j| format!("{:.3}", r.get(&format!("order_{j}")).unwrap())).collect();
    ensure(r.passed, r.summary())?;
    Ok(format!("observed orders {} (min 1.9)", orders.join(", ")))
}

fn criterion_9() -> Check {
    let h = catalog_get("paperH").unwrap().polynomial().unwrap().clone();
    let zero = vec![Rational::zero(); 3];
    ensure(depth_of_zero(&h, &zero) == Ok(2), "depth at the origin is not 2")?;

    let rep = critical_set_sample(&h, &Region::unit_ball(3), 21).map_err(|e| e.to_string())?;
    ensure(rep.critical_points.len() == 1, format!("{} critical points found", rep.critical_points.len()))?;
    let c = &rep.critical_points[0];
    let dist = c.x.iter().map(|t| t * t).sum::<f64>().sqrt();
    ensure(dist < 1e-8, format!("critical point at distance {dist:e} from the origin"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let small = |rng: &mut ChaCha8Rng| {
        let mut d: i64 = rng.gen_range(1..=9);
        if rng.gen_bool(0.5) {
            d = -d;
        }
        rat(rng.gen_range(-5..=5), d)
    };
    let depth_one = vec![rat(1, 1), rat(1, 1), rat(0, 1)];
    for t in 0..20 {
        let params: Vec<Rational> = (0..3).map(|_| small(&mut rng)).collect();
        let o = RationalOrthogonalMatrix::cayley(3, &params).map_err(|e| e.to_string())?;
        let hr = rotate(&h, &o).map_err(|e| e.to_string())?;
        ensure(depth_of_zero(&hr, &zero) == Ok(2), format!("rotation {t}: depth at 0 changed"))?;
        // hr(x) = h(O x), so (1,1,0) moves to Oᵀ (1,1,0)
        let x = o.transpose().apply(&depth_one);
        ensure(depth_of_zero(&hr, &x) == Ok(1), format!("rotation {t}: depth at O^T(1,1,0) changed"))?;
    }
    Ok(format!("d(0) = 2; Z1 = {{origin}} (|x| = {dist:.1e}); 20 rotations preserve d = 2 and d = 1"))
}

fn criterion_10() -> Check {
    let mut cases: Vec<(String, TruncatedSeries, TruncatedSeries)> = Vec::new();
    let n = 8;
    for name in ["expsin/coshsin", "linear", "self:paperH", "double:rezk:3", "double:imz2", "rezk:2,saddle2d"] {
        let pair = pair_get(name).unwrap();
        let origin = vec![Rational::zero(); pair.dim()];
        let k = pair.taylor_series(&origin, 12).unwrap().1.leading_degree().unwrap();
        let (u, v) = pair.taylor_series(&origin, n + k).unwrap();
        cases.push((name.to_string(), u, v));
    }
    // a harmonic divisor with a harmonic multiple, in 3D
    let q = catalog_get("paperH").unwrap().polynomial().unwrap().clone();
    let m = &q * &Polynomial::from_int_terms(3, &[(1, &[0, 0, 0]), (2, &[0, 1, 0]), (-1, &[1, 0, 1])]);
    let at = |p: &Polynomial| TruncatedSeries::at_origin(n + 2, p.truncate(n + 2));
    cases.push(("paperH*(1+2y-xz)".into(), at(&m), at(&q)));

    let mut worst: f64 = 0.0;
    for (name, u, v) in &cases {
        for r in [rat(1, 1), rat(1, 2)] {
            let cr = certify_ratio(u, v, n, &r).map_err(|e| format!("{name}: {e}"))?;
            ensure(cr.report.passed, format!("{name}, r = {r}: {}", cr.report.summary()))?;
            ensure(cr.a.is_positive() && cr.c.is_positive(), format!("{name}: a or c not positive"))?;
            worst = worst.max(cr.report.get("worst_coeff_over_bound").unwrap_or(0.0));
        }
    }
    Ok(format!(
        "{} ratios x 2 radii, max |f_beta| / (A R^beta) = {worst:.3}",
        cases.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("division exactness", criterion_1),
        ("series ratio e^y sech y", criterion_2),
        ("certificate soundness", criterion_3),
        ("nodal domain counts", criterion_4),
        ("Harnack constant", criterion_5),
        ("maximum principle", criterion_6),
        ("sphere orthogonality", criterion_7),
        ("elliptic residual order", criterion_8),
        ("depth and critical set", criterion_9),
        ("coefficient bounds", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{t:.2}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} [{t:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 acceptance criteria failed");
        std::process::exit(1);
    }
}
