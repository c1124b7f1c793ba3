use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use harmratio::catalog::{catalog_get, catalog_names, manifest_json, pair_get, pair_names, ScalarField, SharedZeroPair};
use harmratio::division::{
    bound_certificate, certify_ratio, divide_by_harmonic, series_ratio, verify_certificate,
    BoundCertificate, TruncatedSeries,
};
use harmratio::poly::{parse_polynomial, parse_rational, write_polynomial, Polynomial, Rational};
use harmratio::region::Region;
use harmratio::report::VerificationReport;
use harmratio::verify::{
    critical_set_sample, elliptic_convergence, harnack_constant, leading_zero_inclusion, max_principle_check,
    nodal_domain_count, sign_change_check, sphere_orthogonality, zero_set_sample, zero_set_slice, RatioField,
};

/// Division of harmonic polynomials and series, convergence certificates and
/// numeric checks on pairs of harmonic functions with a common zero set.
#[derive(Parser)]
#[command(name = "harmratio", version)]
struct Cli {
    /// Output directory for reports and artifacts [env: HARMRATIO_OUT, default: harmratio-out]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for all random sampling.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact polynomial division by homogeneous harmonic divisors.
    Divide {
        #[arg(long)]
        dividend: PathBuf,
        /// Repeat for several divisors; they are divided out in turn.
        #[arg(long, required = true)]
        divisor: Vec<PathBuf>,
    },
    /// Taylor series of u / v about a common zero.
    Series {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long, default_value_t = 8)]
        degree: u32,
    },
    /// Coefficient bound certificate, from explicit constants or from a ratio.
    Certify {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long, default_value_t = 8)]
        degree: u32,
        /// Explicit constants instead of a ratio: a, c, k, n.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "1")]
        r: String,
        /// Degree up to which the certificate inequality is checked.
        #[arg(long, default_value_t = 12)]
        check: u32,
    },
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Nodal(NodalCommand),
    #[command(subcommand)]
    Catalog(CatalogCommand),
}

#[derive(Args, Clone)]
struct SeriesInput {
    /// Catalog pair (see `catalog list`).
    #[arg(long, conflicts_with_all = ["u", "v"])]
    pair: Option<String>,
    /// Expansion point for `--pair`, comma-separated rationals (default: origin).
    #[arg(long)]
    center: Option<String>,
    /// Series file for u.
    #[arg(long, requires = "v")]
    u: Option<PathBuf>,
    /// Series file for v.
    #[arg(long, requires = "u")]
    v: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RegionArgs {
    /// Ball as `c1,...,cn:r`.
    #[arg(long, conflicts_with = "box_")]
    ball: Option<String>,
    /// Box as `lo1,hi1,lo2,hi2,...`.
    #[arg(long = "box", allow_hyphen_values = true)]
    box_: Option<String>,
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Catalog entry name.
    #[arg(long = "fn", conflicts_with = "poly")]
    function: Option<String>,
    /// Polynomial file.
    #[arg(long)]
    poly: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Maximum and minimum principle for f = u / v.
    Max {
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 400)]
        boundary: usize,
        #[arg(long, default_value_t = 2000)]
        interior: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Empirical Harnack constant sup|f| / inf|f| over a compact set.
    Harnack {
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        region: RegionArgs,
        /// Accepts scientific notation, e.g. 1e6.
        #[arg(long, default_value = "1e4")]
        samples: String,
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
    },
    /// Orthogonality of Q to lower-degree polynomials on a sphere.
    Ortho {
        #[arg(long)]
        q: String,
        #[arg(long)]
        q2: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 10_000)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Sign change of a polynomial over a region.
    Sign {
        #[arg(long)]
        q: String,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Convergence of the residual of div(v² ∇f) = 0 under step halving.
    Elliptic {
        #[arg(long)]
        pair: String,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value = "0.1,0.05,0.025,0.0125")]
        h: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0.2)]
        guard: f64,
        #[arg(long, default_value_t = 1.9)]
        min_order: f64,
    },
    /// Zeros of the leading part of v are zeros of the leading part of u.
    Leading {
        #[command(flatten)]
        input: SeriesInput,
        #[arg(long, default_value_t = 6)]
        degree: u32,
        #[arg(long, default_value_t = 720)]
        samples: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Subcommand)]
enum NodalCommand {
    /// Zero set as SVG polylines (2D or a 3D slice) and CSV points.
    Plot {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 200)]
        res: usize,
        /// Slice of a 3D function as `axis=value`, e.g. `z=0.1`.
        #[arg(long)]
        slice: Option<String>,
    },
    /// Number of nodal domains.
    Count {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 256)]
        res: usize,
    },
    /// Critical zeros with depths.
    Critical {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        region: RegionArgs,
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// Entry and pair names.
    List,
    /// Manifest JSON, or one entry's definition.
    Dump { name: Option<String> },
}

enum Failure {
    /// Bad input: exit 2.
    Input(String),
    /// A check ran and failed: exit 1.
    Check(String),
}

type Outcome = Result<bool, Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

struct Ctx {
    out: PathBuf,
    seed: u64,
    argv: Vec<String>,
}

impl Ctx {
    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        fs::create_dir_all(&self.out).map_err(|e| input(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| input(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    /// Writes `{command, report}` and prints the report summaries.
    fn report(&self, name: &str, reports: &[&VerificationReport]) -> Outcome {
        for r in reports {
            println!("{}", r.summary());
        }
        let passed = reports.iter().all(|r| r.passed);
        let body = json!({
            "command": self.argv,
            "passed": passed,
            "reports": reports,
        });
        let path = self.write(&format!("{name}.json"), &pretty(&body))?;
        println!("report: {}", path.display());
        Ok(passed)
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn read_poly(path: &Path) -> Result<Polynomial, Failure> {
    parse_polynomial(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// A polynomial from a file path or a polynomial catalog entry.
fn poly_arg(spec: &str) -> Result<Polynomial, Failure> {
    if Path::new(spec).exists() {
        return read_poly(Path::new(spec));
    }
    let entry = catalog_get(spec).map_err(input)?;
    entry
        .polynomial()
        .cloned()
        .ok_or_else(|| input(format!("{spec} is not a polynomial entry")))
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',').map(|t| parse_rational(t).map_err(input)).collect()
}

fn region_arg(args: &RegionArgs, default: Option<&Region>) -> Result<Region, Failure> {
    let region = match (&args.ball, &args.box_, default) {
        (Some(b), _, _) => Region::parse_ball(b).map_err(input)?,
        (_, Some(b), _) => Region::parse_box(b).map_err(input)?,
        (None, None, Some(d)) => d.clone(),
        (None, None, None) => return Err(input("a region is required (--ball or --box)")),
    };
    region.validate().map_err(input)?;
    Ok(region)
}

fn pair_arg(name: &str) -> Result<SharedZeroPair, Failure> {
    pair_get(name).map_err(input)
}

/// The function for nodal commands, plus an exact polynomial if there is one.
fn function_arg(args: &FunctionArgs) -> Result<(Box<dyn ScalarField>, Option<Polynomial>), Failure> {
    match (&args.function, &args.poly) {
        (Some(name), _) => {
            let entry = catalog_get(name).map_err(input)?;
            let exact = entry.polynomial().cloned();
            Ok((Box::new(entry), exact))
        }
        (None, Some(path)) => {
            let p = read_poly(path)?;
            Ok((Box::new(p.to_float()), Some(p)))
        }
        (None, None) => Err(input("a function is required (--fn or --poly)")),
    }
}

fn read_series(path: &Path) -> Result<TruncatedSeries, Failure> {
    TruncatedSeries::parse(&read(path)?).map_err(|e| input(format!("{}: {e}", path.display())))
}

/// `(u, v)` series, truncated so the quotient can reach degree `n`.
fn series_inputs(args: &SeriesInput, n: u32) -> Result<(TruncatedSeries, TruncatedSeries), Failure> {
    match (&args.pair, &args.u, &args.v) {
        (Some(name), _, _) => {
            let pair = pair_arg(name)?;
            let center = match &args.center {
                Some(c) => parse_point(c)?,
                None => vec![Rational::from_integer(0.into()); pair.dim()],
            };
            if center.len() != pair.dim() {
                return Err(input(format!("center needs {} coordinates", pair.dim())));
            }
            // find the order of v first, then expand both far enough
            let probe = n + 16;
            let (_, v) = pair.taylor_series(&center, probe).map_err(input)?;
            let k = v
                .leading_degree()
                .ok_or_else(|| input(format!("v vanishes to degree {probe} at the center")))?;
            pair.taylor_series(&center, n + k).map_err(input)
        }
        (None, Some(u), Some(v)) => Ok((read_series(u)?, read_series(v)?)),
        _ => Err(input("give --pair or both --u and --v")),
    }
}

fn division_failure(ctx: &Ctx, name: &str, err: impl std::fmt::Display) -> Outcome {
    let msg = err.to_string();
    let path = ctx.write(
        &format!("{name}.json"),
        &pretty(&json!({ "command": ctx.argv, "passed": false, "error": msg })),
    )?;
    Err(Failure::Check(format!("{msg} (report: {})", path.display())))
}

fn run(cli: Cli, argv: Vec<String>) -> Outcome {
    let out = cli
        .out
        .or_else(|| std::env::var_os("HARMRATIO_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("harmratio-out"));
    let ctx = Ctx {
        out,
        seed: cli.seed,
        argv,
    };
    match cli.command {
        Command::Divide { dividend, divisor } => {
            let p = read_poly(&dividend)?;
            let qs = divisor.iter().map(|d| read_poly(d)).collect::<Result<Vec<_>, _>>()?;
            let mut quotient = p;
            let mut verified = true;
            for (i, q) in qs.iter().enumerate() {
                match divide_by_harmonic(&quotient, q) {
                    Ok(o) => {
                        verified &= o.residual_verified;
                        quotient = o.quotient.as_polynomial().clone();
                    }
                    Err(e) => return division_failure(&ctx, "divide", format!("divisor {}: {e}", i + 1)),
                }
            }
            let text = write_polynomial(&quotient);
            print!("{text}");
            let path = ctx.write("quotient.poly", &text)?;
            ctx.write(
                "divide.json",
                &pretty(&json!({
                    "command": ctx.argv,
                    "passed": verified,
                    "quotient": text,
                    "residual_verified": verified,
                })),
            )?;
            println!("quotient: {}", path.display());
            Ok(verified)
        }
        Command::Series { input: args, degree } => {
            let (u, v) = series_inputs(&args, degree)?;
            let outcome = match series_ratio(&u, &v, degree) {
                Ok(o) => o,
                Err(e) => return division_failure(&ctx, "series", e),
            };
            let q = outcome.quotient.as_series().expect("series quotient");
            let text = q.to_text();
            print!("{text}");
            let path = ctx.write("ratio.series", &text)?;
            ctx.write(
                "series.json",
                &pretty(&json!({
                    "command": ctx.argv,
                    "passed": outcome.residual_verified,
                    "quotient": text,
                    "residual_verified": outcome.residual_verified,
                    "rotation": outcome.rotation.map(|o| o.to_string()),
                })),
            )?;
            println!("series: {}", path.display());
            Ok(outcome.residual_verified)
        }
        Command::Certify {
            input: args,
            degree,
            a,
            c,
            k,
            n,
            r,
            check,
        } => {
            let r = parse_rational(&r).map_err(input)?;
            let (cert, coeff_report): (BoundCertificate, Option<VerificationReport>) = match (a, c, k, n) {
                (Some(a), Some(c), Some(k), Some(n)) => {
                    let a = parse_rational(&a).map_err(input)?;
                    let c = parse_rational(&c).map_err(input)?;
                    (bound_certificate(&a, &c, &r, k, n).map_err(input)?, None)
                }
                (None, None, None, None) => {
                    let (u, v) = series_inputs(&args, degree)?;
                    match certify_ratio(&u, &v, degree, &r) {
                        Ok(cr) => (cr.certificate, Some(cr.report)),
                        Err(e) => return division_failure(&ctx, "certify", e),
                    }
                }
                _ => return Err(input("--a, --c, --k and --n go together")),
            };
            let text = cert.to_text();
            print!("{text}");
            ctx.write("certificate.txt", &text)?;
            let report = verify_certificate(&cert, check);
            let mut all = vec![&report];
            all.extend(coeff_report.as_ref());
            ctx.report("certify", &all)
        }
        Command::Verify(cmd) => run_verify(&ctx, cmd),
        Command::Nodal(cmd) => run_nodal(&ctx, cmd),
        Command::Catalog(cmd) => {
            match cmd {
                CatalogCommand::List => {
                    println!("entries:");
                    for name in catalog_names() {
                        let e = catalog_get(name).expect("listed entry");
                        println!("  {name:<10} n={}  {}", e.dim, e.zero_set);
                    }
                    println!("  rezk:K, imzk:K (2D), rezk3:K (3D) for K = 1..40");
                    println!("pairs:");
                    for name in pair_names() {
                        let p = pair_get(name).expect("listed pair");
                        println!("  {name:<16} {}", p.zero_set);
                    }
                    println!("  self:E, double:E, U,V for catalog entries");
                }
                CatalogCommand::Dump { name: None } => {
                    let m = manifest_json();
                    print!("{m}");
                    ctx.write("manifest.json", &m)?;
                }
                CatalogCommand::Dump { name: Some(name) } => {
                    let e = catalog_get(&name).map_err(input)?;
                    match e.body_text() {
                        Some(t) => print!("{t}"),
                        None => println!("{name}: n={} {:?} {}", e.dim, e.kind, e.provenance),
                    }
                }
            }
            Ok(true)
        }
    }
}

fn count_arg(text: &str) -> Result<usize, Failure> {
    let x: f64 = text.parse().map_err(|_| input(format!("bad count `{text}`")))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x < 1e12) {
        return Err(input(format!("bad count `{text}`")));
    }
    Ok(x as usize)
}

fn run_verify(ctx: &Ctx, cmd: VerifyCommand) -> Outcome {
    let check = |e: harmratio::verify::VerifyError| match e {
        harmratio::verify::VerifyError::RatioVanishes { .. } => Failure::Check(e.to_string()),
        other => input(other),
    };
    match cmd {
        VerifyCommand::Max {
            pair,
            region,
            boundary,
            interior,
            tol,
        } => {
            let pair = pair_arg(&pair)?;
            let region = region_arg(&region, Some(&pair.region))?;
            let field = RatioField::new(&pair);
            let r = max_principle_check(&field, &region, boundary, interior, ctx.seed, tol).map_err(check)?;
            ctx.report("verify-max", &[&r])
        }
        VerifyCommand::Harnack {
            pair,
            region,
            samples,
            floor,
        } => {
            let pair = pair_arg(&pair)?;
            let region = region_arg(&region, Some(&pair.region))?;
            let field = RatioField::new(&pair);
            let r = harnack_constant(&field, &region, count_arg(&samples)?, floor).map_err(check)?;
            ctx.report("verify-harnack", &[&r])
        }
        VerifyCommand::Ortho {
            q,
            q2,
            radius,
            points,
            tol,
        } => {
            let r = sphere_orthogonality(&poly_arg(&q)?, &poly_arg(&q2)?, radius, points, tol).map_err(check)?;
            ctx.report("verify-ortho", &[&r])
        }
        VerifyCommand::Sign { q, region, samples } => {
            let q = poly_arg(&q)?;
            let default = Region::unit_ball(q.dim());
            let region = region_arg(&region, Some(&default))?;
            let r = sign_change_check(&q, &region, samples, ctx.seed).map_err(check)?;
            ctx.report("verify-sign", &[&r])
        }
        VerifyCommand::Elliptic {
            pair,
            region,
            h,
            samples,
            guard,
            min_order,
        } => {
            let pair = pair_arg(&pair)?;
            let region = region_arg(&region, Some(&pair.region))?;
            let hs = h
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| input(format!("bad step `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let r = elliptic_convergence(&pair, &region, &hs, samples, ctx.seed, guard, min_order).map_err(check)?;
            ctx.report("verify-elliptic", &[&r])
        }
        VerifyCommand::Leading {
            input: args,
            degree,
            samples,
            tol,
        } => {
            let (u, v) = series_inputs(&args, degree)?;
            let r = leading_zero_inclusion(&u, &v, samples, tol).map_err(check)?;
            ctx.report("verify-leading", &[&r])
        }
    }
}

fn run_nodal(ctx: &Ctx, cmd: NodalCommand) -> Outcome {
    let err = |e: harmratio::verify::VerifyError| input(e);
    match cmd {
        NodalCommand::Plot {
            function,
            region,
            res,
            slice,
        } => {
            let (w, _) = function_arg(&function)?;
            let default = Region::cube(w.dim(), 1.0);
            let region = region_arg(&region, Some(&default))?;
            let (lo, hi) = region.bounds();
            let (zs, axes) = match slice {
                Some(s) => {
                    let (axis, value) = s.split_once('=').ok_or_else(|| input("slice must look like z=0.1"))?;
                    let axis = match axis.trim() {
                        "x" | "0" => 0,
                        "y" | "1" => 1,
                        "z" | "2" => 2,
                        other => return Err(input(format!("bad slice axis `{other}`"))),
                    };
                    let value: f64 = value.trim().parse().map_err(|_| input(format!("bad slice value `{value}`")))?;
                    let free: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
                    let zs = zero_set_slice(w.as_ref(), &region, axis, value, res).map_err(err)?;
                    (zs, (free[0], free[1]))
                }
                None => (zero_set_sample(w.as_ref(), &region, res).map_err(err)?, (0, 1)),
            };
            let csv = ctx.write("zeroset.csv", &zs.to_csv())?;
            println!("{} zero points, {} polylines", zs.points.len(), zs.polylines.len());
            println!("points: {}", csv.display());
            if !zs.polylines.is_empty() {
                let svg = zs.to_svg(axes, [lo[axes.0], lo[axes.1]], [hi[axes.0], hi[axes.1]]);
                println!("plot: {}", ctx.write("zeroset.svg", &svg)?.display());
            }
            Ok(true)
        }
        NodalCommand::Count { function, region, res } => {
            let (w, _) = function_arg(&function)?;
            let default = Region::unit_ball(w.dim());
            let region = region_arg(&region, Some(&default))?;
            let c = nodal_domain_count(w.as_ref(), &region, res).map_err(err)?;
            println!("{}", c.count);
            let body = json!({ "command": ctx.argv, "passed": true, "nodal_domains": c });
            ctx.write("nodal-count.json", &pretty(&body))?;
            Ok(true)
        }
        NodalCommand::Critical { function, region, grid } => {
            let (_, exact) = function_arg(&function)?;
            let w = exact.ok_or_else(|| input("critical-set analysis needs a polynomial"))?;
            let default = Region::unit_ball(w.dim());
            let region = region_arg(&region, Some(&default))?;
            let report = critical_set_sample(&w, &region, grid).map_err(err)?;
            println!("{} critical zeros (|w| < {:e}, |grad w| < {:e})", report.critical_points.len(), report.zero_tol, report.gradient_tol);
            for c in &report.critical_points {
                let depth = c.depth.map_or("?".to_string(), |d| d.to_string());
                let x: Vec<String> = c.x.iter().map(|t| format!("{t:.3e}")).collect();
                println!("  ({}) depth {depth} {}: {}", x.join(", "), c.label, c.reason);
            }
            let body = json!({ "command": ctx.argv, "passed": true, "analysis": report });
            ctx.write("nodal-critical.json", &pretty(&body))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    // the program path differs between installs; keep reports reproducible
    let argv = argv.into_iter().skip(1).collect();
    match run(cli, argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("check failed");
            ExitCode::from(1)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
