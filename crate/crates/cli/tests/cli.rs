use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmratio"))
        .current_dir(dir)
        .env_remove("HARMRATIO_OUT")
        .args(["--out", "out"])
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

#[test]
fn divide_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("P.poly"), "dim 2\n1 : 3 1\n-1 : 1 3\n").unwrap();
    fs::write(dir.path().join("Q.poly"), "# xy\ndim 2\n1 : 1 1\n").unwrap();
    let o = run(dir.path(), &["divide", "--dividend", "P.poly", "--divisor", "Q.poly"]);
    assert!(o.status.success());
    let q = fs::read_to_string(dir.path().join("out/quotient.poly")).unwrap();
    assert_eq!(q, "dim 2\n1/1 : 2 0\n-1/1 : 0 2\n");
    assert_eq!(json(dir.path(), "divide.json")["residual_verified"], true);
}

#[test]
fn divide_failures_and_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("P.poly"), "dim 2\n1 : 2 0\n").unwrap();
    fs::write(dir.path().join("Q.poly"), "dim 2\n1 : 1 1\n").unwrap();
    fs::write(dir.path().join("bad.poly"), "dim 2\n1 : 1\n").unwrap();
    let o = run(dir.path(), &["divide", "--dividend", "P.poly", "--divisor", "Q.poly"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(dir.path(), "divide.json")["passed"], false);

    let o = run(dir.path(), &["divide", "--dividend", "bad.poly", "--divisor", "Q.poly"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = run(dir.path(), &["divide", "--dividend", "P.poly"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nodal_count_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["nodal", "count", "--fn", "paperH", "--ball", "0,0,0:0.5", "--res", "128"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2");
    assert_eq!(json(dir.path(), "nodal-count.json")["nodal_domains"]["count"], 2);
}

#[test]
fn harnack_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["verify", "harnack", "--pair", "expsin,coshsin", "--box", "-1,1,-1,1", "--samples", "1e4"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c = json(dir.path(), "verify-harnack.json")["reports"][0]["measured"]["c_star"]
        .as_f64()
        .unwrap();
    assert!((c - 1f64.exp().powi(2)).abs() < 1e-9);
}

#[test]
fn series_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["series", "--pair", "expsin/coshsin", "--degree", "4"]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("out/ratio.series")).unwrap();
    assert!(text.contains("-1/3 : 0 3"));

    // series files round trip through --u/--v
    fs::write(dir.path().join("u.series"), "dim 2\nmaxdeg 3\n1 : 1 0\n1 : 1 1\n").unwrap();
    fs::write(dir.path().join("v.series"), "dim 2\nmaxdeg 3\n1 : 1 0\n").unwrap();
    let o = run(dir.path(), &["series", "--u", "u.series", "--v", "v.series", "--degree", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("1/1 : 0 1"));

    let o = run(dir.path(), &["certify", "--a", "1", "--c", "1", "--r", "1", "--k", "1", "--n", "2"]);
    assert!(o.status.success());
    let cert = fs::read_to_string(dir.path().join("out/certificate.txt")).unwrap();
    assert!(cert.contains("R = 8/1 64/1"));

    let o = run(dir.path(), &["certify", "--pair", "expsin/coshsin", "--degree", "6"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(json(dir.path(), "certify.json")["reports"].as_array().unwrap().len(), 2);

    let o = run(dir.path(), &["certify", "--a", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let ok = |args: &[&str]| {
        let o = run(dir.path(), args);
        assert!(o.status.success(), "{args:?}: {}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    };
    ok(&["verify", "max", "--pair", "expsin/coshsin", "--interior", "300"]);
    ok(&["verify", "max", "--pair", "self:paperH", "--ball", "0,0,0:0.5", "--interior", "300"]);
    ok(&["verify", "ortho", "--q", "rezk:3", "--q2", "saddle2d"]);
    ok(&["verify", "sign", "--q", "imz2"]);
    ok(&["verify", "elliptic", "--pair", "expsin/coshsin", "--samples", "50"]);
    ok(&["verify", "leading", "--pair", "expsin/coshsin"]);

    // positive definite: no sign change, reported as a failure
    fs::write(dir.path().join("def.poly"), "dim 2\n1 : 2 0\n1 : 0 2\n").unwrap();
    let o = run(dir.path(), &["verify", "sign", "--q", "def.poly"]);
    assert_eq!(o.status.code(), Some(1));
    // equal degrees violate the precondition
    let o = run(dir.path(), &["verify", "ortho", "--q", "saddle2d", "--q2", "saddle2d"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nodal_plot_and_critical() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["nodal", "plot", "--fn", "paperH", "--slice", "z=0.1", "--res", "60"]);
    assert!(o.status.success());
    let svg = fs::read_to_string(dir.path().join("out/zeroset.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    assert!(fs::read_to_string(dir.path().join("out/zeroset.csv")).unwrap().starts_with("x0,x1,x2\n"));

    let o = run(dir.path(), &["nodal", "critical", "--fn", "paperH", "--grid", "15"]);
    assert!(o.status.success());
    let r = json(dir.path(), "nodal-critical.json");
    let pts = r["analysis"]["critical_points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0]["depth"], 2);

    let o = run(dir.path(), &["nodal", "critical", "--fn", "expsin"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["catalog", "list"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("paperH"));
    let o = run(dir.path(), &["catalog", "dump"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
    let o = run(dir.path(), &["catalog", "dump", "saddle2d"]);
    assert!(stdout(&o).starts_with("dim 2"));
    let o = run(dir.path(), &["catalog", "dump", "nothing"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["verify", "max", "--pair", "linear", "--interior", "500", "--seed", "7"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    let read = |d: &Path| fs::read(d.join("out/verify-max.json")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_harmratio"))
        .current_dir(dir.path())
        .env("HARMRATIO_OUT", "env-out")
        .args(["catalog", "dump"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("env-out/manifest.json").exists());
}
