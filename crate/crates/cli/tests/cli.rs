use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn latgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latgeo")).args(args).output().unwrap()
}

fn run(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    latgeo(&args)
}

fn fit_json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}_fit.json"))).unwrap()).unwrap()
}

#[test]
fn strip_scan_has_constant_remainder_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("scan", &scenario("strip.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("strip_scan.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        let (lo, hi): (f64, f64) = (f[4].parse().unwrap(), f[5].parse().unwrap());
        assert!((lo + 2.0).abs() < 1e-9 && (hi + 2.0).abs() < 1e-9, "{r}");
    }
    assert_eq!(fit_json(dir.path(), "strip")["verdict"], "pass");
    assert!(fs::read_to_string(dir.path().join("strip_plot.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn disk_scan_exponent_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("scan", &scenario("disk_sqrt2.json"), dir.path(), &["--workers", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let fit = fit_json(dir.path(), "disk_sqrt2");
    let beta = fit["beta"].as_f64().unwrap();
    assert!((-0.45..=0.0).contains(&beta), "beta = {beta}");
    assert_eq!(fit["verdict"], "pass");
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(run("scan", &scenario("box_zsqrt2.json"), d.path(), &[]).status.code(), Some(0));
    }
    for f in ["box_zsqrt2_scan.csv", "box_zsqrt2_fit.json", "box_zsqrt2_plot.svg"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn missing_domain_exits_one_and_names_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"name": "bad", "lattice": {"integer": 2}, "subspace": {"axes": [0]}, "scan": {"decimal": [1, 2]}, "regime": "box_admissible"}"#).unwrap();
    let o = run("scan", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("domain"));
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"name\": \"x\",\n  \"lattice\": \n}").unwrap();
    let o = run("count", &cfg, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn growing_remainder_fails_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("grow.csv");
    // |R| = 1/ε, far above the box regime's prediction of no power growth.
    let mut csv = String::from("epsilon,count_lo,count_hi,leading,rem_lo,rem_hi\n");
    for k in 1..=6 {
        let inv = 1u64 << k;
        csv.push_str(&format!("1/{inv},{c},{c},{inv}.0,{inv}.0,{inv}.0\n", c = 2 * inv));
    }
    fs::write(&scan, csv).unwrap();
    let o = run("fit", &scenario("strip.json"), dir.path(), &["--scan", scan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fit_json(dir.path(), "strip")["verdict"], "fail");
}

#[test]
fn fit_rereads_scan_output() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("scan", &scenario("disk_sqrt2.json"), dir.path(), &[]).status.code(), Some(0));
    let first = fs::read(dir.path().join("disk_sqrt2_fit.json")).unwrap();
    assert_eq!(run("fit", &scenario("disk_sqrt2.json"), dir.path(), &[]).status.code(), Some(0));
    assert_eq!(first, fs::read(dir.path().join("disk_sqrt2_fit.json")).unwrap());
}

#[test]
fn lattice_info_prints_covolumes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("slope.json");
    fs::write(&cfg, r#"{"lattice": {"integer": 2}, "subspace": {"rows": [[1, 2]]}}"#).unwrap();
    let o = run("lattice-info", &cfg, dir.path(), &[]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("r = 1") && text.contains("vol(V_perp/Gamma_perp) = sqrt(5)"), "{text}");

    let o = run("lattice-info", &scenario("disk_sqrt2.json"), dir.path(), &[]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("r = 0") && text.contains("trivial-intersection certificate"), "{text}");
}

#[test]
fn good_position_and_field_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("good-position", &scenario("box_zsqrt2.json"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("certified: |Nm_e| >= 1"));
    let o = run("field", &scenario("box_zsqrt2.json"), dir.path(), &[]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((v["degree"].as_u64(), v["s"].as_u64(), v["t"].as_u64()), (Some(2), Some(2), Some(0)));
}

#[test]
fn spectrum_and_pdos() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("spectrum", &scenario("torus_sqrt2.json"), dir.path(), &["--seed", "0x5EED"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("torus_sqrt2_spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("lambda,epsilon,N,leading,remainder,boundary_hits"));
    assert_eq!(csv.lines().count(), 10);
    let o = latgeo(&["pdos", "--rho", "1", "--d", "2", "--k", "0"]);
    let v: f64 = String::from_utf8(o.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-12);
}
