//! Declarative experiments: JSON configs, runs, and CSV/JSON/SVG artifacts.
//!
//! A config names a lattice, a subspace `F`, a domain and a scan:
//!
//! ```json
//! {
//!   "name": "strip",
//!   "lattice": {"integer": 2},
//!   "subspace": {"axes": [0]},
//!   "domain": {"kind": "box", "center": ["1/2", "1/2"], "half_widths": ["1", "1/2"]},
//!   "scan": {"epsilons": ["1/10", "1/100"]},
//!   "regime": "box_admissible"
//! }
//! ```

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::asymptotics::{self, RegimeClass, ScanRow};
use crate::counting::{self, CountOptions, CountResult};
use crate::domains::{qmc, Domain};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numberfield::field::NumberField;
use crate::numberfield::norms::{self, GoodPosition, GoodPositionMode};
use crate::scalar::{rational, Rational, Scalar};
use crate::spectral::FlatTorus;
use crate::splitter::{self, SplitData};
use crate::subspace::Subspace;
use crate::svg;

fn cfg(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

#[derive(Clone, Debug)]
pub struct SpectralConfig {
    pub metric: Option<Vec<Vec<Rational>>>,
    /// Spectral parameters `μ = λ/4π²`.
    pub mus: Vec<Rational>,
    pub epsilons: Vec<Rational>,
    /// Dump eigenvalues with `λ/4π²` below this value.
    pub eigen_cutoff: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub name: String,
    pub lattice: Lattice,
    pub field: Option<Arc<NumberField>>,
    pub subspace: Subspace,
    domain: Option<Domain>,
    pub epsilons: Vec<Rational>,
    pub regime: Option<String>,
    pub ell: Option<usize>,
    pub shift: Vec<Scalar>,
    pub tol: f64,
    pub slack: f64,
    pub seed: u64,
    pub workers: Option<usize>,
    pub spectral: Option<SpectralConfig>,
    pub frame: Option<Vec<Vec<f64>>>,
    pub raw: Value,
}

fn parse_rational_value(v: &Value, field: &str) -> Result<Rational> {
    match Scalar::from_json(v).map_err(|e| cfg(field, e.to_string()))? {
        Scalar::Rat(r) => Ok(r),
        Scalar::Alg(_) => Err(cfg(field, "expected a rational")),
    }
}

fn parse_rational_list(v: &Value, field: &str) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| cfg(field, "expected an array"))?
        .iter()
        .map(|x| parse_rational_value(x, field))
        .collect()
}

/// `{"epsilons": [...]}`, `{"dyadic": [a, b]}` (2^-a..2^-b) or
/// `{"decimal": [a, b]}` (10^-a..10^-b).
fn parse_eps_list(v: &Value, field: &str) -> Result<Vec<Rational>> {
    if let Some(list) = v.get("epsilons") {
        return parse_rational_list(list, &format!("{field}.epsilons"));
    }
    for (key, base) in [("dyadic", 2), ("decimal", 10)] {
        if let Some(r) = v.get(key) {
            let f = format!("{field}.{key}");
            let ends: Vec<i64> = r
                .as_array()
                .filter(|a| a.len() == 2)
                .and_then(|a| a.iter().map(Value::as_i64).collect())
                .ok_or_else(|| cfg(&f, "expected [first_exponent, last_exponent]"))?;
            if ends[0] > ends[1] || ends[1] - ends[0] > 64 {
                return Err(cfg(&f, "exponents must increase, at most 64 apart"));
            }
            return Ok((ends[0]..=ends[1])
                .map(|k| rational::pow_i(&rational::int(base), -(k as i32)))
                .collect());
        }
    }
    Err(cfg(field, "expected `epsilons`, `dyadic` or `decimal`"))
}

fn parse_lattice(v: &Value) -> Result<(Lattice, Option<Arc<NumberField>>)> {
    if let Some(n) = v.get("integer") {
        let n = n.as_u64().filter(|&n| n >= 1).ok_or_else(|| cfg("lattice.integer", "expected a positive dimension"))?;
        return Ok((Lattice::integer(n as usize), None));
    }
    if v.get("preset").is_some() || v.get("minpoly").is_some() {
        let ml = norms::module_from_json(v)?;
        return Ok((ml.lattice, Some(ml.field)));
    }
    if v.get("basis").is_some() {
        let l = Lattice::from_json(v)?;
        let field = match l.structure() {
            crate::lattice::Structure::Canonical { field, .. } => Some(field.clone()),
            crate::lattice::Structure::Plain => None,
        };
        return Ok((l, field));
    }
    Err(cfg("lattice", "expected `integer`, `basis`, `preset` or `minpoly`"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: Value = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if !raw.is_object() {
            return Err(Error::Parse("config must be a JSON object".into()));
        }
        let name = raw.get("name").and_then(Value::as_str).unwrap_or("experiment").to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) {
            return Err(cfg("name", "use letters, digits, `_`, `-` or `.`"));
        }
        let (lattice, field) = parse_lattice(raw.get("lattice").ok_or_else(|| cfg("lattice", "missing field"))?)?;
        let n = lattice.dim();
        let subspace = Subspace::from_json(raw.get("subspace").ok_or_else(|| cfg("subspace", "missing field"))?, n, "subspace")?;
        let domain = raw.get("domain").map(|d| Domain::from_json(d, n)).transpose()?;
        let epsilons = match raw.get("scan") {
            Some(s) => parse_eps_list(s, "scan")?,
            None => Vec::new(),
        };
        let regime = match raw.get("regime") {
            None => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(cfg("regime", "expected a regime name")),
        };
        let ell = raw.get("ell").map(|e| e.as_u64().map(|x| x as usize).ok_or_else(|| cfg("ell", "expected an integer"))).transpose()?;
        let shift = match raw.get("shift") {
            None => vec![Scalar::zero(); n],
            Some(Value::Array(a)) if a.len() == n => {
                a.iter().map(|x| Scalar::from_json(x).map_err(|e| cfg("shift", e.to_string()))).collect::<Result<_>>()?
            }
            Some(_) => return Err(cfg("shift", format!("expected {n} exact entries"))),
        };
        let num = |key: &str, default: f64| -> Result<f64> {
            match raw.get(key) {
                None => Ok(default),
                Some(v) => v.as_f64().filter(|x| *x >= 0.0).ok_or_else(|| cfg(key, "expected a nonnegative number")),
            }
        };
        let tol = num("tol", counting::DEFAULT_TOL)?;
        let slack = num("slack", asymptotics::DEFAULT_SLACK)?;
        let seed = match raw.get("seed") {
            None => qmc::DEFAULT_SEED,
            Some(Value::Number(x)) => x.as_u64().ok_or_else(|| cfg("seed", "expected an unsigned integer"))?,
            Some(Value::String(s)) => parse_seed(s).map_err(|m| cfg("seed", m))?,
            Some(_) => return Err(cfg("seed", "expected an integer or hex string")),
        };
        let workers = raw
            .get("workers")
            .map(|w| w.as_u64().filter(|&w| w >= 1).map(|w| w as usize).ok_or_else(|| cfg("workers", "expected a positive integer")))
            .transpose()?;
        let spectral = raw.get("spectral").map(|s| parse_spectral(s, n)).transpose()?;
        let frame = raw
            .get("frame")
            .map(|f| {
                f.as_array()
                    .ok_or_else(|| cfg("frame", "expected rows"))?
                    .iter()
                    .map(|r| {
                        r.as_array()
                            .ok_or_else(|| cfg("frame", "expected rows"))?
                            .iter()
                            .map(|x| Scalar::from_json(x).map(|s| s.to_f64()).map_err(|e| cfg("frame", e.to_string())))
                            .collect::<Result<Vec<f64>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        Ok(Self {
            name,
            lattice,
            field,
            subspace,
            domain,
            epsilons,
            regime,
            ell,
            shift,
            tol,
            slack,
            seed,
            workers,
            spectral,
            frame,
            raw,
        })
    }

    pub fn domain(&self) -> Result<&Domain> {
        self.domain.as_ref().ok_or_else(|| cfg("domain", "missing field"))
    }

    fn eps_list(&self) -> Result<&[Rational]> {
        if self.epsilons.is_empty() {
            return Err(cfg("scan", "missing or empty epsilon list"));
        }
        Ok(&self.epsilons)
    }

    pub fn split(&self) -> Result<SplitData> {
        splitter::split(&self.lattice, &self.subspace)
    }

    pub fn regime(&self, sd: &SplitData) -> Result<RegimeClass> {
        let tag = self.regime.as_deref().ok_or_else(|| cfg("regime", "missing field"))?;
        let st = self.field.as_ref().map(|k| (k.real_embeddings(), k.complex_pairs()));
        RegimeClass::from_tag(tag, sd, self.ell, st).map_err(|e| cfg("regime", e.to_string()))
    }

    pub fn count_options(&self) -> CountOptions {
        CountOptions { tol: self.tol, ..CountOptions::default() }
    }
}

pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u64::from_str_radix(h, 16),
        None => s.parse(),
    };
    parsed.map_err(|_| format!("cannot read `{s}` as a seed"))
}

fn parse_spectral(v: &Value, n: usize) -> Result<SpectralConfig> {
    let metric = match v.get("metric") {
        None => None,
        Some(m) => {
            let rows = m.as_array().ok_or_else(|| cfg("spectral.metric", "expected rows"))?;
            if rows.len() != n {
                return Err(cfg("spectral.metric", format!("expected {n} rows")));
            }
            Some(rows.iter().map(|r| parse_rational_list(r, "spectral.metric")).collect::<Result<Vec<_>>>()?)
        }
    };
    let mus = parse_rational_list(v.get("mu").ok_or_else(|| cfg("spectral.mu", "missing field"))?, "spectral.mu")?;
    let epsilons = parse_eps_list(v, "spectral")?;
    let eigen_cutoff = v.get("eigen_cutoff").map(|c| parse_rational_value(c, "spectral.eigen_cutoff")).transpose()?;
    Ok(SpectralConfig { metric, mus, epsilons, eigen_cutoff })
}

/// Files written and the pass/fail verdict, when there is one.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub verdict: Option<bool>,
}

fn write(dir: &Path, name: String, body: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    fs::write(&p, body)?;
    files.push(p);
    Ok(())
}

/// Count rows for every `ε` of the scan.
pub fn run_count(c: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let sd = c.split()?;
    let domain = c.domain()?;
    let opts = c.count_options();
    let mut csv = String::from(counting::CSV_HEADER);
    csv.push('\n');
    let mut summary = String::new();
    for e in c.eps_list()? {
        let r = counting::count(&sd, domain, e, &c.shift, &opts).map_err(|err| with_eps(err, e))?;
        csv.push_str(&r.csv_row());
        csv.push('\n');
        summary.push_str(&format!("eps={} certain={} boundary_hits={}\n", rational::format_rational(e), r.certain, r.boundary_hits));
    }
    let mut files = Vec::new();
    write(out, format!("{}_count.csv", c.name), &csv, &mut files)?;
    Ok(Outcome { files, summary, verdict: None })
}

fn with_eps(err: Error, e: &Rational) -> Error {
    match err {
        Error::BudgetExceeded { estimate, budget } => Error::Config {
            field: "scan".into(),
            message: format!(
                "at eps={} the count needs about {estimate:.3e} candidates, budget is {budget} (set LATGEO_BUDGET or shrink the range)",
                rational::format_rational(e)
            ),
        },
        other => other,
    }
}

pub fn run_leading(c: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let sd = c.split()?;
    let domain = c.domain()?;
    let mut csv = String::from("epsilon,leading,stderr,slices\n");
    let mut summary = String::new();
    for e in c.eps_list()? {
        let lt = asymptotics::leading_term(&sd, domain, rational::to_f64(e))?;
        csv.push_str(&format!("{},{:.12e},{:.3e},{}\n", rational::format_rational(e), lt.value, lt.stderr, lt.slices));
        summary.push_str(&format!("eps={} leading={:.12}\n", rational::format_rational(e), lt.value));
    }
    let mut files = Vec::new();
    write(out, format!("{}_leading.csv", c.name), &csv, &mut files)?;
    Ok(Outcome { files, summary, verdict: None })
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(asymptotics::SCAN_CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv());
        s.push('\n');
    }
    s
}

/// Reads a scan table written by [`scan_csv`].
pub fn parse_scan_csv(text: &str) -> Result<Vec<ScanRow>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != asymptotics::SCAN_CSV_HEADER {
        return Err(Error::Parse(format!("unexpected scan header `{header}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bad = || Error::Parse(format!("scan line {}: `{l}`", i + 2));
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let eps = rational::parse_rational(f[0]).map_err(|_| bad())?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
            let int = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
            Ok(ScanRow {
                eps: rational::format_rational(&eps),
                eps_f64: rational::to_f64(&eps),
                count_lo: int(f[1])?,
                count_hi: int(f[2])?,
                leading: num(f[3])?,
                rem_lo: num(f[4])?,
                rem_hi: num(f[5])?,
                wall_time_ms: 0.0,
            })
        })
        .collect()
}

fn fit_report(fit: &asymptotics::Fit, verdict: &asymptotics::Verdict, regime: &RegimeClass) -> Result<Value> {
    Ok(json!({
        "beta": fit.beta,
        "C": fit.c,
        "r2": fit.r2,
        "usable_rows": fit.usable_rows,
        "log_degree": fit.log_degree,
        "log_constant": fit.log_constant,
        "verdict": if verdict.pass { "pass" } else { "fail" },
        "fitted_growth": verdict.fitted_growth,
        "predicted_growth": verdict.predicted_growth,
        "slack": verdict.slack,
        "regime": regime,
        "predicted": regime.predicted()?,
        "delta": asymptotics::DELTA,
    }))
}

fn plot(rows: &[ScanRow], title: &str) -> String {
    let rem = svg::Series {
        name: "|remainder|".into(),
        points: rows.iter().map(|r| (1.0 / r.eps_f64, r.rem_lo.abs().max(r.rem_hi.abs()))).collect(),
    };
    let lead = svg::Series { name: "leading term".into(), points: rows.iter().map(|r| (1.0 / r.eps_f64, r.leading)).collect() };
    svg::loglog(title, "1/epsilon", "value", &[lead, rem])
}

/// Full scan with fit, report and plot; the verdict decides the exit code.
pub fn run_scan(c: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let sd = c.split()?;
    let regime = c.regime(&sd)?;
    let domain = c.domain()?;
    if c.shift.iter().any(|x| !x.is_zero()) {
        return Err(cfg("shift", "scans count T_eps(S) without a shift"));
    }
    let rows = asymptotics::scan(&sd, domain, c.eps_list()?, &c.count_options())?;
    let mut files = Vec::new();
    write(out, format!("{}_scan.csv", c.name), &scan_csv(&rows), &mut files)?;
    write(out, format!("{}_plot.svg", c.name), &plot(&rows, &c.name), &mut files)?;
    finish_fit(c, &rows, &regime, out, files)
}

fn finish_fit(c: &ExperimentConfig, rows: &[ScanRow], regime: &RegimeClass, out: &Path, mut files: Vec<PathBuf>) -> Result<Outcome> {
    let (fit, verdict) = asymptotics::fit_rows(rows, regime, c.slack)?;
    let report = fit_report(&fit, &verdict, regime)?;
    write(out, format!("{}_fit.json", c.name), &(serde_json::to_string_pretty(&report).unwrap() + "\n"), &mut files)?;
    let summary = format!(
        "regime={} beta={:.4} C={:.4} r2={:.3} predicted_power={:.4} verdict={}\n",
        regime,
        fit.beta,
        fit.c,
        fit.r2,
        regime.predicted()?.power,
        if verdict.pass { "pass" } else { "fail" }
    );
    Ok(Outcome { files, summary, verdict: Some(verdict.pass) })
}

/// Refits an existing scan table.
pub fn run_fit(c: &ExperimentConfig, scan_path: &Path, out: &Path) -> Result<Outcome> {
    let text = fs::read_to_string(scan_path).map_err(|e| Error::Io(format!("{}: {e}", scan_path.display())))?;
    let rows = parse_scan_csv(&text)?;
    let sd = c.split()?;
    let regime = c.regime(&sd)?;
    finish_fit(c, &rows, &regime, out, Vec::new())
}

pub fn run_spectrum(c: &ExperimentConfig, out: &Path) -> Result<Outcome> {
    let sc = c.spectral.as_ref().ok_or_else(|| cfg("spectral", "missing field"))?;
    let torus = FlatTorus::new(c.lattice.clone(), sc.metric.clone(), c.subspace.clone())?;
    let opts = c.count_options();
    let four_pi2 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let mut csv = String::from("lambda,epsilon,N,leading,remainder,boundary_hits\n");
    for mu in &sc.mus {
        for e in &sc.epsilons {
            let n = torus.counting_function(mu, e, &opts).map_err(|err| with_eps(err, e))?;
            let lt = torus.leading_term_spectral(rational::to_f64(mu), rational::to_f64(e))?;
            csv.push_str(&format!(
                "{:.12e},{},{},{:.12e},{:.12e},{}\n",
                four_pi2 * rational::to_f64(mu),
                rational::format_rational(e),
                n.certain,
                lt,
                n.certain as f64 - lt,
                n.boundary_hits
            ));
        }
    }
    let mut files = Vec::new();
    write(out, format!("{}_spectrum.csv", c.name), &csv, &mut files)?;
    if let Some(cut) = &sc.eigen_cutoff {
        let mut dump = String::from("epsilon,coeffs,lambda\n");
        for e in &sc.epsilons {
            let rec = CountOptions { record: 1 << 20, ..opts.clone() };
            let r = torus.counting_function(cut, e, &rec)?;
            let mut eig: Vec<(f64, Vec<i64>)> = r
                .points
                .iter()
                .map(|m| Ok((torus.eigenvalue(m, rational::to_f64(e))?, m.clone())))
                .collect::<Result<_>>()?;
            eig.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            for (l, m) in eig {
                let coeffs: Vec<String> = m.iter().map(i64::to_string).collect();
                dump.push_str(&format!("{},{},{:.12e}\n", rational::format_rational(e), coeffs.join(" "), l));
            }
        }
        write(out, format!("{}_eigenvalues.csv", c.name), &dump, &mut files)?;
    }
    Ok(Outcome { files, summary: format!("{} rows\n", sc.mus.len() * sc.epsilons.len()), verdict: None })
}

fn fmt_cov(c: &crate::lattice::Covolume) -> String {
    match (c.exact(), &c.exact_sq) {
        (Some(x), _) => rational::format_rational(&x),
        (None, Some(sq)) => format!("sqrt({}) = {:.12}", rational::format_rational(sq), c.value),
        _ => format!("{:.12}", c.value),
    }
}

/// Human-readable summary of the decomposition.
pub fn lattice_info(c: &ExperimentConfig) -> Result<String> {
    let sd = c.split()?;
    let mut s = String::new();
    s.push_str(&format!("n = {}, p = {}, q = {}, r = {}\n", sd.n, sd.p, sd.q, sd.r));
    s.push_str(&format!("vol(E/Gamma) = {}\n", fmt_cov(&sd.gamma.covolume())));
    s.push_str(&format!("vol(V/Gamma_F) = {}\n", fmt_cov(&sd.gamma_f_covolume)));
    s.push_str(&format!("vol(V_perp/Gamma_perp) = {}\n", fmt_cov(&sd.perp_covolume)));
    s.push_str(&format!("covolume identity residual = {:e}\n", sd.covolume_residual));
    s.push_str("Gamma_F generators (dual-basis coefficients):\n");
    for (g, x) in sd.gen_coeffs.iter().zip(&sd.gens) {
        s.push_str(&format!("  {g:?} -> {x:?}\n"));
    }
    s.push_str("Gamma_perp basis (lattice coefficients):\n");
    for (k, x) in sd.perp_coeffs.iter().zip(&sd.perp) {
        s.push_str(&format!("  {k:?} -> {x:?}\n"));
    }
    if sd.r > 0 {
        return Ok(s);
    }
    let cert = sd.verify_trivial_intersection(10.0)?;
    s.push_str(&format!(
        "trivial-intersection certificate: dim(F cap V_perp) = {}, radius = {}, points = {}, min distance = {:.6e}, min ratio = {:.6e}, violated = {}\n",
        cert.intersection_dim, cert.radius, cert.points_checked, cert.min_distance, cert.min_ratio, cert.violated
    ));
    Ok(s)
}

/// Summary of an algebraic lattice from the config's `lattice` block.
pub fn field_info(c: &ExperimentConfig) -> Result<String> {
    let field = c.field.as_ref().ok_or_else(|| cfg("lattice", "not a number-field lattice (use `preset` or `minpoly`)"))?;
    let cov = c.lattice.covolume();
    let report = json!({
        "minpoly": field.minpoly().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "degree": field.degree(),
        "s": field.real_embeddings(),
        "t": field.complex_pairs(),
        "basis": c.lattice.basis_f64(),
        "exact_basis": c.lattice.to_json()["basis"],
        "covolume": cov.value,
        "covolume_squared": cov.exact_sq.as_ref().map(rational::format_rational),
    });
    Ok(serde_json::to_string_pretty(&report).unwrap() + "\n")
}

pub fn good_position(c: &ExperimentConfig, mode: GoodPositionMode, radius: f64) -> Result<(String, bool)> {
    let n = c.lattice.dim();
    let frame = c.frame.clone().unwrap_or_else(|| (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect());
    let v = norms::good_position_check(&c.lattice, &frame, mode, radius)?;
    Ok(match v {
        GoodPosition::Certified { bound } => (format!("certified: |Nm_e| >= {}\n", rational::format_rational(&bound)), true),
        GoodPosition::Refuted { coeffs, value } => (format!("refuted: point {coeffs:?} has Nm_e = {value:e}\n"), false),
        GoodPosition::Inconclusive { min_abs, points_checked } => (
            format!("inconclusive: min |Nm_e| = {min_abs:e} over {points_checked} points within radius {radius}\n"),
            true,
        ),
    })
}

/// Runs a single count for a config, for callers that want the result.
pub fn count_once(c: &ExperimentConfig, eps: &Rational) -> Result<CountResult> {
    counting::count(&c.split()?, c.domain()?, eps, &c.shift, &c.count_options())
}
