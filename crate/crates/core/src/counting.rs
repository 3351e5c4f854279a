//! Exact counts `n_ε(S, v) = #((T_ε(S) + v) ∩ Γ)`: a naive coefficient-box
//! enumeration, the slice decomposition over `Γ_F*`, and counts in `T·S + v`
//! for multipliers `T`.
//!
//! Every candidate goes through the same classifier: a floating-point gauge
//! first, and for points within `tol` of the boundary an exact decision.
//! Points the exact path cannot decide are reported as boundary hits; points
//! lying exactly on the boundary are outside the open set.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::domains::{AnisoMap, Classification, Direction, Domain};
use crate::error::{Error, Result};
use crate::lattice::{point_budget, Lattice};
use crate::linalg;
use crate::numberfield::norms::Multiplier;
use crate::scalar::{Rational, Scalar};
use crate::splitter::SplitData;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Naive,
    Sliced,
    Multiplicative,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Sliced => "sliced",
            Method::Multiplicative => "multiplicative",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountResult {
    pub certain: u64,
    pub boundary_hits: u64,
    pub method: Method,
    /// `eps=…` or `T=(…)`.
    pub descriptor: String,
    /// Candidates classified.
    pub candidates: u64,
    /// Slices visited (sliced method only).
    pub slices: u64,
    /// Coefficients of counted points, capped at [`CountOptions::record`].
    pub points: Vec<Vec<i64>>,
    pub wall_time_ms: f64,
}

impl CountResult {
    /// `[certain, certain + boundary_hits]`.
    pub fn interval(&self) -> (u64, u64) {
        (self.certain, self.certain + self.boundary_hits)
    }

    /// Equality of the counted interval.
    pub fn same_count(&self, o: &Self) -> bool {
        self.certain == o.certain && self.boundary_hits == o.boundary_hits
    }
}

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub tol: f64,
    pub budget: u64,
    pub record: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, budget: point_budget(), record: 0 }
    }
}

/// The linear map `L` with `L(S)` the expanded domain.
pub trait Expansion: Sync {
    fn pull_back(&self, x: &[f64]) -> Vec<f64>;
    fn pull_back_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>>;
    /// `Lᵀ u`, so that `h_{L(S)}(u) = h_S(Lᵀu)`.
    fn transpose(&self, u: &[f64]) -> Vec<f64>;
    fn describe(&self) -> String;
}

impl Expansion for AnisoMap {
    fn pull_back(&self, x: &[f64]) -> Vec<f64> {
        self.apply(x, Direction::Inverse)
    }

    fn pull_back_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        self.inverse_exact(x)
    }

    fn transpose(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u, Direction::Forward)
    }

    fn describe(&self) -> String {
        format!("eps={}", crate::scalar::rational::format_rational(self.eps()))
    }
}

impl Expansion for Multiplier {
    fn pull_back(&self, x: &[f64]) -> Vec<f64> {
        self.apply_inverse(x)
    }

    fn pull_back_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        self.apply_inverse_exact(x)
    }

    fn transpose(&self, u: &[f64]) -> Vec<f64> {
        self.apply_transpose(u)
    }

    fn describe(&self) -> String {
        Multiplier::describe(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Outcome {
    In,
    Out,
    Hit,
}

struct Classifier<'a, X: Expansion> {
    gamma: &'a Lattice,
    domain: &'a Domain,
    map: &'a X,
    v: &'a [Scalar],
    v_f64: Vec<f64>,
    tol: f64,
}

impl<'a, X: Expansion> Classifier<'a, X> {
    fn new(gamma: &'a Lattice, domain: &'a Domain, map: &'a X, v: &'a [Scalar], tol: f64) -> Result<Self> {
        let n = gamma.dim();
        if domain.dim() != n || v.len() != n {
            return Err(Error::InvalidDims(format!(
                "lattice dimension {n}, domain dimension {}, shift length {}",
                domain.dim(),
                v.len()
            )));
        }
        if !(tol >= 0.0) {
            return Err(Error::NonPositiveParameter("tol".into()));
        }
        Ok(Self { gamma, domain, map, v, v_f64: v.iter().map(Scalar::to_f64).collect(), tol })
    }

    /// Preimage `L^{-1}(x − v)` of a lattice point.
    fn pre(&self, x: &[f64]) -> Vec<f64> {
        let d: Vec<f64> = x.iter().zip(&self.v_f64).map(|(a, b)| a - b).collect();
        self.map.pull_back(&d)
    }

    fn classify(&self, m: &[i64]) -> Result<Outcome> {
        let y = self.pre(&self.gamma.point(m));
        Ok(match self.domain.classify(&y, self.tol)? {
            Classification::Inside => Outcome::In,
            Classification::Outside => Outcome::Out,
            Classification::Boundary => match self.classify_exact(m) {
                Ok(Classification::Inside) => Outcome::In,
                Ok(_) => Outcome::Out,
                Err(_) => Outcome::Hit,
            },
        })
    }

    fn classify_exact(&self, m: &[i64]) -> Result<Classification> {
        let x = self.gamma.point_exact(m)?;
        let d: Vec<Scalar> = x.iter().zip(self.v).map(|(a, b)| a.sub(b)).collect::<Result<_>>()?;
        let y = self.map.pull_back_exact(&d)?;
        self.domain.classify_exact(&y)
    }
}

#[derive(Default)]
struct Tally {
    certain: u64,
    hits: u64,
    candidates: u64,
    points: Vec<Vec<i64>>,
}

impl Tally {
    fn record<X: Expansion>(&mut self, c: &Classifier<X>, m: &[i64], cap: usize) -> Result<()> {
        self.candidates += 1;
        match c.classify(m)? {
            Outcome::In => {
                self.certain += 1;
                if self.points.len() < cap {
                    self.points.push(m.to_vec());
                }
            }
            Outcome::Hit => self.hits += 1,
            Outcome::Out => {}
        }
        Ok(())
    }

    fn merge(mut self, o: Tally, cap: usize) -> Tally {
        self.certain += o.certain;
        self.hits += o.hits;
        self.candidates += o.candidates;
        let room = cap.saturating_sub(self.points.len());
        self.points.extend(o.points.into_iter().take(room));
        self
    }
}

/// Integer range `[⌈lo − slack⌉, ⌊hi + slack⌋]`.
fn int_range(lo: f64, hi: f64) -> Result<(i64, i64)> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::WindowIncomplete("support function is not finite".into()));
    }
    let slack = |x: f64| 1e-7 * (1.0 + x.abs());
    let a = (lo - slack(lo)).ceil();
    let b = (hi + slack(hi)).floor();
    if a.abs() > 9.0e15 || b.abs() > 9.0e15 {
        return Err(Error::BudgetExceeded { estimate: f64::INFINITY, budget: point_budget() });
    }
    Ok((a as i64, b as i64))
}

fn finish(t: Tally, method: Method, descriptor: String, slices: u64, start: Instant) -> CountResult {
    CountResult {
        certain: t.certain,
        boundary_hits: t.hits,
        method,
        descriptor,
        candidates: t.candidates,
        slices,
        points: t.points,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

fn check_budget(estimate: f64, budget: u64) -> Result<()> {
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    Ok(())
}

/// Runs `visit` on every point of the integer box `[lo_i, hi_i]`, splitting
/// the first coordinate across workers; results are merged in order.
fn par_box<F>(lo: &[i64], hi: &[i64], cap: usize, visit: F) -> Result<Tally>
where
    F: Fn(&[i64], &mut Tally) -> Result<()> + Sync,
{
    let n = lo.len();
    if n == 0 || lo.iter().zip(hi).any(|(a, b)| a > b) {
        let mut t = Tally::default();
        if n == 0 {
            visit(&[], &mut t)?;
        }
        return Ok(t);
    }
    let parts: Vec<Result<Tally>> = (lo[0]..=hi[0])
        .into_par_iter()
        .map(|first| {
            let mut t = Tally::default();
            let mut m = lo.to_vec();
            m[0] = first;
            loop {
                visit(&m, &mut t)?;
                let mut i = n - 1;
                loop {
                    if i == 0 {
                        return Ok(t);
                    }
                    if m[i] < hi[i] {
                        m[i] += 1;
                        break;
                    }
                    m[i] = lo[i];
                    i -= 1;
                }
            }
        })
        .collect();
    let mut acc = Tally::default();
    for p in parts {
        acc = acc.merge(p?, cap);
    }
    Ok(acc)
}

/// Oracle count: every integer vector in the coefficient box of
/// `L(S) + v`, classified one by one.
pub fn count_naive_with<X: Expansion>(
    gamma: &Lattice,
    domain: &Domain,
    map: &X,
    v: &[Scalar],
    opts: &CountOptions,
    method: Method,
) -> Result<CountResult> {
    let start = Instant::now();
    let c = Classifier::new(gamma, domain, map, v, opts.tol)?;
    let dual = gamma.dual_f64();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    let mut estimate = 1.0f64;
    for d in &dual {
        // (x, d_i) = m_i and (x − v, d) ≤ h_S(Lᵀd).
        let vd = linalg::fdot(&c.v_f64, d);
        let up = domain.support(&map.transpose(d)) + vd;
        let neg: Vec<f64> = d.iter().map(|x| -x).collect();
        let down = -domain.support(&map.transpose(&neg)) + vd;
        let (a, b) = int_range(down, up)?;
        estimate *= (b - a + 1).max(0) as f64;
        lo.push(a);
        hi.push(b);
    }
    check_budget(estimate, opts.budget)?;
    let t = par_box(&lo, &hi, opts.record, |m, t| t.record(&c, m, opts.record))?;
    Ok(finish(t, method, map.describe(), 0, start))
}

/// Naive count of `(T_ε(S) + v) ∩ Γ`.
pub fn count_naive(gamma: &Lattice, domain: &Domain, map: &AnisoMap, v: &[Scalar], opts: &CountOptions) -> Result<CountResult> {
    count_naive_with(gamma, domain, map, v, opts, Method::Naive)
}

/// Walks the lattice `x0 + Σ t_k k_k` (with `k_k` given by `Γ`-coefficients
/// `basis`) inside `L(S) + v`. All coordinates but the one with the widest
/// range run over their box; the last one runs over the line section.
fn walk_coset<X: Expansion>(
    c: &Classifier<X>,
    m0: &[i64],
    basis: &[Vec<i64>],
    cap: usize,
    budget: u64,
) -> Result<Tally> {
    let mut tally = Tally::default();
    if basis.is_empty() {
        tally.record(c, m0, cap)?;
        return Ok(tally);
    }
    let vecs: Vec<Vec<f64>> = basis.iter().map(|k| c.gamma.point(k)).collect();
    let g = linalg::fgram(&vecs);
    let kappa = linalg::fmat_mul(&linalg::finverse(&g)?, &vecs);
    let x0 = c.gamma.point(m0);
    let shift: Vec<f64> = x0.iter().zip(&c.v_f64).map(|(a, b)| a - b).collect();
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for k in &kappa {
        let base = linalg::fdot(&shift, k);
        let neg: Vec<f64> = k.iter().map(|x| -x).collect();
        let up = c.domain.support(&c.map.transpose(k)) - base;
        let down = -c.domain.support(&c.map.transpose(&neg)) - base;
        let (a, b) = int_range(down, up)?;
        if a > b {
            return Ok(tally);
        }
        lo.push(a);
        hi.push(b);
    }
    let last = (0..lo.len()).max_by_key(|&i| (hi[i] - lo[i], i)).unwrap();
    let outer: Vec<usize> = (0..lo.len()).filter(|&i| i != last).collect();
    let outer_count: f64 = outer.iter().map(|&i| (hi[i] - lo[i] + 1) as f64).product();
    check_budget(outer_count, budget)?;
    let w = c.map.pull_back(&vecs[last]);
    let mut t: Vec<i64> = outer.iter().map(|&i| lo[i]).collect();
    let n = m0.len();
    loop {
        let mut mb = m0.to_vec();
        for (ti, &i) in t.iter().zip(&outer) {
            for j in 0..n {
                mb[j] += ti * basis[i][j];
            }
        }
        let y0 = c.pre(&c.gamma.point(&mb));
        if let Some((s_lo, s_hi)) = c.domain.line_interval(&y0, &w) {
            let a = lo[last].max(if s_lo.is_finite() { s_lo.ceil() as i64 - 1 } else { lo[last] });
            let b = hi[last].min(if s_hi.is_finite() { s_hi.floor() as i64 + 1 } else { hi[last] });
            let mut m = mb.clone();
            for j in 0..n {
                m[j] += a * basis[last][j];
            }
            for _ in a..=b {
                tally.record(c, &m, cap)?;
                for j in 0..n {
                    m[j] += basis[last][j];
                }
            }
            if tally.candidates > budget {
                return Err(Error::BudgetExceeded { estimate: tally.candidates as f64, budget });
            }
        }
        let mut i = t.len();
        loop {
            if i == 0 {
                return Ok(tally);
            }
            i -= 1;
            if t[i] < hi[outer[i]] {
                t[i] += 1;
                break;
            }
            t[i] = lo[outer[i]];
        }
    }
}

/// Sliced count of `T_ε(S) ∩ Γ`: a sum over the finitely many `γ* ∈ Γ_F*`
/// whose slice meets `S`, each slice walked as a coset of `Γ^⊥`.
pub fn count_sliced(sd: &SplitData, domain: &Domain, eps: &Rational, opts: &CountOptions) -> Result<CountResult> {
    let start = Instant::now();
    let map = AnisoMap::new(&sd.f, eps.clone())?;
    let zero = vec![Scalar::zero(); sd.n];
    let c = Classifier::new(&sd.gamma, domain, &map, &zero, opts.tol)?;
    let window = slice_window(sd, domain)?;
    let slices = window_points(&window, opts.budget)?;
    let parts: Vec<Result<Tally>> = slices
        .par_iter()
        .map(|a| walk_coset(&c, &sd.representative(a), &sd.perp_coeffs, opts.record, opts.budget))
        .collect();
    let mut acc = Tally::default();
    for p in parts {
        acc = acc.merge(p?, opts.record);
    }
    Ok(finish(acc, Method::Sliced, map.describe(), slices.len() as u64, start))
}

/// Integer box of slice indices `a_j = (x, g_j)` over `x ∈ S`. `T_ε` fixes
/// `V`, so the window does not depend on `ε`.
pub fn slice_window(sd: &SplitData, domain: &Domain) -> Result<Vec<(i64, i64)>> {
    sd.gens
        .iter()
        .map(|g| {
            let neg: Vec<f64> = g.iter().map(|x| -x).collect();
            int_range(-domain.support(&neg), domain.support(g))
        })
        .collect()
}

pub(crate) fn window_points(window: &[(i64, i64)], budget: u64) -> Result<Vec<Vec<i64>>> {
    let size: f64 = window.iter().map(|(a, b)| (b - a + 1).max(0) as f64).product();
    check_budget(size, budget)?;
    let mut out = vec![Vec::new()];
    for &(a, b) in window {
        out = out
            .into_iter()
            .flat_map(|p| {
                (a..=b).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

/// Default count: sliced when `v = 0`, naive otherwise.
pub fn count(sd: &SplitData, domain: &Domain, eps: &Rational, v: &[Scalar], opts: &CountOptions) -> Result<CountResult> {
    if v.iter().all(Scalar::is_zero) {
        count_sliced(sd, domain, eps, opts)
    } else {
        count_naive(&sd.gamma, domain, &AnisoMap::new(&sd.f, eps.clone())?, v, opts)
    }
}

/// Count of `Γ ∩ (T·S + v)`, walking all of `Γ` with line sections.
pub fn count_multiplicative(
    gamma: &Lattice,
    t: &Multiplier,
    domain: &Domain,
    v: &[Scalar],
    opts: &CountOptions,
) -> Result<CountResult> {
    let start = Instant::now();
    if t.dim() != gamma.dim() {
        return Err(Error::InvalidDims(format!("multiplier acts on R^{}, lattice is in R^{}", t.dim(), gamma.dim())));
    }
    if t.norm() == Rational::from_integer(0.into()) {
        return Err(Error::ZeroNorm);
    }
    let c = Classifier::new(gamma, domain, t, v, opts.tol)?;
    let n = gamma.dim();
    // Start from a lattice point near v.
    let dual = gamma.dual_f64();
    let m0: Vec<i64> = dual.iter().map(|d| linalg::fdot(&c.v_f64, d).round() as i64).collect();
    let basis: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let tally = walk_coset(&c, &m0, &basis, opts.record, opts.budget)?;
    Ok(finish(tally, Method::Multiplicative, t.describe(), 0, start))
}

/// CSV header matching [`CountResult::csv_row`].
pub const CSV_HEADER: &str = "epsilon,certain,boundary_hits,method,wall_time_ms";

impl CountResult {
    pub fn csv_row(&self) -> String {
        let d = self.descriptor.strip_prefix("eps=").unwrap_or(&self.descriptor);
        format!("{},{},{},{},{:.3}", d, self.certain, self.boundary_hits, self.method, self.wall_time_ms)
    }
}
