//! Bounded open domains: membership, support functions, line sections,
//! slice volumes and parallel bodies.

pub mod aniso;
pub mod polytope;
pub mod qmc;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, FMatrix, Matrix};
use crate::scalar::{rational, Rational, Scalar};

pub use aniso::{AnisoMap, Direction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    Inside,
    Outside,
    Boundary,
}

/// Membership oracle: a gauge-like value, `< 1` exactly on the open set.
pub type GaugeFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Support function oracle `u ↦ sup_{x∈S} (x, u)`.
pub type SupportFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Vec<Scalar>,
    pub radius_sq: Rational,
    center_f64: Vec<f64>,
    radius: f64,
}

#[derive(Clone, Debug)]
pub struct Ellipsoid {
    pub center: Vec<Scalar>,
    /// Shape matrix `A`; the set is `(x−c)ᵀA(x−c) < 1`.
    pub shape: Matrix,
    center_f64: Vec<f64>,
    shape_f64: FMatrix,
    shape_inv: FMatrix,
    /// Smallest and largest semi-axes.
    semi_axes: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct BoxDomain {
    pub center: Vec<Scalar>,
    pub half_widths: Vec<Scalar>,
    /// Orthonormal edge directions (rows); `None` means the standard frame.
    pub frame: Option<Matrix>,
    center_f64: Vec<f64>,
    hw_f64: Vec<f64>,
    frame_f64: FMatrix,
}

#[derive(Clone, Debug)]
pub struct Factor {
    /// Orthonormal rows spanning the factor subspace `E_j`.
    pub rows: Matrix,
    pub domain: Domain,
    pub strictly_convex: bool,
    rows_f64: FMatrix,
}

#[derive(Clone)]
pub struct OracleConvex {
    pub name: String,
    pub center: Vec<f64>,
    pub circumradius: f64,
    pub lipschitz: f64,
    pub strictly_convex: bool,
    pub gauge: GaugeFn,
    pub support: SupportFn,
    pub descriptor: Value,
}

impl fmt::Debug for OracleConvex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OracleConvex").field("name", &self.name).field("center", &self.center).finish()
    }
}

#[derive(Clone, Debug)]
pub enum Domain {
    Ball(Ball),
    Ellipsoid(Ellipsoid),
    Box(BoxDomain),
    Product(Vec<Factor>),
    Oracle(OracleConvex),
}

fn to_f64s(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn classify_gauge(g: f64, tol: f64) -> Classification {
    if g < 1.0 - tol {
        Classification::Inside
    } else if g > 1.0 + tol {
        Classification::Outside
    } else {
        Classification::Boundary
    }
}

fn from_ordering(o: Ordering) -> Classification {
    match o {
        Ordering::Less => Classification::Inside,
        Ordering::Equal => Classification::Boundary,
        Ordering::Greater => Classification::Outside,
    }
}

/// Unit ball volume `ω_m`, by `ω_m = ω_{m−2}·2π/m`.
pub fn unit_ball_volume(m: usize) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(m - 2) * 2.0 * std::f64::consts::PI / m as f64,
    }
}

fn check_frame(frame: &FMatrix, n: usize) -> Result<()> {
    for (i, a) in frame.iter().enumerate() {
        if a.len() != n {
            return Err(Error::DegenerateFrame);
        }
        for (j, b) in frame.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if (linalg::fdot(a, b) - want).abs() > 1e-9 {
                return Err(Error::DegenerateFrame);
            }
        }
    }
    Ok(())
}

fn check_orthonormal(rows: &FMatrix) -> Result<()> {
    let n = rows.first().map_or(0, Vec::len);
    check_frame(rows, n).map_err(|_| Error::NonOrthonormalFrame)
}

impl Ball {
    pub fn new(center: Vec<Scalar>, radius_sq: Rational) -> Result<Self> {
        if radius_sq <= Rational::from_integer(0.into()) {
            return Err(Error::NonPositiveParameter("radius".into()));
        }
        let radius = rational::to_f64(&radius_sq).sqrt();
        Ok(Self { center_f64: to_f64s(&center), center, radius_sq, radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Ellipsoid {
    pub fn new(center: Vec<Scalar>, shape: Matrix) -> Result<Self> {
        let n = center.len();
        if shape.len() != n || shape.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDims("ellipsoid matrix must be n×n".into()));
        }
        let shape_f64 = linalg::to_f64_matrix(&shape);
        for i in 0..n {
            for j in 0..n {
                if (shape_f64[i][j] - shape_f64[j][i]).abs() > 1e-12 * shape_f64[i][i].abs().max(1.0) {
                    return Err(Error::InvalidDims("ellipsoid matrix must be symmetric".into()));
                }
            }
        }
        let ev = linalg::sym_eigenvalues(&shape_f64);
        if ev.first().is_none_or(|&e| e <= 0.0) {
            return Err(Error::NonPositiveParameter("ellipsoid matrix eigenvalues".into()));
        }
        let semi_axes = (1.0 / ev[n - 1].sqrt(), 1.0 / ev[0].sqrt());
        let shape_inv = linalg::finverse(&shape_f64)?;
        Ok(Self { center_f64: to_f64s(&center), center, shape, shape_f64, shape_inv, semi_axes })
    }
}

impl BoxDomain {
    pub fn new(center: Vec<Scalar>, half_widths: Vec<Scalar>, frame: Option<Matrix>) -> Result<Self> {
        let n = center.len();
        if half_widths.len() != n {
            return Err(Error::InvalidDims("box needs one half-width per axis".into()));
        }
        for h in &half_widths {
            if h.signum()? == Ordering::Less {
                return Err(Error::NonPositiveParameter("half_widths".into()));
            }
        }
        let frame_f64 = match &frame {
            Some(f) => {
                if f.len() != n {
                    return Err(Error::InvalidDims("box frame must have n rows".into()));
                }
                let ff = linalg::to_f64_matrix(f);
                check_orthonormal(&ff)?;
                ff
            }
            None => linalg::to_f64_matrix(&linalg::identity(n)),
        };
        Ok(Self {
            center_f64: to_f64s(&center),
            hw_f64: to_f64s(&half_widths),
            center,
            half_widths,
            frame,
            frame_f64,
        })
    }
}

impl Factor {
    pub fn new(rows: Matrix, domain: Domain, strictly_convex: bool) -> Result<Self> {
        let rows_f64 = linalg::to_f64_matrix(&rows);
        check_orthonormal(&rows_f64)?;
        if domain.dim() != rows.len() {
            return Err(Error::InvalidDims("factor domain dimension must match its subspace".into()));
        }
        Ok(Self { rows, domain, strictly_convex, rows_f64 })
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        linalg::fmat_vec(&self.rows_f64, x)
    }

    fn lift(&self, z: &[f64]) -> Vec<f64> {
        linalg::fvec_mat(z, &self.rows_f64)
    }
}

impl OracleConvex {
    /// The open `ℓ^p` ball, `1 < p < ∞`, given only through oracles.
    pub fn lp_ball(center: Vec<f64>, radius: f64, p: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveParameter("radius".into()));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::NonPositiveParameter("p - 1".into()));
        }
        let n = center.len();
        let q = p / (p - 1.0);
        let c1 = center.clone();
        let c2 = center.clone();
        let gauge: GaugeFn = Arc::new(move |x: &[f64]| {
            x.iter().zip(&c1).map(|(a, b)| (a - b).abs().powf(p)).sum::<f64>().powf(1.0 / p) / radius
        });
        let support: SupportFn = Arc::new(move |u: &[f64]| {
            linalg::fdot(&c2, u) + radius * u.iter().map(|a| a.abs().powf(q)).sum::<f64>().powf(1.0 / q)
        });
        let circumradius = radius * (n as f64).powf((0.5 - 1.0 / p).max(0.0));
        Ok(Self {
            name: format!("lp_ball(p={p})"),
            descriptor: json!({"kind": "lp_ball", "center": center.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "radius": radius.to_string(), "p": p}),
            center,
            circumradius,
            lipschitz: 1.0 / radius,
            strictly_convex: true,
            gauge,
            support,
        })
    }
}

impl Domain {
    pub fn ball(center: Vec<Scalar>, radius: Rational) -> Result<Self> {
        Ok(Domain::Ball(Ball::new(center, &radius * &radius)?))
    }

    pub fn unit_ball(n: usize) -> Self {
        Domain::Ball(Ball::new(vec![Scalar::zero(); n], Rational::from_integer(1.into())).unwrap())
    }

    pub fn axis_box(center: Vec<Scalar>, half_widths: Vec<Scalar>) -> Result<Self> {
        Ok(Domain::Box(BoxDomain::new(center, half_widths, None)?))
    }

    pub fn product(factors: Vec<Factor>) -> Result<Self> {
        let rows: FMatrix = factors.iter().flat_map(|f| f.rows_f64.clone()).collect();
        let n = rows.first().map_or(0, Vec::len);
        if rows.len() != n || check_frame(&rows, n).is_err() {
            return Err(Error::InvalidDims("product factors must split the space orthogonally".into()));
        }
        Ok(Domain::Product(factors))
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Ball(b) => b.center.len(),
            Domain::Ellipsoid(e) => e.center.len(),
            Domain::Box(b) => b.center.len(),
            Domain::Product(fs) => fs.iter().map(|f| f.rows.len()).sum(),
            Domain::Oracle(o) => o.center.len(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Domain::Ball(_) => "ball",
            Domain::Ellipsoid(_) => "ellipsoid",
            Domain::Box(_) => "box",
            Domain::Product(_) => "product",
            Domain::Oracle(_) => "oracle",
        }
    }

    /// Declared strict convexity (not verified).
    pub fn strictly_convex(&self) -> bool {
        match self {
            Domain::Ball(_) | Domain::Ellipsoid(_) => true,
            Domain::Box(_) => false,
            Domain::Product(fs) => fs.len() == 1 && fs[0].strictly_convex,
            Domain::Oracle(o) => o.strictly_convex,
        }
    }

    pub fn center_f64(&self) -> Vec<f64> {
        match self {
            Domain::Ball(b) => b.center_f64.clone(),
            Domain::Ellipsoid(e) => e.center_f64.clone(),
            Domain::Box(b) => b.center_f64.clone(),
            Domain::Product(fs) => {
                let n = self.dim();
                let mut c = vec![0.0; n];
                for f in fs {
                    for (a, b) in c.iter_mut().zip(f.lift(&f.domain.center_f64())) {
                        *a += b;
                    }
                }
                c
            }
            Domain::Oracle(o) => o.center.clone(),
        }
    }

    /// Radius of a ball around [`Self::center_f64`] containing the domain.
    pub fn circumradius(&self) -> f64 {
        match self {
            Domain::Ball(b) => b.radius,
            Domain::Ellipsoid(e) => e.semi_axes.1,
            Domain::Box(b) => linalg::fnorm(&b.hw_f64),
            Domain::Product(fs) => fs.iter().map(|f| f.domain.circumradius().powi(2)).sum::<f64>().sqrt(),
            Domain::Oracle(o) => o.circumradius,
        }
    }

    /// Gauge value: `< 1` exactly inside.
    pub fn gauge(&self, y: &[f64]) -> Result<f64> {
        Ok(match self {
            Domain::Ball(b) => {
                let d = sub(y, &b.center_f64);
                linalg::fdot(&d, &d) / (b.radius * b.radius)
            }
            Domain::Ellipsoid(e) => {
                let d = sub(y, &e.center_f64);
                linalg::fdot(&d, &linalg::fmat_vec(&e.shape_f64, &d))
            }
            Domain::Box(b) => {
                let d = sub(y, &b.center_f64);
                b.frame_f64
                    .iter()
                    .zip(&b.hw_f64)
                    .map(|(f, h)| linalg::fdot(f, &d).abs() / h)
                    .fold(0.0, f64::max)
            }
            Domain::Product(fs) => {
                let mut g = 0.0f64;
                for f in fs {
                    g = g.max(f.domain.gauge(&f.project(y))?);
                }
                g
            }
            Domain::Oracle(o) => {
                let g = (o.gauge)(y);
                if !g.is_finite() {
                    return Err(Error::OracleFailure(format!("{} returned {g}", o.name)));
                }
                g
            }
        })
    }

    /// Floating-point classification; within `tol` (relative) of the boundary
    /// reports [`Classification::Boundary`].
    pub fn classify(&self, y: &[f64], tol: f64) -> Result<Classification> {
        match self {
            Domain::Product(fs) => {
                let mut out = Classification::Inside;
                for f in fs {
                    match f.domain.classify(&f.project(y), tol)? {
                        Classification::Outside => return Ok(Classification::Outside),
                        Classification::Boundary => out = Classification::Boundary,
                        Classification::Inside => {}
                    }
                }
                Ok(out)
            }
            _ => Ok(classify_gauge(self.gauge(y)?, tol)),
        }
    }

    /// Exact classification of an exactly known point; `Boundary` here means
    /// the point lies on the boundary.
    pub fn classify_exact(&self, y: &[Scalar]) -> Result<Classification> {
        match self {
            Domain::Ball(b) => {
                let mut acc = Scalar::zero();
                for (yi, ci) in y.iter().zip(&b.center) {
                    let d = yi.sub(ci)?;
                    acc = acc.add(&d.mul(&d)?)?;
                }
                Ok(from_ordering(acc.compare(&Scalar::Rat(b.radius_sq.clone()))?))
            }
            Domain::Ellipsoid(e) => {
                let d: Vec<Scalar> = y.iter().zip(&e.center).map(|(a, c)| a.sub(c)).collect::<Result<_>>()?;
                let ad: Vec<Scalar> = e.shape.iter().map(|row| crate::scalar::dot(row, &d)).collect::<Result<_>>()?;
                Ok(from_ordering(crate::scalar::dot(&d, &ad)?.compare(&Scalar::one())?))
            }
            Domain::Box(b) => {
                let d: Vec<Scalar> = y.iter().zip(&b.center).map(|(a, c)| a.sub(c)).collect::<Result<_>>()?;
                let mut out = Classification::Inside;
                for (i, h) in b.half_widths.iter().enumerate() {
                    let coord = match &b.frame {
                        Some(f) => crate::scalar::dot(&f[i], &d)?,
                        None => d[i].clone(),
                    };
                    let hi = coord.compare(h)?;
                    let lo = coord.compare(&h.neg())?;
                    if hi == Ordering::Greater || lo == Ordering::Less {
                        return Ok(Classification::Outside);
                    }
                    if hi == Ordering::Equal || lo == Ordering::Equal {
                        out = Classification::Boundary;
                    }
                }
                Ok(out)
            }
            Domain::Product(fs) => {
                let mut out = Classification::Inside;
                for f in fs {
                    let z: Vec<Scalar> =
                        f.rows.iter().map(|row| crate::scalar::dot(row, y)).collect::<Result<_>>()?;
                    match f.domain.classify_exact(&z)? {
                        Classification::Outside => return Ok(Classification::Outside),
                        Classification::Boundary => out = Classification::Boundary,
                        Classification::Inside => {}
                    }
                }
                Ok(out)
            }
            Domain::Oracle(o) => Err(Error::UnsupportedKind(format!("{} has no exact membership", o.name))),
        }
    }

    /// Support function `h_S(u) = sup_{x∈S} (x, u)`.
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            Domain::Ball(b) => linalg::fdot(&b.center_f64, u) + b.radius * linalg::fnorm(u),
            Domain::Ellipsoid(e) => {
                let q = linalg::fdot(u, &linalg::fmat_vec(&e.shape_inv, u)).max(0.0);
                linalg::fdot(&e.center_f64, u) + q.sqrt()
            }
            Domain::Box(b) => {
                linalg::fdot(&b.center_f64, u)
                    + b.frame_f64.iter().zip(&b.hw_f64).map(|(f, h)| h * linalg::fdot(f, u).abs()).sum::<f64>()
            }
            Domain::Product(fs) => fs.iter().map(|f| f.domain.support(&f.project(u))).sum(),
            Domain::Oracle(o) => (o.support)(u),
        }
    }

    /// An interval of `s` containing every `s` with `y0 + s·w` in the closure
    /// of the domain (`None` if the line misses it).
    pub fn line_interval(&self, y0: &[f64], w: &[f64]) -> Option<(f64, f64)> {
        let quad = |d: Vec<f64>, aw: Vec<f64>, ad: Vec<f64>, r2: f64| -> Option<(f64, f64)> {
            // (d + s w)ᵀA(d + s w) ≤ r2
            let a = linalg::fdot(w, &aw);
            let b = 2.0 * linalg::fdot(&d, &aw);
            let c = linalg::fdot(&d, &ad) - r2;
            if a <= 0.0 {
                return if c <= 0.0 { Some((f64::NEG_INFINITY, f64::INFINITY)) } else { None };
            }
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            // Stable roots.
            let qv = -0.5 * (b + b.signum() * sq);
            let (r1, r2) = if qv == 0.0 { (0.0, 0.0) } else { (qv / a, c / qv) };
            Some((r1.min(r2), r1.max(r2)))
        };
        match self {
            Domain::Ball(b) => {
                let d = sub(y0, &b.center_f64);
                quad(d.clone(), w.to_vec(), d, b.radius * b.radius)
            }
            Domain::Ellipsoid(e) => {
                let d = sub(y0, &e.center_f64);
                let aw = linalg::fmat_vec(&e.shape_f64, w);
                let ad = linalg::fmat_vec(&e.shape_f64, &d);
                quad(d, aw, ad, 1.0)
            }
            Domain::Box(b) => {
                let d = sub(y0, &b.center_f64);
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for (f, h) in b.frame_f64.iter().zip(&b.hw_f64) {
                    let p = linalg::fdot(f, &d);
                    let v = linalg::fdot(f, w);
                    if v == 0.0 {
                        if p.abs() > *h {
                            return None;
                        }
                        continue;
                    }
                    let (a, c) = ((-h - p) / v, (h - p) / v);
                    lo = lo.max(a.min(c));
                    hi = hi.min(a.max(c));
                }
                (lo <= hi).then_some((lo, hi))
            }
            Domain::Product(fs) => {
                let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
                for f in fs {
                    let (a, c) = f.domain.line_interval(&f.project(y0), &f.project(w))?;
                    lo = lo.max(a);
                    hi = hi.min(c);
                }
                (lo <= hi).then_some((lo, hi))
            }
            Domain::Oracle(o) => {
                // Section of the circumscribed ball.
                let d = sub(y0, &o.center);
                quad(d.clone(), w.to_vec(), d, o.circumradius * o.circumradius)
            }
        }
    }

    /// Axis-aligned box containing `T(S)` for a linear map `T` given through
    /// its transpose.
    pub fn bounding_box_with(&self, transpose: impl Fn(&[f64]) -> Vec<f64>) -> Vec<(f64, f64)> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                let hi = self.support(&transpose(&e));
                e[i] = -1.0;
                let lo = -self.support(&transpose(&e));
                (lo, hi)
            })
            .collect()
    }

    /// Axis-aligned box containing `T_ε(S)` (`T_ε` is symmetric).
    pub fn bounding_box(&self, map: &AnisoMap) -> Vec<(f64, f64)> {
        self.bounding_box_with(|u| map.apply(u, Direction::Forward))
    }

    /// `vol_m(S ∩ (base + span(frame)))` with a standard error (zero for the
    /// analytic kinds).
    pub fn slice_volume(&self, base: &[f64], frame: &FMatrix) -> Result<(f64, f64)> {
        let n = self.dim();
        if base.len() != n {
            return Err(Error::InvalidDims("slice base point has wrong length".into()));
        }
        check_frame(frame, n)?;
        let m = frame.len();
        // Closest point of the slice plane to `x`.
        let foot = |x: &[f64]| -> Vec<f64> {
            let d = sub(x, base);
            let mut p = base.to_vec();
            for u in frame {
                let c = linalg::fdot(&d, u);
                for (a, b) in p.iter_mut().zip(u) {
                    *a += c * b;
                }
            }
            p
        };
        match self {
            Domain::Ball(b) => {
                let f = foot(&b.center_f64);
                let d = sub(&f, &b.center_f64);
                let rem = b.radius * b.radius - linalg::fdot(&d, &d);
                if rem <= 0.0 {
                    return Ok((0.0, 0.0));
                }
                Ok((unit_ball_volume(m) * rem.powf(m as f64 / 2.0), 0.0))
            }
            Domain::Ellipsoid(e) => {
                let w = sub(base, &e.center_f64);
                let ua: FMatrix = frame.iter().map(|u| linalg::fmat_vec(&e.shape_f64, u)).collect();
                let q: FMatrix = frame.iter().map(|u| ua.iter().map(|v| linalg::fdot(u, v)).collect()).collect();
                let bvec: Vec<f64> = ua.iter().map(|v| linalg::fdot(v, &w)).collect();
                let aw = linalg::fmat_vec(&e.shape_f64, &w);
                let mut m0 = linalg::fdot(&w, &aw);
                if m > 0 {
                    let qi = linalg::finverse(&q)?;
                    m0 -= linalg::fdot(&bvec, &linalg::fmat_vec(&qi, &bvec));
                }
                if m0 >= 1.0 {
                    return Ok((0.0, 0.0));
                }
                let det = if m > 0 { linalg::fdet(&q) } else { 1.0 };
                Ok((unit_ball_volume(m) * (1.0 - m0).powf(m as f64 / 2.0) / det.sqrt(), 0.0))
            }
            Domain::Box(b) => {
                let w = sub(base, &b.center_f64);
                let mut a = Vec::new();
                let mut bb = Vec::new();
                for (f, h) in b.frame_f64.iter().zip(&b.hw_f64) {
                    let row: Vec<f64> = frame.iter().map(|u| linalg::fdot(u, f)).collect();
                    let g = linalg::fdot(&w, f);
                    bb.push(h - g);
                    a.push(row.clone());
                    bb.push(h + g);
                    a.push(row.iter().map(|x| -x).collect());
                }
                Ok((polytope::volume(&a, &bb, m), 0.0))
            }
            Domain::Product(fs) => {
                let ranks: Vec<FMatrix> = fs
                    .iter()
                    .map(|f| linalg::orthonormal_rows(&frame.iter().map(|u| f.project(u)).collect(), 1e-9))
                    .collect();
                if ranks.iter().map(Vec::len).sum::<usize>() == m {
                    let mut value = 1.0;
                    let mut var_rel = 0.0;
                    for (f, sub_frame) in fs.iter().zip(&ranks) {
                        let (v, se) = f.domain.slice_volume(&f.project(base), sub_frame)?;
                        if v == 0.0 {
                            return Ok((0.0, 0.0));
                        }
                        value *= v;
                        var_rel += (se / v).powi(2);
                    }
                    Ok((value, value * var_rel.sqrt()))
                } else {
                    self.qmc_slice_volume(base, frame, qmc::DEFAULT_SAMPLES, qmc::seed())
                }
            }
            Domain::Oracle(_) => self.qmc_slice_volume(base, frame, qmc::DEFAULT_SAMPLES, qmc::seed()),
        }
    }

    /// Quasi-Monte Carlo slice volume over the section of the circumscribed
    /// ball.
    pub fn qmc_slice_volume(&self, base: &[f64], frame: &FMatrix, samples: usize, seed: u64) -> Result<(f64, f64)> {
        check_frame(frame, self.dim())?;
        let c = self.center_f64();
        let d = sub(&c, base);
        let mut p = base.to_vec();
        let mut along = 0.0;
        for u in frame {
            let t = linalg::fdot(&d, u);
            along += t * t;
            for (a, b) in p.iter_mut().zip(u) {
                *a += t * b;
            }
        }
        let rho = self.circumradius();
        let rem = rho * rho - (linalg::fdot(&d, &d) - along);
        if rem <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let half = rem.sqrt();
        let failure = std::sync::Mutex::new(None);
        let est = qmc::estimate(frame.len(), half, samples, seed, |z| {
            let x = linalg::fvec_mat(z, frame);
            let y: Vec<f64> = p.iter().zip(&x).map(|(a, b)| a + b).collect();
            match self.gauge(&y) {
                Ok(g) => g < 1.0,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    false
                }
            }
        });
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(est)
    }

    pub fn volume(&self) -> Result<(f64, f64)> {
        let n = self.dim();
        let frame = linalg::to_f64_matrix(&linalg::identity(n));
        self.slice_volume(&vec![0.0; n], &frame)
    }

    /// Inner and outer parallel bodies at distance `δ` (the ellipsoid pair is
    /// the homothetic bracket `c + (1 ∓ δ/a_min)(S − c)`).
    pub fn erode_dilate(&self, delta: &Rational) -> Result<(Domain, Domain)> {
        let zero = Rational::from_integer(0.into());
        if *delta < zero {
            return Err(Error::NonPositiveParameter("delta".into()));
        }
        if *delta == zero {
            if let Domain::Oracle(o) = self {
                return Err(Error::UnsupportedKind(format!("{} has no parallel bodies", o.name)));
            }
            return Ok((self.clone(), self.clone()));
        }
        match self {
            Domain::Ball(b) => {
                let r = exact_sqrt(&b.radius_sq).unwrap_or_else(|| rational::from_f64(b.radius).unwrap());
                let inner = &r - delta;
                let outer = &r + delta;
                let inner_sq = if inner > zero { &inner * &inner } else { zero.clone() };
                Ok((
                    Domain::Ball(Ball {
                        radius: rational::to_f64(&inner_sq).sqrt(),
                        radius_sq: inner_sq,
                        ..b.clone()
                    }),
                    Domain::Ball(Ball::new(b.center.clone(), &outer * &outer)?),
                ))
            }
            Domain::Box(b) => {
                let d = Scalar::Rat(delta.clone());
                let mut inner = Vec::new();
                let mut outer = Vec::new();
                for h in &b.half_widths {
                    let i = h.sub(&d)?;
                    inner.push(if i.signum()? == Ordering::Less { Scalar::zero() } else { i });
                    outer.push(h.add(&d)?);
                }
                Ok((
                    Domain::Box(BoxDomain::new(b.center.clone(), inner, b.frame.clone())?),
                    Domain::Box(BoxDomain::new(b.center.clone(), outer, b.frame.clone())?),
                ))
            }
            Domain::Ellipsoid(e) => {
                let t = rational::to_f64(delta) / e.semi_axes.0;
                let scale = |k: f64| -> Result<Domain> {
                    let f = rational::from_f64(1.0 / (k * k))?;
                    let shape = e
                        .shape
                        .iter()
                        .map(|r| r.iter().map(|x| x.mul(&Scalar::Rat(f.clone()))).collect::<Result<Vec<_>>>())
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Domain::Ellipsoid(Ellipsoid::new(e.center.clone(), shape)?))
                };
                let inner = if t >= 1.0 {
                    // Empty inner body: a degenerate ball of radius 0.
                    Domain::Ball(Ball {
                        center: e.center.clone(),
                        center_f64: e.center_f64.clone(),
                        radius_sq: zero.clone(),
                        radius: 0.0,
                    })
                } else {
                    scale(1.0 - t)?
                };
                Ok((inner, scale(1.0 + t)?))
            }
            Domain::Product(fs) => {
                let mut inner = Vec::new();
                let mut outer = Vec::new();
                for f in fs {
                    let (i, o) = f.domain.erode_dilate(delta)?;
                    inner.push(Factor { domain: i, ..f.clone() });
                    outer.push(Factor { domain: o, ..f.clone() });
                }
                Ok((Domain::Product(inner), Domain::Product(outer)))
            }
            Domain::Oracle(o) => Err(Error::UnsupportedKind(format!("{} has no parallel bodies", o.name))),
        }
    }

    pub fn from_json(v: &Value, n: usize) -> Result<Self> {
        parse_domain(v, n, "domain")
    }

    pub fn to_json(&self) -> Value {
        let vec_json = |v: &[Scalar]| v.iter().map(Scalar::to_json).collect::<Vec<_>>();
        let mat_json = |m: &Matrix| m.iter().map(|r| vec_json(r)).collect::<Vec<_>>();
        match self {
            Domain::Ball(b) => json!({"kind": "ball", "center": vec_json(&b.center), "radius_sq": rational::format_rational(&b.radius_sq)}),
            Domain::Ellipsoid(e) => json!({"kind": "ellipsoid", "center": vec_json(&e.center), "matrix": mat_json(&e.shape)}),
            Domain::Box(b) => {
                let mut v = json!({"kind": "box", "center": vec_json(&b.center), "half_widths": vec_json(&b.half_widths)});
                if let Some(f) = &b.frame {
                    v["frame"] = json!(mat_json(f));
                }
                v
            }
            Domain::Product(fs) => json!({
                "kind": "product",
                "factors": fs.iter().map(|f| json!({
                    "subspace": mat_json(&f.rows),
                    "domain": f.domain.to_json(),
                    "strictly_convex": f.strictly_convex,
                })).collect::<Vec<_>>(),
            }),
            Domain::Oracle(o) => o.descriptor.clone(),
        }
    }
}

fn exact_sqrt(q: &Rational) -> Option<Rational> {
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&(&rn * &rn) == n && &(&rd * &rd) == d).then(|| Rational::new(rn, rd))
}

fn cfg_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

fn parse_vec(v: Option<&Value>, n: usize, field: &str) -> Result<Vec<Scalar>> {
    let Some(v) = v else {
        return Ok(vec![Scalar::zero(); n]);
    };
    let arr = v.as_array().ok_or_else(|| cfg_err(field, "expected an array"))?;
    if arr.len() != n {
        return Err(cfg_err(field, format!("expected {n} entries, got {}", arr.len())));
    }
    arr.iter().map(|x| Scalar::from_json(x).map_err(|e| cfg_err(field, e.to_string()))).collect()
}

fn parse_matrix(v: &Value, rows: Option<usize>, n: usize, field: &str) -> Result<Matrix> {
    let arr = v.as_array().ok_or_else(|| cfg_err(field, "expected an array of rows"))?;
    if let Some(r) = rows {
        if arr.len() != r {
            return Err(cfg_err(field, format!("expected {r} rows, got {}", arr.len())));
        }
    }
    arr.iter().map(|row| parse_vec(Some(row), n, field)).collect()
}

fn parse_rational_field(v: &Value, field: &str) -> Result<Rational> {
    match Scalar::from_json(v).map_err(|e| cfg_err(field, e.to_string()))? {
        Scalar::Rat(r) => Ok(r),
        Scalar::Alg(_) => Err(cfg_err(field, "expected a rational")),
    }
}

fn parse_domain(v: &Value, n: usize, path: &str) -> Result<Domain> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| cfg_err(&format!("{path}.kind"), "missing domain kind"))?;
    let center = parse_vec(v.get("center"), n, &format!("{path}.center"))?;
    match kind {
        "ball" | "disk" => {
            let radius_sq = if let Some(r2) = v.get("radius_sq") {
                parse_rational_field(r2, &format!("{path}.radius_sq"))?
            } else {
                let r = parse_rational_field(
                    v.get("radius").ok_or_else(|| cfg_err(&format!("{path}.radius"), "missing radius"))?,
                    &format!("{path}.radius"),
                )?;
                &r * &r
            };
            Ok(Domain::Ball(Ball::new(center, radius_sq)?))
        }
        "ellipsoid" => {
            let m = v.get("matrix").ok_or_else(|| cfg_err(&format!("{path}.matrix"), "missing shape matrix"))?;
            Ok(Domain::Ellipsoid(Ellipsoid::new(center, parse_matrix(m, Some(n), n, &format!("{path}.matrix"))?)?))
        }
        "box" => {
            let hw = parse_vec(
                Some(v.get("half_widths").ok_or_else(|| cfg_err(&format!("{path}.half_widths"), "missing half-widths"))?),
                n,
                &format!("{path}.half_widths"),
            )?;
            let frame = v
                .get("frame")
                .map(|f| parse_matrix(f, Some(n), n, &format!("{path}.frame")))
                .transpose()?;
            Ok(Domain::Box(BoxDomain::new(center, hw, frame)?))
        }
        "product" => {
            let fs = v
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| cfg_err(&format!("{path}.factors"), "missing factor list"))?;
            let mut factors = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let p = format!("{path}.factors[{i}]");
                let rows = parse_matrix(
                    f.get("subspace").ok_or_else(|| cfg_err(&format!("{p}.subspace"), "missing subspace rows"))?,
                    None,
                    n,
                    &format!("{p}.subspace"),
                )?;
                let m = rows.len();
                let dom = parse_domain(
                    f.get("domain").ok_or_else(|| cfg_err(&format!("{p}.domain"), "missing factor domain"))?,
                    m,
                    &format!("{p}.domain"),
                )?;
                let sc = f.get("strictly_convex").and_then(Value::as_bool).unwrap_or_else(|| dom.strictly_convex());
                factors.push(Factor::new(rows, dom, sc)?);
            }
            Domain::product(factors)
        }
        "lp_ball" => {
            let r = parse_rational_field(
                v.get("radius").ok_or_else(|| cfg_err(&format!("{path}.radius"), "missing radius"))?,
                &format!("{path}.radius"),
            )?;
            let p = v.get("p").and_then(Value::as_f64).ok_or_else(|| cfg_err(&format!("{path}.p"), "missing exponent"))?;
            Ok(Domain::Oracle(OracleConvex::lp_ball(to_f64s(&center), rational::to_f64(&r), p)?))
        }
        other => Err(cfg_err(&format!("{path}.kind"), format!("unknown domain kind `{other}`"))),
    }
}
