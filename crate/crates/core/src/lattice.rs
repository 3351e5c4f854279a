//! Full-rank lattices with exact duals and covolumes, a theta-series
//! self-test, and bounded short-vector enumeration.

use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, FMatrix, Matrix};
use crate::numberfield::field::{NumberField, SlotKind};
use crate::scalar::{self, FieldElement, Rational, Scalar};

/// How the basis rows arise, when they come from a number field.
#[derive(Clone, Debug)]
pub enum Structure {
    Plain,
    /// Row `i` is the canonical embedding of `gens[i]`. The twisted variant
    /// writes complex pairs as `(2 Re, -2 Im)`, which is what the trace dual
    /// of a canonical lattice looks like.
    Canonical {
        field: Arc<NumberField>,
        gens: Vec<Vec<Rational>>,
        twisted: bool,
    },
}

/// Covolume, with the exact square when it is known.
#[derive(Clone, Debug, PartialEq)]
pub struct Covolume {
    pub value: f64,
    pub exact_sq: Option<Rational>,
}

impl Covolume {
    /// Exact covolume when it is rational.
    pub fn exact(&self) -> Option<Rational> {
        let sq = self.exact_sq.as_ref()?;
        let (n, d) = (sq.numer(), sq.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(Rational::new(rn, rd))
        } else {
            None
        }
    }
}

struct Inner {
    basis: Matrix,
    basis_f64: FMatrix,
    structure: Structure,
    dual: OnceLock<Result<Lattice>>,
}

#[derive(Clone)]
pub struct Lattice {
    inner: Arc<Inner>,
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lattice").field("basis", &self.inner.basis_f64).finish()
    }
}

/// A lattice vector: integer coefficients and its embedded coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticePoint {
    pub coeffs: Vec<i64>,
    pub coords: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ThetaCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Bound on the mass dropped by truncating both sums.
    pub tail_bound: f64,
    pub passed: bool,
}

/// Point budget for enumerations, overridable through `LATGEO_BUDGET`.
pub fn point_budget() -> u64 {
    std::env::var("LATGEO_BUDGET")
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|b| *b >= 1.0)
        .map(|b| b as u64)
        .unwrap_or(50_000_000)
}

impl Lattice {
    pub fn new(basis: Matrix) -> Result<Self> {
        let n = basis.len();
        if n == 0 || basis.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDims(format!("basis must be square, got {n} rows")));
        }
        let structure = detect_canonical(&basis).unwrap_or(Structure::Plain);
        Self::build(basis, structure)
    }

    fn build(basis: Matrix, structure: Structure) -> Result<Self> {
        let basis_f64 = linalg::to_f64_matrix(&basis);
        let lat = Self {
            inner: Arc::new(Inner {
                basis,
                basis_f64,
                structure,
                dual: OnceLock::new(),
            }),
        };
        match linalg::det(&lat.inner.basis) {
            Ok(d) if d.is_zero() => return Err(Error::SingularBasis),
            Ok(_) => {}
            Err(_) => {
                let scale: f64 = lat.inner.basis_f64.iter().map(|r| linalg::fnorm(r)).product();
                if linalg::fdet(&lat.inner.basis_f64).abs() <= 1e-12 * scale {
                    return Err(Error::SingularBasis);
                }
            }
        }
        Ok(lat)
    }

    pub fn from_rational(rows: Vec<Vec<Rational>>) -> Result<Self> {
        Self::new(rows.into_iter().map(|r| r.into_iter().map(Scalar::Rat).collect()).collect())
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| Scalar::from(x)).collect()).collect())
    }

    pub fn integer(n: usize) -> Self {
        Self::new(linalg::identity(n)).expect("identity is nonsingular")
    }

    /// Canonical embedding of a family of field elements given by
    /// power-basis coordinates.
    pub fn canonical(field: Arc<NumberField>, gens: Vec<Vec<Rational>>, twisted: bool) -> Result<Self> {
        let d = field.degree();
        if gens.len() != d {
            return Err(Error::InvalidDims(format!("need {d} generators, got {}", gens.len())));
        }
        let coord_matrix: Vec<Vec<Rational>> = gens
            .iter()
            .map(|g| {
                let mut g = g.clone();
                g.resize(d, Rational::zero());
                g
            })
            .collect();
        if crate::scalar::poly::rational_det(coord_matrix.clone()).is_zero() {
            return Err(Error::DependentGenerators);
        }
        let mut basis = Vec::with_capacity(d);
        for g in &coord_matrix {
            let elem = FieldElement::new(field.clone(), g.clone())?;
            basis.push(embed_row(&elem, twisted)?);
        }
        Self::build(
            basis,
            Structure::Canonical { field, gens: coord_matrix, twisted },
        )
    }

    pub fn dim(&self) -> usize {
        self.inner.basis.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.inner.basis
    }

    pub fn basis_f64(&self) -> &FMatrix {
        &self.inner.basis_f64
    }

    pub fn structure(&self) -> &Structure {
        &self.inner.structure
    }

    pub fn is_rational(&self) -> bool {
        self.inner.basis.iter().flatten().all(Scalar::is_rational)
    }

    pub fn rational_basis(&self) -> Option<Vec<Vec<Rational>>> {
        linalg::rational_matrix(&self.inner.basis)
    }

    /// Dual lattice; `D·Bᵀ = I` holds exactly.
    pub fn dual(&self) -> Result<Lattice> {
        self.inner.dual.get_or_init(|| self.compute_dual()).clone()
    }

    fn compute_dual(&self) -> Result<Lattice> {
        if let Structure::Canonical { field, gens, twisted } = &self.inner.structure {
            let dual_gens = trace_dual(field, gens)?;
            return Lattice::canonical(field.clone(), dual_gens, !twisted);
        }
        let bt = linalg::transpose(&self.inner.basis);
        let inv = linalg::inverse(&bt).map_err(|e| match e {
            Error::FieldMismatch(m) => Error::UnsupportedScalarKind(format!(
                "exact dual needs rational or single-embedding entries ({m})"
            )),
            other => other,
        })?;
        Lattice::build(inv, Structure::Plain)
    }

    /// Dual basis in floating point; always available.
    pub fn dual_f64(&self) -> FMatrix {
        match self.dual() {
            Ok(d) => d.inner.basis_f64.clone(),
            Err(_) => linalg::transpose(&linalg::finverse(&self.inner.basis_f64).expect("nonsingular")),
        }
    }

    pub fn gram_f64(&self) -> FMatrix {
        linalg::fgram(&self.inner.basis_f64)
    }

    /// Exact Gram matrix when the inner products are rational.
    pub fn gram_exact(&self) -> Option<Vec<Vec<Rational>>> {
        if let Some(b) = self.rational_basis() {
            return Some(
                b.iter()
                    .map(|x| b.iter().map(|y| x.iter().zip(y).map(|(p, q)| p * q).sum()).collect())
                    .collect(),
            );
        }
        match &self.inner.structure {
            // Without complex pairs the twist is the identity and the Gram
            // matrix is the trace form.
            Structure::Canonical { field, gens, .. } if field.is_totally_real() => trace_form(field, gens).ok(),
            _ => None,
        }
    }

    pub fn covolume(&self) -> Covolume {
        let value = linalg::fdet(&self.inner.basis_f64).abs();
        let exact_sq = if let Some(b) = self.rational_basis() {
            let d = crate::scalar::poly::rational_det(b);
            Some(&d * &d)
        } else {
            match &self.inner.structure {
                Structure::Canonical { field, gens, twisted } => trace_form(field, gens).ok().map(|t| {
                    let disc = crate::scalar::poly::rational_det(t).abs();
                    let four_t = Rational::from_integer(num_bigint::BigInt::from(4).pow(field.complex_pairs() as u32));
                    if *twisted {
                        disc * four_t
                    } else {
                        disc / four_t
                    }
                }),
                Structure::Plain => None,
            }
        };
        let value = match &exact_sq {
            Some(sq) => crate::scalar::rational::to_f64(sq).sqrt(),
            None => value,
        };
        Covolume { value, exact_sq }
    }

    /// Embedded coordinates of an integer combination of the basis.
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (c, row) in coeffs.iter().zip(&self.inner.basis_f64) {
            if *c != 0 {
                let c = *c as f64;
                for (o, x) in out.iter_mut().zip(row) {
                    *o += c * x;
                }
            }
        }
        out
    }

    pub fn point_exact(&self, coeffs: &[i64]) -> Result<Vec<Scalar>> {
        scalar::int_combination(coeffs, &self.inner.basis)
    }

    /// Compares `Σ exp(−πt|γ|²)` over the lattice with the Poisson-dual sum.
    pub fn theta_check(&self, t: f64) -> Result<ThetaCheck> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveParameter("t".into()));
        }
        let n = self.dim();
        let (c, tail_factor) = gaussian_cutoff(n);
        let budget = point_budget();

        let gram = self.gram_f64();
        let r2 = c * c * n as f64 / t;
        let mut terms = vec![1.0];
        enumerate_short(&gram, r2, budget, |_, q| terms.push((-std::f64::consts::PI * t * q).exp()))?;
        let lhs = sorted_sum(terms);

        let dual = self.dual_f64();
        let dgram = linalg::fgram(&dual);
        let r2 = c * c * n as f64 * t;
        let mut terms = vec![1.0];
        enumerate_short(&dgram, r2, budget, |_, q| terms.push((-std::f64::consts::PI * q / t).exp()))?;
        let pref = 1.0 / (self.covolume().value * t.powf(n as f64 / 2.0));
        let rhs = pref * sorted_sum(terms);

        let tail_bound = tail_factor * (lhs + rhs);
        let passed = (lhs - rhs).abs() <= 1e-9 * lhs.max(1.0);
        Ok(ThetaCheck { lhs, rhs, tail_bound, passed })
    }

    /// All nonzero points of norm at most `radius`, by enumerating the
    /// coefficient box `|m_i| ≤ radius·|d_i|`.
    pub fn minimal_vectors(&self, radius: f64) -> Result<Vec<LatticePoint>> {
        self.minimal_vectors_with_slack(radius, 0)
    }

    /// As [`Self::minimal_vectors`] with the coefficient box widened by
    /// `extra` in each direction; used to cross-check completeness.
    pub fn minimal_vectors_with_slack(&self, radius: f64, extra: i64) -> Result<Vec<LatticePoint>> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveParameter("radius".into()));
        }
        let dual = self.dual_f64();
        let bounds: Vec<i64> = dual
            .iter()
            .map(|d| (radius * linalg::fnorm(d) * (1.0 + 1e-12)).floor() as i64 + extra)
            .collect();
        let estimate: f64 = bounds.iter().map(|&k| (2 * k + 1) as f64).product();
        let budget = point_budget();
        if estimate > budget as f64 {
            return Err(Error::RadiusTooLargeForBudget { estimate, budget });
        }
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut out = Vec::new();
        let mut m: Vec<i64> = bounds.iter().map(|k| -k).collect();
        loop {
            if m.iter().any(|&x| x != 0) {
                let p = self.point(&m);
                if linalg::fdot(&p, &p) <= r2 {
                    out.push(LatticePoint { coeffs: m.clone(), coords: p });
                }
            }
            if !odometer(&mut m, &bounds) {
                break;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "basis": self.inner.basis.iter().map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let basis = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Config { field: "lattice.basis".into(), message: "missing basis array".into() })?;
        let rows = basis
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Config { field: "lattice.basis".into(), message: "rows must be arrays".into() })?
                    .iter()
                    .map(Scalar::from_json)
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(dim) = v.get("dim").and_then(Value::as_u64) {
            if dim as usize != rows.len() {
                return Err(Error::Config {
                    field: "lattice.dim".into(),
                    message: format!("dim {dim} but {} basis rows", rows.len()),
                });
            }
        }
        Self::new(rows)
    }
}

fn odometer(m: &mut [i64], bounds: &[i64]) -> bool {
    for i in (0..m.len()).rev() {
        if m[i] < bounds[i] {
            m[i] += 1;
            return true;
        }
        m[i] = -bounds[i];
    }
    false
}

fn sorted_sum(mut terms: Vec<f64>) -> f64 {
    // Smallest first, so the result does not depend on enumeration order.
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

/// Radius factor `c` with `C^n ≤ 1e-18`, where `C = c·√(2πe)·e^{−πc²}` bounds
/// the relative Gaussian mass outside the ball of radius `c·√n·s`.
fn gaussian_cutoff(n: usize) -> (f64, f64) {
    let pi = std::f64::consts::PI;
    let big_c = |c: f64| c * (2.0 * pi * std::f64::consts::E).sqrt() * (-pi * c * c).exp();
    let target = 1e-18f64.powf(1.0 / n as f64);
    let mut c = 1.0;
    while big_c(c) > target {
        c += 0.01;
    }
    let cn = big_c(c).powi(n as i32);
    (c, cn / (1.0 - cn))
}

/// Enumerates every integer vector `m ≠ 0` with `mᵀGm ≤ r2` (plus a little
/// rounding slack), calling `f(m, mᵀGm)`. Works for any positive definite
/// Gram matrix, including those of lower-rank lattices in a larger space.
pub fn enumerate_short(
    gram: &FMatrix,
    r2: f64,
    budget: u64,
    mut f: impl FnMut(&[i64], f64),
) -> Result<()> {
    let k = gram.len();
    if k == 0 {
        return Ok(());
    }
    let l = linalg::cholesky(gram)?;
    // |Lᵀm|² with (Lᵀm)_i = Σ_{j≥i} L[j][i]·m_j.
    let r: FMatrix = (0..k).map(|i| (0..k).map(|j| if j >= i { l[j][i] } else { 0.0 }).collect()).collect();
    let mut m = vec![0i64; k];
    let mut visited = 0u64;
    let slack = r2 * 1e-10 + 1e-300;
    let mut stack_err = None;
    rec(k - 1, &r, &mut m, r2 + slack, &mut visited, budget, &mut stack_err, &mut |m: &[i64]| {
        if m.iter().any(|&x| x != 0) {
            let q: f64 = (0..k)
                .map(|i| (0..k).map(|j| gram[i][j] * m[i] as f64 * m[j] as f64).sum::<f64>())
                .sum();
            if q <= r2 + slack {
                f(m, q);
            }
        }
    });
    if let Some(e) = stack_err {
        return Err(e);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn rec(
    i: usize,
    r: &FMatrix,
    m: &mut Vec<i64>,
    remaining: f64,
    visited: &mut u64,
    budget: u64,
    err: &mut Option<Error>,
    f: &mut dyn FnMut(&[i64]),
) {
    if err.is_some() {
        return;
    }
    let k = m.len();
    let rii = r[i][i];
    let c = -(i + 1..k).map(|j| r[i][j] * m[j] as f64).sum::<f64>() / rii;
    let w = remaining.max(0.0).sqrt() / rii;
    let lo = (c - w).ceil() as i64;
    let hi = (c + w).floor() as i64;
    for x in lo..=hi {
        *visited += 1;
        if *visited > budget {
            *err = Some(Error::RadiusTooLargeForBudget { estimate: *visited as f64, budget });
            return;
        }
        let d = rii * (x as f64 - c);
        let rem = remaining - d * d;
        if rem < 0.0 {
            continue;
        }
        m[i] = x;
        if i == 0 {
            f(m);
        } else {
            rec(i - 1, r, m, rem, visited, budget, err, f);
        }
    }
    m[i] = 0;
}

/// Row of the (possibly twisted) canonical embedding of `elem`.
pub fn embed_row(elem: &FieldElement, twisted: bool) -> Result<Vec<Scalar>> {
    let field = elem.field();
    let d = field.degree();
    (0..d)
        .map(|slot| {
            if !twisted {
                return Scalar::embedded(elem.clone(), slot);
            }
            match field.slot_kind(slot)? {
                SlotKind::Real(_) => Scalar::embedded(elem.clone(), slot),
                SlotKind::ComplexRe(_) => Scalar::embedded(elem.scale(&Rational::from_integer(2.into())), slot),
                SlotKind::ComplexIm(_) => Scalar::embedded(elem.scale(&Rational::from_integer((-2).into())), slot),
            }
        })
        .collect()
}

/// `Tr(g_i g_j)`.
pub fn trace_form(field: &Arc<NumberField>, gens: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let elems = gens
        .iter()
        .map(|g| FieldElement::new(field.clone(), g.clone()))
        .collect::<Result<Vec<_>>>()?;
    elems
        .iter()
        .map(|a| elems.iter().map(|b| Ok(a.mul(b)?.trace())).collect())
        .collect()
}

/// Coordinates of the trace-dual family `g*_k` with `Tr(g*_k g_i) = δ_ki`.
fn trace_dual(field: &Arc<NumberField>, gens: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let t = trace_form(field, gens)?;
    let tm: Matrix = t.into_iter().map(|r| r.into_iter().map(Scalar::Rat).collect()).collect();
    let inv = linalg::inverse(&tm)?;
    let d = field.degree();
    let mut out = Vec::with_capacity(d);
    for row in inv {
        let mut c = vec![Rational::zero(); d];
        for (w, g) in row.iter().zip(gens) {
            let w = w.as_rational().expect("rational inverse").clone();
            for (ci, gi) in c.iter_mut().zip(g) {
                *ci += &w * gi;
            }
        }
        out.push(c);
    }
    Ok(out)
}

/// Recognizes bases whose rows are canonical embeddings of field elements.
fn detect_canonical(basis: &Matrix) -> Option<Structure> {
    let field = basis.iter().flatten().find_map(|x| match x {
        Scalar::Alg(v) => Some(v.elem.field().clone()),
        Scalar::Rat(_) => None,
    })?;
    if field.degree() != basis.len() {
        return None;
    }
    let mut gens = Vec::new();
    for row in basis {
        let elem = match row.iter().find_map(|x| match x {
            Scalar::Alg(v) => Some(v.elem.clone()),
            Scalar::Rat(_) => None,
        }) {
            Some(e) if e.same_field(&FieldElement::from_rational(field.clone(), Rational::one())) => e,
            Some(_) => return None,
            None => {
                let q = row.first()?.as_rational()?.clone();
                FieldElement::from_rational(field.clone(), q)
            }
        };
        if embed_row(&elem, false).ok()? != *row {
            return None;
        }
        gens.push(elem.coords().to_vec());
    }
    Some(Structure::Canonical { field, gens, twisted: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use crate::scalar::rat;

    fn sqrt2_lattice() -> Lattice {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        Lattice::canonical(k, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]], false).unwrap()
    }

    #[test]
    fn dual_of_half_lattice() {
        let l = Lattice::from_rational(vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 2), rat(1, 2)]]).unwrap();
        let d = l.dual().unwrap();
        let want: Matrix = vec![
            vec![Scalar::from(1), Scalar::from(-1)],
            vec![Scalar::from(0), Scalar::from(2)],
        ];
        assert_eq!(d.basis(), &want);
        assert_eq!(l.covolume().exact(), Some(rat(1, 2)));
        assert_eq!(d.covolume().exact(), Some(rat(2, 1)));
        assert_eq!(d.dual().unwrap().basis(), l.basis());
    }

    #[test]
    fn canonical_lattice_covolume_and_dual() {
        let l = sqrt2_lattice();
        assert!((l.covolume().value - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(l.covolume().exact_sq, Some(rat(8, 1)));
        let d = l.dual().unwrap();
        for (i, dr) in d.basis_f64().iter().enumerate() {
            for (j, br) in l.basis_f64().iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((linalg::fdot(dr, br) - want).abs() < 1e-14);
            }
        }
        let prod = l.covolume().value * d.covolume().value;
        assert!((prod - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_basis_is_recognized_as_canonical() {
        let v: Value = serde_json::json!({
            "dim": 2,
            "basis": [["1", "1"], [
                {"minpoly": [-2, 0, 1], "coords": ["0", "1"], "embedding": 0},
                {"minpoly": [-2, 0, 1], "coords": ["0", "1"], "embedding": 1}
            ]]
        });
        let l = Lattice::from_json(&v).unwrap();
        assert!(matches!(l.structure(), Structure::Canonical { .. }));
        assert!(l.dual().is_ok());
    }

    #[test]
    fn theta_z1() {
        // Σ_k exp(−πk²), summed directly.
        let direct: f64 = (-20i64..=20).map(|k| (-std::f64::consts::PI * (k * k) as f64).exp()).sum();
        let c = Lattice::integer(1).theta_check(1.0).unwrap();
        assert!((c.lhs - direct).abs() < 1e-15);
        assert!((c.lhs - 1.0864348112).abs() < 1e-10);
        assert!(c.passed);
    }

    #[test]
    fn theta_2z() {
        let l = Lattice::from_ints(&[vec![2]]).unwrap();
        let c = l.theta_check(1.0).unwrap();
        let pi = std::f64::consts::PI;
        let lhs: f64 = (-20i64..=20).map(|k| (-4.0 * pi * (k * k) as f64).exp()).sum();
        let rhs: f64 = 0.5 * (-80i64..=80).map(|m| (-pi * (m * m) as f64 / 4.0).exp()).sum::<f64>();
        assert!((c.lhs - lhs).abs() < 1e-15);
        assert!((c.rhs - rhs).abs() < 1e-12);
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn minimal_vectors_examples() {
        let z2 = Lattice::integer(2);
        assert_eq!(z2.minimal_vectors(1.0).unwrap().len(), 4);
        assert_eq!(z2.minimal_vectors(1.5).unwrap().len(), 8);
        let l = sqrt2_lattice();
        let mut v: Vec<Vec<i64>> = l.minimal_vectors(1.5).unwrap().into_iter().map(|p| p.coeffs).collect();
        v.sort();
        assert_eq!(v, vec![vec![-1, 0], vec![1, 0]]);
    }
}
