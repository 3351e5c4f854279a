//! Norm functions on `R^s × C^t`, module lattices `σ(M)`, good-position
//! certificates and block-compatibility checks.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use super::field::{field_for_i64, NumberField, SlotKind};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_short, point_budget, Lattice, Structure};
use crate::linalg::{self, FMatrix};
use crate::scalar::{rational, FieldElement, Rational, Scalar};

/// `N_{K/Q}(ξ)`.
pub fn field_norm(xi: &FieldElement) -> Rational {
    xi.norm()
}

fn check_frame(frame: &FMatrix, tol: f64) -> Result<()> {
    for (i, a) in frame.iter().enumerate() {
        for (j, b) in frame.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            if a.len() != b.len() || (linalg::fdot(a, b) - want).abs() > tol {
                return Err(Error::NonOrthonormalFrame);
            }
        }
    }
    Ok(())
}

/// `Nm_e(x) = Π_j (x, e_j)`.
pub fn nm_e(x: &[f64], frame: &FMatrix) -> Result<f64> {
    check_frame(frame, 1e-12)?;
    if frame.iter().any(|e| e.len() != x.len()) {
        return Err(Error::InvalidDims("frame vectors and point differ in length".into()));
    }
    Ok(frame.iter().map(|e| linalg::fdot(x, e)).product())
}

/// `Nm_E(x) = Π |x'_α| · Π |x''_β|²` on flattened `R^s × C^t` coordinates.
pub fn nm_big_e(x: &[f64], s: usize, t: usize) -> Result<f64> {
    if x.len() != s + 2 * t {
        return Err(Error::InvalidDims(format!("expected {} coordinates, got {}", s + 2 * t, x.len())));
    }
    let real: f64 = x[..s].iter().map(|v| v.abs()).product();
    let cplx: f64 = (0..t).map(|j| x[s + 2 * j].powi(2) + x[s + 2 * j + 1].powi(2)).product();
    Ok(real * cplx)
}

/// A multiplier `T ∈ R^s × C^t` acting coordinatewise.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    pub real: Vec<Rational>,
    /// `(Re, Im)` per complex coordinate.
    pub complex: Vec<(Rational, Rational)>,
}

impl Multiplier {
    pub fn new(real: Vec<Rational>, complex: Vec<(Rational, Rational)>) -> Self {
        Self { real, complex }
    }

    pub fn ones(s: usize, t: usize) -> Self {
        Self {
            real: vec![Rational::one(); s],
            complex: vec![(Rational::one(), Rational::zero()); t],
        }
    }

    pub fn dim(&self) -> usize {
        self.real.len() + 2 * self.complex.len()
    }

    /// `Nm T = Π |t'_α| · Π |t''_β|²`, exactly.
    pub fn norm(&self) -> Rational {
        let mut p = Rational::one();
        for r in &self.real {
            p *= r.abs();
        }
        for (a, b) in &self.complex {
            p *= a * a + b * b;
        }
        p
    }

    pub fn product(&self, o: &Self) -> Result<Self> {
        if self.real.len() != o.real.len() || self.complex.len() != o.complex.len() {
            return Err(Error::InvalidDims("multipliers live in different spaces".into()));
        }
        Ok(Self {
            real: self.real.iter().zip(&o.real).map(|(a, b)| a * b).collect(),
            complex: self
                .complex
                .iter()
                .zip(&o.complex)
                .map(|((a, b), (c, d))| (a * c - b * d, a * d + b * c))
                .collect(),
        })
    }

    fn complex_f64(&self) -> Vec<Complex64> {
        self.complex
            .iter()
            .map(|(a, b)| Complex64::new(rational::to_f64(a), rational::to_f64(b)))
            .collect()
    }

    /// `T·x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let s = self.real.len();
        let mut out: Vec<f64> = self.real.iter().zip(x).map(|(t, v)| rational::to_f64(t) * v).collect();
        for (j, c) in self.complex_f64().iter().enumerate() {
            let z = c * Complex64::new(x[s + 2 * j], x[s + 2 * j + 1]);
            out.push(z.re);
            out.push(z.im);
        }
        out
    }

    /// `Tᵀ·u` (coordinatewise conjugate multiplication on complex pairs).
    pub fn apply_transpose(&self, u: &[f64]) -> Vec<f64> {
        let s = self.real.len();
        let mut out: Vec<f64> = self.real.iter().zip(u).map(|(t, v)| rational::to_f64(t) * v).collect();
        for (j, c) in self.complex_f64().iter().enumerate() {
            let z = c.conj() * Complex64::new(u[s + 2 * j], u[s + 2 * j + 1]);
            out.push(z.re);
            out.push(z.im);
        }
        out
    }

    /// `T^{-1}·x`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        let s = self.real.len();
        let mut out: Vec<f64> = self.real.iter().zip(x).map(|(t, v)| v / rational::to_f64(t)).collect();
        for (j, c) in self.complex_f64().iter().enumerate() {
            let z = Complex64::new(x[s + 2 * j], x[s + 2 * j + 1]) / c;
            out.push(z.re);
            out.push(z.im);
        }
        out
    }

    /// Exact `T^{-1}·x`; complex coordinates mix real and imaginary slots and
    /// are only exact when both parts are rational.
    pub fn apply_inverse_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        let s = self.real.len();
        let mut out = Vec::with_capacity(x.len());
        for (t, v) in self.real.iter().zip(x) {
            out.push(v.div(&Scalar::Rat(t.clone()))?);
        }
        for (j, (a, b)) in self.complex.iter().enumerate() {
            let (re, im) = (&x[s + 2 * j], &x[s + 2 * j + 1]);
            let den = Scalar::Rat(a * a + b * b);
            let (a, b) = (Scalar::Rat(a.clone()), Scalar::Rat(b.clone()));
            out.push(re.mul(&a)?.add(&im.mul(&b)?)?.div(&den)?);
            out.push(im.mul(&a)?.sub(&re.mul(&b)?)?.div(&den)?);
        }
        Ok(out)
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.real.iter().map(rational::format_rational).collect();
        for (a, b) in &self.complex {
            parts.push(format!("{}{}{}i", rational::format_rational(a), if b.is_negative() { "" } else { "+" }, rational::format_rational(b)));
        }
        format!("T=({})", parts.join(","))
    }
}

/// A full module `M = Z g_1 + … + Z g_d` and its image `σ(M)`.
#[derive(Clone, Debug)]
pub struct ModuleLattice {
    pub field: Arc<NumberField>,
    pub generators: Vec<FieldElement>,
    pub lattice: Lattice,
}

/// `σ(M)` for generators given by power-basis coordinates.
pub fn canonical_embedding(field: Arc<NumberField>, gens: Vec<Vec<Rational>>) -> Result<ModuleLattice> {
    let lattice = Lattice::canonical(field.clone(), gens, false)?;
    let generators = match lattice.structure() {
        Structure::Canonical { gens, .. } => gens
            .iter()
            .map(|g| FieldElement::new(field.clone(), g.clone()))
            .collect::<Result<Vec<_>>>()?,
        Structure::Plain => unreachable!("canonical lattices keep their structure"),
    };
    Ok(ModuleLattice { field, generators, lattice })
}

/// `σ(Z[θ])` with the power basis `1, θ, …, θ^{d−1}`.
pub fn power_basis_lattice(field: Arc<NumberField>) -> Result<ModuleLattice> {
    let d = field.degree();
    let gens = (0..d)
        .map(|i| (0..d).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    canonical_embedding(field, gens)
}

/// Bundled presets: `sqrt2`, `cbrt2`, `cubic_totally_real`.
pub fn preset(name: &str) -> Result<ModuleLattice> {
    let minpoly: &[i64] = match name {
        "sqrt2" | "Z[sqrt2]" => &[-2, 0, 1],
        "cbrt2" | "Z[cbrt2]" => &[-2, 0, 0, 1],
        "cubic_totally_real" | "x3-3x-1" => &[-1, -3, 0, 1],
        other => {
            return Err(Error::Config {
                field: "preset".into(),
                message: format!("unknown preset `{other}` (known: sqrt2, cbrt2, cubic_totally_real)"),
            })
        }
    };
    power_basis_lattice(field_for_i64(minpoly)?)
}

/// Parses `{"minpoly": [...], "generators": [[coords], ...]}` or
/// `{"preset": name}`.
pub fn module_from_json(v: &Value) -> Result<ModuleLattice> {
    if let Some(name) = v.get("preset").and_then(Value::as_str) {
        return preset(name);
    }
    let mp = v.get("minpoly").and_then(Value::as_array).ok_or_else(|| Error::Config {
        field: "minpoly".into(),
        message: "missing minimal polynomial".into(),
    })?;
    let field = super::field::field_for(&crate::scalar::parse_int_list(mp)?)?;
    let Some(gens) = v.get("generators").and_then(Value::as_array) else {
        return power_basis_lattice(field);
    };
    let gens = gens
        .iter()
        .map(|g| {
            g.as_array()
                .ok_or_else(|| Error::Config { field: "generators".into(), message: "each generator is a coordinate list".into() })?
                .iter()
                .map(|c| match Scalar::from_json(c)? {
                    Scalar::Rat(r) => Ok(r),
                    Scalar::Alg(_) => Err(Error::Config {
                        field: "generators".into(),
                        message: "generator coordinates must be rational".into(),
                    }),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    canonical_embedding(field, gens)
}

#[derive(Clone, Debug, PartialEq)]
pub enum GoodPosition {
    /// `|Nm_e x| ≥ bound` for every nonzero lattice point.
    Certified { bound: Rational },
    /// A nonzero point with vanishing norm form.
    Refuted { coeffs: Vec<i64>, value: f64 },
    /// No zero found within the search radius.
    Inconclusive { min_abs: f64, points_checked: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoodPositionMode {
    Certified,
    Search,
}

/// Good-position verdict for `lattice` against an orthonormal `frame`.
///
/// The certified mode needs a canonical lattice of a totally real field in
/// its coordinate frame. Then `Nm_e σ(ξ) = N(ξ)`, and if `D` clears the
/// denominators of the generator coordinates, `Dξ` is an algebraic integer,
/// so `|N(ξ)| ≥ D^{−d}`.
pub fn good_position_check(lattice: &Lattice, frame: &FMatrix, mode: GoodPositionMode, radius: f64) -> Result<GoodPosition> {
    check_frame(frame, 1e-12)?;
    let n = lattice.dim();
    if frame.len() != n || frame.iter().any(|e| e.len() != n) {
        return Err(Error::InvalidDims(format!("frame must have {n} vectors of length {n}")));
    }
    match mode {
        GoodPositionMode::Certified => {
            let Structure::Canonical { field, gens, twisted } = lattice.structure() else {
                return Err(Error::FrameMismatch("certified mode needs a lattice built from a number field".into()));
            };
            if !field.is_totally_real() || *twisted {
                return Err(Error::FrameMismatch(
                    "the coordinate norm form matches the field norm only for totally real fields".into(),
                ));
            }
            let standard = frame
                .iter()
                .enumerate()
                .all(|(i, e)| e.iter().enumerate().all(|(j, x)| (x - if i == j { 1.0 } else { 0.0 }).abs() <= 1e-12));
            if !standard {
                return Err(Error::FrameMismatch("certified mode needs the canonical coordinate frame".into()));
            }
            let den = rational::common_denominator(gens.iter().flatten());
            let bound = Rational::new(num_bigint::BigInt::one(), num_traits::pow(den, field.degree()));
            Ok(GoodPosition::Certified { bound })
        }
        GoodPositionMode::Search => {
            if !(radius > 0.0) {
                return Err(Error::NonPositiveParameter("radius".into()));
            }
            let gram = lattice.gram_f64();
            let mut best: Option<(f64, Vec<i64>)> = None;
            let mut checked = 0usize;
            let mut zero: Option<(Vec<i64>, f64)> = None;
            enumerate_short(&gram, radius * radius, point_budget(), |m, q| {
                checked += 1;
                let x = lattice.point(m);
                let v: f64 = frame.iter().map(|e| linalg::fdot(&x, e)).product();
                let scale = q.sqrt().powi(n as i32).max(1.0);
                if v.abs() <= 1e-12 * scale && zero.is_none() {
                    zero = Some((m.to_vec(), v));
                }
                if best.as_ref().is_none_or(|(b, _)| v.abs() < *b) {
                    best = Some((v.abs(), m.to_vec()));
                }
            })?;
            if let Some((coeffs, value)) = zero {
                return Ok(GoodPosition::Refuted { coeffs, value });
            }
            Ok(GoodPosition::Inconclusive { min_abs: best.map_or(f64::INFINITY, |b| b.0), points_checked: checked })
        }
    }
}

/// Whether every embedding's coordinate (or coordinate pair) lies inside
/// one of the orthogonal `blocks`, each given by orthonormal rows.
pub fn decomposition_compatibility(field: &NumberField, blocks: &[FMatrix]) -> Result<bool> {
    let n = field.degree();
    let all: FMatrix = blocks.iter().flatten().cloned().collect();
    if all.len() != n || all.iter().any(|e| e.len() != n) || check_frame(&all, 1e-9).is_err() {
        return Err(Error::BlocksNotSpanning);
    }
    let block_of = |axis: usize| -> Option<usize> {
        blocks.iter().position(|b| {
            let w: f64 = b.iter().map(|e| e[axis] * e[axis]).sum();
            (w - 1.0).abs() <= 1e-9
        })
    };
    for slot in 0..n {
        let Some(bi) = block_of(slot) else { return Ok(false) };
        if let SlotKind::ComplexRe(_) = field.slot_kind(slot)? {
            if block_of(slot + 1) != Some(bi) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn field_norm_examples() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        assert_eq!(field_norm(&FieldElement::generator(k.clone())), rat(-2, 1));
        let u = FieldElement::new(k, vec![rat(1, 1), rat(1, 1)]).unwrap();
        assert_eq!(field_norm(&u), rat(-1, 1));
        let c = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let a = FieldElement::generator(c.clone());
        assert_eq!(field_norm(&a), rat(2, 1));
        let ml = power_basis_lattice(c).unwrap();
        let x = ml.lattice.point(&[0, 1, 0]);
        assert!((nm_big_e(&x, 1, 1).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nm_e_examples() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(nm_e(&[2.0, 3.0], &id).unwrap(), 6.0);
        assert_eq!(nm_e(&[0.0, 3.0], &id).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot = vec![vec![h, h], vec![h, -h]];
        assert!((nm_e(&[2f64.sqrt(), 0.0], &rot).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nm_e(&[1.0, 1.0], &vec![vec![1.0, 0.0], vec![1.0, 1.0]]), Err(Error::NonOrthonormalFrame));
    }

    #[test]
    fn multiplier_algebra() {
        let a = Multiplier::new(vec![rat(4, 1)], vec![(rat(1, 2), rat(3, 1))]);
        let b = Multiplier::new(vec![rat(-1, 3)], vec![(rat(2, 1), rat(-1, 1))]);
        assert_eq!(a.product(&b).unwrap().norm(), a.norm() * b.norm());
        let x = [0.3, -1.2, 0.7];
        let back = a.apply_inverse(&a.apply(&x));
        assert!(back.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-12));
        // (Tx, u) = (x, Tᵀu)
        let u = [1.1, 0.4, -2.0];
        let lhs = linalg::fdot(&a.apply(&x), &u);
        let rhs = linalg::fdot(&x, &a.apply_transpose(&u));
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn good_position_examples() {
        let id = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let sq = preset("sqrt2").unwrap();
        assert_eq!(
            good_position_check(&sq.lattice, &id, GoodPositionMode::Certified, 0.0).unwrap(),
            GoodPosition::Certified { bound: rat(1, 1) }
        );
        let z2 = Lattice::integer(2);
        assert!(matches!(
            good_position_check(&z2, &id, GoodPositionMode::Search, 2.0).unwrap(),
            GoodPosition::Refuted { .. }
        ));
        assert!(matches!(
            good_position_check(&z2, &id, GoodPositionMode::Certified, 0.0),
            Err(Error::FrameMismatch(_))
        ));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rot = vec![vec![h, h], vec![-h, h]];
        assert!(matches!(
            good_position_check(&z2, &rot, GoodPositionMode::Search, 2.0).unwrap(),
            GoodPosition::Refuted { .. }
        ));
    }

    #[test]
    fn compatibility_examples() {
        let sq = field_for_i64(&[-2, 0, 1]).unwrap();
        let axes = vec![vec![vec![1.0, 0.0]], vec![vec![0.0, 1.0]]];
        assert!(decomposition_compatibility(&sq, &axes).unwrap());
        assert!(decomposition_compatibility(&sq, &[vec![vec![1.0, 0.0], vec![0.0, 1.0]]]).unwrap());
        let cb = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let good = vec![vec![vec![1.0, 0.0, 0.0]], vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]];
        assert!(decomposition_compatibility(&cb, &good).unwrap());
        let bad = vec![vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], vec![vec![0.0, 0.0, 1.0]]];
        assert!(!decomposition_compatibility(&cb, &bad).unwrap());
        assert_eq!(decomposition_compatibility(&sq, &[vec![vec![1.0, 0.0]]]), Err(Error::BlocksNotSpanning));
    }

    #[test]
    fn unimodular_generators_give_same_points() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let a = power_basis_lattice(k.clone()).unwrap();
        let b = canonical_embedding(k, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]]).unwrap();
        let key = |l: &Lattice| {
            let mut v: Vec<(i64, i64)> = l
                .minimal_vectors(5.0)
                .unwrap()
                .iter()
                .map(|p| ((p.coords[0] * 1e6).round() as i64, (p.coords[1] * 1e6).round() as i64))
                .collect();
            v.sort();
            v
        };
        assert_eq!(key(&a.lattice), key(&b.lattice));
    }
}
