//! Number fields given by a monic integer minimal polynomial, with certified
//! root enclosures for every embedding.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::poly::{sign_variations, QPoly};
use crate::scalar::rational::{self, ComplexRational, Rational};

/// Width of the stored real root intervals (and radius of complex discs).
pub const ENCLOSURE_BITS: u32 = 128;
/// Refinement ceiling for sign decisions on complex coordinates.
const MAX_COMPLEX_BITS: u32 = 448;

/// Which real number an embedding coordinate denotes: a real embedding, or
/// the real or imaginary part of a complex embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotKind {
    Real(usize),
    ComplexRe(usize),
    ComplexIm(usize),
}

#[derive(Clone, Debug)]
pub struct ComplexRoot {
    pub center: ComplexRational,
    pub radius: Rational,
}

pub struct NumberField {
    minpoly: Vec<BigInt>,
    poly: QPoly,
    s: usize,
    t: usize,
    /// Isolating intervals of the real roots, largest root first.
    real_roots: Vec<(Rational, Rational)>,
    /// Discs around the roots with positive imaginary part.
    complex_roots: Vec<ComplexRoot>,
    real_f64: Vec<f64>,
    complex_f64: Vec<Complex64>,
    /// `Tr(θ^k)` for `k < 2d`.
    power_traces: Vec<Rational>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("minpoly", &self.minpoly)
            .field("s", &self.s)
            .field("t", &self.t)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.minpoly == other.minpoly
    }
}

impl Eq for NumberField {}

fn registry() -> &'static Mutex<HashMap<Vec<BigInt>, Arc<NumberField>>> {
    static REG: OnceLock<Mutex<HashMap<Vec<BigInt>, Arc<NumberField>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, cached field for a minimal polynomial (coefficients ascending).
pub fn field_for(minpoly: &[BigInt]) -> Result<Arc<NumberField>> {
    if let Some(f) = registry().lock().unwrap().get(minpoly) {
        return Ok(f.clone());
    }
    let field = Arc::new(NumberField::analyze(minpoly)?);
    registry()
        .lock()
        .unwrap()
        .insert(minpoly.to_vec(), field.clone());
    Ok(field)
}

pub fn field_for_i64(minpoly: &[i64]) -> Result<Arc<NumberField>> {
    let v: Vec<BigInt> = minpoly.iter().map(|&c| BigInt::from(c)).collect();
    field_for(&v)
}

impl NumberField {
    /// Validates the polynomial, counts real roots with Sturm sequences and
    /// builds certified enclosures for all roots.
    pub fn analyze(minpoly: &[BigInt]) -> Result<Self> {
        let mut coeffs = minpoly.to_vec();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Parse("minimal polynomial must have degree >= 1".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(Error::Parse("minimal polynomial must be monic".into()));
        }
        let poly = QPoly::from_ints(&coeffs);
        let d = coeffs.len() - 1;
        if poly.gcd(&poly.derivative()).degree() != Some(0) {
            return Err(Error::NotSquarefree);
        }
        detect_low_degree_factor(&coeffs)?;

        let chain = poly.sturm_chain();
        let bound = cauchy_bound(&coeffs);
        let s = sign_variations(&chain, &-&bound) - sign_variations(&chain, &bound);
        if (d - s) % 2 != 0 {
            return Err(Error::InvariantViolation("odd number of non-real roots".into()));
        }
        let t = (d - s) / 2;

        let mut real_roots = Vec::with_capacity(s);
        isolate(&poly, &chain, -&bound, bound.clone(), &mut real_roots)?;
        for iv in real_roots.iter_mut() {
            *iv = refine_real(&poly, iv.clone(), ENCLOSURE_BITS);
        }
        real_roots.sort_by(|a, b| b.0.cmp(&a.0));
        let real_f64 = real_roots
            .iter()
            .map(|(lo, hi)| rational::to_f64(&((lo + hi) / Rational::from_integer(2.into()))))
            .collect();

        let complex_roots = if t > 0 {
            isolate_complex(&poly, d, t)?
        } else {
            Vec::new()
        };
        let complex_f64 = complex_roots
            .iter()
            .map(|r| Complex64::new(rational::to_f64(&r.center.re), rational::to_f64(&r.center.im)))
            .collect();

        let power_traces = newton_power_sums(&coeffs, 2 * d);
        Ok(Self {
            minpoly: coeffs,
            poly,
            s,
            t,
            real_roots,
            complex_roots,
            real_f64,
            complex_f64,
            power_traces,
        })
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn poly(&self) -> &QPoly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.len() - 1
    }

    pub fn real_embeddings(&self) -> usize {
        self.s
    }

    pub fn complex_pairs(&self) -> usize {
        self.t
    }

    pub fn real_root_intervals(&self) -> &[(Rational, Rational)] {
        &self.real_roots
    }

    pub fn complex_root_discs(&self) -> &[ComplexRoot] {
        &self.complex_roots
    }

    pub fn real_roots_f64(&self) -> &[f64] {
        &self.real_f64
    }

    pub fn complex_roots_f64(&self) -> &[Complex64] {
        &self.complex_f64
    }

    pub fn is_totally_real(&self) -> bool {
        self.t == 0
    }

    /// Maps a flattened embedding coordinate index to its meaning:
    /// `0..s` real embeddings, then `(Re, Im)` pairs for each complex one.
    pub fn slot_kind(&self, slot: usize) -> Result<SlotKind> {
        let d = self.degree();
        if slot >= d {
            return Err(Error::EmbeddingOutOfRange { index: slot, count: d });
        }
        Ok(if slot < self.s {
            SlotKind::Real(slot)
        } else {
            let j = (slot - self.s) / 2;
            if (slot - self.s) % 2 == 0 {
                SlotKind::ComplexRe(j)
            } else {
                SlotKind::ComplexIm(j)
            }
        })
    }

    /// `Tr_{K/Q}(θ^k)`.
    pub fn power_trace(&self, k: usize) -> Rational {
        if k < self.power_traces.len() {
            return self.power_traces[k].clone();
        }
        newton_power_sums(&self.minpoly, k + 1)[k].clone()
    }

    /// Double-precision value of a coordinate polynomial at an embedding
    /// coordinate, accurate to a few ulps (certified evaluation, rounded once).
    pub fn eval_f64(&self, coords: &QPoly, slot: usize) -> Result<f64> {
        let kind = self.slot_kind(slot)?;
        if coords.degree().unwrap_or(0) == 0 {
            let c = coords.coeffs().first().cloned().unwrap_or_else(Rational::zero);
            return Ok(match kind {
                SlotKind::ComplexIm(_) => 0.0,
                _ => rational::to_f64(&c),
            });
        }
        let mut bits = ENCLOSURE_BITS;
        loop {
            let (v, err) = self.eval_enclosure(coords, kind, bits)?;
            let tight = err.is_zero() || err * Rational::from_integer(BigInt::one() << 60u32) <= v.abs();
            if tight || bits >= MAX_COMPLEX_BITS {
                return Ok(rational::to_f64(&v));
            }
            bits += 64;
        }
    }

    /// Certified sign of a coordinate polynomial at an embedding coordinate.
    /// `coords` must not be the zero element (checked by the caller for real
    /// slots, where that is the only way to vanish).
    pub fn sign_at(&self, coords: &QPoly, slot: usize) -> Result<Ordering> {
        let kind = self.slot_kind(slot)?;
        if coords.degree().unwrap_or(0) == 0 {
            let c = coords.coeffs().first().cloned().unwrap_or_else(Rational::zero);
            return Ok(match kind {
                SlotKind::ComplexIm(_) => Ordering::Equal,
                _ => c.cmp(&Rational::zero()),
            });
        }
        let mut bits = ENCLOSURE_BITS;
        loop {
            let (v, err) = self.eval_enclosure(coords, kind, bits)?;
            if v.abs() > err {
                return Ok(v.cmp(&Rational::zero()));
            }
            match kind {
                SlotKind::Real(_) => {}
                _ if bits >= MAX_COMPLEX_BITS => {
                    return Err(Error::Uncertified(format!(
                        "complex coordinate within 2^-{bits} of zero"
                    )))
                }
                _ => {}
            }
            bits += 64;
        }
    }

    /// Midpoint value and error radius of `coords` at the root enclosure for
    /// `kind`, refined to `bits` of precision.
    fn eval_enclosure(&self, coords: &QPoly, kind: SlotKind, bits: u32) -> Result<(Rational, Rational)> {
        match kind {
            SlotKind::Real(i) => {
                let iv = if bits > ENCLOSURE_BITS {
                    refine_real(&self.poly, self.real_roots[i].clone(), bits)
                } else {
                    self.real_roots[i].clone()
                };
                let two = Rational::from_integer(2.into());
                let mid = (&iv.0 + &iv.1) / &two;
                let h = (&iv.1 - &iv.0) / two;
                let taylor = coords.taylor_at(&mid);
                let mut err = Rational::zero();
                let mut hp = Rational::one();
                for c in taylor.iter().skip(1) {
                    hp *= &h;
                    err += c.abs() * &hp;
                }
                Ok((taylor[0].clone(), err))
            }
            SlotKind::ComplexRe(j) | SlotKind::ComplexIm(j) => {
                let root = if bits > ENCLOSURE_BITS {
                    refine_complex(&self.poly, self.degree(), self.complex_roots[j].clone(), bits)?
                } else {
                    self.complex_roots[j].clone()
                };
                let taylor = coords.taylor_at_complex(&root.center);
                let mut err = Rational::zero();
                let mut rp = Rational::one();
                for c in taylor.iter().skip(1) {
                    rp *= &root.radius;
                    err += c.l1() * &rp;
                }
                let v = match kind {
                    SlotKind::ComplexRe(_) => taylor[0].re.clone(),
                    _ => taylor[0].im.clone(),
                };
                Ok((v, err))
            }
        }
    }
}

/// `1 + max |a_i|` for a monic polynomial bounds the modulus of every root.
fn cauchy_bound(coeffs: &[BigInt]) -> Rational {
    let m = coeffs[..coeffs.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    Rational::from_integer(m + 1)
}

fn isolate(
    poly: &QPoly,
    chain: &[QPoly],
    lo: Rational,
    hi: Rational,
    out: &mut Vec<(Rational, Rational)>,
) -> Result<()> {
    let n = sign_variations(chain, &lo) - sign_variations(chain, &hi);
    if n == 0 {
        return Ok(());
    }
    if n == 1 && !poly.eval(&lo).is_zero() && !poly.eval(&hi).is_zero() {
        out.push((lo, hi));
        return Ok(());
    }
    let mid = (&lo + &hi) / Rational::from_integer(2.into());
    if poly.eval(&mid).is_zero() {
        if poly.degree() == Some(1) {
            out.push((mid.clone(), mid));
            return Ok(());
        }
        return Err(Error::ReducibleDetected(format!(
            "rational root {}",
            rational::format_rational(&mid)
        )));
    }
    isolate(poly, chain, lo, mid.clone(), out)?;
    isolate(poly, chain, mid, hi, out)
}

/// Bisects an isolating interval until its width is at most `2^-bits`.
fn refine_real(poly: &QPoly, (mut lo, mut hi): (Rational, Rational), bits: u32) -> (Rational, Rational) {
    let target = Rational::new(BigInt::one(), BigInt::one() << bits);
    let lo_sign = poly.eval(&lo).cmp(&Rational::zero());
    if lo_sign == Ordering::Equal {
        return (lo.clone(), lo);
    }
    let two = Rational::from_integer(2.into());
    while &hi - &lo > target {
        let mid = (&lo + &hi) / &two;
        let ms = poly.eval(&mid).cmp(&Rational::zero());
        if ms == Ordering::Equal {
            return (mid.clone(), mid);
        }
        if ms == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Disc `|w - z| <= d·|f(z)/f'(z)|` always contains a root; the `3/2`
/// factor covers replacing moduli by the `|re| + |im|` bound.
fn inclusion_radius(poly: &QPoly, d: usize, z: &ComplexRational) -> Result<Rational> {
    let fz = poly.eval_complex(z);
    let dfz = poly.derivative().eval_complex(z);
    if dfz.is_zero() {
        return Err(Error::InvariantViolation("vanishing derivative at root estimate".into()));
    }
    Ok(fz.l1() / dfz.l1() * Rational::new(BigInt::from(3 * d), BigInt::from(2)))
}

fn refine_complex(poly: &QPoly, d: usize, root: ComplexRoot, bits: u32) -> Result<ComplexRoot> {
    let target = Rational::new(BigInt::one(), BigInt::one() << bits);
    let deriv = poly.derivative();
    let mut cur = root;
    let mut guard = 0;
    while cur.radius > target {
        guard += 1;
        if guard > 64 {
            return Err(Error::Uncertified("complex root refinement stalled".into()));
        }
        let fz = poly.eval_complex(&cur.center);
        let dfz = deriv.eval_complex(&cur.center);
        let next = cur.center.sub(&fz.div(&dfz)?).round_dyadic(bits + 32);
        let radius = inclusion_radius(poly, d, &next)?;
        // Keep the new disc inside the old one so it encloses the same root.
        if next.sub(&cur.center).l1() + &radius <= cur.radius {
            cur = ComplexRoot { center: next, radius };
        } else {
            return Err(Error::Uncertified("complex root refinement left its disc".into()));
        }
    }
    Ok(cur)
}

fn aberth_roots(poly: &QPoly) -> Vec<Complex64> {
    let c: Vec<f64> = poly.coeffs().iter().map(rational::to_f64).collect();
    let d = c.len() - 1;
    let eval = |z: Complex64| c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, &k| a * z + k);
    let deval = |z: Complex64| {
        c.iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |a, (i, &k)| a * z + k * i as f64)
    };
    let radius = 1.0 + c[..d].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let ratio = eval(z[i]) / deval(z[i]);
            let sum: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn isolate_complex(poly: &QPoly, d: usize, t: usize) -> Result<Vec<ComplexRoot>> {
    let mut approx = aberth_roots(poly);
    approx.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap_or(Ordering::Equal));
    let mut roots = Vec::with_capacity(t);
    for z in approx.into_iter().take(t) {
        let center = ComplexRational::new(
            rational::from_f64(z.re)?,
            rational::from_f64(z.im.abs())?,
        );
        let radius = inclusion_radius(poly, d, &center)?;
        roots.push(refine_complex(poly, d, ComplexRoot { center, radius }, ENCLOSURE_BITS)?);
    }
    // Discs must avoid the real axis and each other, so together with their
    // conjugates they hold exactly 2t distinct non-real roots.
    for (i, r) in roots.iter().enumerate() {
        if r.center.im <= r.radius {
            return Err(Error::InvariantViolation("complex root disc meets the real axis".into()));
        }
        for o in &roots[..i] {
            let sep = &r.radius + &o.radius;
            if (&r.center.re - &o.center.re).abs() <= sep && (&r.center.im - &o.center.im).abs() <= sep {
                return Err(Error::InvariantViolation("complex root discs overlap".into()));
            }
        }
    }
    roots.sort_by(|a, b| b.center.re.cmp(&a.center.re).then(b.center.im.cmp(&a.center.im)));
    Ok(roots)
}

/// Newton's identities: power sums of the roots of a monic polynomial.
fn newton_power_sums(coeffs: &[BigInt], count: usize) -> Vec<Rational> {
    let d = coeffs.len() - 1;
    // e-form: x^d + a_{d-1} x^{d-1} + ... + a_0
    let a = |i: usize| Rational::from_integer(coeffs[i].clone());
    let mut p = vec![Rational::zero(); count.max(1)];
    p[0] = Rational::from_integer(BigInt::from(d));
    for k in 1..count {
        let mut acc = Rational::zero();
        for i in 1..=k.min(d) {
            let ai = a(d - i);
            if i < k {
                acc -= &ai * &p[k - i];
            } else {
                acc -= &ai * Rational::from_integer(BigInt::from(k));
            }
        }
        p[k] = acc;
    }
    p
}

/// Rational roots and (for quartics) splittings into integer quadratics.
fn detect_low_degree_factor(c: &[BigInt]) -> Result<()> {
    let d = c.len() - 1;
    if d <= 1 {
        return Ok(());
    }
    if c[0].is_zero() {
        return Err(Error::ReducibleDetected("x divides the polynomial".into()));
    }
    let divisors = small_divisors(&c[0]);
    let poly = QPoly::from_ints(c);
    for &dv in &divisors {
        for sgn in [1i64, -1] {
            let r = Rational::from_integer(BigInt::from(sgn * dv));
            if poly.eval(&r).is_zero() {
                return Err(Error::ReducibleDetected(format!("rational root {}", sgn * dv)));
            }
        }
    }
    if d == 4 {
        let a0 = c[0].to_i64().unwrap_or(i64::MAX);
        let (a1, a2, a3) = (c[1].to_i64(), c[2].to_i64(), c[3].to_i64());
        if let (Some(a1), Some(a2), Some(a3)) = (a1, a2, a3) {
            for &b in &divisors {
                for sb in [1i64, -1] {
                    let b = sb * b;
                    let dd = a0 / b;
                    // (x^2 + p x + b)(x^2 + q x + dd)
                    let found = if dd != b {
                        let num = a1 - b * a3;
                        let den = dd - b;
                        num % den == 0 && {
                            let p = num / den;
                            let q = a3 - p;
                            b + dd + p * q == a2
                        }
                    } else {
                        a1 == b * a3 && {
                            let disc = a3 * a3 - 4 * (a2 - 2 * b);
                            disc >= 0 && {
                                let r = (disc as f64).sqrt().round() as i64;
                                r * r == disc && (a3 + r) % 2 == 0
                            }
                        }
                    };
                    if found {
                        return Err(Error::ReducibleDetected("product of two quadratics".into()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn small_divisors(n: &BigInt) -> Vec<i64> {
    let Some(n) = n.abs().to_i64() else {
        return Vec::new();
    };
    if n > 1_000_000_000_000 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut i = 1i64;
    while i * i <= n {
        if n.is_multiple_of(&i) {
            out.push(i);
            if i != n / i {
                out.push(n / i);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_quadratic_signature_and_roots() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        assert_eq!((k.real_embeddings(), k.complex_pairs()), (2, 0));
        let r = k.real_roots_f64();
        assert!((r[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((r[1] + 2f64.sqrt()).abs() < 1e-15);
        let (lo, hi) = &k.real_root_intervals()[0];
        assert!(hi - lo <= Rational::new(BigInt::one(), BigInt::one() << 64u32));
    }

    #[test]
    fn cube_root_of_two_has_one_real_root() {
        let k = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        assert_eq!((k.real_embeddings(), k.complex_pairs()), (1, 1));
        let z = k.complex_roots_f64()[0];
        let cbrt = 2f64.cbrt();
        assert!((z.re + cbrt / 2.0).abs() < 1e-14);
        assert!((z.im - cbrt * 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn totally_real_cubic() {
        let k = field_for_i64(&[-1, -3, 0, 1]).unwrap();
        assert_eq!((k.real_embeddings(), k.complex_pairs()), (3, 0));
        assert!(k.is_totally_real());
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert_eq!(
            NumberField::analyze(&[1, 2, 1].map(BigInt::from)).unwrap_err(),
            Error::NotSquarefree
        );
        assert!(matches!(
            NumberField::analyze(&[-1, 0, 1].map(BigInt::from)),
            Err(Error::ReducibleDetected(_))
        ));
        // x^4 + 1 is irreducible, x^4 - 4x^2 + 1 too; x^4 + 4 = (x^2+2x+2)(x^2-2x+2)
        assert!(NumberField::analyze(&[1, 0, 0, 0, 1].map(BigInt::from)).is_ok());
        assert!(matches!(
            NumberField::analyze(&[4, 0, 0, 0, 1].map(BigInt::from)),
            Err(Error::ReducibleDetected(_))
        ));
    }

    #[test]
    fn traces_of_powers() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let tr: Vec<_> = (0..4).map(|i| k.power_trace(i)).collect();
        assert_eq!(tr, vec![2, 0, 4, 0].into_iter().map(|x| Rational::from_integer(x.into())).collect::<Vec<_>>());
        let k = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        assert_eq!(k.power_trace(3), Rational::from_integer(6.into()));
    }

    #[test]
    fn slots_flatten_complex_pairs() {
        let k = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        assert_eq!(k.slot_kind(0).unwrap(), SlotKind::Real(0));
        assert_eq!(k.slot_kind(1).unwrap(), SlotKind::ComplexRe(0));
        assert_eq!(k.slot_kind(2).unwrap(), SlotKind::ComplexIm(0));
        assert!(matches!(k.slot_kind(3), Err(Error::EmbeddingOutOfRange { .. })));
    }
}
