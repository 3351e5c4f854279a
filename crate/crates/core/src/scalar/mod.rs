//! Exact scalars: rationals and real numbers presented as a number-field
//! element read at one embedding coordinate.
//!
//! A lattice built from the canonical embedding has column `i` made of
//! values at embedding coordinate `i`, so its entries are [`Scalar::Alg`]
//! values tagged with that coordinate. Arithmetic is exact whenever both
//! operands live at the same coordinate of the same field (or one of them is
//! rational); anything else is reported as [`Error::FieldMismatch`] and
//! callers fall back to floating point.

pub mod element;
pub mod poly;
pub mod rational;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

pub use element::FieldElement;
pub use rational::{rat, Rational};

use crate::error::{Error, Result};
use crate::numberfield::field::{field_for, SlotKind};

/// A field element read at a flattened embedding coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddedValue {
    pub elem: FieldElement,
    pub slot: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Rat(Rational),
    Alg(EmbeddedValue),
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Rat(rational::int(v))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{}", rational::format_rational(r)),
            Scalar::Alg(v) => {
                let parts: Vec<String> = v.elem.coords().iter().map(rational::format_rational).collect();
                write!(f, "[{}]@{}", parts.join(","), v.slot)
            }
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    /// Wraps a field element at an embedding coordinate, demoting it to a
    /// rational when its value there is rational.
    pub fn embedded(elem: FieldElement, slot: usize) -> Result<Self> {
        let kind = elem.field().slot_kind(slot)?;
        Ok(Self::canonical(EmbeddedValue { elem, slot }, kind))
    }

    fn canonical(v: EmbeddedValue, kind: SlotKind) -> Self {
        match (v.elem.as_rational(), kind) {
            (Some(_), SlotKind::ComplexIm(_)) => Scalar::Rat(Rational::zero()),
            (Some(q), _) => Scalar::Rat(q),
            (None, _) => Scalar::Alg(v),
        }
    }

    fn kind(v: &EmbeddedValue) -> SlotKind {
        v.elem.field().slot_kind(v.slot).expect("slot validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            // Canonical form keeps rational-valued elements as `Rat`; a
            // nonzero element may still vanish at a complex coordinate.
            Scalar::Alg(v) => v.elem.is_zero(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Alg(_) => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rat(_))
    }

    fn compatible(a: &EmbeddedValue, b: &EmbeddedValue) -> Result<()> {
        if !a.elem.same_field(&b.elem) {
            return Err(Error::FieldMismatch("operands come from different fields".into()));
        }
        if a.slot != b.slot {
            return Err(Error::FieldMismatch(format!(
                "operands sit at embedding coordinates {} and {}",
                a.slot, b.slot
            )));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a + b)),
            (Scalar::Alg(a), Scalar::Rat(q)) | (Scalar::Rat(q), Scalar::Alg(a)) => {
                if q.is_zero() {
                    return Ok(Scalar::Alg(a.clone()));
                }
                let kind = Self::kind(a);
                if let SlotKind::ComplexIm(_) = kind {
                    return Err(Error::FieldMismatch(
                        "cannot add a rational to an imaginary-part coordinate".into(),
                    ));
                }
                let q_elem = FieldElement::from_rational(a.elem.field().clone(), q.clone());
                Ok(Self::canonical(
                    EmbeddedValue { elem: a.elem.add(&q_elem)?, slot: a.slot },
                    kind,
                ))
            }
            (Scalar::Alg(a), Scalar::Alg(b)) => {
                Self::compatible(a, b)?;
                Ok(Self::canonical(
                    EmbeddedValue { elem: a.elem.add(&b.elem)?, slot: a.slot },
                    Self::kind(a),
                ))
            }
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Alg(a) => Scalar::Alg(EmbeddedValue { elem: a.elem.neg(), slot: a.slot }),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(Scalar::Rat(a * b)),
            (Scalar::Alg(a), Scalar::Rat(q)) | (Scalar::Rat(q), Scalar::Alg(a)) => {
                if q.is_zero() {
                    return Ok(Scalar::zero());
                }
                Ok(Scalar::Alg(EmbeddedValue { elem: a.elem.scale(q), slot: a.slot }))
            }
            (Scalar::Alg(a), Scalar::Alg(b)) => {
                Self::compatible(a, b)?;
                let kind = Self::kind(a);
                if !matches!(kind, SlotKind::Real(_)) {
                    return Err(Error::FieldMismatch(
                        "products of complex-embedding parts are not field operations".into(),
                    ));
                }
                Ok(Self::canonical(
                    EmbeddedValue { elem: a.elem.mul(&b.elem)?, slot: a.slot },
                    kind,
                ))
            }
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match (self, o) {
            (_, Scalar::Rat(q)) => self.mul(&Scalar::Rat(q.recip())),
            (Scalar::Rat(q), Scalar::Alg(b)) => {
                let kind = Self::kind(b);
                if !matches!(kind, SlotKind::Real(_)) {
                    return Err(Error::FieldMismatch("division by a complex-embedding part".into()));
                }
                Ok(Self::canonical(
                    EmbeddedValue { elem: b.elem.inv()?.scale(q), slot: b.slot },
                    kind,
                ))
            }
            (Scalar::Alg(a), Scalar::Alg(b)) => {
                Self::compatible(a, b)?;
                let kind = Self::kind(a);
                if !matches!(kind, SlotKind::Real(_)) {
                    return Err(Error::FieldMismatch("division of complex-embedding parts".into()));
                }
                Ok(Self::canonical(
                    EmbeddedValue { elem: a.elem.div(&b.elem)?, slot: a.slot },
                    kind,
                ))
            }
        }
    }

    /// Double-precision value (a few ulps from the exact value).
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rat(r) => rational::to_f64(r),
            Scalar::Alg(v) => v.elem.to_f64(v.slot).expect("slot validated at construction"),
        }
    }

    /// Exact sign.
    pub fn signum(&self) -> Result<Ordering> {
        match self {
            Scalar::Rat(r) => Ok(r.cmp(&Rational::zero())),
            Scalar::Alg(v) => v.elem.sign_at(v.slot),
        }
    }

    /// Exact comparison; never decided by float rounding.
    pub fn compare(&self, o: &Self) -> Result<Ordering> {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Ok(a.cmp(b)),
            _ => self.sub(o)?.signum(),
        }
    }

    pub fn abs(&self) -> Result<Self> {
        Ok(if self.signum()? == Ordering::Less { self.neg() } else { self.clone() })
    }

    /// Parses the JSON forms: `"p/q"` strings, integer numbers, or
    /// `{"minpoly": [...], "coords": [...], "embedding": i}` objects.
    pub fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Ok(Scalar::Rat(rational::parse_rational(s)?)),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Scalar::Rat(rational::int(i)))
                } else {
                    Err(Error::Parse(format!(
                        "non-integer number {n}; write exact values as strings like \"1/3\""
                    )))
                }
            }
            Value::Object(map) => {
                let minpoly = map
                    .get("minpoly")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("field element needs a `minpoly` array".into()))?;
                let minpoly = parse_int_list(minpoly)?;
                let coords = map
                    .get("coords")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::Parse("field element needs a `coords` array".into()))?;
                let coords = coords
                    .iter()
                    .map(|c| match Scalar::from_json(c)? {
                        Scalar::Rat(r) => Ok(r),
                        Scalar::Alg(_) => Err(Error::Parse("coords must be rationals".into())),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let slot = map.get("embedding").and_then(Value::as_u64).unwrap_or(0) as usize;
                let field = field_for(&minpoly)?;
                Scalar::embedded(FieldElement::new(field, coords)?, slot)
            }
            _ => Err(Error::Parse(format!("cannot read a scalar from {v}"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Scalar::Rat(r) => Value::String(rational::format_rational(r)),
            Scalar::Alg(v) => serde_json::json!({
                "minpoly": v.elem.field().minpoly().iter().map(|c| c.to_string().parse::<i64>().unwrap_or(0)).collect::<Vec<_>>(),
                "coords": v.elem.coords().iter().map(rational::format_rational).collect::<Vec<_>>(),
                "embedding": v.slot,
            }),
        }
    }
}

pub fn parse_int_list(vals: &[Value]) -> Result<Vec<BigInt>> {
    vals.iter()
        .map(|c| match c {
            Value::Number(n) => n
                .as_i64()
                .map(BigInt::from)
                .ok_or_else(|| Error::Parse(format!("expected an integer, got {n}"))),
            Value::String(s) => s
                .trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("expected an integer, got `{s}`"))),
            _ => Err(Error::Parse(format!("expected an integer, got {c}"))),
        })
        .collect()
}

/// Exact dot product of two scalar vectors.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Result<Scalar> {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        acc = acc.add(&x.mul(y)?)?;
    }
    Ok(acc)
}

/// `Σ c_i v_i` for integer coefficients.
pub fn int_combination(coeffs: &[i64], rows: &[Vec<Scalar>]) -> Result<Vec<Scalar>> {
    let n = rows.first().map_or(0, Vec::len);
    let mut out = vec![Scalar::zero(); n];
    for (c, row) in coeffs.iter().zip(rows) {
        if *c == 0 {
            continue;
        }
        let k = Scalar::Rat(rational::int(*c));
        for (o, x) in out.iter_mut().zip(row) {
            if x.is_zero() {
                continue;
            }
            *o = o.add(&x.mul(&k)?)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use proptest::prelude::*;

    fn sqrt2_at(slot: usize) -> Scalar {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        Scalar::embedded(FieldElement::generator(k), slot).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = Scalar::Rat(rat(1, 2));
        let b = Scalar::Rat(rat(1, 3));
        assert_eq!(a.add(&b).unwrap(), Scalar::Rat(rat(5, 6)));
        let r2 = sqrt2_at(0);
        assert_eq!(r2.mul(&r2).unwrap(), Scalar::from(2));
        let one = Scalar::one();
        let p = one.add(&r2).unwrap().mul(&one.sub(&r2).unwrap()).unwrap();
        assert_eq!(p, Scalar::from(-1));
        assert_eq!(a.div(&Scalar::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_coordinates_are_rejected() {
        assert!(matches!(sqrt2_at(0).add(&sqrt2_at(1)), Err(Error::FieldMismatch(_))));
        let k3 = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let c = Scalar::embedded(FieldElement::generator(k3), 0).unwrap();
        assert!(matches!(c.add(&sqrt2_at(0)), Err(Error::FieldMismatch(_))));
    }

    #[test]
    fn to_float_examples() {
        assert_eq!(Scalar::Rat(rat(5, 6)).to_f64(), 0.8333333333333334);
        assert_eq!(sqrt2_at(0).to_f64(), 1.4142135623730951);
        assert_eq!(sqrt2_at(1).to_f64(), -1.4142135623730951);
    }

    #[test]
    fn compare_examples() {
        assert_eq!(Scalar::Rat(rat(1, 2)).compare(&Scalar::Rat(rat(1, 3))).unwrap(), Ordering::Greater);
        assert_eq!(sqrt2_at(0).compare(&Scalar::Rat(rat(141, 100))).unwrap(), Ordering::Greater);
        let a = sqrt2_at(1);
        assert_eq!(a.compare(&a).unwrap(), Ordering::Equal);
    }

    #[test]
    fn complex_parts_follow_linear_rules() {
        let k3 = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let re = Scalar::embedded(FieldElement::generator(k3.clone()), 1).unwrap();
        let im = Scalar::embedded(FieldElement::generator(k3), 2).unwrap();
        let c = 2f64.cbrt();
        assert!((re.to_f64() + c / 2.0).abs() < 1e-15);
        assert!((im.to_f64() - c * 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(re.add(&Scalar::one()).is_ok());
        assert!(im.add(&Scalar::one()).is_err());
        assert!(re.mul(&re).is_err());
        assert_eq!(re.mul(&Scalar::from(2)).unwrap().to_f64(), -c);
        assert_eq!(re.signum().unwrap(), Ordering::Less);
        assert_eq!(im.signum().unwrap(), Ordering::Greater);
    }

    #[test]
    fn json_round_trip() {
        let v = serde_json::json!({"minpoly": [-2, 0, 1], "coords": ["0", "1"], "embedding": 1});
        let s = Scalar::from_json(&v).unwrap();
        assert_eq!(s, sqrt2_at(1));
        assert_eq!(Scalar::from_json(&s.to_json()).unwrap(), s);
        assert_eq!(Scalar::from_json(&serde_json::json!("3/6")).unwrap(), Scalar::Rat(rat(1, 2)));
        assert!(Scalar::from_json(&serde_json::json!(0.5)).is_err());
    }

    fn small_elem() -> impl Strategy<Value = Scalar> {
        (-20i64..20, 1i64..6, -20i64..20, 1i64..6).prop_map(|(a, b, c, d)| {
            let k = field_for_i64(&[-2, 0, 1]).unwrap();
            let e = FieldElement::new(k, vec![rat(a, b), rat(c, d)]).unwrap();
            Scalar::embedded(e, 0).unwrap()
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_elem(), b in small_elem(), c in small_elem()) {
            let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
            let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let dist = a.mul(&b.add(&c).unwrap()).unwrap();
            let expanded = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
            prop_assert_eq!(dist, expanded);
            if !a.is_zero() {
                prop_assert_eq!(a.mul(&Scalar::one().div(&a).unwrap()).unwrap(), Scalar::one());
            }
        }

        #[test]
        fn compare_agrees_with_float_sign(a in small_elem(), b in small_elem()) {
            let diff = a.sub(&b).unwrap().to_f64();
            if diff.abs() > 1e-12 {
                let expected = if diff > 0.0 { Ordering::Greater } else { Ordering::Less };
                prop_assert_eq!(a.compare(&b).unwrap(), expected);
            }
        }
    }
}
