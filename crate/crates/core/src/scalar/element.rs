//! Elements of a number field in power-basis coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::poly::{rational_det, resultant, QPoly};
use super::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::numberfield::field::NumberField;

/// `Σ coords[i]·θ^i` in `K = Q(θ)`. Always reduced modulo the minimal
/// polynomial, so `coords.len() == degree`.
#[derive(Clone)]
pub struct FieldElement {
    field: Arc<NumberField>,
    coords: Vec<Rational>,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(rational::format_rational).collect();
        write!(f, "FieldElement({:?} in {:?})", parts, self.field.minpoly())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_field(other) && self.coords == other.coords
    }
}

impl FieldElement {
    pub fn new(field: Arc<NumberField>, coords: Vec<Rational>) -> Result<Self> {
        let d = field.degree();
        if coords.len() > d {
            // Reduce longer coordinate vectors rather than rejecting them.
            let p = QPoly::new(coords).rem(field.poly())?;
            return Ok(Self::from_poly(field, &p));
        }
        let mut coords = coords;
        coords.resize(d, Rational::zero());
        Ok(Self { field, coords })
    }

    pub fn from_rational(field: Arc<NumberField>, q: Rational) -> Self {
        let mut coords = vec![Rational::zero(); field.degree()];
        coords[0] = q;
        Self { field, coords }
    }

    /// The generator `θ`.
    pub fn generator(field: Arc<NumberField>) -> Self {
        let d = field.degree();
        if d == 1 {
            let theta = -Rational::from_integer(field.minpoly()[0].clone());
            return Self::from_rational(field, theta);
        }
        let mut coords = vec![Rational::zero(); d];
        coords[1] = Rational::one();
        Self { field, coords }
    }

    fn from_poly(field: Arc<NumberField>, p: &QPoly) -> Self {
        let mut coords = p.coeffs().to_vec();
        coords.resize(field.degree(), Rational::zero());
        Self { field, coords }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn as_poly(&self) -> QPoly {
        QPoly::new(self.coords.clone())
    }

    pub fn same_field(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.same_field(o) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!(
                "{:?} vs {:?}",
                self.field.minpoly(),
                o.field.minpoly()
            )))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// `Some(q)` when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coords.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self {
            field: self.field.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            field: self.field.clone(),
            coords: self.coords.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self {
            field: self.field.clone(),
            coords: self.coords.iter().map(|a| a * q).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let p = self.as_poly().mul(&o.as_poly()).rem(self.field.poly())?;
        Ok(Self::from_poly(self.field.clone(), &p))
    }

    /// Matrix of multiplication by `self` on the power basis (row `i` is
    /// the coordinate vector of `self·θ^i`).
    pub fn multiplication_matrix(&self) -> Vec<Vec<Rational>> {
        let d = self.field.degree();
        let mut rows = Vec::with_capacity(d);
        let mut cur = self.as_poly();
        let x = QPoly::new(vec![Rational::zero(), Rational::one()]);
        for _ in 0..d {
            let mut r = cur.coeffs().to_vec();
            r.resize(d, Rational::zero());
            rows.push(r);
            cur = cur.mul(&x).rem(self.field.poly()).expect("monic modulus");
        }
        rows
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Solve x·M = e_0 where M is the multiplication matrix.
        let m = self.multiplication_matrix();
        let d = m.len();
        let mut aug: Vec<Vec<Rational>> = (0..d)
            .map(|j| {
                let mut row: Vec<Rational> = (0..d).map(|i| m[i][j].clone()).collect();
                row.push(if j == 0 { Rational::one() } else { Rational::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d)
                .find(|&r| !aug[r][col].is_zero())
                .ok_or_else(|| Error::ReducibleDetected("element is a zero divisor".into()))?;
            aug.swap(piv, col);
            let p = aug[col][col].clone();
            for c in col..=d {
                aug[col][c] = &aug[col][c] / &p;
            }
            for r in 0..d {
                if r != col && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=d {
                        let t = &f * &aug[col][c];
                        aug[r][c] -= t;
                    }
                }
            }
        }
        Ok(Self {
            field: self.field.clone(),
            coords: aug.into_iter().map(|r| r[d].clone()).collect(),
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        self.mul(&o.inv()?)
    }

    /// Exact norm `N_{K/Q}`, the resultant of the minimal polynomial and the
    /// coordinate polynomial.
    pub fn norm(&self) -> Rational {
        let p = self.as_poly();
        if p.is_zero() {
            return Rational::zero();
        }
        resultant(self.field.poly(), &p)
    }

    /// Norm computed as the determinant of the multiplication matrix.
    pub fn norm_by_determinant(&self) -> Rational {
        rational_det(self.multiplication_matrix())
    }

    pub fn trace(&self) -> Rational {
        self.coords
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.field.power_trace(k))
            .sum()
    }

    /// Value at flattened embedding coordinate `slot`.
    pub fn to_f64(&self, slot: usize) -> Result<f64> {
        self.field.eval_f64(&self.as_poly(), slot)
    }

    /// Exact sign at `slot`; real slots can only vanish on the zero element.
    pub fn sign_at(&self, slot: usize) -> Result<Ordering> {
        if self.is_zero() {
            self.field.slot_kind(slot)?;
            return Ok(Ordering::Equal);
        }
        self.field.sign_at(&self.as_poly(), slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use crate::scalar::rational::{int, rat};

    fn sqrt2() -> FieldElement {
        FieldElement::generator(field_for_i64(&[-2, 0, 1]).unwrap())
    }

    #[test]
    fn minimal_polynomial_reduction() {
        let a = sqrt2();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq.coords(), &[int(2), int(0)]);
        let one = FieldElement::from_rational(a.field().clone(), int(1));
        let p = one.add(&a).unwrap().mul(&one.sub(&a).unwrap()).unwrap();
        assert_eq!(p.as_rational(), Some(int(-1)));
    }

    #[test]
    fn inverse_and_norms() {
        let a = sqrt2();
        let one = FieldElement::from_rational(a.field().clone(), int(1));
        let u = one.add(&a).unwrap();
        let inv = u.inv().unwrap();
        assert_eq!(u.mul(&inv).unwrap(), one);
        assert_eq!(u.norm(), int(-1));
        assert_eq!(a.norm(), int(-2));
        assert_eq!(a.norm_by_determinant(), int(-2));
        assert_eq!(a.trace(), int(0));
        assert_eq!(u.scale(&rat(1, 2)).trace(), int(1));
    }

    #[test]
    fn embeddings_and_signs() {
        let a = sqrt2();
        assert_eq!(a.to_f64(0).unwrap(), std::f64::consts::SQRT_2);
        assert_eq!(a.to_f64(1).unwrap(), -std::f64::consts::SQRT_2);
        assert_eq!(a.sign_at(1).unwrap(), Ordering::Less);
        let b = a.sub(&FieldElement::from_rational(a.field().clone(), rat(141, 100))).unwrap();
        assert_eq!(b.sign_at(0).unwrap(), Ordering::Greater);
    }

    #[test]
    fn cube_root_norm() {
        let k = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let c = FieldElement::generator(k);
        assert_eq!(c.norm(), int(2));
        assert_eq!(c.norm_by_determinant(), int(2));
        assert!((c.to_f64(0).unwrap() - 2f64.cbrt()).abs() < 1e-15);
        assert!((c.to_f64(1).unwrap() + 2f64.cbrt() / 2.0).abs() < 1e-15);
    }
}
