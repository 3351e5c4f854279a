//! The anisotropic dilation `T_ε`, fixing `F` and scaling `H = F^⊥` by `ε^{-1}`.

use crate::error::{Error, Result};
use crate::linalg::{self, FMatrix, Matrix};
use crate::scalar::{rational, Rational, Scalar};
use crate::subspace::Subspace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug)]
pub struct AnisoMap {
    f: Subspace,
    h: Subspace,
    eps: Rational,
    eps_f64: f64,
    ph: FMatrix,
    ph_exact: Option<Matrix>,
}

impl AnisoMap {
    pub fn new(f: &Subspace, eps: Rational) -> Result<Self> {
        if eps <= Rational::from_integer(0.into()) {
            return Err(Error::NonPositiveParameter("epsilon".into()));
        }
        let h = f.complement()?;
        let ph = h.projector_f64();
        let ph_exact = h.projector_exact();
        Ok(Self { f: f.clone(), eps_f64: rational::to_f64(&eps), eps, h, ph, ph_exact })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(&Subspace::full(n), Rational::from_integer(1.into())).expect("valid")
    }

    pub fn f(&self) -> &Subspace {
        &self.f
    }

    pub fn h(&self) -> &Subspace {
        &self.h
    }

    pub fn eps(&self) -> &Rational {
        &self.eps
    }

    pub fn eps_f64(&self) -> f64 {
        self.eps_f64
    }

    pub fn dim(&self) -> usize {
        self.f.ambient()
    }

    /// `x_F + ε^{-1} x_H` (forward) or `x_F + ε x_H` (inverse).
    pub fn apply(&self, x: &[f64], dir: Direction) -> Vec<f64> {
        let xh = linalg::fmat_vec(&self.ph, x);
        let k = match dir {
            Direction::Forward => 1.0 / self.eps_f64,
            Direction::Inverse => self.eps_f64,
        };
        x.iter().zip(&xh).map(|(a, b)| (a - b) + k * b).collect()
    }

    /// Exact `T_ε^{-1}` when the projector onto `H` is exact.
    pub fn inverse_exact(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        let ph = self
            .ph_exact
            .as_ref()
            .ok_or_else(|| Error::UnsupportedScalarKind("no exact projector onto H".into()))?;
        let k = Scalar::Rat(&self.eps - Rational::from_integer(1.into()));
        ph.iter()
            .zip(x)
            .map(|(row, xi)| xi.add(&crate::scalar::dot(row, x)?.mul(&k)?))
            .collect()
    }
}
