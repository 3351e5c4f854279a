//! Linear subspaces given by exact spanning rows.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::{self, FMatrix, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct Subspace {
    n: usize,
    rows: Matrix,
    rows_f64: FMatrix,
    frame: FMatrix,
}

impl Subspace {
    /// Rows must be linearly independent vectors of length `n`.
    pub fn new(rows: Matrix, n: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDims(format!("subspace rows must have length {n}")));
        }
        let rows_f64 = linalg::to_f64_matrix(&rows);
        let independent = match linalg::rank(&rows) {
            Ok(k) => k == rows.len(),
            Err(_) => linalg::orthonormal_rows(&rows_f64, 1e-10).len() == rows.len(),
        };
        if !independent {
            return Err(Error::InvalidDims("subspace rows are linearly dependent".into()));
        }
        let frame = linalg::orthonormal_rows(&rows_f64, 1e-12);
        Ok(Self { n, rows, rows_f64, frame })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, rows: Vec::new(), rows_f64: Vec::new(), frame: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Self::new(linalg::identity(n), n).expect("identity rows are independent")
    }

    /// Span of the listed coordinate axes.
    pub fn axes(n: usize, axes: &[usize]) -> Result<Self> {
        let id = linalg::identity(n);
        Self::new(axes.iter().map(|&i| id[i].clone()).collect(), n)
    }

    pub fn from_ints(rows: &[Vec<i64>], n: usize) -> Result<Self> {
        Self::new(rows.iter().map(|r| r.iter().map(|&x| Scalar::from(x)).collect()).collect(), n)
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &Matrix {
        &self.rows
    }

    pub fn rows_f64(&self) -> &FMatrix {
        &self.rows_f64
    }

    /// Orthonormal frame (floating point).
    pub fn frame(&self) -> &FMatrix {
        &self.frame
    }

    pub fn is_rational(&self) -> bool {
        self.rows.iter().flatten().all(Scalar::is_rational)
    }

    /// Exact orthogonal complement.
    pub fn complement(&self) -> Result<Subspace> {
        if self.rows.is_empty() {
            return Ok(Self::full(self.n));
        }
        let k = linalg::right_kernel(&self.rows, self.n).map_err(|e| match e {
            Error::FieldMismatch(m) => {
                Error::UnsupportedScalarKind(format!("complement needs entries from one embedding ({m})"))
            }
            other => other,
        })?;
        Subspace::new(k, self.n)
    }

    pub fn projector_f64(&self) -> FMatrix {
        linalg::fprojector(&self.frame, self.n)
    }

    /// Exact orthogonal projector `Aᵀ(AAᵀ)⁻¹A`, when the arithmetic stays
    /// inside one field embedding.
    pub fn projector_exact(&self) -> Option<Matrix> {
        let n = self.n;
        if self.rows.is_empty() {
            return Some(vec![vec![Scalar::zero(); n]; n]);
        }
        let at = linalg::transpose(&self.rows);
        let g = linalg::mat_mul(&self.rows, &at).ok()?;
        let gi = linalg::inverse(&g).ok()?;
        linalg::mat_mul(&linalg::mat_mul(&at, &gi).ok()?, &self.rows).ok()
    }

    /// Parses `{"rows": [[scalar, …], …]}`. An `axes` list is accepted as a
    /// shorthand for coordinate subspaces.
    pub fn from_json(v: &Value, n: usize, field_name: &str) -> Result<Self> {
        if let Some(axes) = v.get("axes").and_then(Value::as_array) {
            let axes = axes
                .iter()
                .map(|a| {
                    a.as_u64().map(|x| x as usize).filter(|&x| x < n).ok_or_else(|| Error::Config {
                        field: format!("{field_name}.axes"),
                        message: format!("axis indices must be integers below {n}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Self::axes(n, &axes);
        }
        let rows = v.get("rows").and_then(Value::as_array).ok_or_else(|| Error::Config {
            field: format!("{field_name}.rows"),
            message: "missing rows array".into(),
        })?;
        let rows = rows
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Config {
                        field: format!("{field_name}.rows"),
                        message: "rows must be arrays".into(),
                    })?
                    .iter()
                    .map(|x| {
                        Scalar::from_json(x).map_err(|e| Error::Config {
                            field: format!("{field_name}.rows"),
                            message: format!("{e}; subspaces need exact entries"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, n)
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "rows": self.rows.iter().map(|r| r.iter().map(Scalar::to_json).collect::<Vec<_>>()).collect::<Vec<_>>()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use crate::scalar::{rat, FieldElement};

    #[test]
    fn complement_of_sqrt2_line() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let s2 = Scalar::embedded(FieldElement::generator(k), 0).unwrap();
        let f = Subspace::new(vec![vec![Scalar::one(), s2.clone()]], 2).unwrap();
        let h = f.complement().unwrap();
        assert_eq!(h.dim(), 1);
        let d = crate::scalar::dot(&f.rows()[0], &h.rows()[0]).unwrap();
        assert!(d.is_zero());
        let p = f.projector_exact().unwrap();
        // P·(1, √2) = (1, √2)
        let img = crate::scalar::dot(&p[1], &f.rows()[0]).unwrap();
        assert_eq!(img, s2);
    }

    #[test]
    fn rejects_dependent_rows() {
        assert!(Subspace::from_ints(&[vec![1, 2], vec![2, 4]], 2).is_err());
        let f = Subspace::from_ints(&[vec![1, 2]], 2).unwrap();
        let p = f.projector_exact().unwrap();
        assert_eq!(p[0][0], Scalar::Rat(rat(1, 5)));
    }
}
