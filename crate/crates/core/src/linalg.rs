//! Small dense linear algebra: exact elimination over [`Scalar`], integer
//! Hermite normal form, and the double-precision helpers used by geometry.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

pub type Matrix = Vec<Vec<Scalar>>;
pub type FMatrix = Vec<Vec<f64>>;

// ---------------------------------------------------------------------------
// exact elimination

fn find_pivot(m: &Matrix, col: usize, from: usize) -> Option<usize> {
    (from..m.len()).find(|&r| !m[r][col].is_zero())
}

pub fn det(m: &Matrix) -> Result<Scalar> {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(p) = find_pivot(&a, col, col) else {
            return Ok(Scalar::zero());
        };
        if p != col {
            a.swap(p, col);
            det = det.neg();
        }
        let piv = a[col][col].clone();
        det = det.mul(&piv)?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].div(&piv)?;
            for c in col..n {
                if a[col][c].is_zero() {
                    continue;
                }
                a[r][c] = a[r][c].sub(&f.mul(&a[col][c])?)?;
            }
        }
    }
    Ok(det)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Result<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = find_pivot(m, c, r) else { continue };
        m.swap(p, r);
        let piv = m[r][c].clone();
        for k in c..cols {
            if !m[r][k].is_zero() {
                m[r][k] = m[r][k].div(&piv)?;
            }
        }
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..cols {
                if m[r][k].is_zero() {
                    continue;
                }
                m[i][k] = m[i][k].sub(&f.mul(&m[r][k])?)?;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank(m: &Matrix) -> Result<usize> {
    let mut a = m.clone();
    Ok(rref(&mut a)?.len())
}

pub fn inverse(m: &Matrix) -> Result<Matrix> {
    let n = m.len();
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug)?;
    if piv.len() < n || piv[n - 1] != n - 1 {
        return Err(Error::SingularBasis);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of `{y : m·y = 0}`.
pub fn right_kernel(m: &Matrix, cols: usize) -> Result<Matrix> {
    let mut a = m.clone();
    let pivots = rref(&mut a)?;
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut y = vec![Scalar::zero(); cols];
        y[f] = Scalar::one();
        for (row, &pc) in pivots.iter().enumerate() {
            y[pc] = a[row][f].neg();
        }
        out.push(y);
    }
    Ok(out)
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| crate::scalar::dot(row, col)).collect())
        .collect()
}

pub fn to_f64_matrix(m: &Matrix) -> FMatrix {
    m.iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect()
}

pub fn rational_matrix(m: &Matrix) -> Option<Vec<Vec<Rational>>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.as_rational().cloned()).collect())
        .collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// integer matrices

pub type IMatrix = Vec<Vec<BigInt>>;

/// Row-style Hermite reduction: returns `(H, U)` with `U` unimodular,
/// `U·A = H`, and `H` in row echelon form with positive pivots. Rows of `U`
/// matching zero rows of `H` form a basis of the left kernel of `A`.
pub fn hermite_with_transform(a: &IMatrix) -> (IMatrix, IMatrix, usize) {
    let m = a.len();
    let k = a.first().map_or(0, Vec::len);
    let mut h = a.clone();
    let mut u: IMatrix = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut p = 0;
    for c in 0..k {
        if p == m {
            break;
        }
        loop {
            // Row with the smallest nonzero entry in this column.
            let best = (p..m)
                .filter(|&r| !h[r][c].is_zero())
                .min_by(|&x, &y| h[x][c].abs().cmp(&h[y][c].abs()));
            let Some(best) = best else { break };
            h.swap(p, best);
            u.swap(p, best);
            let mut done = true;
            for r in p + 1..m {
                if h[r][c].is_zero() {
                    continue;
                }
                let q = h[r][c].div_floor(&h[p][c]);
                for j in 0..k {
                    let t = &q * &h[p][j];
                    h[r][j] -= t;
                }
                for j in 0..m {
                    let t = &q * &u[p][j];
                    u[r][j] -= t;
                }
                if !h[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[p][c].is_zero() {
            continue;
        }
        if h[p][c].is_negative() {
            for j in 0..k {
                h[p][j] = -h[p][j].clone();
            }
            for j in 0..m {
                u[p][j] = -u[p][j].clone();
            }
        }
        // Reduce the entries above the pivot.
        for r in 0..p {
            let q = h[r][c].div_floor(&h[p][c]);
            if q.is_zero() {
                continue;
            }
            for j in 0..k {
                let t = &q * &h[p][j];
                h[r][j] -= t;
            }
            for j in 0..m {
                let t = &q * &u[p][j];
                u[r][j] -= t;
            }
        }
        p += 1;
    }
    (h, u, p)
}

/// Basis of `{x ∈ Z^m : x·A = 0}`; saturated by construction.
pub fn integer_left_kernel(a: &IMatrix) -> IMatrix {
    let (_, u, rank) = hermite_with_transform(a);
    u[rank..].to_vec()
}

/// Clears denominators column by column so the integer kernel is unchanged.
pub fn clear_column_denominators(a: &[Vec<Rational>]) -> IMatrix {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = vec![vec![BigInt::zero(); cols]; rows];
    for c in 0..cols {
        let den = crate::scalar::rational::common_denominator(a.iter().map(|r| &r[c]));
        for r in 0..rows {
            out[r][c] = (&a[r][c] * Rational::from_integer(den.clone())).to_integer();
        }
    }
    out
}

pub fn to_i64_rows(m: &IMatrix) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    x.to_i64()
                        .ok_or_else(|| Error::InvariantViolation("integer coefficient overflow".into()))
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// doubles

pub fn fdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn fnorm(a: &[f64]) -> f64 {
    fdot(a, a).sqrt()
}

pub fn fmat_vec(m: &FMatrix, v: &[f64]) -> Vec<f64> {
    m.iter().map(|r| fdot(r, v)).collect()
}

/// `vᵀ·M`, i.e. the combination `Σ v_i·row_i`.
pub fn fvec_mat(v: &[f64], m: &FMatrix) -> Vec<f64> {
    let n = m.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (c, row) in v.iter().zip(m) {
        for (o, x) in out.iter_mut().zip(row) {
            *o += c * x;
        }
    }
    out
}

pub fn fmat_mul(a: &FMatrix, b: &FMatrix) -> FMatrix {
    a.iter().map(|r| fvec_mat(r, b)).collect()
}

pub fn fgram(rows: &FMatrix) -> FMatrix {
    rows.iter().map(|a| rows.iter().map(|b| fdot(a, b)).collect()).collect()
}

/// LU with partial pivoting; returns the determinant.
pub fn fdet(m: &FMatrix) -> f64 {
    let n = m.len();
    let mut a = m.clone();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap();
        if a[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

pub fn finverse(m: &FMatrix) -> Result<FMatrix> {
    let n = m.len();
    let mut a: FMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap();
        if a[p][c].abs() < 1e-300 {
            return Err(Error::SingularBasis);
        }
        a.swap(p, c);
        let piv = a[c][c];
        for k in 0..2 * n {
            a[c][k] /= piv;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[r][k] -= f * a[c][k];
                    }
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Orthonormal basis of the row space (modified Gram–Schmidt, two passes).
pub fn orthonormal_rows(rows: &FMatrix, tol: f64) -> FMatrix {
    let mut out: FMatrix = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for _ in 0..2 {
            for q in &out {
                let c = fdot(&v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= c * y;
                }
            }
        }
        let nv = fnorm(&v);
        if nv > tol * fnorm(r).max(1.0) {
            out.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the row space.
pub fn orthonormal_complement(rows: &FMatrix, n: usize) -> FMatrix {
    let basis = orthonormal_rows(rows, 1e-12);
    let mut all = basis.clone();
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let before = all.len();
        all = orthonormal_rows(&[all.clone(), vec![e]].concat(), 1e-9);
        if all.len() > before {
            out.push(all.last().unwrap().clone());
        }
        if all.len() == n {
            break;
        }
    }
    out
}

/// Orthogonal projector onto the row space.
pub fn fprojector(rows: &FMatrix, n: usize) -> FMatrix {
    let q = orthonormal_rows(rows, 1e-12);
    (0..n)
        .map(|i| (0..n).map(|j| q.iter().map(|v| v[i] * v[j]).sum()).collect())
        .collect()
}

/// Lower-triangular `L` with `L·Lᵀ = m`.
pub fn cholesky(m: &FMatrix) -> Result<FMatrix> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = m[i][i] - s;
                if d <= 0.0 {
                    return Err(Error::InvalidDims("matrix is not positive definite".into()));
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
pub fn sym_eigenvalues(m: &FMatrix) -> Vec<f64> {
    let n = m.len();
    let mut a = m.clone();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn q(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::from(x)).collect()).collect()
    }

    fn ints(rows: &[&[i64]]) -> IMatrix {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn exact_inverse_and_det() {
        let m = vec![
            vec![Scalar::one(), Scalar::zero()],
            vec![Scalar::Rat(rat(1, 2)), Scalar::Rat(rat(1, 2))],
        ];
        assert_eq!(det(&m).unwrap(), Scalar::Rat(rat(1, 2)));
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv).unwrap(), identity(2));
        assert_eq!(inverse(&q(&[&[1, 2], &[2, 4]])), Err(Error::SingularBasis));
    }

    #[test]
    fn kernels() {
        let k = right_kernel(&q(&[&[1, 2, 3]]), 3).unwrap();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(crate::scalar::dot(&q(&[&[1, 2, 3]])[0], v).unwrap().is_zero());
        }
        let lk = integer_left_kernel(&ints(&[&[1], &[2]]));
        assert_eq!(lk.len(), 1);
        let v = &lk[0];
        assert_eq!(v[0].clone() + v[1].clone() * 2, BigInt::zero());
        assert!(v[1].abs().is_one());
    }

    #[test]
    fn hermite_transform_is_unimodular() {
        let a = ints(&[&[4, 6], &[6, 9], &[2, 3]]);
        let (h, u, rank) = hermite_with_transform(&a);
        assert_eq!(rank, 1);
        let ua: IMatrix = u
            .iter()
            .map(|row| {
                (0..2)
                    .map(|j| row.iter().zip(&a).map(|(x, r)| x * &r[j]).sum())
                    .collect()
            })
            .collect();
        assert_eq!(ua, h);
        assert_eq!(h[0], vec![BigInt::from(2), BigInt::from(3)]);
    }

    #[test]
    fn float_helpers() {
        let m = vec![vec![4.0, 2.0], vec![2.0, 3.0]];
        let l = cholesky(&m).unwrap();
        let back = fmat_mul(&l, &transpose(&l));
        assert!((back[0][1] - 2.0).abs() < 1e-14);
        assert!((fdet(&m) - 8.0).abs() < 1e-12);
        let ev = sym_eigenvalues(&m);
        // (7 ± √17)/2
        assert!((ev[0] - (7.0 - 17f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!((ev[1] - (7.0 + 17f64.sqrt()) / 2.0).abs() < 1e-12);
        let c = orthonormal_complement(&vec![vec![1.0, 1.0, 0.0]], 3);
        assert_eq!(c.len(), 2);
        for v in &c {
            assert!(fdot(v, &[1.0, 1.0, 0.0]).abs() < 1e-14);
        }
    }
}
