//! Exact helpers shared by the integration tests. They use only bignum
//! arithmetic, never the library's own linear algebra.
#![allow(dead_code)]

use latgeo::lattice::Lattice;
use latgeo::scalar::{rat, Rational};
use latgeo::subspace::Subspace;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type QMat = Vec<Vec<Rational>>;

pub fn det(mut m: QMat) -> Rational {
    let n = m.len();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] / &m[c][c];
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] -= t;
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> QMat {
    let n = m.len();
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular");
        a.swap(p, c);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn transpose(m: &QMat) -> QMat {
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gram(rows: &QMat) -> QMat {
    rows.iter().map(|x| rows.iter().map(|y| dot(x, y)).collect()).collect()
}

/// `Σ m_i rows_i`.
pub fn combine(m: &[i64], rows: &QMat) -> Vec<Rational> {
    (0..rows[0].len()).map(|j| m.iter().zip(rows).map(|(c, r)| Rational::from_integer((*c).into()) * &r[j]).sum()).collect()
}

/// Orthogonal projector onto the row span of `a` (full row rank).
pub fn projector(a: &QMat, n: usize) -> QMat {
    if a.is_empty() {
        return vec![vec![Rational::zero(); n]; n];
    }
    let inv = inverse(&gram(a));
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut s = Rational::zero();
                    for (k, ak) in a.iter().enumerate() {
                        for (l, al) in a.iter().enumerate() {
                            s += &ak[i] * &inv[k][l] * &al[j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn to_f64(x: &Rational) -> f64 {
    latgeo::scalar::rational::to_f64(x)
}

/// A well-conditioned rational basis `I + small perturbation`.
pub fn random_basis(rng: &mut ChaCha8Rng, n: usize) -> QMat {
    loop {
        let b: QMat = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let den = rng.gen_range(1..=3);
                        let num = rng.gen_range(-den..=den);
                        rat(num, 2 * den) + if i == j { Rational::one() } else { Rational::zero() }
                    })
                    .collect()
            })
            .collect();
        if det(b.clone()).abs() >= rat(1, 3) {
            return b;
        }
    }
}

pub fn lattice(b: &QMat) -> Lattice {
    Lattice::from_rational(b.clone()).unwrap()
}

/// Random full-rank integer rows spanning a `k`-dimensional subspace.
pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Vec<i64>> {
    loop {
        let rows: Vec<Vec<i64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(-2..=2)).collect()).collect();
        let q: QMat = rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
        if k == 0 || !det(gram(&q)).is_zero() {
            return rows;
        }
    }
}

pub fn subspace(rows: &[Vec<i64>], n: usize) -> Subspace {
    if rows.is_empty() {
        Subspace::zero(n)
    } else {
        Subspace::from_ints(rows, n).unwrap()
    }
}

pub fn rat_rows(rows: &[Vec<i64>]) -> QMat {
    rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
}
