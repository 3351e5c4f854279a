//! Laplace spectra of flat tori `𝓔/Λ` in the adiabatic limit of the metrics
//! `g_ε = g_F + ε^{−2} g_H`.
//!
//! Eigenvalues are `λ_k = 4π²(|k_F|² + ε²|k_H|²)` for `k ∈ Λ*`, where
//! `k = k_F + k_H` with `k_F ∈ F* = g(F)` and `k_H ∈ H* = F^⊥` (the
//! annihilator of `F`), and norms are taken in `g^{−1}`. Spectral parameters
//! are given as `μ = λ/4π²`, which keeps them exact.

use std::f64::consts::PI;

use num_traits::Zero;

use crate::asymptotics::{self, LeadingTerm};
use crate::counting::{self, CountOptions, CountResult};
use crate::domains::{unit_ball_volume, Domain};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_short, point_budget, Lattice};
use crate::linalg::{self, FMatrix};
use crate::scalar::{rational, Rational, Scalar};
use crate::splitter::{self, SplitData};
use crate::subspace::Subspace;

#[derive(Clone, Debug)]
pub struct FlatTorus {
    pub lattice: Lattice,
    /// Gram matrix of `g` in standard coordinates; `None` is the identity.
    pub metric: Option<Vec<Vec<Rational>>>,
    pub f: Subspace,
    metric_f64: FMatrix,
    metric_inv_f64: FMatrix,
    /// Basis of `Λ ∩ F` in `Λ` coordinates.
    lattice_f: Vec<Vec<i64>>,
    /// `Λ*` carried into Euclidean coordinates by `k ↦ Lᵀk`, `LLᵀ = g^{−1}`,
    /// with its decomposition.
    split: SplitData,
}

fn identity_f64(n: usize) -> FMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Basis of `Λ ∩ F` in `Λ` coordinates.
fn lattice_in_subspace(lattice: &Lattice, f: &Subspace) -> Result<Vec<Vec<i64>>> {
    let h = f.complement()?;
    let nmat = lattice
        .basis()
        .iter()
        .map(|b| h.rows().iter().map(|hk| crate::scalar::dot(b, hk)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::UnsupportedScalarKind(e.to_string()))?;
    linalg::to_i64_rows(&splitter::integer_relations(&nmat)?)
}

impl FlatTorus {
    pub fn new(lattice: Lattice, metric: Option<Vec<Vec<Rational>>>, f: Subspace) -> Result<Self> {
        let n = lattice.dim();
        if f.ambient() != n {
            return Err(Error::InvalidDims(format!("foliation lives in R^{}, torus in R^{n}", f.ambient())));
        }
        let metric_f64 = match &metric {
            Some(g) => {
                if g.len() != n || g.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidDims("metric must be n×n".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        if g[i][j] != g[j][i] {
                            return Err(Error::InvalidDims("metric must be symmetric".into()));
                        }
                    }
                }
                g.iter().map(|r| r.iter().map(rational::to_f64).collect()).collect()
            }
            None => identity_f64(n),
        };
        if linalg::sym_eigenvalues(&metric_f64).first().is_none_or(|&e| e <= 0.0) {
            return Err(Error::NonPositiveParameter("metric eigenvalues".into()));
        }
        let metric_inv_f64 = linalg::finverse(&metric_f64)?;
        let lattice_f = lattice_in_subspace(&lattice, &f)?;
        let dual = lattice.dual()?;
        let split = if metric.is_none() {
            splitter::split(&dual, &f)?
        } else {
            // Γ = Λ*·L and F' = Lᵀ g F. The dual basis of Γ is b_i·L^{−T},
            // and Σ c_i b_i L^{−T} ∈ F' iff Σ c_i b_i ∈ F, so Γ_F comes from
            // Λ ∩ F exactly.
            let l = linalg::cholesky(&metric_inv_f64)?;
            let to_exact = |m: FMatrix| -> Result<Vec<Vec<Scalar>>> {
                m.into_iter()
                    .map(|r| r.into_iter().map(|x| rational::from_f64(x).map(Scalar::Rat)).collect())
                    .collect()
            };
            let gamma = Lattice::new(to_exact(linalg::fmat_mul(dual.basis_f64(), &l))?)?;
            let lt = linalg::transpose(&l);
            let gf: FMatrix = f
                .rows_f64()
                .iter()
                .map(|row| linalg::fmat_vec(&lt, &linalg::fmat_vec(&metric_f64, row)))
                .collect();
            let f_prime = Subspace::new(to_exact(gf)?, n)?;
            splitter::split_with_gamma_f(&gamma, &f_prime, lattice_f.clone())?
        };
        Ok(Self { lattice, metric, f, metric_f64, metric_inv_f64, lattice_f, split })
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// Decomposition of the dual lattice used for counting.
    pub fn split(&self) -> &SplitData {
        &self.split
    }

    /// Rank of `Λ ∩ F`.
    pub fn r(&self) -> usize {
        self.lattice_f.len()
    }

    /// `(|k_F|², |k_H|²)` in `g^{−1}` for the dual vector with coefficients
    /// `m` on the dual basis.
    pub fn components(&self, m: &[i64]) -> Result<(f64, f64)> {
        let dual = self.lattice.dual()?;
        let k = dual.point(m);
        // k = g·f + h with f = Σ a_j e_j ∈ F and h ⊥ F: (E g Eᵀ) a = E k.
        let e = self.f.frame();
        if e.is_empty() {
            return Ok((0.0, linalg::fdot(&k, &linalg::fmat_vec(&self.metric_inv_f64, &k))));
        }
        let ege: FMatrix = e
            .iter()
            .map(|x| e.iter().map(|y| linalg::fdot(x, &linalg::fmat_vec(&self.metric_f64, y))).collect())
            .collect();
        let rhs: Vec<f64> = e.iter().map(|x| linalg::fdot(x, &k)).collect();
        let a = linalg::fmat_vec(&linalg::finverse(&ege)?, &rhs);
        let kf_norm = linalg::fdot(&a, &linalg::fmat_vec(&ege, &a));
        let f = linalg::fvec_mat(&a, e);
        let gf = linalg::fmat_vec(&self.metric_f64, &f);
        let h: Vec<f64> = k.iter().zip(&gf).map(|(x, y)| x - y).collect();
        let kh_norm = linalg::fdot(&h, &linalg::fmat_vec(&self.metric_inv_f64, &h));
        Ok((kf_norm, kh_norm))
    }

    /// `λ_k = 4π²(|k_F|² + ε²|k_H|²)`.
    pub fn eigenvalue(&self, m: &[i64], eps: f64) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(Error::NonPositiveParameter("epsilon".into()));
        }
        let (a, b) = self.components(m)?;
        Ok(4.0 * PI * PI * (a + eps * eps * b))
    }

    /// Exact `λ_k/4π²` when the torus, metric and foliation are rational.
    pub fn eigenvalue_over_4pi2_exact(&self, m: &[i64], eps: &Rational) -> Option<Rational> {
        let dual = self.lattice.dual().ok()?;
        let k: Vec<Rational> = dual.point_exact(m).ok()?.iter().map(|x| x.as_rational().cloned()).collect::<Option<_>>()?;
        let n = k.len();
        let g: Vec<Vec<Rational>> = match &self.metric {
            Some(g) => g.clone(),
            None => (0..n)
                .map(|i| (0..n).map(|j| Rational::from_integer(i64::from(i == j).into())).collect())
                .collect(),
        };
        let rows: Vec<Vec<Rational>> = self
            .f
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>())
            .collect::<Option<_>>()?;
        let mv = |m: &Vec<Vec<Rational>>, v: &[Rational]| -> Vec<Rational> {
            m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
        };
        let dot = |a: &[Rational], b: &[Rational]| -> Rational { a.iter().zip(b).map(|(x, y)| x * y).sum() };
        let ginv = linalg::inverse(&g.iter().map(|r| r.iter().cloned().map(Scalar::Rat).collect()).collect::<Vec<_>>())
            .ok()?
            .iter()
            .map(|r| r.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        let (kf, f) = if rows.is_empty() {
            (Rational::zero(), vec![Rational::zero(); n])
        } else {
            let grows: Vec<Vec<Rational>> = rows.iter().map(|r| mv(&g, r)).collect();
            let m2: Vec<Vec<Scalar>> =
                rows.iter().map(|x| grows.iter().map(|y| Scalar::Rat(dot(x, y))).collect()).collect();
            let inv = linalg::inverse(&m2).ok()?;
            let rhs: Vec<Rational> = rows.iter().map(|x| dot(x, &k)).collect();
            let a: Vec<Rational> = inv
                .iter()
                .map(|r| r.iter().zip(&rhs).map(|(x, y)| x.as_rational().unwrap() * y).sum())
                .collect();
            let f: Vec<Rational> = (0..n).map(|j| a.iter().zip(&rows).map(|(c, r)| c * &r[j]).sum()).collect();
            (dot(&f, &mv(&g, &f)), f)
        };
        let gf = mv(&g, &f);
        let h: Vec<Rational> = k.iter().zip(&gf).map(|(x, y)| x - y).collect();
        let kh = dot(&h, &mv(&ginv, &h));
        Some(kf + eps * eps * kh)
    }

    /// `N_ε(4π²μ) = #{k ∈ Λ* : λ_k < 4π²μ}`, as the count of the dual
    /// lattice in `T_ε(B_{√μ})`.
    pub fn counting_function(&self, mu: &Rational, eps: &Rational, opts: &CountOptions) -> Result<CountResult> {
        if *mu <= Rational::zero() {
            return Err(Error::NonPositiveParameter("lambda".into()));
        }
        let ball = Domain::Ball(crate::domains::Ball::new(vec![Scalar::zero(); self.dim()], mu.clone())?);
        counting::count_sliced(&self.split, &ball, eps, opts)
    }

    /// Direct count over a coefficient box of `Λ*` using [`Self::eigenvalue`],
    /// with exact comparison near the threshold when available.
    pub fn counting_function_direct(&self, mu: &Rational, eps: &Rational, tol: f64) -> Result<CountResult> {
        let start = std::time::Instant::now();
        let n = self.dim();
        let e = rational::to_f64(eps);
        let muf = rational::to_f64(mu);
        // |k|²_{g⁻¹} ≤ |k_F|² + |k_H|² < μ(1 + ε^{−2}) and m_i = (k, b_i).
        let radius = (muf * (1.0 + 1.0 / (e * e))).sqrt();
        let bounds: Vec<i64> = self
            .lattice
            .basis_f64()
            .iter()
            .map(|b| (radius * linalg::fdot(b, &linalg::fmat_vec(&self.metric_f64, b)).sqrt() * (1.0 + 1e-9)).floor() as i64 + 1)
            .collect();
        let estimate: f64 = bounds.iter().map(|&k| (2 * k + 1) as f64).product();
        let budget = point_budget();
        if estimate > budget as f64 {
            return Err(Error::BudgetExceeded { estimate, budget });
        }
        let (mut certain, mut hits, mut candidates) = (0u64, 0u64, 0u64);
        let mut m: Vec<i64> = bounds.iter().map(|k| -k).collect();
        loop {
            candidates += 1;
            let (a, b) = self.components(&m)?;
            let v = a + e * e * b;
            if v < muf * (1.0 - tol) {
                certain += 1;
            } else if v <= muf * (1.0 + tol) {
                match self.eigenvalue_over_4pi2_exact(&m, eps) {
                    Some(x) if x < *mu => certain += 1,
                    Some(_) => {}
                    None => hits += 1,
                }
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(CountResult {
                        certain,
                        boundary_hits: hits,
                        method: counting::Method::Naive,
                        descriptor: format!("eps={}", rational::format_rational(eps)),
                        candidates,
                        slices: 0,
                        points: Vec::new(),
                        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                    });
                }
                i -= 1;
                if m[i] < bounds[i] {
                    m[i] += 1;
                    break;
                }
                m[i] = -bounds[i];
            }
        }
    }

    /// `ε^{−q} ω_{n−r} vol(𝓔/Λ)/vol(V/Λ∩F) · Σ_{k ∈ (Λ∩F)*, |k|² < μ} (μ − |k|²)^{(n−r)/2}`,
    /// with volumes and norms taken in `g`.
    pub fn leading_term_spectral(&self, mu: f64, eps: f64) -> Result<f64> {
        if !(mu > 0.0) || !(eps > 0.0) {
            return Err(Error::NonPositiveParameter("lambda and epsilon".into()));
        }
        let n = self.dim();
        let r = self.r();
        let q = n - self.f.dim();
        let b = self.lattice.basis_f64();
        let gram_g = |rows: &FMatrix| -> FMatrix {
            rows.iter()
                .map(|x| rows.iter().map(|y| linalg::fdot(x, &linalg::fmat_vec(&self.metric_f64, y))).collect())
                .collect()
        };
        let vol_torus = linalg::fdet(&gram_g(b)).abs().sqrt();
        let lf: FMatrix = self.lattice_f.iter().map(|c| self.lattice.point(c)).collect();
        let m = gram_g(&lf);
        let (vol_v, sum) = if r == 0 {
            (1.0, mu.powf(n as f64 / 2.0))
        } else {
            let minv = linalg::finverse(&m)?;
            let mut terms = vec![mu.powf((n - r) as f64 / 2.0)];
            let ex = (n - r) as f64 / 2.0;
            enumerate_short(&minv, mu, point_budget(), |_, k2| {
                if k2 < mu {
                    terms.push((mu - k2).powf(ex));
                }
            })?;
            terms.sort_by(f64::total_cmp);
            (linalg::fdet(&m).abs().sqrt(), terms.iter().sum())
        };
        Ok(eps.powi(-(q as i32)) * unit_ball_volume(n - r) * vol_torus / vol_v * sum)
    }

    /// The generic slice-formula leading term on the dual data.
    pub fn leading_term_generic(&self, mu: &Rational, eps: f64) -> Result<LeadingTerm> {
        let ball = Domain::Ball(crate::domains::Ball::new(vec![Scalar::zero(); self.dim()], mu.clone())?);
        asymptotics::leading_term(&self.split, &ball, eps)
    }
}

/// `S(ρ, 𝐤; d, k) = ω_ℓ Σ_{γ ∈ Z^k, |γ−𝐤| < ρ} (ρ² − |γ−𝐤|²)^{ℓ/2}`, `ℓ = d − k`.
pub fn partial_density_of_states(rho: f64, kvec: &[f64], d: usize, k: usize) -> Result<f64> {
    if k == 0 || k >= d {
        return Err(Error::InvalidDims(format!("need 0 < k < d, got k = {k}, d = {d}")));
    }
    if kvec.len() != k {
        return Err(Error::InvalidDims(format!("shift has {} entries, expected {k}", kvec.len())));
    }
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::NonPositiveParameter("rho".into()));
    }
    let ell = (d - k) as f64;
    let lo: Vec<i64> = kvec.iter().map(|c| (c - rho).ceil() as i64).collect();
    let hi: Vec<i64> = kvec.iter().map(|c| (c + rho).floor() as i64).collect();
    let estimate: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1).max(0) as f64).product();
    let budget = point_budget();
    if estimate > budget as f64 {
        return Err(Error::BudgetExceeded { estimate, budget });
    }
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Ok(0.0);
    }
    let rho2 = rho * rho;
    let mut terms = Vec::new();
    let mut g = lo.clone();
    loop {
        let d2: f64 = g.iter().zip(kvec).map(|(a, c)| (*a as f64 - c).powi(2)).sum();
        if d2 < rho2 {
            terms.push((rho2 - d2).powf(ell / 2.0));
        }
        let mut i = k;
        loop {
            if i == 0 {
                terms.sort_by(f64::total_cmp);
                return Ok(unit_ball_volume(d - k) * terms.iter().sum::<f64>());
            }
            i -= 1;
            if g[i] < hi[i] {
                g[i] += 1;
                break;
            }
            g[i] = lo[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use crate::scalar::{rat, FieldElement};

    fn axis_torus() -> FlatTorus {
        FlatTorus::new(Lattice::integer(2), None, Subspace::axes(2, &[0]).unwrap()).unwrap()
    }

    #[test]
    fn eigenvalue_examples() {
        let t = axis_torus();
        let four_pi2 = 4.0 * PI * PI;
        assert!((t.eigenvalue(&[0, 1], 0.1).unwrap() - four_pi2 * 0.01).abs() < 1e-12);
        assert!((t.eigenvalue(&[1, 0], 0.3).unwrap() - four_pi2).abs() < 1e-12);
        assert_eq!(t.eigenvalue(&[0, 0], 0.5).unwrap(), 0.0);
    }

    #[test]
    fn axis_counting_closed_form() {
        let t = axis_torus();
        let opts = CountOptions::default();
        let c = t.counting_function(&rat(1, 1), &rat(1, 10), &opts).unwrap();
        assert_eq!((c.certain, c.boundary_hits), (19, 0));
        let c = t.counting_function(&rat(1, 1), &rat(1, 1), &opts).unwrap();
        assert_eq!(c.certain, 1);
        assert!((t.leading_term_spectral(1.0, 0.1).unwrap() - 20.0).abs() < 1e-12);
        let g = t.leading_term_generic(&rat(1, 1), 0.1).unwrap().value;
        assert!((g - 20.0).abs() < 1e-12);
    }

    #[test]
    fn irrational_foliation_paths_agree() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let s2 = Scalar::embedded(FieldElement::generator(k), 0).unwrap();
        let f = Subspace::new(vec![vec![Scalar::one(), s2]], 2).unwrap();
        let t = FlatTorus::new(Lattice::integer(2), None, f).unwrap();
        let opts = CountOptions::default();
        let a = t.counting_function(&rat(1, 1), &rat(1, 8), &opts).unwrap();
        let b = t.counting_function_direct(&rat(1, 1), &rat(1, 8), 1e-9).unwrap();
        assert!(a.same_count(&b), "{a:?} {b:?}");
        assert!((t.leading_term_spectral(1.0, 0.125).unwrap() - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn metric_torus_paths_agree() {
        let g = vec![vec![rat(2, 1), rat(1, 2)], vec![rat(1, 2), rat(1, 1)]];
        let t = FlatTorus::new(Lattice::from_ints(&[vec![1, 0], vec![1, 2]]).unwrap(), Some(g), Subspace::from_ints(&[vec![1, 1]], 2).unwrap())
            .unwrap();
        assert_eq!(t.r(), 1);
        let lt = t.leading_term_spectral(3.0, 0.25).unwrap();
        let gen = t.leading_term_generic(&rat(3, 1), 0.25).unwrap().value;
        assert!((lt - gen).abs() <= 1e-9 * lt);
        let a = t.counting_function(&rat(7, 3), &rat(1, 5), &CountOptions::default()).unwrap();
        let b = t.counting_function_direct(&rat(7, 3), &rat(1, 5), 1e-9).unwrap();
        assert!(a.same_count(&b), "{a:?} {b:?}");
    }

    #[test]
    fn pdos_examples() {
        assert!((partial_density_of_states(1.0, &[0.0], 2, 1).unwrap() - 2.0).abs() < 1e-15);
        let oracle = 2.0 * (2.5 + 2.0 * 5.25f64.sqrt() + 2.0 * 1.5);
        let v = partial_density_of_states(2.5, &[0.0], 2, 1).unwrap();
        assert!((v - oracle).abs() < 1e-12 && (v - 20.16515).abs() < 1e-5);
        let big = partial_density_of_states(50.0, &[0.0], 2, 1).unwrap() / (PI * 2500.0);
        assert!((big - 1.0).abs() < 0.02);
        assert!(partial_density_of_states(1.0, &[0.0], 2, 2).is_err());
    }
}
