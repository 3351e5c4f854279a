//! The decomposition behind the slice formula: `Γ_F = Γ* ∩ F`, its span `V`,
//! `Γ^⊥ = Γ ∩ V^⊥`, the dual `Γ_F*` inside `V`, and one lattice point of `Γ`
//! over each point of `Γ_F*`.
//!
//! Everything is carried in integer coordinates. A point of `Γ` is an integer
//! vector `m` (coefficients on the basis of `Γ`), a point of `Γ*` is an
//! integer vector on the dual basis. The rows of `C` (the generators of `Γ_F`
//! in dual coordinates) turn `m` into its slice index `C·m ∈ Z^r`: the point
//! lies on `P_{γ*} = γ* + V^⊥` with `γ* = Σ (C·m)_j ℓ*_j`, where `ℓ*` is the
//! basis of `Γ_F*` dual to the generators.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::{enumerate_short, point_budget, Covolume, Lattice};
use crate::linalg::{self, FMatrix, IMatrix, Matrix};
use crate::numberfield::field::SlotKind;
use crate::scalar::{self, FieldElement, Rational, Scalar};
use crate::subspace::Subspace;

#[derive(Clone, Debug)]
pub struct SplitData {
    pub gamma: Lattice,
    pub f: Subspace,
    pub h: Subspace,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub r: usize,
    /// Generators of `Γ_F` in dual-basis coordinates (`r × n`).
    pub gen_coeffs: Vec<Vec<i64>>,
    /// Generators of `Γ_F` as exact vectors, when representable.
    pub gens_exact: Option<Matrix>,
    pub gens: FMatrix,
    /// Orthonormal frames of `V` and `V^⊥`.
    pub v_frame: FMatrix,
    pub v_perp_frame: FMatrix,
    /// Basis of `Γ^⊥` in `Γ` coordinates and embedded.
    pub perp_coeffs: Vec<Vec<i64>>,
    pub perp: FMatrix,
    /// Basis `ℓ*` of `Γ_F*`.
    pub slice_dual: FMatrix,
    pub slice_dual_exact: Option<Matrix>,
    /// `reps[j]` lies over `ℓ*_j`.
    pub reps: Vec<Vec<i64>>,
    pub perp_covolume: Covolume,
    pub gamma_f_covolume: Covolume,
    /// Relative residual of `vol(V^⊥/Γ^⊥) = vol(E/Γ)·vol(V/Γ_F)`; zero when
    /// the identity was checked exactly.
    pub covolume_residual: f64,
}

#[derive(Clone, Debug)]
pub struct IntersectionCertificate {
    pub radius: f64,
    pub points_checked: usize,
    /// Smallest `dist(x, F ∩ V^⊥)/|x|` over the points checked.
    pub min_ratio: f64,
    /// Smallest absolute distance `dist(x, F ∩ V^⊥)`.
    pub min_distance: f64,
    pub violated: bool,
    /// Dimension of `F ∩ V^⊥`.
    pub intersection_dim: usize,
}

fn unsupported(e: Error) -> Error {
    match e {
        Error::FieldMismatch(m) => Error::UnsupportedScalarKind(m),
        other => other,
    }
}

/// Basis of `{c ∈ Z^n : Σ_i c_i·N[i][k] = 0 for every column k}`.
///
/// A column whose entries are values of field elements at one real embedding
/// vanishes iff the combined element does, so it expands into one rational
/// equation per power-basis coordinate. A complex embedding contributes its
/// real and imaginary columns jointly.
pub fn integer_relations(nmat: &Matrix) -> Result<IMatrix> {
    let n = nmat.len();
    let q = nmat.first().map_or(0, Vec::len);
    let mut eqs: Vec<Vec<Rational>> = Vec::new();
    let mut pairs: HashMap<(Vec<BigInt>, usize), (Option<usize>, Option<usize>)> = HashMap::new();
    for k in 0..q {
        let col: Vec<&Scalar> = nmat.iter().map(|r| &r[k]).collect();
        let Some(first) = col.iter().find_map(|x| match x {
            Scalar::Alg(v) => Some(v.clone()),
            Scalar::Rat(_) => None,
        }) else {
            eqs.push(col.iter().map(|x| x.as_rational().unwrap().clone()).collect());
            continue;
        };
        for x in &col {
            if let Scalar::Alg(v) = x {
                if !v.elem.same_field(&first.elem) || v.slot != first.slot {
                    return Err(Error::UnsupportedScalarKind(
                        "a constraint mixes embedding coordinates".into(),
                    ));
                }
            }
        }
        let field = first.elem.field().clone();
        match field.slot_kind(first.slot)? {
            SlotKind::Real(_) => {
                let elems: Vec<FieldElement> = col.iter().map(|x| element_of(x, &field)).collect();
                push_coordinate_equations(&mut eqs, &elems);
            }
            SlotKind::ComplexRe(j) => {
                pairs.entry((field.minpoly().to_vec(), j)).or_default().0 = Some(k);
            }
            SlotKind::ComplexIm(j) => {
                pairs.entry((field.minpoly().to_vec(), j)).or_default().1 = Some(k);
            }
        }
    }
    let mut keys: Vec<_> = pairs.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let (Some(kr), Some(ki)) = pairs[&key] else {
            return Err(Error::UnsupportedScalarKind(
                "only one of the real and imaginary parts of a complex embedding is constrained".into(),
            ));
        };
        let field = nmat
            .iter()
            .find_map(|r| match &r[kr] {
                Scalar::Alg(v) => Some(v.elem.field().clone()),
                _ => None,
            })
            .expect("column holds a field value");
        let alphas: Vec<FieldElement> = nmat.iter().map(|r| element_of(&r[kr], &field)).collect();
        // The imaginary column must read the same elements up to one
        // rational factor.
        let mut lambda: Option<Rational> = None;
        for (row, a) in nmat.iter().zip(&alphas) {
            match &row[ki] {
                Scalar::Rat(z) if z.is_zero() => {
                    if a.as_rational().is_none() {
                        return Err(Error::UnsupportedScalarKind("unpaired complex coordinates".into()));
                    }
                }
                Scalar::Rat(_) => {
                    return Err(Error::UnsupportedScalarKind("unpaired complex coordinates".into()));
                }
                Scalar::Alg(v) => {
                    let m = a
                        .coords()
                        .iter()
                        .position(|c| !c.is_zero())
                        .ok_or_else(|| Error::UnsupportedScalarKind("unpaired complex coordinates".into()))?;
                    let l = &v.elem.coords()[m] / &a.coords()[m];
                    if a.scale(&l) != v.elem || lambda.as_ref().is_some_and(|x| *x != l) {
                        return Err(Error::UnsupportedScalarKind("unpaired complex coordinates".into()));
                    }
                    lambda = Some(l);
                }
            }
        }
        push_coordinate_equations(&mut eqs, &alphas);
    }
    if eqs.is_empty() {
        return Ok((0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect());
    }
    let m: Vec<Vec<Rational>> = (0..n).map(|i| eqs.iter().map(|e| e[i].clone()).collect()).collect();
    Ok(linalg::integer_left_kernel(&linalg::clear_column_denominators(&m)))
}

fn element_of(x: &Scalar, field: &std::sync::Arc<crate::numberfield::field::NumberField>) -> FieldElement {
    match x {
        Scalar::Rat(q) => FieldElement::from_rational(field.clone(), q.clone()),
        Scalar::Alg(v) => v.elem.clone(),
    }
}

fn push_coordinate_equations(eqs: &mut Vec<Vec<Rational>>, elems: &[FieldElement]) {
    let d = elems.first().map_or(0, |e| e.coords().len());
    for m in 0..d {
        let e: Vec<Rational> = elems.iter().map(|x| x.coords()[m].clone()).collect();
        if e.iter().any(|c| !c.is_zero()) {
            eqs.push(e);
        }
    }
}

/// Generators of `Γ* ∩ F`, as coefficient rows on the dual basis.
pub fn gamma_f(gamma: &Lattice, f: &Subspace) -> Result<Vec<Vec<i64>>> {
    let h = f.complement()?;
    gamma_f_with(gamma, &h)
}

fn gamma_f_with(gamma: &Lattice, h: &Subspace) -> Result<Vec<Vec<i64>>> {
    let dual = gamma.dual().map_err(unsupported)?;
    // N[i][k] = (d_i, h_k); a dual vector lies in F iff it is orthogonal to H.
    let nmat: Matrix = dual
        .basis()
        .iter()
        .map(|d| h.rows().iter().map(|hk| scalar::dot(d, hk)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()
        .map_err(unsupported)?;
    linalg::to_i64_rows(&integer_relations(&nmat)?)
}

fn sqrt_cov(sq: Option<Rational>, value: f64) -> Covolume {
    match sq {
        Some(s) => Covolume { value: crate::scalar::rational::to_f64(&s).sqrt(), exact_sq: Some(s) },
        None => Covolume { value, exact_sq: None },
    }
}

fn congruence(c: &[Vec<i64>], g: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let cr: Vec<Vec<Rational>> = c
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
        .collect();
    let cg: Vec<Vec<Rational>> = cr
        .iter()
        .map(|row| (0..g.len()).map(|j| row.iter().zip(g).map(|(a, gr)| a * &gr[j]).sum()).collect())
        .collect();
    cg.iter()
        .map(|a| cr.iter().map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum()).collect())
        .collect()
}

/// Full decomposition with every internal identity checked.
pub fn split(gamma: &Lattice, f: &Subspace) -> Result<SplitData> {
    let n = gamma.dim();
    if f.ambient() != n {
        return Err(Error::InvalidDims(format!("subspace lives in R^{}, lattice in R^{n}", f.ambient())));
    }
    let h = f.complement()?;
    let c = gamma_f_with(gamma, &h)?;
    split_with(gamma, f, h, c)
}

/// As [`split`], with the generators of `Γ_F` (dual-basis coefficient rows)
/// supplied by the caller. Used when `Γ` is a floating-point image of a
/// lattice whose integer structure is known exactly; the generators are
/// still checked to lie in `F`.
pub fn split_with_gamma_f(gamma: &Lattice, f: &Subspace, c: Vec<Vec<i64>>) -> Result<SplitData> {
    let n = gamma.dim();
    if f.ambient() != n || c.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidDims("subspace or generator rows do not match the lattice".into()));
    }
    let h = f.complement()?;
    split_with(gamma, f, h, c)
}

fn split_with(gamma: &Lattice, f: &Subspace, h: Subspace, c: Vec<Vec<i64>>) -> Result<SplitData> {
    let n = gamma.dim();
    let p = f.dim();
    let r = c.len();
    let dual = gamma.dual().map_err(unsupported)?;
    let dual_f = dual.basis_f64().clone();

    let gens: FMatrix = c.iter().map(|row| combo_f64(row, &dual_f)).collect();
    let gens_exact: Option<Matrix> = c
        .iter()
        .map(|row| scalar::int_combination(row, dual.basis()).ok())
        .collect();
    for g in &gens {
        // Generators must lie in F.
        let res: f64 = h.frame().iter().map(|hk| linalg::fdot(g, hk).abs()).sum();
        if res > 1e-9 * linalg::fnorm(g).max(1.0) {
            return Err(Error::InvariantViolation("Γ_F generator is not in F".into()));
        }
    }

    // Hermite form of Cᵀ: the first r rows of U satisfy C·u_j = e_j, the rest
    // span the integer kernel of C, i.e. Γ^⊥ in Γ coordinates.
    let ct: IMatrix = (0..n).map(|i| c.iter().map(|row| BigInt::from(row[i])).collect()).collect();
    let (hmat, u, rank) = if r == 0 {
        let id: IMatrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        (vec![Vec::new(); n], id, 0)
    } else {
        linalg::hermite_with_transform(&ct)
    };
    if rank != r {
        return Err(Error::InvariantViolation("Γ_F generators are dependent".into()));
    }
    for (i, row) in hmat.iter().take(r).enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { BigInt::one() } else { BigInt::zero() };
            if *x != want {
                // Some slice of Γ_F* would carry no point of Γ.
                return Err(Error::InvariantViolation("Γ_F is not primitive in Γ*".into()));
            }
        }
    }
    let u = linalg::to_i64_rows(&u)?;
    let perp_coeffs = size_reduce(u[r..].to_vec(), gamma);
    let perp: FMatrix = perp_coeffs.iter().map(|k| gamma.point(k)).collect();

    let v_frame = linalg::orthonormal_rows(&gens, 1e-12);
    let v_perp_frame = linalg::orthonormal_complement(&v_frame, n);
    if v_frame.len() != r || v_perp_frame.len() != n - r {
        return Err(Error::InvariantViolation("V and V^⊥ frames have wrong dimensions".into()));
    }

    // Gram matrices, exact where the lattice allows it.
    let g_gamma = gamma.gram_exact();
    let g_dual = dual.gram_exact();
    let perp_gram_exact = g_gamma.as_ref().map(|g| congruence(&perp_coeffs, g));
    let gen_gram_exact = g_dual.as_ref().map(|g| congruence(&c, g));
    let perp_covolume = sqrt_cov(
        perp_gram_exact.clone().map(crate::scalar::poly::rational_det),
        linalg::fdet(&linalg::fgram(&perp)).abs().sqrt(),
    );
    let gamma_f_covolume = sqrt_cov(
        gen_gram_exact.clone().map(crate::scalar::poly::rational_det),
        linalg::fdet(&linalg::fgram(&gens)).abs().sqrt(),
    );

    let cov = gamma.covolume();
    let covolume_residual = match (&perp_covolume.exact_sq, &cov.exact_sq, &gamma_f_covolume.exact_sq) {
        (Some(a), Some(b), Some(g)) => {
            if *a != b * g {
                return Err(Error::InvariantViolation("covolume identity fails exactly".into()));
            }
            0.0
        }
        _ => {
            let lhs = perp_covolume.value;
            let rhs = cov.value * gamma_f_covolume.value;
            let rel = (lhs - rhs).abs() / rhs;
            if rel > 1e-10 {
                return Err(Error::InvariantViolation(format!("covolume identity residual {rel:.3e}")));
            }
            rel
        }
    };

    // ℓ* = G⁻¹·γ*, exactly when possible.
    let (slice_dual, slice_dual_exact) = if r == 0 {
        (Vec::new(), Some(Vec::new()))
    } else {
        let exact = gens_exact.as_ref().and_then(|ge| {
            let g: Matrix = ge
                .iter()
                .map(|a| ge.iter().map(|b| scalar::dot(a, b)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()
                .ok()?;
            linalg::mat_mul(&linalg::inverse(&g).ok()?, ge).ok()
        });
        let gi = linalg::finverse(&linalg::fgram(&gens))?;
        let fl = match &exact {
            Some(e) => linalg::to_f64_matrix(e),
            None => linalg::fmat_mul(&gi, &gens),
        };
        (fl, exact)
    };

    let mut sd = SplitData {
        gamma: gamma.clone(),
        f: f.clone(),
        h,
        n,
        p,
        q: n - p,
        r,
        gen_coeffs: c,
        gens_exact,
        gens,
        v_frame,
        v_perp_frame,
        perp_coeffs,
        perp,
        slice_dual,
        slice_dual_exact,
        reps: Vec::new(),
        perp_covolume,
        gamma_f_covolume,
        covolume_residual,
    };
    sd.reps = u[..r].iter().map(|rep| sd.reduce_mod_perp(rep)).collect();
    for (j, rep) in sd.reps.iter().enumerate() {
        let idx = sd.slice_index(rep);
        if idx.iter().enumerate().any(|(i, &a)| a != i64::from(i == j)) {
            return Err(Error::InvariantViolation("slice representative is off its slice".into()));
        }
    }
    Ok(sd)
}

/// Pairwise size reduction of a basis given in `Γ` coordinates, so that the
/// enumeration boxes built from it stay small.
fn size_reduce(mut basis: Vec<Vec<i64>>, gamma: &Lattice) -> Vec<Vec<i64>> {
    let k = basis.len();
    for _ in 0..64 {
        let mut changed = false;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let (bi, bj) = (gamma.point(&basis[i]), gamma.point(&basis[j]));
                let mu = linalg::fdot(&bi, &bj) / linalg::fdot(&bj, &bj);
                if mu.abs() > 0.5 + 1e-9 {
                    let t = mu.round() as i64;
                    let bj = basis[j].clone();
                    for (a, b) in basis[i].iter_mut().zip(&bj) {
                        *a -= t * b;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    basis
}

fn combo_f64(coeffs: &[i64], rows: &FMatrix) -> Vec<f64> {
    linalg::fvec_mat(&coeffs.iter().map(|&x| x as f64).collect::<Vec<_>>(), rows)
}

impl SplitData {
    /// Slice index `C·m` of the lattice point with coefficients `m`.
    pub fn slice_index(&self, m: &[i64]) -> Vec<i64> {
        self.gen_coeffs
            .iter()
            .map(|c| c.iter().zip(m).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Point `Σ a_j ℓ*_j` of `Γ_F*`.
    pub fn slice_point(&self, a: &[i64]) -> Vec<f64> {
        if self.r == 0 {
            return vec![0.0; self.n];
        }
        combo_f64(a, &self.slice_dual)
    }

    /// Shifts `m` by a vector of `Γ^⊥` so that its `V^⊥` part is short.
    fn reduce_mod_perp(&self, m: &[i64]) -> Vec<i64> {
        if self.perp.is_empty() {
            return m.to_vec();
        }
        let x = self.gamma.point(m);
        let g = linalg::fgram(&self.perp);
        let Ok(gi) = linalg::finverse(&g) else { return m.to_vec() };
        let rhs: Vec<f64> = self.perp.iter().map(|k| linalg::fdot(k, &x)).collect();
        let t = linalg::fmat_vec(&gi, &rhs);
        let mut out = m.to_vec();
        for (tk, kc) in t.iter().zip(&self.perp_coeffs) {
            let s = tk.round() as i64;
            for (o, k) in out.iter_mut().zip(kc) {
                *o -= s * k;
            }
        }
        out
    }

    /// Lattice point over the slice with index `a`, built additively from the
    /// generator table.
    pub fn representative(&self, a: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; self.n];
        for (aj, rep) in a.iter().zip(&self.reps) {
            for (o, x) in out.iter_mut().zip(rep) {
                *o += aj * x;
            }
        }
        out
    }

    /// Representative over an exact point `γ*` of `Γ_F*`.
    pub fn slice_representative(&self, gamma_star: &[Scalar]) -> Result<Vec<i64>> {
        if gamma_star.len() != self.n {
            return Err(Error::InvalidDims("point has wrong length".into()));
        }
        let mut a = Vec::with_capacity(self.r);
        if let Some(ge) = &self.gens_exact {
            for g in ge {
                // (γ*, generator_j) is the j-th coordinate on ℓ*.
                let v = scalar::dot(gamma_star, g).map_err(unsupported)?;
                let q = v.as_rational().ok_or(Error::NotInDualSliceLattice)?;
                if !q.is_integer() {
                    return Err(Error::NotInDualSliceLattice);
                }
                a.push(q.to_integer().to_i64().ok_or(Error::NotInDualSliceLattice)?);
            }
            // γ* must also lie in V.
            if let Some(sde) = &self.slice_dual_exact {
                let mut back = vec![Scalar::zero(); self.n];
                for (aj, l) in a.iter().zip(sde) {
                    for (b, x) in back.iter_mut().zip(l) {
                        *b = b.add(&x.mul(&Scalar::from(*aj))?)?;
                    }
                }
                if back != gamma_star {
                    return Err(Error::NotInDualSliceLattice);
                }
            }
        } else {
            let x: Vec<f64> = gamma_star.iter().map(Scalar::to_f64).collect();
            for g in &self.gens {
                let v = linalg::fdot(&x, g);
                if (v - v.round()).abs() > 1e-9 {
                    return Err(Error::NotInDualSliceLattice);
                }
                a.push(v.round() as i64);
            }
            let back = self.slice_point(&a);
            if back.iter().zip(&x).any(|(p, q)| (p - q).abs() > 1e-9) {
                return Err(Error::NotInDualSliceLattice);
            }
        }
        Ok(self.representative(&a))
    }

    /// Searches the dual of `Γ^⊥` (inside `V^⊥`) for nonzero points close to
    /// `F ∩ V^⊥`.
    pub fn verify_trivial_intersection(&self, radius: f64) -> Result<IntersectionCertificate> {
        if !(radius > 0.0) {
            return Err(Error::NonPositiveParameter("radius".into()));
        }
        // F ∩ V^⊥ is the part of F orthogonal to V.
        let w: FMatrix = {
            let proj_out_v: FMatrix = self
                .f
                .frame()
                .iter()
                .map(|x| {
                    let mut y = x.clone();
                    for v in &self.v_frame {
                        let c = linalg::fdot(&y, v);
                        for (a, b) in y.iter_mut().zip(v) {
                            *a -= c * b;
                        }
                    }
                    y
                })
                .collect();
            linalg::orthonormal_rows(&proj_out_v, 1e-9)
        };
        if w.is_empty() || self.perp.is_empty() {
            return Ok(IntersectionCertificate {
                radius,
                points_checked: 0,
                min_ratio: 1.0,
                min_distance: f64::INFINITY,
                violated: false,
                intersection_dim: w.len(),
            });
        }
        let g = linalg::fgram(&self.perp);
        let gi = linalg::finverse(&g)?;
        let dual_rows = linalg::fmat_mul(&gi, &self.perp);
        let dgram = linalg::fgram(&dual_rows);
        let mut min_ratio = f64::INFINITY;
        let mut min_distance = f64::INFINITY;
        let mut checked = 0usize;
        enumerate_short(&dgram, radius * radius, point_budget(), |m, _| {
            let x = combo_f64(m, &dual_rows);
            let nx = linalg::fnorm(&x);
            let mut y = x.clone();
            for e in &w {
                let c = linalg::fdot(&x, e);
                for (a, b) in y.iter_mut().zip(e) {
                    *a -= c * b;
                }
            }
            let dist = linalg::fnorm(&y);
            min_ratio = min_ratio.min(dist / nx);
            min_distance = min_distance.min(dist);
            checked += 1;
        })?;
        if checked == 0 {
            min_ratio = 1.0;
        }
        Ok(IntersectionCertificate {
            radius,
            points_checked: checked,
            min_ratio,
            min_distance,
            violated: min_ratio < 1e-10,
            intersection_dim: w.len(),
        })
    }

    /// Orthogonal projection onto `V`.
    pub fn project_v(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for v in &self.v_frame {
            let c = linalg::fdot(x, v);
            for (o, b) in out.iter_mut().zip(v) {
                *o += c * b;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::field::field_for_i64;
    use crate::scalar::rat;

    fn sqrt2_line() -> Subspace {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let s2 = Scalar::embedded(FieldElement::generator(k), 0).unwrap();
        Subspace::new(vec![vec![Scalar::one(), s2]], 2).unwrap()
    }

    #[test]
    fn axis_split() {
        let sd = split(&Lattice::integer(2), &Subspace::axes(2, &[0]).unwrap()).unwrap();
        assert_eq!((sd.n, sd.p, sd.q, sd.r), (2, 1, 1, 1));
        assert_eq!(sd.gen_coeffs, vec![vec![1, 0]]);
        assert_eq!(sd.perp_coeffs.len(), 1);
        assert_eq!(sd.perp_coeffs[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(sd.perp_covolume.exact(), Some(rat(1, 1)));
        let rep = sd.slice_representative(&[Scalar::from(3), Scalar::zero()]).unwrap();
        assert_eq!(rep, vec![3, 0]);
        assert!(sd.verify_trivial_intersection(5.0).unwrap().points_checked == 0);
    }

    #[test]
    fn slope_two_split() {
        let sd = split(&Lattice::integer(2), &Subspace::from_ints(&[vec![1, 2]], 2).unwrap()).unwrap();
        assert_eq!(sd.r, 1);
        assert_eq!(sd.gen_coeffs[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(sd.perp_covolume.exact_sq, Some(rat(5, 1)));
        let k = &sd.perp_coeffs[0];
        assert_eq!(k[0] + 2 * k[1], 0);
        let s = if sd.gen_coeffs[0][0] > 0 { 1 } else { -1 };
        let gs = [Scalar::Rat(rat(s, 5)), Scalar::Rat(rat(2 * s, 5))];
        let rep = sd.slice_representative(&gs).unwrap();
        // Any point with x + 2y = 1 (up to the generator's sign) lies on this slice.
        assert_eq!(rep[0] + 2 * rep[1], 1);
        assert_eq!(
            sd.slice_representative(&[Scalar::Rat(rat(1, 10)), Scalar::Rat(rat(1, 5))]),
            Err(Error::NotInDualSliceLattice)
        );
    }

    #[test]
    fn irrational_line_split() {
        let sd = split(&Lattice::integer(2), &sqrt2_line()).unwrap();
        assert_eq!(sd.r, 0);
        assert_eq!(sd.perp_covolume.exact(), Some(rat(1, 1)));
        let cert = sd.verify_trivial_intersection(10.0).unwrap();
        assert!(!cert.violated);
        // Oracle: scan every dual point (a, b) with a² + b² ≤ 100.
        let (mut dist, mut ratio) = (f64::INFINITY, f64::INFINITY);
        for a in -10i32..=10 {
            for b in -10i32..=10 {
                let nn = f64::from(a * a + b * b);
                if nn == 0.0 || nn > 100.0 {
                    continue;
                }
                let d = (f64::from(a) * 2f64.sqrt() - f64::from(b)).abs() / 3f64.sqrt();
                dist = dist.min(d);
                ratio = ratio.min(d / nn.sqrt());
            }
        }
        assert!((cert.min_distance - dist).abs() < 1e-12);
        assert!((cert.min_ratio - ratio).abs() < 1e-12);
        assert!(cert.min_distance > 0.02);
        assert_eq!(sd.slice_representative(&[Scalar::zero(), Scalar::zero()]).unwrap(), vec![0, 0]);
    }

    #[test]
    fn canonical_lattice_axis_split() {
        let k = field_for_i64(&[-2, 0, 1]).unwrap();
        let g = Lattice::canonical(k, vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]], false).unwrap();
        let sd = split(&g, &Subspace::axes(2, &[0]).unwrap()).unwrap();
        assert_eq!(sd.r, 0);
        assert!((sd.perp_covolume.value - 8f64.sqrt()).abs() < 1e-12);
        assert!(!sd.verify_trivial_intersection(10.0).unwrap().violated);
    }

    #[test]
    fn cube_root_split_uses_paired_columns() {
        let k = field_for_i64(&[-2, 0, 0, 1]).unwrap();
        let one = rat(1, 1);
        let z = rat(0, 1);
        let g = Lattice::canonical(
            k,
            vec![vec![one.clone(), z.clone(), z.clone()], vec![z.clone(), one.clone(), z.clone()], vec![z.clone(), z, one]],
            false,
        )
        .unwrap();
        let sd = split(&g, &Subspace::axes(3, &[0]).unwrap()).unwrap();
        assert_eq!(sd.r, 0);
        assert!(sd.covolume_residual < 1e-12);
        let sd = split(&g, &Subspace::axes(3, &[1, 2]).unwrap()).unwrap();
        assert_eq!(sd.r, 0);
    }
}
