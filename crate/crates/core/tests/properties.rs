mod common;

use latgeo::asymptotics;
use latgeo::counting::{self, CountOptions};
use latgeo::domains::{AnisoMap, Domain};
use latgeo::lattice::Lattice;
use latgeo::numberfield::field::field_for_i64;
use latgeo::scalar::{rat, FieldElement, Rational, Scalar};
use latgeo::spectral::partial_density_of_states;
use latgeo::splitter;
use latgeo::subspace::Subspace;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Scalar {
    Scalar::Rat(rat(n, d))
}

fn elem(c: &[(i64, i64)]) -> Scalar {
    let k = field_for_i64(&[-2, 0, 1]).unwrap();
    let coords = c.iter().map(|&(n, d)| rat(n, d)).collect();
    Scalar::embedded(FieldElement::new(k, coords).unwrap(), 0).unwrap()
}

fn coords() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-20i64..=20, 1i64..=6), 2)
}

fn line(dx: i64, dy: i64) -> Subspace {
    Subspace::from_ints(&[vec![dx, dy]], 2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scalar_field_axioms(a in coords(), b in coords(), c in coords()) {
        let (x, y, z) = (elem(&a), elem(&b), elem(&c));
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        let lhs = x.mul(&y.add(&z).unwrap()).unwrap();
        let rhs = x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(x.sub(&x).unwrap().is_zero());
        if !x.is_zero() {
            prop_assert_eq!(x.div(&x).unwrap(), Scalar::one());
        }
    }

    #[test]
    fn lattice_translation_invariance(
        cx in -4i64..=4, cy in -4i64..=4, r in 2i64..=8,
        vx in -3i64..=3, vy in -3i64..=3, k in 0u32..=3,
        dir in (-2i64..=2, -2i64..=2).prop_filter("nonzero", |d| *d != (0, 0)),
    ) {
        let gamma = Lattice::integer(2);
        let domain = Domain::ball(vec![q(cx, 4), q(cy, 4)], rat(r, 4)).unwrap();
        let eps = Rational::new(1.into(), (1i64 << (2 * k)).into());
        let map = AnisoMap::new(&line(dir.0, dir.1), eps).unwrap();
        let opts = CountOptions::default();
        let base = counting::count_naive(&gamma, &domain, &map, &[Scalar::zero(), Scalar::zero()], &opts).unwrap();
        let shifted = counting::count_naive(&gamma, &domain, &map, &[q(vx, 1), q(vy, 1)], &opts).unwrap();
        prop_assert!(base.same_count(&shifted));
    }

    #[test]
    fn counts_monotone_under_erode_dilate(
        hx in 2i64..=8, hy in 2i64..=8, delta in 1i64..=3, k in 0u32..=3,
        dir in (-2i64..=2, -2i64..=2).prop_filter("nonzero", |d| *d != (0, 0)),
        is_ball in any::<bool>(),
    ) {
        let domain = if is_ball {
            Domain::ball(vec![q(1, 3), q(0, 1)], rat(hx, 2)).unwrap()
        } else {
            Domain::axis_box(vec![q(1, 3), q(0, 1)], vec![q(hx, 2), q(hy, 2)]).unwrap()
        };
        let (inner, outer) = domain.erode_dilate(&rat(delta, 8)).unwrap();
        let sd = splitter::split(&Lattice::integer(2), &line(dir.0, dir.1)).unwrap();
        let eps = Rational::new(1.into(), (1i64 << (2 * k)).into());
        let opts = CountOptions::default();
        let zero = [Scalar::zero(), Scalar::zero()];
        let c = |d: &Domain| counting::count(&sd, d, &eps, &zero, &opts).unwrap().interval();
        let (a, b, z) = (c(&inner), c(&domain), c(&outer));
        prop_assert!(a.0 <= b.1 && b.0 <= z.1, "{:?} {:?} {:?}", a, b, z);
    }

    #[test]
    fn leading_term_scales_like_eps_power(
        r in 1i64..=8, k in 1i32..=6,
        dir in (-2i64..=2, -2i64..=2).prop_filter("nonzero", |d| *d != (0, 0)),
    ) {
        let sd = splitter::split(&Lattice::integer(2), &line(dir.0, dir.1)).unwrap();
        let domain = Domain::ball(vec![Scalar::zero(), Scalar::zero()], rat(r, 2)).unwrap();
        let e = 2f64.powi(-k);
        let a = asymptotics::leading_term(&sd, &domain, e).unwrap().value;
        let b = asymptotics::leading_term(&sd, &domain, e / 2.0).unwrap().value;
        // q = 1 here, so halving ε doubles the leading term.
        prop_assert!((b - 2.0 * a).abs() <= 1e-12 * b);
    }

    #[test]
    fn pdos_is_monotone_in_rho(rho in 0.0f64..6.0, step in 0.0f64..2.0, k in -1.0f64..1.0) {
        let a = partial_density_of_states(rho, &[k], 3, 1).unwrap();
        let b = partial_density_of_states(rho + step, &[k], 3, 1).unwrap();
        prop_assert!(a <= b + 1e-12);
    }
}

#[test]
fn sliced_count_matches_brute_force_on_skew_lattice() {
    // Γ spanned by (1, 0) and (1/2, 3/2); F = span(1, 1); S the disk of radius 3/2.
    let b = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 2), rat(3, 2)]];
    let sd = splitter::split(&common::lattice(&b), &line(1, 1)).unwrap();
    let domain = Domain::ball(vec![Scalar::zero(), Scalar::zero()], rat(3, 2)).unwrap();
    let eps = rat(1, 8);
    let got = counting::count_sliced(&sd, &domain, &eps, &CountOptions::default()).unwrap();
    // Oracle: x = m·B, y = T_ε^{-1} x = x_F + ε x_H, inside iff |y|² < 9/4.
    let e = &eps;
    let mut want = 0;
    for m0 in -40i64..=40 {
        for m1 in -40i64..=40 {
            let x = common::combine(&[m0, m1], &b);
            let half = rat(1, 2);
            let along = (&x[0] + &x[1]) * &half;
            let across = (&x[0] - &x[1]) * &half;
            let (f, h) = ([along.clone(), along], [across.clone(), -across]);
            let y: Vec<Rational> = (0..2).map(|i| &f[i] + e * &h[i]).collect();
            if common::dot(&y, &y) < rat(9, 4) {
                want += 1;
            }
        }
    }
    assert_eq!((got.certain, got.boundary_hits), (want, 0));
}
