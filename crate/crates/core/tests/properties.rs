//! Algebraic invariants as property tests.

use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use toric_periods::curve::{Curve, CurveConfig, XDivisor};
use toric_periods::eigen::QPoly;
use toric_periods::gf::Gf;
use toric_periods::laurent::LaurentPoly;
use toric_periods::tower::{Automorphism, Level, Tower, TowerElement};

fn curve() -> &'static Curve {
    static C: OnceLock<Curve> = OnceLock::new();
    C.get_or_init(|| Curve::new(&CurveConfig::prime(5, 3, 0, 1, 4)).unwrap())
}

fn element(t: &Tower, seed: u64) -> TowerElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = (0..4).map(|_| curve().ff.random(&mut rng, 1)).collect();
    t.element(Level::K, coords).unwrap()
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn qpoly(cs: &[i64]) -> QPoly {
    QPoly::new(cs.iter().map(|&c| q(c)).collect())
}

fn laurent(cs: &[(i64, i64)]) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for &(n, c) in cs {
        p.add_term(n, q(c));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn extension_fields_satisfy_field_axioms(a in 0u32..25, b in 0u32..25, c in 0u32..25) {
        let k = Gf::of_order(25).unwrap();
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.frobenius(k.mul(a, b)), k.mul(k.frobenius(a), k.frobenius(b)));
        prop_assert_eq!(k.frobenius(k.add(a, b)), k.add(k.frobenius(a), k.frobenius(b)));
        if a != 0 {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn tower_inverse_round_trips(seed in any::<u64>()) {
        let t = Tower::new(curve());
        let a = element(&t, seed);
        prop_assume!(!t.is_zero(&a));
        let prod = t.mul(&a, &t.inv(&a).unwrap()).unwrap();
        prop_assert!(t.is_zero(&t.sub(&prod, &t.one(Level::K)).unwrap()));
    }

    #[test]
    fn norm_is_multiplicative_and_trace_additive(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = Tower::new(curve());
        let (a, b) = (element(&t, s1), element(&t, s2));
        for level in [Level::K1, Level::K3, Level::F] {
            let lhs = t.norm(&t.mul(&a, &b).unwrap(), level).unwrap();
            let rhs = t.mul(&t.norm(&a, level).unwrap(), &t.norm(&b, level).unwrap()).unwrap();
            prop_assert!(t.is_zero(&t.sub(&lhs, &rhs).unwrap()));
            let lhs = t.trace(&t.add(&a, &b).unwrap(), level).unwrap();
            let rhs = t.add(&t.trace(&a, level).unwrap(), &t.trace(&b, level).unwrap()).unwrap();
            prop_assert!(t.is_zero(&t.sub(&lhs, &rhs).unwrap()));
        }
    }

    #[test]
    fn automorphisms_are_ring_maps(s1 in any::<u64>(), s2 in any::<u64>()) {
        let t = Tower::new(curve());
        let (a, b) = (element(&t, s1), element(&t, s2));
        let ab = t.mul(&a, &b).unwrap();
        for g in [Automorphism::Tau1, Automorphism::Tau2, Automorphism::Tau3] {
            let lhs = t.apply(&ab, g).unwrap();
            let rhs = t.mul(&t.apply(&a, g).unwrap(), &t.apply(&b, g).unwrap()).unwrap();
            prop_assert!(t.is_zero(&t.sub(&lhs, &rhs).unwrap()));
        }
    }

    #[test]
    fn pic_reduction_is_a_homomorphism(i in 0usize..64, j in 0usize..64, n in -3i64..4) {
        let c = curve();
        let pts: Vec<_> = (1..=2).flat_map(|d| c.points_of_degree(d).unwrap()).collect();
        let (p, r) = (pts[i % pts.len()], pts[j % pts.len()]);
        let (dp, dr) = (XDivisor::point(p).scale(n), XDivisor::point(r));
        let lhs = c.pic_reduce(&dp.add(&dr));
        let rhs = c.pic_add(&c.pic_reduce(&dp), &c.pic_reduce(&dr));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn polynomial_division_reconstructs(a in prop::collection::vec(-9i64..10, 1..7), b in prop::collection::vec(-9i64..10, 1..4)) {
        let (a, b) = (qpoly(&a), qpoly(&b));
        prop_assume!(!b.is_zero());
        let (quot, rem) = a.divrem(&b);
        prop_assert!(rem.is_zero() || rem.degree() < b.degree());
        let back = quot.mul(&b);
        let n = back.0.len().max(rem.0.len()).max(a.0.len());
        let get = |p: &QPoly, k: usize| p.0.get(k).cloned().unwrap_or_else(|| q(0));
        for k in 0..n {
            prop_assert_eq!(get(&back, k) + get(&rem, k), get(&a, k));
        }
    }

    #[test]
    fn reflection_is_a_ring_involution(
        a in prop::collection::vec((-4i64..5, -5i64..6), 0..5),
        b in prop::collection::vec((-4i64..5, -5i64..6), 0..5),
    ) {
        let (a, b) = (laurent(&a), laurent(&b));
        prop_assert_eq!(a.reflect().reflect(), a.clone());
        prop_assert_eq!(a.mul(&b).reflect(), a.reflect().mul(&b.reflect()));
        prop_assert!(a.add(&a.reflect()).is_symmetric());
    }
}
