use std::f64::consts::TAU;
use std::sync::Arc;

use gerbecalc::bicomplex::{big_d, cech_delta, dbar, wrap_d, BigradedCochain, GaugePotential, TotalCochain};
use gerbecalc::builders::{build_minus_one_gerbe, build_monopole};
use gerbecalc::cover::Cover;
use gerbecalc::deligne::{charge, gauge_equivalent, validate_cocycle, EQUIVALENCE_TOL, VALIDATION_TOL};
use gerbecalc::io::{datum_from_str, datum_to_string};
use gerbecalc::rng::Lcg64;
use gerbecalc::selfcheck::{random_complex, random_cover};
use gerbecalc::simplicial::{exterior_derivative, integrate, Chain, Cochain, SimplicialComplex};
use proptest::prelude::*;

fn random_setting(seed: u64) -> (Cover, Lcg64) {
    let mut rng = Lcg64::new(seed);
    let (k, tops) = random_complex(&mut rng).unwrap();
    let cover = random_cover(Arc::new(k), &tops, &mut rng).unwrap();
    (cover, rng)
}

fn random_cochain(k: &SimplicialComplex, q: usize, rng: &mut Lcg64) -> Cochain {
    Cochain::from_values(q, (0..k.count(q)).map(|id| (id, rng.uniform(-1.0, 1.0))))
}

fn with_sum(a: &BigradedCochain, b: &BigradedCochain) -> f64 {
    let mut s = a.clone();
    s.add_scaled(b, 1.0);
    s.sup_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let (cover, mut rng) = random_setting(seed);
        let k = cover.complex();
        for q in 0..=k.top_dimension() {
            let c = random_cochain(k, q, &mut rng);
            let dd = exterior_derivative(&exterior_derivative(&c, k).unwrap(), k).unwrap();
            prop_assert!(dd.sup_norm() < 1e-12);
        }
    }

    #[test]
    fn stokes(seed in any::<u64>()) {
        let (cover, mut rng) = random_setting(seed);
        let k = cover.complex();
        for q in 1..=k.top_dimension() {
            let chain = Chain::from_coefficients(q, (0..k.count(q)).map(|id| (id, rng.range(0, 6) as i64 - 3)));
            let w = random_cochain(k, q - 1, &mut rng);
            let lhs = integrate(&w, &chain.boundary(k).unwrap()).unwrap();
            let rhs = integrate(&exterior_derivative(&w, k).unwrap(), &chain).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn bicomplex_identities(seed in any::<u64>()) {
        let (cover, mut rng) = random_setting(seed);
        let top = cover.complex().top_dimension();
        for p in 0..=top {
            for n in 0..=cover.len() {
                let c = BigradedCochain::random(p, n, &cover, &mut rng, 1.0);
                let dc = cech_delta(&c, &cover).unwrap();
                let bc = dbar(&c, &cover).unwrap();
                prop_assert!(cech_delta(&dc, &cover).unwrap().sup_norm() < 1e-12);
                prop_assert!(dbar(&bc, &cover).unwrap().sup_norm() < 1e-12);
                prop_assert!(with_sum(&cech_delta(&bc, &cover).unwrap(), &dbar(&dc, &cover).unwrap()) < 1e-12);
            }
        }
        for degree in 0..=top + 1 {
            let h = TotalCochain::random(degree, &cover, &mut rng, 1.0, &[]);
            prop_assert!(big_d(&big_d(&h, &cover).unwrap(), &cover).unwrap().sup_norm() < 1e-12);
        }
    }

    #[test]
    fn components_are_antisymmetric(seed in any::<u64>()) {
        let (cover, mut rng) = random_setting(seed);
        for t in cover.tuples(2) {
            let c = BigradedCochain::random(0, 2, &cover, &mut rng, 1.0);
            for &id in cover.overlap(&t).unwrap().simplices(0) {
                let forward = c.value_at(&t, id).unwrap();
                let backward = c.value_at(&[t[1], t[0]], id).unwrap();
                prop_assert_eq!(forward, -backward);
            }
        }
    }

    #[test]
    fn wrap_d_ignores_whole_turns(seed in any::<u64>()) {
        let (cover, mut rng) = random_setting(seed);
        let k = cover.complex();
        let whole = cover.overlap(&[]).unwrap();
        let f = Cochain::from_values(0, (0..k.count(0)).map(|id| (id, rng.uniform(-3.0, 3.0))));
        let shifted = Cochain::from_values(0, f.iter().map(|(id, x)| (id, x + TAU * (rng.range(0, 6) as f64 - 3.0))));
        let a = wrap_d(&f, whole, k).unwrap();
        let mut b = wrap_d(&shifted, whole, k).unwrap();
        b.add_scaled(&a, -1.0);
        // residues agree up to the representative at ±π
        prop_assert!(b.iter().all(|(_, v)| v.abs() < 1e-9 || (v.abs() - TAU).abs() < 1e-9));
    }

    #[test]
    fn gauge_transforms_keep_cocycles_and_charge(seed in any::<u64>()) {
        let mut rng = Lcg64::new(seed);
        for h in [build_minus_one_gerbe(6).unwrap(), build_monopole(6).unwrap()] {
            let f = GaugePotential::random(h.degree() - 1, h.cover(), &mut rng, 0.5);
            let g = h.gauge_transform(&f).unwrap();
            prop_assert!(validate_cocycle(&g, VALIDATION_TOL).unwrap().passed);
            prop_assert!((charge(&g).unwrap() - charge(&h).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn equivalence_is_reflexive_and_symmetric(seed in any::<u64>()) {
        let mut rng = Lcg64::new(seed);
        let h = build_monopole(6).unwrap();
        let g = h.gauge_transform(&GaugePotential::random(1, h.cover(), &mut rng, 0.5)).unwrap();
        prop_assert!(gauge_equivalent(&g, &g, EQUIVALENCE_TOL).unwrap().is_equivalent());
        prop_assert!(gauge_equivalent(&h, &g, EQUIVALENCE_TOL).unwrap().is_equivalent());
        prop_assert!(gauge_equivalent(&g, &h, EQUIVALENCE_TOL).unwrap().is_equivalent());
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mut rng = Lcg64::new(seed);
        let h = build_monopole(6).unwrap();
        let g = h.gauge_transform(&GaugePotential::random(1, h.cover(), &mut rng, 3.0)).unwrap();
        let text = datum_to_string(&g);
        let back = datum_from_str(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(datum_to_string(&back), text);
    }
}
