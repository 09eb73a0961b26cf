mod common;

use std::collections::HashSet;

use common::*;
use constacyclic::codes::{
    code_from_idempotent, dual, is_lcd, is_lcd_gram, is_self_orthogonal, min_distance, reduce_code,
    DistanceOptions, LcdRoute, Strategy,
};
use constacyclic::gf::Gf;
use constacyclic::idempotents::{
    all_idempotents, factor_xn_minus_lambda, lift_idempotent, IdempotentSystem,
};
use constacyclic::twisted::{GaloisForm, TwistedRing};
use constacyclic::{CoefficientMap, Elem, Error, MapKind, RingSpec};
use proptest::prelude::*;

#[test]
fn worked_example_idempotents_appear_among_subset_sums() {
    let (ex4, _) = f3_c10();
    assert!(all_idempotents(&ex4.ctx).unwrap().contains(&ex4.e));
    let ex = z9_c11();
    assert!(all_idempotents(&ex.ctx).unwrap().contains(&ex.e));
    for ex in [z4_c19(), z8_c3(), f5_c21(), z16_c33()] {
        assert!(all_idempotents(&ex.ctx).unwrap().contains(&ex.e), "{}", ex.ctx.ring().label());
    }
    let (ex, _) = fqu_c5();
    assert!(all_idempotents(&ex.ctx).unwrap().contains(&ex.e));
}

#[test]
fn z4_n3_idempotents_match_scan() {
    let t = ctx(&zpm(2, 2), 3, 1);
    let got: HashSet<Vec<Elem>> = all_idempotents(&t)
        .unwrap()
        .iter()
        .map(|e| e.coeffs().to_vec())
        .collect();
    assert_eq!(got, idempotent_scan(&t));
    let expect: HashSet<Vec<Elem>> = [[0, 0, 0], [1, 0, 0], [2, 1, 1], [3, 3, 3]]
        .iter()
        .map(|c| t.from_ints(c).unwrap().coeffs().to_vec())
        .collect();
    assert_eq!(got, expect);
}

#[test]
fn z16_reduced_idempotent_lifts_back() {
    let ex = z16_c33();
    let red = ex.e.reduce();
    let listed = sparse(
        red.context(),
        &Z16_REDUCED_SUPPORT.iter().map(|&i| (i, 1)).collect::<Vec<_>>(),
    );
    assert_eq!(red, listed);
    let lifted = lift_idempotent(&listed, &ex.ctx).unwrap();
    assert!(lifted.is_idempotent());
    assert_eq!(lifted.reduce(), listed);
    // idempotents lift uniquely
    assert_eq!(lifted, ex.e);
}

#[test]
fn splitting_degree_for_binary_33() {
    let f2 = Gf::prime(2).unwrap();
    let s = factor_xn_minus_lambda(&f2, 33, 1).unwrap();
    assert_eq!(s.extension_degree, 10);
    assert_eq!(s.product(), s.target());
    assert_eq!(
        factor_xn_minus_lambda(&Gf::prime(3).unwrap(), 6, 1).unwrap_err(),
        Error::PDividesN { p: 3, n: 6 }
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorization_reconstructs(pi in 0usize..4, n in 1usize..40, li in any::<prop::sample::Index>()) {
        let p = [2u64, 3, 5, 7][pi];
        prop_assume!(n as u64 % p != 0);
        let f = Gf::prime(p).unwrap();
        let lam = 1 + li.index((p - 1) as usize) as u64;
        match factor_xn_minus_lambda(&f, n, lam) {
            Ok(s) => {
                prop_assert_eq!(s.product(), s.target());
                prop_assert_eq!(s.factors.iter().map(|g| g.len() - 1).sum::<usize>(), n);
                let mut seen = HashSet::new();
                for orbit in &s.orbits {
                    for &i in orbit {
                        prop_assert!(seen.insert(i));
                        let next = s.extension.pow(s.roots[i], p as u128);
                        prop_assert!(orbit.iter().any(|&j| s.roots[j] == next));
                    }
                }
            }
            Err(Error::DegreeBoundExceeded(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

fn lift_contexts() -> Vec<TwistedRing> {
    let mut out = Vec::new();
    for r in [zpm(2, 2), zpm(2, 3), zpm(3, 2), zpm(5, 2), ring(RingSpec::fq_plus_u(2, &[1, 1, 1]))] {
        let p = r.characteristic_prime() as usize;
        for n in (1..=12).filter(|n| n % p != 0) {
            for l in r.units().unwrap().into_iter().take(4) {
                out.push(TwistedRing::new(&r, n, l).unwrap());
            }
        }
    }
    out
}

#[test]
fn primitive_systems_are_complete_and_orthogonal() {
    for t in lift_contexts() {
        let sys = IdempotentSystem::new(&t).unwrap();
        let prims = &sys.primitives;
        let total = prims.iter().fold(t.zero(), |acc, e| acc.add(e).unwrap());
        assert_eq!(total, t.one());
        for (i, a) in prims.iter().enumerate() {
            assert!(a.is_idempotent());
            for b in &prims[i + 1..] {
                assert!(a.mul(b).unwrap().is_zero());
            }
        }
        // field-level system reduces from the lifted one
        let res = t.residue_ring();
        let field = IdempotentSystem::new(&res).unwrap();
        let reduced: Vec<_> = prims.iter().map(|e| e.reduce()).collect();
        assert_eq!(reduced, field.primitives);
        let all = sys.all();
        let distinct: HashSet<Vec<Elem>> = all.iter().map(|e| e.coeffs().to_vec()).collect();
        assert_eq!(distinct.len(), 1 << prims.len());
        if t.ring().size().pow(t.n() as u32) <= 1 << 16 {
            assert_eq!(distinct, idempotent_scan(&t));
        }
    }
}

#[test]
fn membership_descriptions_agree() {
    for t in lift_contexts().into_iter().filter(|t| t.ring().size().pow(t.n() as u32) <= 1 << 12) {
        for e in all_idempotents(&t).unwrap() {
            let c = code_from_idempotent(&e).unwrap();
            let span: HashSet<u64> = span_of_ideal(&e).into_iter().collect();
            let fixed: HashSet<u64> = t
                .enumerate()
                .filter(|x| x.mul(&e).unwrap() == *x)
                .map(|x| pack(t.ring(), x.coeffs()))
                .collect();
            assert_eq!(span, fixed);
            assert_eq!(span.len() as u64, c.size().unwrap());
            let words: HashSet<u64> = c
                .codewords(1 << 12)
                .unwrap()
                .iter()
                .map(|w| pack(t.ring(), w))
                .collect();
            assert_eq!(words, span);
            for x in t.enumerate().take(64) {
                assert_eq!(c.contains(x.coeffs()), span.contains(&pack(t.ring(), x.coeffs())));
            }
            assert_eq!(c.rank() + c.complement().rank(), t.n());
        }
    }
}

#[test]
fn distance_strategies_match_scan() {
    for t in lift_contexts().into_iter().filter(|t| t.ring().size().pow(t.n() as u32) <= 1 << 14) {
        for e in all_idempotents(&t).unwrap() {
            let c = code_from_idempotent(&e).unwrap();
            if c.is_zero() {
                continue;
            }
            let words = span_of_ideal(&e);
            let d = brute_distance(t.ring(), t.n(), &words);
            for s in [Strategy::FullEnumeration, Strategy::Reduction, Strategy::Auto] {
                let m = min_distance(&c, &DistanceOptions::with_strategy(s)).unwrap();
                assert_eq!(m.d, d, "{s:?}");
                let w = m.witness.unwrap();
                assert!(c.contains(&w));
                assert_eq!(w.iter().filter(|x| !x.is_zero()).count(), d);
            }
            let bw = DistanceOptions {
                strategy: Strategy::BoundedWeight,
                weight_ceiling: t.n(),
                ..DistanceOptions::default()
            };
            assert_eq!(min_distance(&c, &bw).unwrap().d, d);
            assert!(d <= t.n() - c.rank() + 1);
            let red = reduce_code(&c);
            assert_eq!(red.rank(), c.rank());
        }
    }
}

fn automorphism_forms(r: &constacyclic::Ring) -> Vec<GaloisForm> {
    let mut v = vec![GaloisForm::euclidean(r)];
    if !matches!(r.spec(), RingSpec::IntegersModPM { .. }) {
        let m = CoefficientMap::new(r, MapKind::FrobeniusPower(1)).unwrap();
        if m.order() != Some(1) {
            v.push(GaloisForm::new(m, 1).unwrap());
        }
    }
    if let RingSpec::FqPlusU { .. } = r.spec() {
        v.push(GaloisForm::new(CoefficientMap::fqu_semilinear(r, 1, 3).unwrap(), 1).unwrap());
    }
    v
}

#[test]
fn duals_are_orthogonal_complements() {
    let mut contexts = lift_contexts();
    contexts.push(ctx(&ring(RingSpec::PrimeFieldExt { p: 2, s: 2, modulus: vec![] }), 5, 1));
    contexts.push(ctx(&fp(5), 6, 2));
    for t in contexts.into_iter().filter(|t| t.ring().size().pow(t.n() as u32) <= 1 << 12) {
        for f in automorphism_forms(t.ring()) {
            for e in all_idempotents(&t).unwrap() {
                let c = code_from_idempotent(&e).unwrap();
                let d = dual(&c, &f).unwrap();
                assert_eq!(c.rank() + d.rank(), t.n());
                // every dual word is orthogonal to every codeword, and it is all of them
                let r = t.ring();
                let n = t.n();
                let cw: Vec<Vec<Elem>> = span_of_ideal(&e).iter().map(|&w| unpack(r, n, w)).collect();
                let mut orth = 0;
                for x in t.enumerate() {
                    let ok = cw.iter().all(|c| form_value(&f, c, x.coeffs()).is_zero());
                    assert_eq!(ok, d.contains(x.coeffs()));
                    orth += usize::from(ok);
                }
                assert_eq!(orth as u64, d.size().unwrap());
                let dd = dual(&d, &f).unwrap();
                assert_eq!(dd.generator(), c.generator());
                // decisions agree with the Gram matrix and with the scan
                if let Ok(dec) = is_lcd(&c, &f) {
                    assert_eq!(dec.lcd, is_lcd_gram(&c, &f).unwrap());
                    assert_eq!(dec.lcd, brute_lcd(&e, &f));
                }
            }
        }
    }
}

#[test]
fn unit_twist_makes_everything_lcd() {
    let t = ctx(&fp(5), 6, 2);
    let euclid = GaloisForm::euclidean(t.ring());
    for e in all_idempotents(&t).unwrap() {
        let c = code_from_idempotent(&e).unwrap();
        let dec = is_lcd(&c, &euclid).unwrap();
        assert_eq!(dec.route, LcdRoute::UnitTwist);
        assert!(dec.lcd && brute_lcd(&e, &euclid));
    }
}

/// `λ^2 - 1` a nonzero non-unit: codes need not be LCD.
#[test]
fn non_unit_twist_is_decided_by_gram_matrix() {
    let t = ctx(&zpm(3, 2), 4, 2);
    let euclid = GaloisForm::euclidean(t.ring());
    let mut non_lcd = 0;
    for e in all_idempotents(&t).unwrap() {
        let c = code_from_idempotent(&e).unwrap();
        let dec = is_lcd(&c, &euclid).unwrap();
        assert_eq!(dec.route, LcdRoute::Gram);
        assert_eq!(dec.lcd, brute_lcd(&e, &euclid));
        non_lcd += usize::from(!dec.lcd);
    }
    assert!(non_lcd > 0);
}

#[test]
fn hermitian_criterion_counterexample() {
    // Z_4, n = 1: 2 is orthogonal to everything under x -> x^2, yet e = 1 passes the criterion
    let t = ctx(&zpm(2, 2), 1, 1);
    let herm = GaloisForm::hermitian(t.ring()).unwrap();
    let c = code_from_idempotent(&t.one()).unwrap();
    assert!(is_lcd(&c, &herm).unwrap().lcd);
    assert!(!brute_lcd(&t.one(), &herm));
    assert_eq!(dual(&c, &herm).unwrap_err(), Error::NonAdditiveMap);
}

#[test]
fn self_orthogonality_examples() {
    let ex = z8_c3();
    let euclid = GaloisForm::euclidean(ex.ctx.ring());
    let c = code_from_idempotent(&ex.e).unwrap();
    assert!(!is_self_orthogonal(&c, &euclid).unwrap());
    let whole = code_from_idempotent(&ex.ctx.one()).unwrap();
    assert!(!is_self_orthogonal(&whole, &euclid).unwrap());
    let t = ctx(&zpm(3, 2), 3, 2);
    let c = code_from_idempotent(&t.one()).unwrap();
    assert_eq!(is_self_orthogonal(&c, &euclid_for(&t)).unwrap_err(), Error::LambdaNotInvolutive);
}

fn euclid_for(t: &TwistedRing) -> GaloisForm {
    GaloisForm::euclidean(t.ring())
}

#[test]
fn worked_example_lcd_decisions() {
    let ex = z4_c19();
    let c = code_from_idempotent(&ex.e).unwrap();
    let euclid = euclid_for(&ex.ctx);
    assert!(is_lcd(&c, &euclid).unwrap().lcd);
    assert!(is_lcd_gram(&c, &euclid).unwrap());
    let d = dual(&c, &euclid).unwrap();
    assert_eq!(d.generator(), &ex.e.complement());

    let ex = z16_c33();
    let c = code_from_idempotent(&ex.e).unwrap();
    assert!(is_lcd(&c, &euclid_for(&ex.ctx)).unwrap().lcd);
    assert_eq!(min_distance(&c, &DistanceOptions::default()).unwrap().d, 10);

    let (ex, form) = fqu_c5();
    let c = code_from_idempotent(&ex.e).unwrap();
    assert!(is_lcd(&c, &form).unwrap().lcd);
    assert!(brute_lcd(&ex.e, &form));
    assert_eq!(reduce_code(&c).generator(), &ex.e.reduce());
}
