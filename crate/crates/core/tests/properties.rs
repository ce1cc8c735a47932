//! Property tests over random inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use twistk3::assoc::{construct_witness, matches_k};
use twistk3::discform::{disc_form_tw, order_of_w, qform_iso, structure_of_disc, Generator};
use twistk3::lattice::{
    bfield_shift, eichler_invariants, exp_w_integrality, gram_t0, idx, inner_product,
    invariant_factors_formula, orbit_invariants, smith_normal_form,
};
use twistk3::moduli::{
    canonicalize_wclass, component_census, merge_search, satisfies_star2, square_obstruction,
    square_residue, Obstruction,
};
use twistk3::{Ambient, FiniteQuadraticForm, LatticeVector, QMod2Z, WClass};

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

prop_compose! {
    fn wclass(dmax: i64, rmax: i64, nk: i64)(d in 1..=dmax / 2, r in 1..=rmax, n in -nk..=nk, k in -nk..=nk) -> WClass {
        WClass::new(2 * d, r, n, k).unwrap()
    }
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=9).prop_map(|(n, d)| BigRational::new(big(n), big(d)))
}

fn vector(amb: Ambient) -> impl Strategy<Value = LatticeVector> {
    proptest::collection::vec(rational(), amb.rank())
        .prop_map(move |c| LatticeVector::new(amb.clone(), c).unwrap())
}

fn integral_vector(amb: Ambient) -> impl Strategy<Value = LatticeVector> {
    proptest::collection::vec(-6i64..=6, amb.rank())
        .prop_map(move |c| LatticeVector::from_integers(amb.clone(), &c).unwrap())
}

/// Exchange `U1` and `U2` and the two `E8` blocks, then swap `e1` and `f1`.
fn isometry(x: &LatticeVector) -> LatticeVector {
    let mut c = x.coords().to_vec();
    for i in 0..8 {
        c.swap(i, i + 8);
    }
    c.swap(idx::E1, idx::E2);
    c.swap(idx::F1, idx::F2);
    c.swap(idx::E1, idx::F1);
    LatticeVector::new(x.ambient().clone(), c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn snf_matches_formula(c in wclass(400, 40, 500)) {
        let snf = smith_normal_form(&gram_t0(&c)).unwrap();
        prop_assert_eq!(&snf, &invariant_factors_formula(&c));
        prop_assert_eq!(snf.order(), c.dprime());
    }

    #[test]
    fn gram_determinant_is_dr2(c in wclass(400, 40, 500)) {
        let det = gram_t0(&c).determinant();
        let dprime = c.dprime();
        prop_assert_eq!(det.magnitude(), dprime.magnitude());
    }

    #[test]
    fn eichler_invariants_are_isometry_invariant(d in 1i64..=20, x in integral_vector(Ambient::lambda_d(2).unwrap())) {
        let amb = Ambient::lambda_d(2 * d).unwrap();
        let x = LatticeVector::new(amb, x.coords().to_vec()).unwrap();
        prop_assume!(x.is_primitive());
        let inv = eichler_invariants(&x).unwrap();
        prop_assert_eq!(&inv, &eichler_invariants(&isometry(&x)).unwrap());
        prop_assert_eq!(inv.square, x.square().to_integer());
    }

    #[test]
    fn orbit_invariants_ignore_positive_scaling(x in vector(Ambient::lambda_d(6).unwrap()), s in 1i64..=12, t in 1i64..=12) {
        prop_assume!(!x.is_zero());
        let y = x.scale(&BigRational::new(big(s), big(t)));
        prop_assert_eq!(orbit_invariants(&x).unwrap().primitive, orbit_invariants(&y).unwrap().primitive);
    }

    #[test]
    fn bfield_is_an_isometry(
        b in vector(Ambient::lambda_d(4).unwrap()),
        v in vector(Ambient::lambda_d_u(4).unwrap()),
        w in vector(Ambient::lambda_d_u(4).unwrap()),
    ) {
        let before = inner_product(&v, &w).unwrap();
        let after = inner_product(&bfield_shift(&b, &v).unwrap(), &bfield_shift(&b, &w).unwrap()).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn bfield_composes_additively(
        b1 in vector(Ambient::lambda_d(4).unwrap()),
        b2 in vector(Ambient::lambda_d(4).unwrap()),
        v in vector(Ambient::lambda_d_u(4).unwrap()),
    ) {
        let composed = bfield_shift(&b1, &bfield_shift(&b2, &v).unwrap()).unwrap();
        prop_assert_eq!(composed, bfield_shift(&(&b1 + &b2), &v).unwrap());
        let inverse = bfield_shift(&-&b1, &bfield_shift(&b1, &v).unwrap()).unwrap();
        prop_assert_eq!(inverse, v);
    }

    #[test]
    fn exp_w_integral_iff_pairing_integral(c in wclass(30, 8, 20), x in integral_vector(Ambient::lambda_d(2).unwrap())) {
        let x = LatticeVector::new(Ambient::lambda_d(c.d().clone()).unwrap(), x.coords().to_vec()).unwrap();
        let pairing = inner_product(&c.w_vector(), &x).unwrap();
        prop_assert_eq!(exp_w_integrality(&c, &x).unwrap(), pairing.is_integer());
    }

    #[test]
    fn canonicalize_is_idempotent(c in wclass(200, 30, 300)) {
        let once = canonicalize_wclass(&c);
        prop_assert!(once.is_canonical());
        prop_assert_eq!(canonicalize_wclass(&once), once.clone());
        prop_assert_eq!(invariant_factors_formula(&once), invariant_factors_formula(&c));
        prop_assert_eq!(square_residue(&once), square_residue(&c));
        prop_assert_eq!(structure_of_disc(&once), structure_of_disc(&c));
        if let (Ok(f), Ok(g)) = (disc_form_tw(&c), disc_form_tw(&once)) {
            prop_assert!(qform_iso(&f, &g).unwrap().isomorphic, "{} vs {}", c, once);
        }
    }

    #[test]
    fn class_order_is_r(c in wclass(60, 12, 40)) {
        prop_assert_eq!(c.class_order(), c.r().clone());
    }

    #[test]
    fn order_of_w_divides_disc(c in wclass(300, 20, 400)) {
        prop_assert!(c.dprime().is_multiple_of(&order_of_w(&c)));
    }

    #[test]
    fn disc_forms_are_well_defined(c in wclass(300, 20, 400)) {
        if let Ok(f) = disc_form_tw(&c) {
            prop_assert!(f.check_well_defined().is_ok(), "{}", c);
            prop_assert_eq!(f.order(), c.dprime());
        }
    }

    #[test]
    fn obstruction_excludes_merges(d in 1i64..=15, r in 2i64..=6, n1 in 0i64..6, k1 in 0i64..6, n2 in 0i64..6, k2 in 0i64..6) {
        let c1 = WClass::new(2 * d, r, n1 % r, k1 % r).unwrap();
        let c2 = WClass::new(2 * d, r, n2 % r, k2 % r).unwrap();
        if square_obstruction(&c1, &c2).unwrap() == Obstruction::Obstructed {
            prop_assert!(merge_search(&c1, &c2, 2).unwrap().is_none());
        }
    }

    #[test]
    fn matches_k_requires_star2(c in wclass(200, 9, 100)) {
        if matches_k(&c).matches {
            prop_assert!(satisfies_star2(c.d()), "{}", c);
        }
    }

    #[test]
    fn iso_is_invariant_under_unit_rescaling(n in 2i64..=200, a in 0i64..400, u in 1i64..200) {
        prop_assume!(u.gcd(&n) == 1);
        let q = QMod2Z::from_ratio(a, n);
        let f = FiniteQuadraticForm::cyclic("g", big(n), q.clone());
        prop_assume!(f.is_ok());
        let f = f.unwrap();
        let g = FiniteQuadraticForm::cyclic("h", big(n), q.mul_int(&big(u * u))).unwrap();
        let v = qform_iso(&f, &g).unwrap();
        prop_assert!(v.isomorphic);
        prop_assert_eq!(v.isomorphic, qform_iso(&g, &f).unwrap().isomorphic);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn certificates_are_deterministic(d in 1i64..=100, r in 1i64..=12) {
        let d = big(2 * d);
        prop_assume!(satisfies_star2(&d));
        let a = construct_witness(&d, &big(r)).unwrap();
        prop_assert_eq!(&a, &construct_witness(&d, &big(r)).unwrap());
    }

    #[test]
    fn census_respects_bounds(d in 1i64..=20, r in 1i64..=5) {
        let rep = component_census(&big(2 * d), &big(r), 2).unwrap();
        prop_assert!(rep.lower_bound <= rep.group_count());
        prop_assert!(BigInt::from(rep.group_count()) <= rep.upper_bound);
        let cells: usize = rep.groups.iter().map(|g| g.members.len()).sum();
        prop_assert_eq!(cells, rep.representatives.len());
    }
}

#[test]
fn orthogonal_sum_order_is_product() {
    let gens = vec![
        Generator {
            label: "a".into(),
            order: big(4),
            q: QMod2Z::from_ratio(1, 4),
        },
        Generator {
            label: "b".into(),
            order: big(3),
            q: QMod2Z::from_ratio(2, 3),
        },
    ];
    let f = FiniteQuadraticForm::orthogonal(gens).unwrap();
    assert_eq!(f.order(), big(12));
    assert!(f.is_cyclic());
    assert!(!f.q_of(&[BigInt::one(), BigInt::zero()]).is_zero());
}
