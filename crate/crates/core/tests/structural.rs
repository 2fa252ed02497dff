mod common;

use common::*;
use formdyn::chains::{boundary, Chain, SingularCube};
use formdyn::exterior::{contract, pairing};
use formdyn::forms::pullback;
use formdyn::{rat, FieldForm, KForm, KVector, Rational};
use proptest::prelude::*;

fn sign(p: usize, q: usize) -> Rational {
    if (p * q).is_multiple_of(2) {
        rat(1, 1)
    } else {
        rat(-1, 1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn d_squared_vanishes(grade in 0usize..=2, seed_form in form(4, 0, 3, 3), omega1 in form(4, 1, 3, 3), omega2 in form(4, 2, 3, 3)) {
        let omega = [seed_form, omega1, omega2][grade].clone();
        prop_assert!(omega.d().d().is_exact_zero());
    }

    #[test]
    fn leibniz_rule(a in form(3, 1, 3, 2), b in form(3, 1, 3, 2), f in form(3, 0, 3, 2)) {
        // d(α ∧ β) = dα ∧ β − α ∧ dβ for a 1-form α
        let lhs = a.wedge(&b).unwrap().d();
        let rhs = a.d().wedge(&b).unwrap().sub(&a.wedge(&b.d()).unwrap()).unwrap();
        assert_forms_equal(&lhs, &rhs);
        let lhs = f.wedge(&b).unwrap().d();
        let rhs = f.d().wedge(&b).unwrap().add(&f.wedge(&b.d()).unwrap()).unwrap();
        assert_forms_equal(&lhs, &rhs);
    }

    #[test]
    fn pullback_commutes_with_d(f in poly_map(3, 3), omega in form(3, 1, 2, 2), eta in form(3, 2, 2, 1)) {
        assert_forms_equal(&pullback(&f, &omega.d()).unwrap(), &pullback(&f, &omega).unwrap().d());
        assert_forms_equal(&pullback(&f, &eta.d()).unwrap(), &pullback(&f, &eta).unwrap().d());
    }

    #[test]
    fn pullback_is_functorial(f in poly_map(2, 2), g in poly_map(2, 3), omega in form(3, 1, 2, 1)) {
        let gf = g.compose(&f).unwrap();
        let lhs = pullback(&gf, &omega).unwrap();
        let rhs = pullback(&f, &pullback(&g, &omega).unwrap()).unwrap();
        assert_forms_equal(&lhs, &rhs);
    }

    #[test]
    fn pullback_respects_wedge(f in poly_map(3, 3), a in form(3, 1, 2, 1), b in form(3, 1, 2, 1)) {
        let lhs = pullback(&f, &a.wedge(&b).unwrap()).unwrap();
        let rhs = pullback(&f, &a).unwrap().wedge(&pullback(&f, &b).unwrap()).unwrap();
        assert_forms_equal(&lhs, &rhs);
    }

    #[test]
    fn wedge_graded_commutativity(p in 0usize..=3, q in 0usize..=3, a in kvector(5, 0), b in kvector(5, 0),
                                  a1 in kvector(5, 1), a2 in kvector(5, 2), a3 in kvector(5, 3),
                                  b1 in kvector(5, 1), b2 in kvector(5, 2), b3 in kvector(5, 3)) {
        let xs = [a, a1, a2, a3];
        let ys = [b, b1, b2, b3];
        let (x, y) = (&xs[p], &ys[q]);
        prop_assert_eq!(x.wedge(y).unwrap(), y.wedge(x).unwrap().scale(&sign(p, q)));
    }

    #[test]
    fn field_wedge_graded_commutativity(a in form(4, 1, 2, 2), b in form(4, 2, 2, 2), c in form(4, 1, 2, 2)) {
        assert_forms_equal(&a.wedge(&b).unwrap(), &b.wedge(&a).unwrap());
        assert_forms_equal(&a.wedge(&c).unwrap(), &c.wedge(&a).unwrap().neg());
        prop_assert!(a.wedge(&a).unwrap().is_exact_zero());
    }

    #[test]
    fn wedge_is_associative(a in kform(5, 1), b in kform(5, 2), c in kform(5, 1)) {
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
    }

    #[test]
    fn contraction_is_adjoint_to_wedge(alpha in kform(5, 3), v in kvector(5, 1), w in kvector(5, 2), v2 in kvector(5, 2), w1 in kvector(5, 1)) {
        let lhs = pairing(&contract(&alpha, &v).unwrap(), &w).unwrap();
        prop_assert_eq!(lhs, pairing(&alpha, &v.wedge(&w).unwrap()).unwrap());
        let lhs = pairing(&contract(&alpha, &v2).unwrap(), &w1).unwrap();
        prop_assert_eq!(lhs, pairing(&alpha, &v2.wedge(&w1).unwrap()).unwrap());
    }

    #[test]
    fn boundary_squared_vanishes(r in 1usize..=4, maps in prop::collection::vec(poly_map(4, 3), 1..=3), weights in prop::collection::vec(-3i64..=3, 3)) {
        let mut chain = Chain::empty(r, 3);
        for (m, w) in maps.iter().zip(&weights) {
            // restrict the map to the first r parameters
            let cube = SingularCube::new(m.compose(&embed(r)).unwrap());
            chain.push(*w, cube).unwrap();
        }
        let b = boundary(&chain).unwrap();
        if r >= 2 {
            prop_assert!(boundary(&b).unwrap().is_zero());
        }
    }
}

/// `[0,1]^r → R⁴`, padding the extra coordinates with zero.
fn embed(r: usize) -> formdyn::SmoothMap {
    let comps = (0..4)
        .map(|i| if i < r { formdyn::PolyField::var(r, i) } else { formdyn::PolyField::zero(r) })
        .collect();
    formdyn::SmoothMap::from_polys(r, comps).unwrap()
}

#[test]
fn pullback_of_dx_is_differential() {
    let f = formdyn::SmoothMap::from_polys(
        2,
        vec![
            formdyn::PolyField::var(2, 0).mul(&formdyn::PolyField::var(2, 1)).unwrap(),
            formdyn::PolyField::var(2, 1).pow(3),
        ],
    )
    .unwrap();
    for i in 0..2 {
        let lhs = pullback(&f, &FieldForm::dx(2, i)).unwrap();
        let comp = FieldForm::function(f.components()[i].clone());
        assert_forms_equal(&lhs, &comp.d());
    }
}

#[test]
fn zero_and_unit_elements() {
    let v = KVector::<Rational>::vector(&[rat(1, 1), rat(2, 3)]);
    let one = KVector::scalar(2, rat(1, 1));
    assert_eq!(one.wedge(&v).unwrap(), v);
    assert!(v.wedge(&v).unwrap().is_zero());
    let alpha = KForm::<Rational>::vector(&[rat(1, 1), rat(0, 1)]);
    assert_eq!(pairing(&alpha, &v).unwrap(), rat(1, 1));
}
