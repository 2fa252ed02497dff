mod common;

use common::*;
use formdyn::chains::{integrate, reparam_invariance_check, stokes_residual, Chain, SingularCube};
use formdyn::quadrature::QuadratureRule;
use formdyn::{FieldForm, PolyField, SmoothMap};
use proptest::prelude::*;

/// Polynomial of total degree at most 3.
fn cubic(nvars: usize) -> impl Strategy<Value = PolyField> {
    poly(nvars, 4, 3).prop_map(move |p| {
        let kept = p.terms().filter(|(e, _)| e.iter().sum::<u32>() <= 3).map(|(e, c)| (c.clone(), e.clone()));
        PolyField::from_terms(nvars, kept.collect::<Vec<_>>()).unwrap()
    })
}

fn cubic_form(dim: usize, grade: usize) -> impl Strategy<Value = FieldForm> {
    let idx = prop::sample::subsequence((0..dim).collect::<Vec<_>>(), grade);
    prop::collection::vec((idx, cubic(dim)), 1..=3).prop_map(move |t| FieldForm::from_terms(dim, grade, t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stokes_on_unit_square(omega in cubic_form(2, 1)) {
        let q = QuadratureRule::default();
        let sq = Chain::single(SingularCube::unit(2));
        prop_assert!(stokes_residual(&omega, &sq, &q).unwrap() < 1e-8);
    }

    #[test]
    fn stokes_on_unit_cube(omega in cubic_form(3, 2)) {
        let q = QuadratureRule::default();
        let cube = Chain::single(SingularCube::unit(3));
        prop_assert!(stokes_residual(&omega, &cube, &q).unwrap() < 1e-8);
    }

    #[test]
    fn stokes_on_curved_square(omega in cubic_form(3, 1), map in poly_map(2, 3)) {
        // surface in R³; both sides are polynomial, so the rule is exact
        let q = QuadratureRule::default();
        let c = Chain::single(SingularCube::new(map));
        let lhs = integrate(&omega.d(), &c, &q).unwrap();
        let r = stokes_residual(&omega, &c, &q).unwrap();
        prop_assert!(r < 1e-8 * (1.0 + lhs.abs()), "{r}");
    }

    #[test]
    fn form_integrals_ignore_orientation_preserving_reparameterisation(omega in cubic_form(2, 1), map in poly_map(1, 2)) {
        // s ↦ (s + s²)/2 is an orientation-preserving self-map of [0, 1]
        let e = SmoothMap::from_polys(
            1,
            vec![PolyField::var(1, 0).add(&PolyField::var(1, 0).pow(2)).unwrap().scale(&formdyn::rat(1, 2))],
        )
        .unwrap();
        let q = QuadratureRule::gauss_legendre(16).unwrap();
        let check = reparam_invariance_check(&omega, &SingularCube::new(map), &e, &q).unwrap();
        prop_assert!(check.delta < 1e-8 * (1.0 + check.original.abs()), "{check:?}");
    }
}

#[test]
fn default_rule_has_eight_points() {
    assert_eq!(QuadratureRule::default().points_per_axis(), 8);
}
