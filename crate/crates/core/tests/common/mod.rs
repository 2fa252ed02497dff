#![allow(dead_code)]

use formdyn::{rat, FieldForm, KForm, KVector, PolyField, Rational, SmoothMap};
use proptest::prelude::*;

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

/// Sparse polynomial with up to `terms` monomials of degree at most
/// `max_exp` in each variable.
pub fn poly(nvars: usize, terms: usize, max_exp: u32) -> impl Strategy<Value = PolyField> {
    prop::collection::vec((rational(), prop::collection::vec(0..=max_exp, nvars)), 0..=terms)
        .prop_map(move |t| PolyField::from_terms(nvars, t).unwrap())
}

pub fn form(dim: usize, grade: usize, terms: usize, max_exp: u32) -> impl Strategy<Value = FieldForm> {
    let idx = prop::sample::subsequence((0..dim).collect::<Vec<_>>(), grade);
    prop::collection::vec((idx, poly(dim, terms, max_exp)), 0..=3)
        .prop_map(move |t| FieldForm::from_terms(dim, grade, t).unwrap())
}

pub fn poly_map(domain: usize, codomain: usize) -> impl Strategy<Value = SmoothMap> {
    prop::collection::vec(poly(domain, 3, 2), codomain).prop_map(move |c| SmoothMap::from_polys(domain, c).unwrap())
}

pub fn kvector(dim: usize, grade: usize) -> impl Strategy<Value = KVector<Rational>> {
    let idx = prop::sample::subsequence((0..dim).collect::<Vec<_>>(), grade);
    prop::collection::vec((idx, rational()), 0..=4)
        .prop_map(move |t| KVector::from_components(dim, grade, t).unwrap())
}

pub fn kform(dim: usize, grade: usize) -> impl Strategy<Value = KForm<Rational>> {
    let idx = prop::sample::subsequence((0..dim).collect::<Vec<_>>(), grade);
    prop::collection::vec((idx, rational()), 0..=4)
        .prop_map(move |t| KForm::from_components(dim, grade, t).unwrap())
}

pub fn assert_forms_equal(a: &FieldForm, b: &FieldForm) {
    assert_eq!(a.exact_eq(b), Some(true), "\n  {a}\n  {b}");
}
