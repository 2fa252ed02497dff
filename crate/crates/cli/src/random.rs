//! Seeded generators for the randomised checks.

use formdyn::{rat, FieldForm, Metric, PolyField, Rational, SmoothMap};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent stream `stream` of the scenario seed.
pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn rational(r: &mut impl Rng) -> Rational {
    rat(r.gen_range(-6..=6), r.gen_range(1..=4))
}

/// Up to `terms` monomials, each exponent at most `max_exp`, total degree at
/// most `max_degree`.
pub fn poly(r: &mut impl Rng, nvars: usize, terms: usize, max_exp: u32, max_degree: u32) -> PolyField {
    let n = r.gen_range(0..=terms);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let e: Vec<u32> = (0..nvars).map(|_| r.gen_range(0..=max_exp)).collect();
        if e.iter().sum::<u32>() <= max_degree {
            out.push((rational(r), e));
        }
    }
    PolyField::from_terms(nvars, out).expect("exponent vectors have nvars entries")
}

pub fn form(r: &mut impl Rng, dim: usize, grade: usize, max_exp: u32, max_degree: u32) -> FieldForm {
    let n = r.gen_range(1..=3);
    let terms: Vec<(Vec<usize>, PolyField)> = (0..n)
        .map(|_| {
            let mut idx = sample(r, dim, grade).into_vec();
            idx.sort_unstable();
            (idx, poly(r, dim, 3, max_exp, max_degree))
        })
        .collect();
    FieldForm::from_terms(dim, grade, terms).expect("indices are in range")
}

pub fn map(r: &mut impl Rng, domain: usize, codomain: usize) -> SmoothMap {
    let comps = (0..codomain).map(|_| poly(r, domain, 3, 2, 4)).collect();
    SmoothMap::from_polys(domain, comps).expect("components share the domain")
}

fn timelike(r: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..3).map(|_| r.gen_range(-1.0..1.0)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    vec![s + r.gen_range(0.3..2.0), v[0], v[1], v[2]]
}

fn any_vector(r: &mut impl Rng) -> Vec<f64> {
    (0..4).map(|_| r.gen_range(-2.0..2.0)).collect()
}

/// Timelike `λ̇`, spacelike `λ′`, with the sheet element bounded away from
/// degeneracy.
pub fn sheet_pair(r: &mut impl Rng, m: &Metric<f64>) -> (Vec<f64>, Vec<f64>) {
    loop {
        let (ld, lp) = (timelike(r), any_vector(r));
        let d2 = m.dot(&ld, &lp).powi(2) - m.dot(&ld, &ld) * m.dot(&lp, &lp);
        if m.dot(&lp, &lp) < -0.05 && d2 > 0.05 {
            return (ld, lp);
        }
    }
}

/// Timelike `λ̇` with two spacelike tangents and a non-degenerate volume.
pub fn membrane_triad(r: &mut impl Rng, m: &Metric<f64>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    loop {
        let (a, b, c) = (timelike(r), any_vector(r), any_vector(r));
        if m.dot(&b, &b) >= -0.05 || m.dot(&c, &c) >= -0.05 {
            continue;
        }
        let g = formdyn::exterior::gram_determinant(&[&a, &b, &c], m);
        if g > 0.05 {
            return (a, b, c);
        }
    }
}
