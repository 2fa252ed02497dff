use std::collections::BTreeSet;

use formdyn::chains::{
    boundary_with, face_sign, integrate, parameterised_functional, reparam_invariance_check, stokes_residual, Chain,
    SingularCube,
};
use formdyn::exterior::contract;
use formdyn::forms::pullback;
use formdyn::quadrature::QuadratureRule;
use formdyn::{FieldForm, KForm, KVector, PolyField, Rational, SmoothMap};
use rand::Rng as _;

use super::{Context, Fault, Run};
use crate::error::{CliError, Result};
use crate::random;
use crate::report::{Check, Report};
use crate::scenario::{FormsCheck, FormsItem};

fn sign_rule(fault: Option<Fault>) -> fn(usize, bool) -> i64 {
    match fault {
        None => face_sign,
        Some(Fault::BoundarySign) => |_, eps| if eps { -1 } else { 1 },
    }
}

fn mismatch(a: &FieldForm, b: &FieldForm) -> usize {
    usize::from(a.exact_eq(b) != Some(true))
}

fn rule(points: usize) -> Result<QuadratureRule> {
    Ok(QuadratureRule::gauss_legendre(points)?)
}

fn to_rational(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| CliError::precondition(format!("{x} is not finite")))
}

fn labels(items: &[FormsItem]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    items
        .iter()
        .map(|it| {
            let base = it.type_name();
            let mut k = 1;
            let mut label = base.to_string();
            while !seen.insert(label.clone()) {
                k += 1;
                label = format!("{base}-{k}");
            }
            label
        })
        .collect()
}

pub fn validate(p: &FormsCheck) -> Result<()> {
    for item in &p.checks {
        match item {
            FormsItem::ExteriorDerivative { form, expected } => {
                form.build()?;
                expected.build()?;
            }
            FormsItem::Pullback { map, form, expected } => {
                let (f, w) = (map.build()?, form.build()?);
                if f.codomain_dim() != w.dim() {
                    return Err(CliError::precondition("pullback map codomain differs from the form dimension"));
                }
                if let Some(e) = expected {
                    e.build()?;
                }
            }
            FormsItem::Compose { field, map, expected } => {
                field.build()?;
                map.build()?;
                expected.build()?;
            }
            FormsItem::Algebra { dim } if *dim < 2 => {
                return Err(CliError::precondition("algebra checks need dimension at least 2"));
            }
            FormsItem::Boundary { r } if *r == 0 || *r > 6 => {
                return Err(CliError::precondition("boundary check takes 1 ≤ r ≤ 6"));
            }
            FormsItem::Stokes { form, cube, points } => {
                form.build()?;
                if let Some(c) = cube {
                    c.build()?;
                }
                rule(*points)?;
            }
            FormsItem::FormReparam {
                form,
                cube,
                reparam,
                points,
            } => {
                form.build()?;
                cube.build()?;
                reparam.build()?;
                rule(*points)?;
            }
            FormsItem::LineFunctional { a, b, points } => {
                to_rational(*a)?;
                to_rational(*b)?;
                rule(*points)?;
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn run(name: &str, p: &FormsCheck, ctx: &Context) -> Result<Run> {
    validate(p)?;
    let mut report = Report::new(name, "forms-check", ctx.seed);
    for (stream, (item, label)) in p.checks.iter().zip(labels(&p.checks)).enumerate() {
        let n = |s: &str| format!("{label}.{s}");
        match item {
            FormsItem::ExteriorDerivative { form, expected } => {
                let d = form.build()?.d();
                report.push(Check::exact(&label, mismatch(&d, &expected.build()?), "exterior derivative, exact"));
            }
            FormsItem::Pullback { map, form, expected } => {
                let (f, omega) = (map.build()?, form.build()?);
                let lhs = pullback(&f, &omega.d())?;
                if let Some(e) = expected {
                    report.push(Check::exact(
                        &n("expected"),
                        mismatch(&lhs, &e.build()?),
                        "pullback of dω against the stated polynomial, exact",
                    ));
                }
                let rhs = pullback(&f, &omega)?.d();
                report.push(Check::exact(&n("commutes_with_d"), mismatch(&lhs, &rhs), "f*(dω) = d(f*ω), exact"));
            }
            FormsItem::Compose { field, map, expected } => {
                let m = map.build()?;
                let inner = m
                    .poly_components()
                    .ok_or_else(|| CliError::precondition("composition needs a polynomial map"))?;
                let got = field.build()?.compose(&inner)?;
                let bad = usize::from(!got.sub(&expected.build()?)?.is_zero());
                report.push(Check::exact(&label, bad, "scalar field composed with a map, exact"));
            }
            FormsItem::Algebra { dim } => algebra_checks(&mut report, *dim)?,
            FormsItem::Boundary { r } => {
                let cube = Chain::single(SingularCube::unit(*r));
                let b = boundary_with(&cube, sign_rule(ctx.fault))?;
                report.push(Check::exact(
                    &n("faces"),
                    b.terms().len().abs_diff(2 * r),
                    "unit cube has 2r oriented faces",
                ));
                if *r >= 2 {
                    let bb = boundary_with(&b, sign_rule(ctx.fault))?;
                    report.push(Check::exact(&n("boundary_squared"), bb.terms().len(), "∂∂ of the unit cube is empty"));
                }
            }
            FormsItem::Stokes { form, cube, points } => {
                let omega = form.build()?;
                let r = omega.grade() + 1;
                let cube = match cube {
                    Some(c) => SingularCube::new(c.build()?),
                    None => SingularCube::unit(r),
                };
                let c = Chain::single(cube);
                let q = rule(*points)?;
                report.push(Check::upper(&label, stokes_residual(&omega, &c, &q)?, 1e-10, "|∫_C dω − ∫_∂C ω|"));
                report.push(Check::info(&n("integral"), integrate(&omega.d(), &c, &q)?, "∫_C dω"));
            }
            FormsItem::FormReparam {
                form,
                cube,
                reparam,
                points,
            } => {
                let check = reparam_invariance_check(
                    &form.build()?,
                    &SingularCube::new(cube.build()?),
                    &reparam.build()?,
                    &rule(*points)?,
                )?;
                report.push(Check::upper(&label, check.delta, 1e-8, "form integral before and after reparameterisation"));
                report.push(Check::info(&n("integral"), check.original, "integral over the original cube"));
            }
            FormsItem::LineFunctional { a, b, points } => line_functional(&mut report, &label, *a, *b, *points)?,
            FormsItem::Properties {
                samples,
                stokes_samples,
            } => properties(&mut report, &label, *samples, *stokes_samples, ctx, stream as u64)?,
        }
    }
    Ok(Run {
        report,
        tables: Vec::new(),
    })
}

/// Basis identities: `e_i ∧ e_j = −e_j ∧ e_i`, `e_i ∧ e_i = 0`, and
/// contraction of `ẽ^i ∧ ẽ^j` with `e_i`, `e_j`.
fn algebra_checks(report: &mut Report, dim: usize) -> Result<()> {
    let mut anti = 0;
    let mut contr = 0;
    for i in 0..dim {
        let ei = KVector::<Rational>::basis(dim, &[i])?;
        anti += usize::from(!ei.wedge(&ei)?.is_zero());
        for j in i + 1..dim {
            let ej = KVector::<Rational>::basis(dim, &[j])?;
            anti += usize::from(ei.wedge(&ej)? != ej.wedge(&ei)?.neg());
            let w = KForm::<Rational>::basis(dim, &[i, j])?;
            contr += usize::from(contract(&w, &ei)? != KForm::basis(dim, &[j])?);
            contr += usize::from(contract(&w, &ej)? != KForm::<Rational>::basis(dim, &[i])?.neg());
        }
    }
    report.push(Check::exact("algebra.anticommutativity", anti, "basis vectors anticommute under ∧"));
    report.push(Check::exact("algebra.contraction", contr, "(ẽ^i∧ẽ^j)(e_i) = ẽ^j, (ẽ^i∧ẽ^j)(e_j) = −ẽ^i"));
    Ok(())
}

fn line_functional(report: &mut Report, label: &str, a: f64, b: f64, points: usize) -> Result<()> {
    let q = rule(points)?;
    let s = PolyField::var(1, 0);
    let curve = SmoothMap::from_polys(1, vec![s.scale(&to_rational(a)?), s.scale(&to_rational(b)?)])?;
    let reparam = SmoothMap::from_polys(1, vec![s.pow(2)])?;
    let energy = |v: &[f64]| v[0] * v[0] + v[1] * v[1];
    let length = |v: &[f64]| energy(v).sqrt();
    let e_tau = parameterised_functional(&curve, energy, None, &q)?;
    let e_sigma = parameterised_functional(&curve, energy, Some(&reparam), &q)?;
    let l_tau = parameterised_functional(&curve, length, None, &q)?;
    let l_sigma = parameterised_functional(&curve, length, Some(&reparam), &q)?;
    let a2b2 = a * a + b * b;
    let n = |s: &str| format!("{label}.{s}");
    report.push(Check::upper(&n("energy"), (e_tau - a2b2).abs(), 1e-8, "I_τ = a² + b²"));
    report.push(Check::upper(
        &n("energy_reparameterised"),
        (e_sigma - 4.0 / 3.0 * a2b2).abs(),
        1e-8,
        "I_σ = 4/3 (a² + b²)",
    ));
    report.push(Check::upper(&n("length_invariant"), (l_tau - l_sigma).abs(), 1e-8, "degree-one integrand is invariant"));
    report.push(Check::upper(&n("length"), (l_tau - a2b2.sqrt()).abs(), 1e-8, "length = √(a² + b²)"));
    Ok(())
}

fn properties(
    report: &mut Report,
    label: &str,
    samples: usize,
    stokes_samples: usize,
    ctx: &Context,
    stream: u64,
) -> Result<()> {
    let n = |s: &str| format!("{label}.{s}");
    let mut r = random::rng(ctx.seed, stream);

    let mut bad = 0;
    for k in 0..samples {
        let w = random::form(&mut r, 4, k % 3, 3, 6);
        bad += usize::from(!w.d().d().is_exact_zero());
    }
    report.push(Check::exact(&n("d_squared"), bad, "d(dω) = 0 on random polynomial forms"));

    let mut bad = 0;
    let sign = sign_rule(ctx.fault);
    for k in 0..samples {
        let dim = 2 + k % 3;
        let mut chain = Chain::empty(dim, 3);
        for _ in 0..r.gen_range(1..=3) {
            chain.push(r.gen_range(-3..=3), SingularCube::new(random::map(&mut r, dim, 3)))?;
        }
        bad += usize::from(!boundary_with(&boundary_with(&chain, sign)?, sign)?.is_zero());
    }
    report.push(Check::exact(&n("boundary_squared"), bad, "∂∂C = 0 on random cube chains"));

    let mut bad = 0;
    for k in 0..samples {
        let f = random::map(&mut r, 3, 3);
        let w = random::form(&mut r, 3, 1 + k % 2, 2, 3);
        bad += mismatch(&pullback(&f, &w.d())?, &pullback(&f, &w)?.d());
    }
    report.push(Check::exact(&n("pullback_commutes_with_d"), bad, "f*(dω) = d(f*ω) on random maps"));

    let mut bad = 0;
    for k in 0..samples {
        let (p, qq) = (k % 3, (k / 3) % 3);
        let a = random::form(&mut r, 4, p, 2, 3);
        let b = random::form(&mut r, 4, qq, 2, 3);
        let ba = b.wedge(&a)?;
        let swapped = if p * qq % 2 == 0 { ba } else { ba.neg() };
        bad += mismatch(&a.wedge(&b)?, &swapped);
    }
    report.push(Check::exact(&n("graded_commutativity"), bad, "α∧β = (−1)^{pq} β∧α"));

    let q = QuadratureRule::default();
    for (dim, what) in [(2usize, "square"), (3, "cube")] {
        let c = Chain::single(SingularCube::unit(dim));
        let mut worst: f64 = 0.0;
        for _ in 0..stokes_samples {
            let w = random::form(&mut r, dim, dim - 1, 3, 3);
            worst = worst.max(stokes_residual(&w, &c, &q)?);
        }
        report.push(Check::upper(
            &n(&format!("stokes_{what}")),
            worst,
            1e-8,
            "Stokes residual, random cubic forms, 8 points per axis",
        ));
    }
    report.meta(&n("samples"), samples);
    Ok(())
}
