use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use formdyn::elliptic::{elliptic_k, jacobi};
use formdyn::membrane::{
    integrate_spherical, spherical_residual, spherical_rhs, MembraneElement, SphericalConstants, SphericalScenario,
};
use formdyn::quadrature::QuadratureRule;
use formdyn::Metric;

use super::{Context, Run};
use crate::error::{CliError, Result};
use crate::output::Table;
use crate::random;
use crate::report::{Check, Report};
use crate::scenario::{MembranePayload, PairSampling, SphericalSpec};

const TRIAD_STREAM: u64 = 2;

fn spherical_scenario(s: &SphericalSpec) -> SphericalScenario {
    SphericalScenario {
        r0: s.r0,
        r_dot0: s.r_dot0,
        tau_end: s.tau_end,
        step: s.step,
    }
}

pub fn validate(p: &MembranePayload) -> Result<()> {
    if let Some(s) = &p.spherical {
        spherical_rhs(s.r0, s.r_dot0)?;
        if !(s.tau_end >= 0.0 && s.tau_end.is_finite()) || !(s.step > 0.0 && s.step.is_finite()) {
            return Err(CliError::precondition("spherical run needs tau_end ≥ 0 and step > 0"));
        }
    }
    Ok(())
}

pub fn run(name: &str, p: &MembranePayload, ctx: &Context) -> Result<Run> {
    validate(p)?;
    let mut report = Report::new(name, "membrane", ctx.seed);
    report.meta("action_scale", p.action_scale);
    let mut tables = Vec::new();
    if let Some(t) = &p.triads {
        triads(&mut report, t, ctx.seed)?;
    }
    elliptic(&mut report)?;
    if let Some(s) = &p.spherical {
        tables.push(("radius".into(), spherical(&mut report, s)?));
    }
    Ok(Run { report, tables })
}

fn triads(report: &mut Report, s: &PairSampling, seed: u64) -> Result<()> {
    let m = Metric::minkowski(4);
    let mut r = random::rng(seed, TRIAD_STREAM);
    let (mut constraints, mut norm, mut area) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..s.samples {
        let (a, b, c) = random::membrane_triad(&mut r, &m);
        let el = MembraneElement::new(&a, &b, &c, m.clone())?;
        constraints = constraints.max(el.constraint_suite()?.max());
        norm = norm.max((el.normalization()? - 1.0).abs());
        let (p_rho2, gram2) = el.null_area_check()?;
        area = area.max((p_rho2 - gram2).abs());
    }
    report.push(Check::upper("constraints", constraints, 1e-9, "three norm and six orthogonality identities"));
    report.push(Check::upper("normalization", norm, 1e-10, "|Π(Π̃) − 1|"));
    report.push(Check::upper("null_area_identity", area, 1e-9, "P_ρ² = λ̇²λ′² − (λ̇·λ′)²"));
    report.meta("triads", s.samples);
    Ok(())
}

/// `K(1/√2)` by AGM against Gauss–Legendre on `∫₀^{π/2} dθ/√(1 − ½ sin²θ)`.
fn elliptic(report: &mut Report) -> Result<()> {
    let k = elliptic_k(FRAC_1_SQRT_2)?;
    let q = QuadratureRule::gauss_legendre(48)?;
    let quad = FRAC_PI_2 * q.integrate_1d(|t| 1.0 / (1.0 - 0.5 * (FRAC_PI_2 * t).sin().powi(2)).sqrt());
    report.push(Check::upper("elliptic_k", (k - quad).abs(), 1e-9, "AGM against the defining integral"));
    report.meta("elliptic_k", k);
    Ok(())
}

/// `R̈` of the closed form from the derivatives of cn, against the ODE, on
/// a grid over one period away from collapse.
fn closed_form_ode_residual(k: &SphericalConstants) -> Result<f64> {
    let m = FRAC_1_SQRT_2 * FRAC_1_SQRT_2;
    let period = 4.0 * k.quarter_period();
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let tau = period * i as f64 / 1000.0;
        let (sn, cn, dn) = jacobi(k.gamma - k.alpha * tau, FRAC_1_SQRT_2)?;
        let r = k.r_max * cn;
        if r.abs() < 0.1 * k.r_max {
            continue;
        }
        let r_dot = k.r_max * k.alpha * sn * dn;
        let r_ddot = -k.r_max * k.alpha * k.alpha * cn * (dn * dn - m * sn * sn);
        let scale = 2.0 / r.abs();
        worst = worst.max((r_ddot - spherical_rhs(r.abs(), r_dot)? * r.signum()).abs() / scale);
    }
    Ok(worst)
}

fn spherical(report: &mut Report, s: &SphericalSpec) -> Result<Table> {
    let state = integrate_spherical(&spherical_scenario(s))?;
    let k = state.constants;
    let offset = k.phase_of(s.r0.min(k.r_max), s.r_dot0)?;
    report.meta("r_max", k.r_max);
    report.meta("alpha", k.alpha);
    report.meta("gamma", k.gamma);
    report.meta("E", k.e);
    report.meta("b", k.b);
    report.meta("first_integral", state.c);
    report.meta("phase_offset", offset);
    report.meta("stopped_near_collapse", state.stopped_near_collapse);

    report.push(Check::upper("first_integral_drift", state.max_c_drift, 1e-8, "relative drift of R²/√(1−Ṙ²)"));
    let mut table = Table::new(&["tau", "R", "R_dot", "c", "R_closed"]);
    let mut err: f64 = 0.0;
    for smp in &state.samples {
        let closed = k.state(smp.tau + offset).0;
        err = err.max((smp.r - closed).abs());
        table.push(vec![smp.tau, smp.r, smp.r_dot, smp.c, closed]);
    }
    report.push(Check::upper("closed_form_match", err, 1e-6, "max |R − R_max cn(γ − α(τ + τ₀))|"));
    report.push(Check::upper(
        "frequency_relation",
        (k.alpha * k.r_max - 2f64.sqrt()).abs(),
        1e-12,
        "α R_max = √2",
    ));
    report.push(Check::upper("closed_form_ode", closed_form_ode_residual(&k)?, 1e-9, "cn solution substituted into R̈"));
    let gauge = (1..4)
        .map(|i| spherical_residual(|t| k.state(t), k.quarter_period() * (0.5 + 0.25 * i as f64), 1.1, 1e-4))
        .collect::<formdyn::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    report.push(Check::upper("gauge_fixed_residual", gauge, 1e-6, "gauge-fixed equation on the closed form"));
    match state.collapse_time {
        Some(t) => {
            let predicted = 2.0 * k.quarter_period() - offset;
            report.push(Check::upper("collapse_time", (t - predicted).abs(), 1e-6, "stop time plus remaining fall"));
            report.meta("collapse_time", t);
        }
        None => report.meta("collapse_time", serde_json::Value::Null),
    }
    Ok(table)
}
