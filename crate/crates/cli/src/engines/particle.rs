use std::f64::consts::PI;

use formdyn::worldline::{em_field, integrate_worldline_affine, MetricField, ParticleScenario, WorldlineTrajectory};
use formdyn::{FieldForm, Metric, ScalarField};

use super::{max_abs_diff, Context, Run};
use crate::error::{CliError, Result};
use crate::output::Table;
use crate::report::{Check, Report};
use crate::scenario::{MetricSpec, ParticlePayload};

fn metric(spec: &MetricSpec, dim: usize) -> Result<MetricField> {
    Ok(match spec {
        MetricSpec::Minkowski => MetricField::constant(Metric::minkowski(dim)),
        MetricSpec::Constant { components } => MetricField::constant(Metric::new(components.clone())?),
        MetricSpec::Polynomial { components } => {
            let rows = components
                .iter()
                .map(|row| row.iter().map(|e| Ok(ScalarField::from(e.build()?))).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            MetricField::from_fields(rows)?
        }
    })
}

fn scenario(p: &ParticlePayload, potential: Option<FieldForm>) -> Result<ParticleScenario> {
    let sc = ParticleScenario {
        mass: p.mass,
        charge: p.charge,
        metric: metric(&p.metric, p.x0.len())?,
        potential,
        x0: p.x0.clone(),
        u0: p.u0.clone(),
        tau_end: p.tau_end,
        step: p.step,
    };
    sc.validate()?;
    if !(p.speed > 0.0 && p.speed.is_finite()) {
        return Err(CliError::precondition("parameter speed must be positive"));
    }
    Ok(sc)
}

fn shifted(p: &ParticlePayload, base: &Option<FieldForm>) -> Result<Option<FieldForm>> {
    let Some(phi) = &p.gauge_shift else { return Ok(None) };
    let d_phi = FieldForm::function(phi.build()?.into()).d();
    let a = match base {
        Some(a) => a.add(&d_phi)?,
        None => d_phi,
    };
    Ok(Some(a))
}

pub fn validate(p: &ParticlePayload) -> Result<()> {
    let a = p.potential.as_ref().map(|f| f.build()).transpose()?;
    if let Some(sh) = shifted(p, &a)? {
        scenario(p, Some(sh))?;
    }
    if let Some(g) = &p.expect.gyration {
        if g.plane.iter().any(|&i| i >= p.x0.len()) || g.plane[0] == g.plane[1] {
            return Err(CliError::precondition("gyration plane must name two distinct components"));
        }
    }
    scenario(p, a).map(|_| ())
}

/// Accumulated rotation angle of `(u^i, u^j)` divided by the elapsed time.
fn angular_frequency(t: &WorldlineTrajectory, plane: [usize; 2]) -> f64 {
    let angle = |u: &[f64]| u[plane[1]].atan2(u[plane[0]]);
    let mut total = 0.0;
    for w in t.samples.windows(2) {
        let mut d = angle(&w[1].u) - angle(&w[0].u);
        if d > PI {
            d -= 2.0 * PI;
        } else if d < -PI {
            d += 2.0 * PI;
        }
        total += d;
    }
    total.abs() / t.samples.last().map_or(0.0, |s| s.tau)
}

pub fn run(name: &str, p: &ParticlePayload, ctx: &Context) -> Result<Run> {
    validate(p)?;
    let potential = p.potential.as_ref().map(|f| f.build()).transpose()?;
    let sc = scenario(p, potential.clone())?;
    let traj = integrate_worldline_affine(&sc, p.speed)?;
    let mut report = Report::new(name, "particle", ctx.seed);
    let n = sc.x0.len();
    let first = &traj.samples[0];
    let last = traj.samples.last().expect("at least the initial sample");

    report.push(Check::info("shell_drift", traj.max_shell_drift, "largest |λ̇² − κ²|/κ² before projection"));
    let g = sc.metric.at(&last.x)?;
    let m2 = p.mass * p.mass;
    report.push(Check::upper(
        "mass_shell",
        (g.dot(&last.p, &last.p) - m2).abs() / m2,
        1e-10,
        "relative |p² − m²| at the final sample",
    ));
    if p.expect.momentum_conserved {
        let drift = traj
            .samples
            .iter()
            .map(|s| max_abs_diff(&s.p, &first.p))
            .fold(0.0, f64::max);
        report.push(Check::upper("momentum_conservation", drift, 1e-10, "max |p(τ) − p(0)|"));
    }
    if p.expect.straight_line {
        let err = traj
            .samples
            .iter()
            .map(|s| {
                let line: Vec<f64> = (0..n).map(|i| first.x[i] + first.u[i] * s.tau).collect();
                max_abs_diff(&s.x, &line)
            })
            .fold(0.0, f64::max);
        report.push(Check::upper("straight_line", err, 1e-10, "x(τ) = x(0) + ẋ(0) τ"));
    }
    if let Some(gy) = &p.expect.gyration {
        let omega = angular_frequency(&traj, gy.plane);
        report.push(Check::upper(
            "gyration_frequency",
            (omega / gy.frequency - 1.0).abs(),
            1e-6,
            "relative error of the proper-time angular frequency",
        ));
        report.meta("gyration_frequency", omega);
    }
    if let Some(a) = &potential {
        let f = em_field(a)?;
        report.push(Check::exact("bianchi", usize::from(!f.d().is_exact_zero()), "dF = 0 for F = dA"));
        if let Some(a2) = shifted(p, &potential)? {
            let f2 = em_field(&a2)?;
            report.push(Check::exact(
                "gauge_field_unchanged",
                usize::from(f.exact_eq(&f2) != Some(true)),
                "d(A + dφ) = dA, exact",
            ));
        }
    }
    if let Some(a2) = shifted(p, &potential)? {
        let other = integrate_worldline_affine(&scenario(p, Some(a2))?, p.speed)?;
        let diff = traj
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(s, t)| max_abs_diff(&s.x, &t.x))
            .fold(0.0, f64::max);
        report.push(Check::upper("gauge_shift_trajectory", diff, 1e-10, "trajectory with A + dφ against A"));
    }
    report.meta("samples", traj.samples.len());

    let header: Vec<String> = std::iter::once("tau".to_string())
        .chain((0..n).map(|i| format!("x{i}")))
        .chain((0..n).map(|i| format!("u{i}")))
        .chain((0..n).map(|i| format!("p{i}")))
        .collect();
    let mut table = Table::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for s in &traj.samples {
        let mut row = vec![s.tau];
        row.extend(&s.x);
        row.extend(&s.u);
        row.extend(&s.p);
        table.push(row);
    }
    Ok(Run {
        report,
        tables: vec![("trajectory".into(), table)],
    })
}
