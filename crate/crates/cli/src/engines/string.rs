use formdyn::string::{
    em_boundary_residual, endpoint_null_check, field_strength_bulk_term, identity_suite, light_cone_metric,
    momentum_currents, null_end_residual, pi_components, reconstruct_y, solve_light_cone, EndpointCheck,
    LightConeInit, LightConeState, StringSheet, Topology, YField,
};
use formdyn::Metric;

use super::{min_order, Context, Run};
use crate::error::{CliError, Result};
use crate::output::Table;
use crate::random;
use crate::report::{Check, Report};
use crate::scenario::{Coupling, PairSampling, Refinement, StringPayload, WindowSpec};

const PAIR_STREAM: u64 = 1;

pub fn validate(p: &StringPayload) -> Result<()> {
    if let Some(init) = &p.light_cone {
        init.validate()?;
        let w = &p.window;
        let ok = 0.0 <= w.sigma[0] && w.sigma[0] < w.sigma[1] && w.sigma[1] <= 1.0;
        if !ok || !(0.0 <= w.tau[0] && w.tau[0] < w.tau[1] && w.tau[1] <= init.tau_end) {
            return Err(CliError::precondition("residual window must lie inside [0, 1] × [0, tau_end]"));
        }
        if let Some(r) = &p.refinement {
            if !(2..=5).contains(&r.levels) {
                return Err(CliError::precondition("refinement takes 2 to 5 levels"));
            }
        }
        if let Some(c) = &p.coupling {
            let a = c.potential.build()?;
            if a.dim() != 4 || a.grade() != 1 {
                return Err(CliError::precondition("coupling potential must be a 1-form on 4 coordinates"));
            }
        }
    } else if p.refinement.is_some() || p.coupling.is_some() || p.zero_mode_shift.is_some() {
        return Err(CliError::precondition("refinement, coupling and zero mode need `light_cone` data"));
    }
    Ok(())
}

pub fn run(name: &str, p: &StringPayload, ctx: &Context) -> Result<Run> {
    validate(p)?;
    let mut report = Report::new(name, "string", ctx.seed);
    let mut tables = Vec::new();
    if let Some(s) = &p.algebra {
        algebra(&mut report, s, ctx.seed)?;
    }
    if let Some(init) = &p.light_cone {
        let base = Level::solve(init, &p.window)?;
        light_cone_checks(&mut report, init, &base, p)?;
        if let Some(c) = &p.coupling {
            coupling(&mut report, &base, c, &p.window)?;
        }
        tables.push(("charge".into(), charge_table(&base)));
        tables.push(("sheet".into(), sheet_table(&base)));
        if let Some(r) = &p.refinement {
            tables.push(("refinement".into(), refinement(&mut report, init, r, &base, &p.window)?));
        }
    }
    Ok(Run { report, tables })
}

/// Random-pair identities of the momentum currents.
fn algebra(report: &mut Report, s: &PairSampling, seed: u64) -> Result<()> {
    let m = Metric::minkowski(4);
    let mut r = random::rng(seed, PAIR_STREAM);
    let (mut ident, mut norm, mut boosted, mut literal) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (c, sh) = (s.boost_rapidity.cosh(), s.boost_rapidity.sinh());
    let boost = |v: &[f64]| vec![c * v[0] + sh * v[1], sh * v[0] + c * v[1], v[2], v[3]];
    for _ in 0..s.samples {
        let (ld, lp) = random::sheet_pair(&mut r, &m);
        ident = ident.max(identity_suite(&ld, &lp, &m)?.max());
        norm = norm.max((pi_components(&ld, &lp, &m)?.normalization() - 1.0).abs());
        boosted = boosted.max(identity_suite(&boost(&ld), &boost(&lp), &m)?.max());
        let cur = momentum_currents(&ld, &lp, &m)?;
        literal = literal.max((m.dot(&cur.p_sigma, &cur.p_sigma) - m.dot(&ld, &ld)).abs());
    }
    report.push(Check::upper(
        "current_identities",
        ident,
        1e-10,
        "max of |p_τ²+λ′²|, |p_σ²+λ̇²|, |p_τ·λ′|, |p_σ·λ̇|",
    ));
    report.push(Check::upper("normalization", norm, 1e-10, "|Π(Ŷ) − 1| on the unit tangent bivector"));
    report.push(Check::upper("boosted_identities", boosted, 1e-10, "identities after a boost along x¹"));
    report.push(Check::info("sigma_norm_opposite_sign", literal, "|p_σ² − λ̇²|, the opposite-sign variant"));
    report.meta("pairs", s.samples);
    Ok(())
}

/// One grid of a refinement ladder with its residuals.
struct Level {
    state: LightConeState,
    y: YField,
    sheet: StringSheet,
    wave: f64,
    cov: f64,
    endpoint: Option<f64>,
}

impl Level {
    fn solve(init: &LightConeInit, w: &WindowSpec) -> Result<Self> {
        let state = solve_light_cone(init)?;
        let y = reconstruct_y(&state);
        let sheet = state.lift(&y)?;
        let window = sheet.window_for((w.sigma[0], w.sigma[1]), (w.tau[0], w.tau[1]), 0.0);
        let cov = sheet.covariant_eom_residual(&window)?.max_norm;
        let endpoint = match endpoint_null_check(&state, &y) {
            EndpointCheck::Ends(r) => Some(r[0].max(r[1])),
            EndpointCheck::NoBoundary => None,
        };
        Ok(Level {
            wave: state.wave_residual(),
            state,
            y,
            sheet,
            cov,
            endpoint,
        })
    }
}

fn window_points(sheet: &StringSheet, w: &WindowSpec) -> Vec<(usize, usize)> {
    let win = sheet.window_for((w.sigma[0], w.sigma[1]), (w.tau[0], w.tau[1]), 0.0);
    let mut out = Vec::new();
    for n in win.tau.start..win.tau.end.min(sheet.n_tau()) {
        for i in win.sigma.start..win.sigma.end.min(sheet.n_sigma()) {
            out.push((n, i));
        }
    }
    out
}

fn light_cone_checks(report: &mut Report, init: &LightConeInit, base: &Level, p: &StringPayload) -> Result<()> {
    let st = &base.state;
    report.meta("n_sigma", st.n_sigma());
    report.meta("n_tau", st.n_tau());
    report.meta("d_tau", st.d_tau);
    report.meta("action_scale", init.action_scale);
    report.push(Check::info("wave_residual", base.wave, "max |f̈ − f″|, |g̈ − g″| by nested differences"));
    report.push(Check::info("compatibility", base.y.compatibility, "max |∂_τ y′ − ∂_σ ẏ|"));
    report.push(Check::info("charge_drift", st.charge_drift(&base.y), "max |P(τ) − P(0)|"));
    report.push(Check::info("covariant_residual", base.cov, "max |∂_σ p_σ + ∂_τ p_τ| on the window"));
    if let Some(err) = st.max_error_vs_exact(init) {
        report.push(Check::info("error_vs_exact", err, "max grid error against the mode sum"));
    }
    if init.topology == Topology::Closed {
        report.push(Check::info("periodicity_defect", base.y.periodicity_defect, "|∮ y′ dσ| at τ = 0"));
    }

    let m = light_cone_metric();
    let mut norm: f64 = 0.0;
    for (n, i) in window_points(&base.sheet, &p.window) {
        if let Some((ld, lp)) = base.sheet.tangents(n, i) {
            norm = norm.max((pi_components(&ld, &lp, &m)?.normalization() - 1.0).abs());
        }
    }
    report.push(Check::upper("sheet_normalization", norm, 1e-10, "|Π(Ŷ) − 1| on the lifted sheet"));

    match base.endpoint {
        Some(e) => {
            report.push(Check::info("endpoint_null_grid", e, "max |2ẏ − ḟ² − ġ²| at the ends, grid data"));
            if init.exact(0.0, 0.0).is_some() {
                let worst = (0..st.n_tau())
                    .filter_map(|n| null_end_residual(init, st.tau(n)))
                    .map(|r| r[0].max(r[1]))
                    .fold(0.0, f64::max);
                report.push(Check::upper(
                    "endpoint_null_exact",
                    worst,
                    1e-8,
                    "max |2ẏ − ḟ² − ġ²| at the ends, analytic data",
                ));
            }
        }
        None => report.meta("endpoints", "no boundary"),
    }

    if let Some(shift) = p.zero_mode_shift {
        let moved = base.y.with_zero_mode(shift);
        let err = moved
            .y
            .iter()
            .flatten()
            .zip(base.y.y.iter().flatten())
            .map(|(a, b)| (a - b - shift).abs())
            .fold(0.0, f64::max);
        report.push(Check::upper("zero_mode_shift", err, 1e-12 * (1.0 + shift.abs()), "y⁻ moves rigidly"));
    }
    Ok(())
}

fn coupling(report: &mut Report, base: &Level, c: &Coupling, w: &WindowSpec) -> Result<()> {
    let a = c.potential.build()?;
    let f = a.d();
    report.push(Check::exact("coupling.closed", usize::from(!f.d().is_exact_zero()), "dF = 0 for F = dA"));
    let mut bulk: f64 = 0.0;
    for (n, i) in window_points(&base.sheet, w) {
        if let Some((ld, lp)) = base.sheet.tangents(n, i) {
            let term = field_strength_bulk_term(&f, base.sheet.point(n, i), &ld, &lp)?;
            bulk = bulk.max(term.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
    }
    report.push(Check::upper("coupling.bulk_force", bulk, 1e-12, "dF(λ̇ ∧ λ′) on the sheet"));
    let m = light_cone_metric();
    let (mut free, mut coupled) = (0.0f64, 0.0f64);
    for n in 0..base.state.n_tau() {
        if let Some(ends) = base.state.endpoint_samples(&base.y, n) {
            let r0 = em_boundary_residual(&ends, &f, 0.0, &m)?;
            let rq = em_boundary_residual(&ends, &f, c.charge, &m)?;
            free = free.max(r0[0].max(r0[1]));
            coupled = coupled.max(rq[0].max(rq[1]));
        }
    }
    report.push(Check::info("coupling.free_end_residual", free, "max |p_σ| at the ends with q = 0"));
    report.push(Check::info("coupling.charged_end_residual", coupled, "end condition with q ≠ 0 for a free solution"));
    Ok(())
}

fn refine(init: &LightConeInit, k: usize) -> LightConeInit {
    let scale = 1usize << k;
    let n_sigma = match init.topology {
        Topology::Open => (init.n_sigma - 1) * scale + 1,
        Topology::Closed => init.n_sigma * scale,
    };
    LightConeInit {
        n_sigma,
        n_tau: init.n_tau.map(|n| n * scale),
        ..init.clone()
    }
}

fn refinement(report: &mut Report, init: &LightConeInit, r: &Refinement, base: &Level, w: &WindowSpec) -> Result<Table> {
    let mut levels = vec![];
    for k in 1..r.levels {
        levels.push(Level::solve(&refine(init, k), w)?);
    }
    let all: Vec<&Level> = std::iter::once(base).chain(&levels).collect();
    let mut table = Table::new(&["n_sigma", "d_sigma", "wave", "compatibility", "charge_drift", "covariant", "endpoint"]);
    for l in &all {
        table.push(vec![
            l.state.n_sigma() as f64,
            l.state.d_sigma,
            l.wave,
            l.y.compatibility,
            l.state.charge_drift(&l.y),
            l.cov,
            l.endpoint.unwrap_or(f64::NAN),
        ]);
    }
    let series = |f: &dyn Fn(&Level) -> f64| all.iter().map(|l| f(l)).collect::<Vec<_>>();
    let orders = [
        ("order.wave", series(&|l| l.wave), "observed order of the wave residual"),
        ("order.compatibility", series(&|l| l.y.compatibility), "observed order of the compatibility residual"),
        ("order.charge_drift", series(&|l| l.state.charge_drift(&l.y)), "observed order of the charge drift"),
        ("order.covariant", series(&|l| l.cov), "observed order of the lifted covariant residual"),
    ];
    for (name, s, note) in orders {
        report.push(Check::lower(name, min_order(&s), r.min_order, note));
    }
    if base.endpoint.is_some() {
        let s = series(&|l| l.endpoint.unwrap_or(f64::NAN));
        report.push(Check::info("order.endpoint_null_grid", min_order(&s), "observed order of the grid end residual"));
    }
    report.meta("refinement_levels", r.levels);
    Ok(table)
}

fn charge_table(l: &Level) -> Table {
    let mut t = Table::new(&["tau", "P0", "P1", "P2", "P3"]);
    for (n, p) in l.state.conserved_charge(&l.y).iter().enumerate() {
        t.push(vec![l.state.tau(n), p[0], p[1], p[2], p[3]]);
    }
    t
}

fn sheet_table(l: &Level) -> Table {
    let st = &l.state;
    let mut t = Table::new(&["tau", "sigma", "f", "g", "y"]);
    for n in 0..st.n_tau() {
        for i in 0..st.n_sigma() {
            t.push(vec![st.tau(n), st.sigma(i), st.f[n][i], st.g[n][i], l.y.y[n][i]]);
        }
    }
    t
}
