use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use formdyn::elliptic::{elliptic_k, jacobi};
use formdyn::membrane::{
    first_integral, integrate_spherical, spherical_residual, MembraneElement, SphericalConstants, SphericalScenario,
};
use formdyn::string::{
    endpoint_null_check, identity_suite, momentum_currents, null_end_residual, pi_components, reconstruct_y,
    solve_light_cone, EndpointCheck, LightConeInit, ModeKind, Profile, Topology,
};
use formdyn::worldline::{integrate_worldline, integrate_worldline_affine, MetricField, ParticleScenario};
use formdyn::{rat, FieldForm, Metric, PolyField, ScalarField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mink() -> Metric<f64> {
    Metric::minkowski(4)
}

/// Random timelike vector with `v² ∈ [0.2, 4]`-ish.
fn timelike(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let t = s + rng.gen_range(0.3..2.0);
    vec![t, v[0], v[1], v[2]]
}

fn any_vector(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect()
}

fn order(a: f64, b: f64) -> f64 {
    (a / b).log2()
}

/// Boost along x¹ with rapidity `eta`.
fn boost(v: &[f64], eta: f64) -> Vec<f64> {
    let (c, s) = (eta.cosh(), eta.sinh());
    vec![c * v[0] + s * v[1], s * v[0] + c * v[1], v[2], v[3]]
}

// ---------- particle ----------

#[test]
fn free_particle_conserves_momentum() {
    let sc = ParticleScenario::free(2.0, vec![0.0; 4], vec![1.5, 0.4, -0.3, 0.7], 1.0, 1e-3);
    let t = integrate_worldline(&sc).unwrap();
    assert_eq!(t.samples.len(), 1001);
    let p0 = &t.samples[0].p;
    let drift = t
        .samples
        .iter()
        .flat_map(|s| s.p.iter().zip(p0).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    assert!(drift < 1e-10, "{drift}");
    // p² = m²
    let last = &t.samples.last().unwrap().p;
    assert!((mink().dot(last, last) - 4.0).abs() < 1e-12);
}

fn magnetic(b: i64, shift: bool) -> FieldForm {
    let a = FieldForm::from_terms(4, 1, [(vec![2], PolyField::var(4, 1).scale(&rat(-b, 1)))]).unwrap();
    if !shift {
        return a;
    }
    let phi = PolyField::var(4, 1)
        .mul(&PolyField::var(4, 2))
        .unwrap()
        .add(&PolyField::var(4, 3).pow(2))
        .unwrap();
    a.add(&FieldForm::function(phi.into()).d()).unwrap()
}

fn gyration(shift: bool, speed: f64) -> formdyn::worldline::WorldlineTrajectory {
    // proper-time frequency q B / m = 1.5 · 2 / 1.2 = 2.5
    let period = 2.0 * PI / 2.5;
    let steps = 2000.0;
    let sc = ParticleScenario {
        charge: 1.5,
        potential: Some(magnetic(2, shift)),
        ..ParticleScenario::free(1.2, vec![0.0; 4], vec![1.25, 0.75, 0.0, 0.0], period, period / steps)
    };
    integrate_worldline_affine(&sc, speed).unwrap()
}

#[test]
fn gyration_frequency() {
    let t = gyration(false, 1.0);
    let mut angle = 0.0;
    let mut prev = t.samples[0].u[2].atan2(t.samples[0].u[1]);
    for s in &t.samples[1..] {
        let a = s.u[2].atan2(s.u[1]);
        let mut d = a - prev;
        if d > PI {
            d -= 2.0 * PI;
        }
        if d < -PI {
            d += 2.0 * PI;
        }
        angle += d;
        prev = a;
    }
    let tau = t.samples.last().unwrap().tau;
    let omega = angle.abs() / tau;
    assert!((omega / 2.5 - 1.0).abs() < 1e-6, "{omega}");
    // closes on itself after one period
    let (x0, x1) = (&t.samples[0].x, &t.samples.last().unwrap().x);
    assert!((x1[1] - x0[1]).abs() < 1e-8 && (x1[2] - x0[2]).abs() < 1e-8);
}

#[test]
fn gauge_shift_leaves_trajectory_unchanged() {
    let (a, b) = (gyration(false, 1.0), gyration(true, 1.0));
    let diff = a
        .samples
        .iter()
        .zip(&b.samples)
        .flat_map(|(s, t)| s.x.iter().zip(&t.x).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max);
    assert!(diff < 1e-10, "{diff}");
}

#[test]
fn affine_parameter_traces_same_path() {
    let (a, b) = (gyration(false, 1.0), gyration(false, 2.0));
    let (xa, xb) = (&a.samples.last().unwrap().x, &b.samples.last().unwrap().x);
    for (p, q) in xa.iter().zip(xb) {
        assert!((p - q).abs() < 1e-8);
    }
}

#[test]
fn polar_geodesic_is_a_straight_line() {
    // Euclidean plane in polar coordinates; the path r cos θ = 1 is straight
    let r = PolyField::var(2, 0);
    let comps = vec![
        vec![ScalarField::constant(2, rat(1, 1)), ScalarField::zero(2)],
        vec![ScalarField::zero(2), r.pow(2).into()],
    ];
    let sc = ParticleScenario {
        metric: MetricField::from_fields(comps).unwrap(),
        ..ParticleScenario::free(1.0, vec![1.0, 0.0], vec![0.0, 1.0], 1.0, 1e-3)
    };
    let t = integrate_worldline(&sc).unwrap();
    for s in t.samples.iter().step_by(100) {
        let (rr, th) = (s.x[0], s.x[1]);
        assert!((rr * th.cos() - 1.0).abs() < 1e-9, "{rr} {th}");
        assert!((rr * th.sin() - s.tau).abs() < 1e-9);
    }
}

// ---------- string algebra ----------

fn lorentz_pair(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    loop {
        let (ld, lp) = (timelike(rng), any_vector(rng));
        let m = mink();
        let d2 = m.dot(&ld, &lp).powi(2) - m.dot(&ld, &ld) * m.dot(&lp, &lp);
        if m.dot(&lp, &lp) < -0.05 && d2 > 0.05 {
            return (ld, lp);
        }
    }
}

#[test]
fn string_identities_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = mink();
    for _ in 0..1000 {
        let (ld, lp) = lorentz_pair(&mut rng);
        let r = identity_suite(&ld, &lp, &m).unwrap();
        assert!(r.max() < 1e-10, "{r:?}");
        let s = pi_components(&ld, &lp, &m).unwrap();
        assert!((s.normalization() - 1.0).abs() < 1e-10);
        // independent expansion: p_τ² = −λ′² from the determinant
        let c = momentum_currents(&ld, &lp, &m).unwrap();
        let (a, b, ab) = (m.dot(&ld, &ld), m.dot(&lp, &lp), m.dot(&ld, &lp));
        let d2 = ab * ab - a * b;
        let direct = (b * b * a - 2.0 * b * ab * ab + ab * ab * b) / d2;
        assert!((m.dot(&c.p_tau, &c.p_tau) - direct).abs() < 1e-10);
        assert!((direct + b).abs() < 1e-10);
        for mu in 0..4 {
            for nu in 0..4 {
                assert_eq!(s.component(mu, nu), -s.component(nu, mu));
            }
        }
        // boosted pair gives the same residual profile
        let rb = identity_suite(&boost(&ld, 0.7), &boost(&lp, 0.7), &m).unwrap();
        assert!(rb.max() < 1e-10);
    }
}

// ---------- light-cone dynamics ----------

fn standing(n: usize, tau_end: f64) -> LightConeInit {
    LightConeInit {
        f: Profile::mode(ModeKind::Cos, 1, 1.0),
        ..LightConeInit::new(Topology::Open, n, tau_end)
    }
}

fn cov_residual(n: usize) -> f64 {
    let state = solve_light_cone(&standing(n, 0.5)).unwrap();
    let y = reconstruct_y(&state);
    let sheet = state.lift(&y).unwrap();
    let w = sheet.window_for((0.2, 0.8), (0.05, 0.35), 0.0);
    sheet.covariant_eom_residual(&w).unwrap().max_norm
}

#[test]
fn light_cone_residuals_converge_at_second_order() {
    let grids = [41, 81, 161];
    let mut wave = vec![];
    let mut compat = vec![];
    let mut drift = vec![];
    let mut cov = vec![];
    for &n in &grids {
        let state = solve_light_cone(&standing(n, 2.0)).unwrap();
        let y = reconstruct_y(&state);
        wave.push(state.wave_residual());
        compat.push(y.compatibility);
        drift.push(state.charge_drift(&y));
        cov.push(cov_residual(n));
    }
    for series in [&wave, &compat, &drift, &cov] {
        for k in 0..2 {
            assert!(order(series[k], series[k + 1]) >= 1.8, "{series:?}");
        }
    }
}

#[test]
fn light_cone_matches_dalembert_solution() {
    let init = LightConeInit {
        f: Profile::mode(ModeKind::Cos, 1, 0.5),
        g: Profile::mode(ModeKind::Cos, 2, 0.2),
        g_dot: Profile::mode(ModeKind::Cos, 1, 0.3),
        ..LightConeInit::new(Topology::Open, 81, 1.0)
    };
    let state = solve_light_cone(&init).unwrap();
    // independent oracle: ½[F(σ+τ) + F(σ−τ)] + ½∫V over the even extension
    let f_exact = |s: f64, t: f64| 0.25 * ((PI * (s + t)).cos() + (PI * (s - t)).cos());
    let g_exact = |s: f64, t: f64| {
        0.1 * ((2.0 * PI * (s + t)).cos() + (2.0 * PI * (s - t)).cos())
            + 0.15 / PI * ((PI * (s + t)).sin() - (PI * (s - t)).sin())
    };
    let mut err: f64 = 0.0;
    for n in 0..state.n_tau() {
        for i in 0..state.n_sigma() {
            let (s, t) = (state.sigma(i), state.tau(n));
            err = err.max((state.f[n][i] - f_exact(s, t)).abs()).max((state.g[n][i] - g_exact(s, t)).abs());
        }
    }
    assert!(err < 2e-3, "{err}");
}

#[test]
fn null_ends_of_standing_wave() {
    let init = standing(41, 2.0);
    for k in 0..50 {
        let r = null_end_residual(&init, 0.04 * k as f64).unwrap();
        assert!(r[0] < 1e-8 && r[1] < 1e-8);
    }
    let mut grid = vec![];
    for n in [21, 41, 81] {
        let state = solve_light_cone(&standing(n, 2.0)).unwrap();
        let EndpointCheck::Ends(r) = endpoint_null_check(&state, &reconstruct_y(&state)) else {
            panic!("open string");
        };
        grid.push(r[0].max(r[1]));
    }
    assert!(order(grid[0], grid[1]) > 1.8 && order(grid[1], grid[2]) > 1.8, "{grid:?}");
}

#[test]
fn standing_wave_is_periodic() {
    let init = standing(81, 2.0);
    let state = solve_light_cone(&init).unwrap();
    let (first, last) = (&state.f[0], state.f.last().unwrap());
    let e = first.iter().zip(last).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(e < 1e-2, "{e}");
}

// ---------- membrane ----------

fn membrane_triad(rng: &mut ChaCha8Rng) -> MembraneElement {
    loop {
        let (a, b, c) = (timelike(rng), any_vector(rng), any_vector(rng));
        let el = MembraneElement::new(&a, &b, &c, mink()).unwrap();
        let m = mink();
        if m.dot(&b, &b) < -0.05 && m.dot(&c, &c) < -0.05 && el.delta_squared() > 0.05 {
            return el;
        }
    }
}

/// `det[λ_a·λ_b]` restricted to two tangents, expanded by hand.
fn gram2(m: &Metric<f64>, a: &[f64], b: &[f64]) -> f64 {
    m.dot(a, a) * m.dot(b, b) - m.dot(a, b) * m.dot(a, b)
}

#[test]
fn membrane_identities_on_random_triads() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let m = mink();
    for _ in 0..1000 {
        let el = membrane_triad(&mut rng);
        assert!(el.constraint_suite().unwrap().max() < 1e-9);
        assert!((el.normalization().unwrap() - 1.0).abs() < 1e-10);
        let p = el.momenta().unwrap();
        assert!((m.dot(&p.p_rho, &p.p_rho) - gram2(&m, &el.ld, &el.lp)).abs() < 1e-9);
        // brute force over the four canonical triples with raised components
        let form = el.momentum_form().unwrap();
        let raised = formdyn::exterior::sharp_multi(&form.pi, &m).unwrap();
        let brute: f64 = formdyn::membrane::PI_TRIPLES
            .iter()
            .map(|t| form.pi.component(t) * raised.component(t))
            .sum();
        assert!((brute - 1.0).abs() < 1e-10);
    }
}

#[test]
fn spherical_run_follows_cn_and_conserves_c() {
    let sc = SphericalScenario {
        r0: 1.0,
        r_dot0: 0.0,
        tau_end: 3.0,
        step: 1e-3,
    };
    let state = integrate_spherical(&sc).unwrap();
    assert!(state.stopped_near_collapse);
    assert!(state.max_c_drift < 1e-8);
    let k = state.constants;
    assert!((k.alpha * k.r_max - 2f64.sqrt()).abs() < 1e-15);
    let shift = k.quarter_period();
    let err = state
        .samples
        .iter()
        .map(|s| (s.r - k.state(s.tau + shift).0).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
    for s in &state.samples {
        assert!(((first_integral(s.r, s.r_dot) - state.c) / state.c).abs() < 1e-8);
    }
}

/// `∫₀¹ dR/√(1 − R⁴)`; with `R = sin φ` this is `∫₀^{π/2} dφ/√(1 + sin²φ)`,
/// evaluated by composite Simpson.
fn collapse_time_oracle() -> f64 {
    let n = 20_000;
    let h = FRAC_PI_2 / n as f64;
    let f = |p: f64| 1.0 / (1.0 + p.sin().powi(2)).sqrt();
    let mut s = f(0.0) + f(FRAC_PI_2);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

#[test]
fn collapse_time_matches_quadrature() {
    let oracle = collapse_time_oracle();
    assert!((oracle - 1.311_028_777_146_06).abs() < 1e-9, "{oracle}");
    let state = integrate_spherical(&SphericalScenario {
        r0: 1.0,
        r_dot0: 0.0,
        tau_end: 3.0,
        step: 1e-3,
    })
    .unwrap();
    assert!((state.collapse_time.unwrap() - oracle).abs() < 1e-6);
    let k = elliptic_k(FRAC_1_SQRT_2).unwrap();
    assert!((k / 2f64.sqrt() - oracle).abs() < 1e-9);
}

#[test]
fn k_and_jacobi_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let k: f64 = rng.gen_range(0.0..0.99);
        let u: f64 = rng.gen_range(-6.0..6.0);
        let (sn, cn, dn) = jacobi(u, k).unwrap();
        assert!((sn * sn + cn * cn - 1.0).abs() < 1e-12);
        assert!((dn * dn + k * k * sn * sn - 1.0).abs() < 1e-12);
        assert!(cn.abs() <= 1.0);
    }
}

#[test]
fn closed_form_solves_the_radial_equation() {
    for r_max in [0.5, 1.0, 2.0] {
        let k = SphericalConstants::new(r_max).unwrap();
        let period = 4.0 * k.quarter_period();
        for i in 1..1000 {
            let tau = period * i as f64 / 1000.0;
            let (r, rd) = k.state(tau);
            if r.abs() < 0.1 * r_max {
                continue;
            }
            // first integral of the closed form
            let c = r * r / (1.0 - rd * rd).sqrt();
            assert!((c - r_max * r_max).abs() < 1e-9 * r_max * r_max, "{c}");
        }
        // second-order check through the gauge-fixed residual, away from collapse
        let res = spherical_residual(|t| k.state(t), period / 4.0, 1.1, 1e-4).unwrap();
        assert!(res.abs() < 1e-6, "{res}");
    }
}
