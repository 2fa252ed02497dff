//! Light-cone gauge string: transverse wave equations, reconstruction of
//! `y⁻` from the constraints, and the lift back to spacetime.
//!
//! Coordinates are `(y⁺, y⁻, x², x³)` with `y⁺ = τ`; the embedding is
//! `λ = (τ, y, f, g)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::Metric;
use crate::string::algebra::EndpointSample;
use crate::string::sheet::{StringSheet, Topology};

/// Tolerance on the boundary data compatibility checks.
const PROFILE_TOL: f64 = 1e-8;

/// `ds² = 2 dy⁺dy⁻ − (dx²)² − (dx³)²`.
pub fn light_cone_metric() -> Metric<f64> {
    Metric::new(vec![
        vec![0.0, 1.0, 0.0, 0.0],
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, -1.0, 0.0],
        vec![0.0, 0.0, 0.0, -1.0],
    ])
    .expect("light-cone metric is invertible")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Cos,
    Sin,
}

/// `amp · cos(kπσ)` or `amp · sin(kπσ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub kind: ModeKind,
    pub k: u32,
    pub amp: f64,
}

impl FourierMode {
    fn phase(&self, sigma: f64) -> (f64, f64) {
        let w = self.k as f64 * PI;
        let (s, c) = (w * sigma).sin_cos();
        match self.kind {
            ModeKind::Cos => (c, -w * s),
            ModeKind::Sin => (s, w * c),
        }
    }
}

/// Initial profile on `σ ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Profile {
    Fourier {
        #[serde(default)]
        constant: f64,
        #[serde(default)]
        modes: Vec<FourierMode>,
    },
    /// `Σ coeffs[n] σⁿ`.
    Polynomial { coeffs: Vec<f64> },
}

impl Default for Profile {
    fn default() -> Self {
        Profile::zero()
    }
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Fourier {
            constant: 0.0,
            modes: Vec::new(),
        }
    }

    pub fn mode(kind: ModeKind, k: u32, amp: f64) -> Self {
        Profile::Fourier {
            constant: 0.0,
            modes: vec![FourierMode { kind, k, amp }],
        }
    }

    pub fn value(&self, sigma: f64) -> f64 {
        match self {
            Profile::Fourier { constant, modes } => {
                constant + modes.iter().map(|m| m.amp * m.phase(sigma).0).sum::<f64>()
            }
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * sigma + c),
        }
    }

    pub fn derivative(&self, sigma: f64) -> f64 {
        match self {
            Profile::Fourier { modes, .. } => modes.iter().map(|m| m.amp * m.phase(sigma).1).sum(),
            Profile::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (n, c)| acc * sigma + n as f64 * c),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Profile::Fourier { constant, modes } => *constant == 0.0 && modes.iter().all(|m| m.amp == 0.0),
            Profile::Polynomial { coeffs } => coeffs.iter().all(|c| *c == 0.0),
        }
    }

    fn check_boundary(&self, name: &str, topology: Topology) -> Result<()> {
        let (d0, d1) = (self.derivative(0.0), self.derivative(1.0));
        match topology {
            Topology::Open if d0.abs() > PROFILE_TOL || d1.abs() > PROFILE_TOL => Err(Error::precondition(format!(
                "open string needs Neumann data: {name}′(0) = {d0:e}, {name}′(1) = {d1:e}"
            ))),
            Topology::Closed
                if (self.value(0.0) - self.value(1.0)).abs() > PROFILE_TOL || (d0 - d1).abs() > PROFILE_TOL =>
            {
                Err(Error::precondition(format!("closed string needs a periodic {name} profile")))
            }
            _ => Ok(()),
        }
    }
}

/// d'Alembert evolution of Fourier data: `(u, u̇, u′)` at `(σ, τ)`.
fn exact_mode_sum(pos: &Profile, vel: &Profile, sigma: f64, tau: f64) -> Option<[f64; 3]> {
    let (Profile::Fourier { constant: c0, modes: pm }, Profile::Fourier { constant: v0, modes: vm }) = (pos, vel)
    else {
        return None;
    };
    let mut out = [c0 + v0 * tau, *v0, 0.0];
    for m in pm {
        let w = m.k as f64 * PI;
        let (phi, dphi) = m.phase(sigma);
        let (s, c) = (w * tau).sin_cos();
        out[0] += m.amp * phi * c;
        out[1] -= m.amp * phi * w * s;
        out[2] += m.amp * dphi * c;
    }
    for m in vm {
        let w = m.k as f64 * PI;
        let (phi, dphi) = m.phase(sigma);
        if m.k == 0 {
            out[0] += m.amp * phi * tau;
            out[1] += m.amp * phi;
            continue;
        }
        let (s, c) = (w * tau).sin_cos();
        out[0] += m.amp * phi * s / w;
        out[1] += m.amp * phi * c;
        out[2] += m.amp * dphi * s / w;
    }
    Some(out)
}

fn default_cfl() -> f64 {
    0.5
}

fn default_action_scale() -> f64 {
    1.0
}

/// Initial data and grid for a light-cone evolution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightConeInit {
    #[serde(default)]
    pub f: Profile,
    #[serde(default)]
    pub f_dot: Profile,
    #[serde(default)]
    pub g: Profile,
    #[serde(default)]
    pub g_dot: Profile,
    pub topology: Topology,
    pub n_sigma: usize,
    pub tau_end: f64,
    /// Requested `dτ/dσ`; the step is shrunk so that `tau_end` is hit
    /// exactly.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    /// Fixes the number of τ steps instead of deriving it from `cfl`.
    #[serde(default)]
    pub n_tau: Option<usize>,
    /// Overall action prefactor. Never enters the evolution.
    #[serde(default = "default_action_scale")]
    pub action_scale: f64,
}

impl LightConeInit {
    /// Standing-wave template: zero data on an `n_sigma` grid, `cfl = 0.5`.
    pub fn new(topology: Topology, n_sigma: usize, tau_end: f64) -> Self {
        LightConeInit {
            f: Profile::zero(),
            f_dot: Profile::zero(),
            g: Profile::zero(),
            g_dot: Profile::zero(),
            topology,
            n_sigma,
            tau_end,
            cfl: default_cfl(),
            n_tau: None,
            action_scale: default_action_scale(),
        }
    }

    pub fn d_sigma(&self) -> f64 {
        match self.topology {
            Topology::Open => 1.0 / (self.n_sigma as f64 - 1.0),
            Topology::Closed => 1.0 / self.n_sigma as f64,
        }
    }

    /// Number of τ steps and the step size.
    pub fn time_grid(&self) -> (usize, f64) {
        let steps = self
            .n_tau
            .unwrap_or_else(|| (self.tau_end / (self.cfl * self.d_sigma()) - 1e-9).ceil().max(1.0) as usize);
        (steps, self.tau_end / steps as f64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sigma < 5 {
            return Err(Error::precondition(format!(
                "light-cone grid needs at least 5 σ samples, got {}",
                self.n_sigma
            )));
        }
        if !(self.tau_end.is_finite() && self.tau_end > 0.0) {
            return Err(Error::precondition("tau_end must be positive and finite"));
        }
        if self.n_tau.is_none() && !(self.cfl.is_finite() && self.cfl > 0.0) {
            return Err(Error::precondition("cfl must be positive"));
        }
        let (steps, dt) = self.time_grid();
        if steps < 2 {
            return Err(Error::precondition("light-cone evolution needs at least 2 τ steps"));
        }
        let ratio = dt / self.d_sigma();
        if ratio > 1.0 + 1e-12 {
            return Err(Error::precondition(format!(
                "CFL condition violated: dτ/dσ = {ratio} > 1"
            )));
        }
        for (name, p) in [("f", &self.f), ("ḟ", &self.f_dot), ("g", &self.g), ("ġ", &self.g_dot)] {
            p.check_boundary(name, self.topology)?;
        }
        Ok(())
    }

    /// Analytic `[f, ḟ, f′, g, ġ, g′]` when all four profiles are Fourier.
    pub fn exact(&self, sigma: f64, tau: f64) -> Option<[f64; 6]> {
        let f = exact_mode_sum(&self.f, &self.f_dot, sigma, tau)?;
        let g = exact_mode_sum(&self.g, &self.g_dot, sigma, tau)?;
        Some([f[0], f[1], f[2], g[0], g[1], g[2]])
    }
}

/// Transverse fields on the `[τ][σ]` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct LightConeState {
    pub f: Vec<Vec<f64>>,
    pub g: Vec<Vec<f64>>,
    pub d_sigma: f64,
    pub d_tau: f64,
    pub topology: Topology,
    pub action_scale: f64,
    f_dot0: Vec<f64>,
    g_dot0: Vec<f64>,
}

/// `∂_τ` and `∂_σ` of one transverse field on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDerivatives {
    pub dot: Vec<Vec<f64>>,
    pub prime: Vec<Vec<f64>>,
}

/// Reconstructed `y⁻` with its constraint derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct YField {
    pub y: Vec<Vec<f64>>,
    /// `ẏ = ½(ḟ² + ġ² + f′² + g′²)`
    pub y_dot: Vec<Vec<f64>>,
    /// `y′ = ḟf′ + ġg′`
    pub y_prime: Vec<Vec<f64>>,
    /// `max |∂_τ y′ − ∂_σ ẏ|` over interior points.
    pub compatibility: f64,
    /// `|∮ y′ dσ|` at τ = 0 for closed strings; zero for open ones.
    pub periodicity_defect: f64,
}

impl YField {
    pub fn is_compatible(&self, tol: f64) -> bool {
        self.compatibility <= tol && self.periodicity_defect <= tol
    }

    /// Same field with the integration constant moved from 0 to `shift`.
    pub fn with_zero_mode(&self, shift: f64) -> YField {
        let mut out = self.clone();
        out.y.iter_mut().flatten().for_each(|v| *v += shift);
        out
    }
}

fn laplacian(u: &[f64], topology: Topology, i: usize) -> f64 {
    let n = u.len();
    let (l, r) = match topology {
        Topology::Closed => (u[(i + n - 1) % n], u[(i + 1) % n]),
        // mirror ghost points u₋₁ = u₁, u_N = u_{N−2}
        Topology::Open if i == 0 => (u[1], u[1]),
        Topology::Open if i == n - 1 => (u[n - 2], u[n - 2]),
        Topology::Open => (u[i - 1], u[i + 1]),
    };
    l - 2.0 * u[i] + r
}

fn leapfrog(u0: Vec<f64>, v0: &[f64], steps: usize, r2: f64, dt: f64, topology: Topology) -> Vec<Vec<f64>> {
    let n = u0.len();
    let first: Vec<f64> = (0..n)
        .map(|i| u0[i] + dt * v0[i] + 0.5 * r2 * laplacian(&u0, topology, i))
        .collect();
    let mut levels = vec![u0, first];
    for k in 1..steps {
        let (prev, cur) = (&levels[k - 1], &levels[k]);
        let next = (0..n)
            .map(|i| 2.0 * cur[i] - prev[i] + r2 * laplacian(cur, topology, i))
            .collect();
        levels.push(next);
    }
    levels
}

/// Leapfrog evolution of the transverse wave equations `f̈ = f″`, `g̈ = g″`.
pub fn solve_light_cone(init: &LightConeInit) -> Result<LightConeState> {
    init.validate()?;
    let ds = init.d_sigma();
    let (steps, dt) = init.time_grid();
    let sigmas: Vec<f64> = (0..init.n_sigma).map(|i| i as f64 * ds).collect();
    let sample = |p: &Profile| sigmas.iter().map(|s| p.value(*s)).collect::<Vec<_>>();
    let r2 = (dt / ds).powi(2);
    let (f_dot0, g_dot0) = (sample(&init.f_dot), sample(&init.g_dot));
    let f = leapfrog(sample(&init.f), &f_dot0, steps, r2, dt, init.topology);
    let g = if init.g.is_zero() && init.g_dot.is_zero() {
        vec![vec![0.0; init.n_sigma]; steps + 1]
    } else {
        leapfrog(sample(&init.g), &g_dot0, steps, r2, dt, init.topology)
    };
    Ok(LightConeState {
        f,
        g,
        d_sigma: ds,
        d_tau: dt,
        topology: init.topology,
        action_scale: init.action_scale,
        f_dot0,
        g_dot0,
    })
}

impl LightConeState {
    pub fn n_tau(&self) -> usize {
        self.f.len()
    }

    pub fn n_sigma(&self) -> usize {
        self.f[0].len()
    }

    pub fn sigma(&self, i: usize) -> f64 {
        i as f64 * self.d_sigma
    }

    pub fn tau(&self, n: usize) -> f64 {
        n as f64 * self.d_tau
    }

    /// Grid derivatives: the given velocity at τ = 0, central differences
    /// inside, a second-order one-sided formula at the final level;
    /// central in σ with `u′ = 0` at open ends.
    fn derivatives_of(&self, u: &[Vec<f64>], v0: &[f64]) -> FieldDerivatives {
        let (nt, ns) = (self.n_tau(), self.n_sigma());
        let dt = self.d_tau;
        let mut dot = vec![v0.to_vec()];
        for n in 1..nt {
            let row = (0..ns)
                .map(|i| {
                    if n + 1 < nt {
                        (u[n + 1][i] - u[n - 1][i]) / (2.0 * dt)
                    } else {
                        (3.0 * (u[n][i] - u[n - 1][i]) - (u[n - 1][i] - u[n - 2][i])) / (2.0 * dt)
                    }
                })
                .collect();
            dot.push(row);
        }
        let prime = u
            .iter()
            .map(|row| {
                (0..ns)
                    .map(|i| match self.topology {
                        Topology::Closed => (row[(i + 1) % ns] - row[(i + ns - 1) % ns]) / (2.0 * self.d_sigma),
                        Topology::Open if i == 0 || i == ns - 1 => 0.0,
                        Topology::Open => (row[i + 1] - row[i - 1]) / (2.0 * self.d_sigma),
                    })
                    .collect()
            })
            .collect();
        FieldDerivatives { dot, prime }
    }

    pub fn f_derivatives(&self) -> FieldDerivatives {
        self.derivatives_of(&self.f, &self.f_dot0)
    }

    pub fn g_derivatives(&self) -> FieldDerivatives {
        self.derivatives_of(&self.g, &self.g_dot0)
    }

    fn sigma_neighbours(&self, i: usize) -> Option<(usize, usize)> {
        let ns = self.n_sigma();
        match self.topology {
            Topology::Closed => Some(((i + ns - 1) % ns, (i + 1) % ns)),
            Topology::Open if i == 0 || i + 1 == ns => None,
            Topology::Open => Some((i - 1, i + 1)),
        }
    }

    /// `max |∂_τ u̇ − ∂_σ u′|` for `u ∈ {f, g}` from nested central
    /// differences, over levels whose stencil stays inside the interior.
    pub fn wave_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for d in [self.f_derivatives(), self.g_derivatives()] {
            for n in 2..self.n_tau().saturating_sub(2) {
                for i in 0..self.n_sigma() {
                    let Some((l, r)) = self.sigma_neighbours(i) else {
                        continue;
                    };
                    let utt = (d.dot[n + 1][i] - d.dot[n - 1][i]) / (2.0 * self.d_tau);
                    let uss = (d.prime[n][r] - d.prime[n][l]) / (2.0 * self.d_sigma);
                    worst = worst.max((utt - uss).abs());
                }
            }
        }
        worst
    }

    /// `max |f − f_exact|, |g − g_exact|` over the grid, for Fourier data.
    pub fn max_error_vs_exact(&self, init: &LightConeInit) -> Option<f64> {
        let mut worst: f64 = 0.0;
        for n in 0..self.n_tau() {
            for i in 0..self.n_sigma() {
                let e = init.exact(self.sigma(i), self.tau(n))?;
                worst = worst.max((self.f[n][i] - e[0]).abs()).max((self.g[n][i] - e[3]).abs());
            }
        }
        Some(worst)
    }

    /// Spacetime embedding `λ = (τ, y, f, g)` as a sampled sheet.
    pub fn lift(&self, y: &YField) -> Result<StringSheet> {
        let points = (0..self.n_tau())
            .map(|n| {
                (0..self.n_sigma())
                    .map(|i| vec![self.tau(n), y.y[n][i], self.f[n][i], self.g[n][i]])
                    .collect()
            })
            .collect();
        StringSheet::new(points, self.d_sigma, self.d_tau, self.topology, light_cone_metric())
    }

    fn sigma_integral(&self, row: impl Fn(usize) -> f64) -> f64 {
        let ns = self.n_sigma();
        let ends = match self.topology {
            Topology::Open => 0.5 * (row(0) + row(ns - 1)),
            Topology::Closed => row(0) + row(ns - 1),
        };
        (ends + (1..ns - 1).map(&row).sum::<f64>()) * self.d_sigma
    }

    /// `P^μ(τ_n) = ∫ p_τ^μ dσ` with `p_τ = −λ̇ = −(1, ẏ, ḟ, ġ)` per level,
    /// in units of the action scale.
    pub fn conserved_charge(&self, y: &YField) -> Vec<[f64; 4]> {
        let (fd, gd) = (self.f_derivatives(), self.g_derivatives());
        (0..self.n_tau())
            .map(|n| {
                [
                    -self.sigma_integral(|_| 1.0),
                    -self.sigma_integral(|i| y.y_dot[n][i]),
                    -self.sigma_integral(|i| fd.dot[n][i]),
                    -self.sigma_integral(|i| gd.dot[n][i]),
                ]
            })
            .collect()
    }

    /// `max_{n, μ} |P^μ(τ_n) − P^μ(0)|`.
    pub fn charge_drift(&self, y: &YField) -> f64 {
        let p = self.conserved_charge(y);
        p.iter()
            .flat_map(|row| row.iter().zip(&p[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }

    /// Position, velocity `λ̇` and current `p_σ = λ′` at both ends of level
    /// `n`; `None` for a closed string.
    pub fn endpoint_samples(&self, y: &YField, n: usize) -> Option<[EndpointSample; 2]> {
        if self.topology == Topology::Closed {
            return None;
        }
        let (fd, gd) = (self.f_derivatives(), self.g_derivatives());
        let sample = |i: usize| EndpointSample {
            x: vec![self.tau(n), y.y[n][i], self.f[n][i], self.g[n][i]],
            velocity: vec![1.0, y.y_dot[n][i], fd.dot[n][i], gd.dot[n][i]],
            p_sigma: vec![0.0, y.y_prime[n][i], fd.prime[n][i], gd.prime[n][i]],
        };
        Some([sample(0), sample(self.n_sigma() - 1)])
    }
}

/// Builds `y⁻` from the constraints: integrate `y′` along σ at τ = 0 from
/// `y(0, 0) = 0`, then `ẏ` in τ by the trapezoid rule.
pub fn reconstruct_y(state: &LightConeState) -> YField {
    let (fd, gd) = (state.f_derivatives(), state.g_derivatives());
    let (nt, ns) = (state.n_tau(), state.n_sigma());
    let grid = |h: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
        (0..nt).map(|n| (0..ns).map(|i| h(n, i)).collect()).collect()
    };
    let y_dot = grid(&|n, i| {
        0.5 * (fd.dot[n][i].powi(2) + gd.dot[n][i].powi(2) + fd.prime[n][i].powi(2) + gd.prime[n][i].powi(2))
    });
    let y_prime = grid(&|n, i| fd.dot[n][i] * fd.prime[n][i] + gd.dot[n][i] * gd.prime[n][i]);

    let mut y = vec![vec![0.0; ns]; nt];
    for i in 1..ns {
        y[0][i] = y[0][i - 1] + 0.5 * state.d_sigma * (y_prime[0][i - 1] + y_prime[0][i]);
    }
    for n in 1..nt {
        for i in 0..ns {
            y[n][i] = y[n - 1][i] + 0.5 * state.d_tau * (y_dot[n - 1][i] + y_dot[n][i]);
        }
    }

    let mut compatibility: f64 = 0.0;
    for n in 1..nt - 1 {
        for i in 0..ns {
            let Some((l, r)) = state.sigma_neighbours(i) else {
                continue;
            };
            let a = (y_prime[n + 1][i] - y_prime[n - 1][i]) / (2.0 * state.d_tau);
            let b = (y_dot[n][r] - y_dot[n][l]) / (2.0 * state.d_sigma);
            compatibility = compatibility.max((a - b).abs());
        }
    }
    let periodicity_defect = match state.topology {
        Topology::Open => 0.0,
        Topology::Closed => state.sigma_integral(|i| y_prime[0][i]).abs(),
    };
    YField {
        y,
        y_dot,
        y_prime,
        compatibility,
        periodicity_defect,
    }
}

/// Result of the null-end test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndpointCheck {
    /// Closed strings have no ends.
    NoBoundary,
    /// `max_τ |2ẏ − ḟ² − ġ²|` at `σ = 0` and `σ = 1`.
    Ends([f64; 2]),
}

/// Null-end residual on the grid. `ẏ` is taken from differences of the
/// reconstructed `y`, so the residual measures the discretisation rather
/// than the constraint formula itself.
pub fn endpoint_null_check(state: &LightConeState, y: &YField) -> EndpointCheck {
    if state.topology == Topology::Closed {
        return EndpointCheck::NoBoundary;
    }
    let (fd, gd) = (state.f_derivatives(), state.g_derivatives());
    let nt = state.n_tau();
    let dt = state.d_tau;
    let mut out = [0.0f64; 2];
    for (k, i) in [0, state.n_sigma() - 1].into_iter().enumerate() {
        for n in 0..nt {
            let y_dot = if n == 0 {
                (3.0 * (y.y[1][i] - y.y[0][i]) - (y.y[2][i] - y.y[1][i])) / (2.0 * dt)
            } else if n + 1 == nt {
                (3.0 * (y.y[n][i] - y.y[n - 1][i]) - (y.y[n - 1][i] - y.y[n - 2][i])) / (2.0 * dt)
            } else {
                (y.y[n + 1][i] - y.y[n - 1][i]) / (2.0 * dt)
            };
            let r = 2.0 * y_dot - fd.dot[n][i].powi(2) - gd.dot[n][i].powi(2);
            out[k] = out[k].max(r.abs());
        }
    }
    EndpointCheck::Ends(out)
}

/// Null-end residual `|2ẏ − ḟ² − ġ²|` of the analytic solution at time
/// `tau`, with `ẏ` from the constraint. `None` for closed strings or
/// non-Fourier data.
pub fn null_end_residual(init: &LightConeInit, tau: f64) -> Option<[f64; 2]> {
    if init.topology == Topology::Closed {
        return None;
    }
    let end = |sigma: f64| -> Option<f64> {
        let [_, fd, fp, _, gd, gp] = init.exact(sigma, tau)?;
        let y_dot = 0.5 * (fd * fd + gd * gd + fp * fp + gp * gp);
        Some((2.0 * y_dot - fd * fd - gd * gd).abs())
    };
    Some([end(0.0)?, end(1.0)?])
}
