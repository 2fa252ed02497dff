//! Relativistic membrane: momentum 3-form, primary constraints, the
//! gauge-fixed field equation and the spherically symmetric pulsation.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::elliptic::{elliptic_k, jacobi};
use crate::error::{check_dim, Error, Result};
use crate::exterior::{contract, flat, gram_determinant, pairing, sharp, sharp_multi, KForm, KVector, Metric};

/// Canonical index triples of the four independent components
/// `π_A, π_B, π_C, π_D`.
pub const PI_TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Tangent triple `(λ̇, λ′, λ̄)` of a membrane worldvolume at a point.
#[derive(Clone, Debug)]
pub struct MembraneElement {
    pub ld: Vec<f64>,
    pub lp: Vec<f64>,
    pub lb: Vec<f64>,
    pub metric: Metric<f64>,
}

/// Unit momentum 3-form `Π = (λ̇♭ ∧ λ′♭ ∧ λ̄♭)/Δ`.
#[derive(Clone, Debug)]
pub struct MembraneMomentumForm {
    pub pi: KForm<f64>,
    /// `Δ = √det[λ_a · λ_b]`
    pub delta: f64,
}

impl MembraneMomentumForm {
    /// `(π_A, π_B, π_C, π_D)` on the canonical triples.
    pub fn abcd(&self) -> [f64; 4] {
        PI_TRIPLES.map(|t| self.pi.component(&t))
    }
}

/// `P_τ = Π(λ′ ∧ λ̄)`, `P_σ = Π(λ̄ ∧ λ̇)`, `P_ρ = Π(λ̇ ∧ λ′)`, raised.
#[derive(Clone, Debug, PartialEq)]
pub struct MembraneMomenta {
    pub p_tau: Vec<f64>,
    pub p_sigma: Vec<f64>,
    pub p_rho: Vec<f64>,
}

/// Residuals of the nine primary identities.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConstraintReport {
    /// `|P_a² − Gram(other two)|` for `a = τ, σ, ρ`.
    pub norms: [f64; 3],
    /// `|P_a · λ_b|` for the two tangents `b ≠ a`, in the order
    /// `τ·λ′, τ·λ̄, σ·λ̄, σ·λ̇, ρ·λ̇, ρ·λ′`.
    pub orthogonality: [f64; 6],
}

impl ConstraintReport {
    pub fn max(&self) -> f64 {
        self.norms.iter().chain(&self.orthogonality).fold(0.0, |a, b| a.max(*b))
    }
}

impl MembraneElement {
    pub fn new(ld: &[f64], lp: &[f64], lb: &[f64], metric: Metric<f64>) -> Result<Self> {
        for v in [ld, lp, lb] {
            check_dim(metric.dim(), v.len())?;
        }
        Ok(MembraneElement {
            ld: ld.to_vec(),
            lp: lp.to_vec(),
            lb: lb.to_vec(),
            metric,
        })
    }

    pub fn delta_squared(&self) -> f64 {
        gram_determinant(&[&self.ld, &self.lp, &self.lb], &self.metric)
    }

    fn delta(&self) -> Result<f64> {
        let d2 = self.delta_squared();
        if !(d2 > 0.0) {
            return Err(Error::precondition(format!(
                "membrane element is degenerate or not Lorentzian (Δ² = {d2:e})"
            )));
        }
        Ok(d2.sqrt())
    }

    pub fn momentum_form(&self) -> Result<MembraneMomentumForm> {
        let delta = self.delta()?;
        let lower = |v: &[f64]| flat(&KVector::vector(v), &self.metric);
        let pi = lower(&self.ld)?
            .wedge(&lower(&self.lp)?)?
            .wedge(&lower(&self.lb)?)?
            .scale(&(1.0 / delta));
        Ok(MembraneMomentumForm { pi, delta })
    }

    pub fn momenta(&self) -> Result<MembraneMomenta> {
        let form = self.momentum_form()?;
        let current = |a: &[f64], b: &[f64]| -> Result<Vec<f64>> {
            let w = KVector::vector(a).wedge(&KVector::vector(b))?;
            Ok(sharp(&contract(&form.pi, &w)?, &self.metric)?.to_dense())
        };
        Ok(MembraneMomenta {
            p_tau: current(&self.lp, &self.lb)?,
            p_sigma: current(&self.lb, &self.ld)?,
            p_rho: current(&self.ld, &self.lp)?,
        })
    }

    /// `Π(Π̃)`, the full contraction with the raised form. Equals 1.
    pub fn normalization(&self) -> Result<f64> {
        let form = self.momentum_form()?;
        pairing(&form.pi, &sharp_multi(&form.pi, &self.metric)?)
    }

    pub fn constraint_suite(&self) -> Result<ConstraintReport> {
        let p = self.momenta()?;
        let m = &self.metric;
        let gram2 = |a: &[f64], b: &[f64]| m.dot(a, a) * m.dot(b, b) - m.dot(a, b).powi(2);
        let (ld, lp, lb) = (&self.ld, &self.lp, &self.lb);
        Ok(ConstraintReport {
            norms: [
                (m.dot(&p.p_tau, &p.p_tau) - gram2(lp, lb)).abs(),
                (m.dot(&p.p_sigma, &p.p_sigma) - gram2(ld, lb)).abs(),
                (m.dot(&p.p_rho, &p.p_rho) - gram2(ld, lp)).abs(),
            ],
            orthogonality: [
                m.dot(&p.p_tau, lp).abs(),
                m.dot(&p.p_tau, lb).abs(),
                m.dot(&p.p_sigma, lb).abs(),
                m.dot(&p.p_sigma, ld).abs(),
                m.dot(&p.p_rho, ld).abs(),
                m.dot(&p.p_rho, lp).abs(),
            ],
        })
    }

    /// Null-area test for a boundary where `ρ` is constant: returns
    /// `(P_ρ², λ̇²λ′² − (λ̇·λ′)²)`. The two agree for every valid element, so
    /// a vanishing `P_ρ` forces a null boundary world tube.
    pub fn null_area_check(&self) -> Result<(f64, f64)> {
        let p = self.momenta()?;
        let m = &self.metric;
        let area = m.dot(&self.ld, &self.ld) * m.dot(&self.lp, &self.lp) - m.dot(&self.ld, &self.lp).powi(2);
        Ok((m.dot(&p.p_rho, &p.p_rho), area))
    }
}

/// `π_X` on the canonical triples for the coordinate gauge `λ = x`, built
/// from rows 0, 1, 2 of the metric: the minor on columns `X` over `Δ`.
pub fn membrane_pi(g: &[Vec<f64>]) -> Result<[f64; 4]> {
    check_dim(4, g.len())?;
    let minor = |cols: [usize; 3]| {
        let m: Vec<Vec<f64>> = (0..3).map(|r| cols.iter().map(|c| g[r][*c]).collect()).collect();
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d2 = minor(PI_TRIPLES[0]);
    if !(d2 > 0.0) {
        return Err(Error::precondition(format!("gauge-fixed membrane has Δ² = {d2:e}")));
    }
    let delta = d2.sqrt();
    Ok(PI_TRIPLES.map(|t| minor(t) / delta))
}

/// `∂₃π_A − ∂₀π_D + ∂₁π_C − ∂₂π_B` at `x` by central differences of step
/// `h` on the metric map.
pub fn gauge_fixed_residual(metric: impl Fn(&[f64]) -> Vec<Vec<f64>>, x: &[f64], h: f64) -> Result<f64> {
    check_dim(4, x.len())?;
    let d = |axis: usize, comp: usize| -> Result<f64> {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[axis] += h;
        xm[axis] -= h;
        Ok((membrane_pi(&metric(&xp))?[comp] - membrane_pi(&metric(&xm))?[comp]) / (2.0 * h))
    };
    Ok(d(3, 0)? - d(0, 3)? + d(1, 2)? - d(2, 1)?)
}

/// Metric in coordinates `(τ, σ, ρ, x³)` for a sphere of radius
/// `R(τ) + x³`.
pub fn spherical_metric(r: f64, r_dot: f64, sigma: f64, x3: f64) -> Vec<Vec<f64>> {
    let rr = (r + x3).powi(2);
    vec![
        vec![1.0 - r_dot * r_dot, 0.0, 0.0, -r_dot],
        vec![0.0, -rr, 0.0, 0.0],
        vec![0.0, 0.0, -rr * sigma.sin().powi(2), 0.0],
        vec![-r_dot, 0.0, 0.0, -1.0],
    ]
}

/// Gauge-fixed residual of the spherical ansatz along a radius history
/// `τ ↦ (R, Ṙ)`.
pub fn spherical_residual(history: impl Fn(f64) -> (f64, f64), tau: f64, sigma: f64, h: f64) -> Result<f64> {
    gauge_fixed_residual(
        |x| {
            let (r, r_dot) = history(x[0]);
            spherical_metric(r, r_dot, x[1], x[3])
        },
        &[tau, sigma, 0.0, 0.0],
        h,
    )
}

/// `R̈ = −2(1 − Ṙ²)/R`.
pub fn spherical_rhs(r: f64, r_dot: f64) -> Result<f64> {
    if !(r > 0.0) || !(r_dot.abs() < 1.0) {
        return Err(Error::precondition(format!(
            "spherical membrane needs R > 0 and |Ṙ| < 1, got R = {r}, Ṙ = {r_dot}"
        )));
    }
    Ok(-2.0 * (1.0 - r_dot * r_dot) / r)
}

/// `c = R²/√(1 − Ṙ²)`.
pub fn first_integral(r: f64, r_dot: f64) -> f64 {
    r * r / (1.0 - r_dot * r_dot).sqrt()
}

/// Constants of the cn solution for a given amplitude.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalConstants {
    pub r_max: f64,
    /// `α = √2 / R_max`
    pub alpha: f64,
    /// `γ = K(1/√2)`
    pub gamma: f64,
    /// Under the convention `4E/b = R_max⁴`, `4Eb = α⁴`.
    pub e: f64,
    pub b: f64,
}

impl SphericalConstants {
    pub fn new(r_max: f64) -> Result<Self> {
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::precondition("R_max must be positive"));
        }
        let alpha = 2f64.sqrt() / r_max;
        let e = 0.25 * (r_max * alpha).powi(2);
        Ok(SphericalConstants {
            r_max,
            alpha,
            gamma: elliptic_k(FRAC_1_SQRT_2)?,
            e,
            b: 4.0 * e / r_max.powi(4),
        })
    }

    /// Time from the turning point to collapse, `γ/α`.
    pub fn quarter_period(&self) -> f64 {
        self.gamma / self.alpha
    }

    /// `(R, Ṙ)` of `R_max cn(γ − ατ | 1/√2)`.
    pub fn state(&self, tau: f64) -> (f64, f64) {
        let (sn, cn, dn) = jacobi(self.gamma - self.alpha * tau, FRAC_1_SQRT_2).expect("modulus is in range");
        (self.r_max * cn, self.r_max * self.alpha * sn * dn)
    }

    /// Time in `[0, 2γ/α]` at which [`state`](Self::state) passes through
    /// radius `r`: on the rising branch for `r_dot > 0`, else on the falling
    /// one.
    pub fn phase_of(&self, r: f64, r_dot: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= self.r_max * (1.0 + 1e-12)) {
            return Err(Error::precondition(format!("radius {r} outside [0, {}]", self.r_max)));
        }
        let q = self.quarter_period();
        let rising = r_dot > 0.0;
        // R is monotone on each branch but flat at the turning point, where
        // the strictly decreasing Ṙ is the better-conditioned coordinate.
        let near_top = r > FRAC_1_SQRT_2 * self.r_max;
        let (mut lo, mut hi) = match (near_top, rising) {
            (true, _) => (0.0, 2.0 * q),
            (false, true) => (0.0, q),
            (false, false) => (q, 2.0 * q),
        };
        let before = |t: f64| {
            let (rr, rd) = self.state(t);
            if near_top {
                rd > r_dot
            } else {
                (rr < r) == rising
            }
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if before(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// `R(τ) = R_max cn(γ − ατ | 1/√2)`, launched from collapse at τ = 0.
pub fn spherical_closed_form(r_max: f64, tau: f64) -> Result<f64> {
    Ok(SphericalConstants::new(r_max)?.state(tau).0)
}

/// Input of a spherical pulsation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalScenario {
    pub r0: f64,
    pub r_dot0: f64,
    pub tau_end: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalSample {
    pub tau: f64,
    pub r: f64,
    pub r_dot: f64,
    pub c: f64,
}

/// Stop threshold on `Ṙ²` near collapse.
pub const COLLAPSE_SPEED2: f64 = 1.0 - 1e-6;
/// Largest relative first-integral drift before a run is aborted.
pub const MAX_C_DRIFT: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct SphericalMembraneState {
    pub samples: Vec<SphericalSample>,
    pub constants: SphericalConstants,
    /// `c` of the initial data.
    pub c: f64,
    pub max_c_drift: f64,
    /// Set when the run stopped at the collapse threshold.
    pub stopped_near_collapse: bool,
    /// Stop time plus the remaining fall `R + R⁵/(10c²)` to `R = 0`.
    pub collapse_time: Option<f64>,
}

/// State `(R, u)` with `u = Ṙ/√(1 − Ṙ²)`, for which `c = R²√(1 + u²)`.
/// `u̇ = −2√(1 + u²)/R`.
fn rhs(s: [f64; 2]) -> [f64; 2] {
    let w = (1.0 + s[1] * s[1]).sqrt();
    [s[1] / w, -2.0 * w / s[0]]
}

fn rk4(s: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], k: [f64; 2], t: f64| [a[0] + t * k[0], a[1] + t * k[1]];
    let k1 = rhs(s);
    let k2 = rhs(add(s, k1, h / 2.0));
    let k3 = rhs(add(s, k2, h / 2.0));
    let k4 = rhs(add(s, k3, h));
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Classical RK4 on the radial equation. The step is scaled by
/// `min(1, R/R_max)`, since near collapse the radius itself sets the time
/// scale.
pub fn integrate_spherical(sc: &SphericalScenario) -> Result<SphericalMembraneState> {
    spherical_rhs(sc.r0, sc.r_dot0)?;
    if !(sc.tau_end >= 0.0 && sc.tau_end.is_finite()) {
        return Err(Error::precondition("tau_end must be non-negative"));
    }
    if !(sc.step > 0.0) {
        return Err(Error::precondition("step must be positive"));
    }
    let c = first_integral(sc.r0, sc.r_dot0);
    let constants = SphericalConstants::new(c.sqrt())?;
    let sample = |tau: f64, s: [f64; 2]| {
        let r_dot = s[1] / (1.0 + s[1] * s[1]).sqrt();
        SphericalSample {
            tau,
            r: s[0],
            r_dot,
            c: s[0] * s[0] * (1.0 + s[1] * s[1]).sqrt(),
        }
    };
    let mut s = [sc.r0, sc.r_dot0 / (1.0 - sc.r_dot0 * sc.r_dot0).sqrt()];
    let mut tau = 0.0;
    let mut samples = vec![sample(0.0, s)];
    let mut max_c_drift: f64 = 0.0;
    let mut stopped = sc.r_dot0 * sc.r_dot0 > COLLAPSE_SPEED2;
    while !stopped && tau < sc.tau_end {
        let h = (sc.step * (s[0] / constants.r_max).min(1.0)).min(sc.tau_end - tau);
        s = rk4(s, h);
        tau = if sc.tau_end - tau <= h { sc.tau_end } else { tau + h };
        if !(s[0] > 0.0) || !s[1].is_finite() {
            return Err(Error::numerical(format!("radius left the physical range at τ = {tau}")));
        }
        let smp = sample(tau, s);
        let drift = (smp.c - c).abs() / c;
        max_c_drift = max_c_drift.max(drift);
        if drift > MAX_C_DRIFT {
            return Err(Error::numerical(format!(
                "first integral drifted by {drift:e} at τ = {tau}; reduce the step"
            )));
        }
        stopped = smp.r_dot * smp.r_dot > COLLAPSE_SPEED2;
        samples.push(smp);
    }
    let collapse_time = match samples.last() {
        Some(last) if stopped && last.r_dot < 0.0 => Some(last.tau + last.r + last.r.powi(5) / (10.0 * c * c)),
        _ => None,
    };
    Ok(SphericalMembraneState {
        samples,
        constants,
        c,
        max_c_drift,
        stopped_near_collapse: stopped,
        collapse_time,
    })
}

/// Divergence `∂_τ P_τ + ∂_σ P_σ + ∂_ρ P_ρ` of a membrane embedding at a
/// point, by nested central differences of step `h`.
pub fn covariant_residual(
    lambda: impl Fn(f64, f64, f64) -> Vec<f64>,
    metric: &Metric<f64>,
    at: [f64; 3],
    h: f64,
) -> Result<Vec<f64>> {
    let tangents = |p: [f64; 3]| -> Vec<Vec<f64>> {
        (0..3)
            .map(|a| {
                let (mut up, mut dn) = (p, p);
                up[a] += h;
                dn[a] -= h;
                let (u, d) = (lambda(up[0], up[1], up[2]), lambda(dn[0], dn[1], dn[2]));
                u.iter().zip(&d).map(|(x, y)| (x - y) / (2.0 * h)).collect()
            })
            .collect()
    };
    let momenta = |p: [f64; 3]| -> Result<[Vec<f64>; 3]> {
        let t = tangents(p);
        let mm = MembraneElement::new(&t[0], &t[1], &t[2], metric.clone())?.momenta()?;
        Ok([mm.p_tau, mm.p_sigma, mm.p_rho])
    };
    let mut out = vec![0.0; metric.dim()];
    for a in 0..3 {
        let (mut up, mut dn) = (at, at);
        up[a] += h;
        dn[a] -= h;
        let (pu, pd) = (momenta(up)?, momenta(dn)?);
        for (o, (u, d)) in out.iter_mut().zip(pu[a].iter().zip(&pd[a])) {
            *o += (u - d) / (2.0 * h);
        }
    }
    Ok(out)
}
