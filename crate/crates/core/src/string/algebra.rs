//! Pointwise algebra of the string momentum 2-form.

use crate::error::{check_dim, check_grade, Error, Result};
use crate::exterior::{contract, flat, pairing, KForm, KVector, Metric};
use crate::forms::FieldForm;

/// `Δ² = (λ̇·λ′)² − λ̇²λ′²`, positive for a Lorentzian sheet element.
pub fn delta_squared(ld: &[f64], lp: &[f64], m: &Metric<f64>) -> f64 {
    let ab = m.dot(ld, lp);
    ab * ab - m.dot(ld, ld) * m.dot(lp, lp)
}

fn delta(ld: &[f64], lp: &[f64], m: &Metric<f64>) -> Result<f64> {
    check_dim(m.dim(), ld.len())?;
    check_dim(m.dim(), lp.len())?;
    let d2 = delta_squared(ld, lp, m);
    if !(d2 > 0.0) {
        return Err(Error::precondition(format!(
            "sheet element is not Lorentzian (Δ² = {d2:e})"
        )));
    }
    Ok(d2.sqrt())
}

/// Unit momentum 2-form `π = (λ̇♭ ∧ λ′♭)/Δ` at a sheet point.
#[derive(Clone, Debug)]
pub struct StringMomentumForm {
    pub pi: KForm<f64>,
    pub delta: f64,
    ld: Vec<f64>,
    lp: Vec<f64>,
}

pub fn pi_components(ld: &[f64], lp: &[f64], m: &Metric<f64>) -> Result<StringMomentumForm> {
    let delta = delta(ld, lp, m)?;
    let a = flat(&KVector::vector(ld), m)?;
    let b = flat(&KVector::vector(lp), m)?;
    Ok(StringMomentumForm {
        pi: a.wedge(&b)?.scale(&(1.0 / delta)),
        delta,
        ld: ld.to_vec(),
        lp: lp.to_vec(),
    })
}

impl StringMomentumForm {
    /// `π_{μν}` for any index pair; antisymmetric by construction.
    pub fn component(&self, mu: usize, nu: usize) -> f64 {
        self.pi.component(&[mu, nu])
    }

    /// `Π(Y)` with `Y = (λ′ ∧ λ̇)/Δ` the unit-area tangent bivector in
    /// `(σ, τ)` order. Equals 1 on every valid element.
    pub fn normalization(&self) -> f64 {
        let y = KVector::vector(&self.lp)
            .wedge(&KVector::vector(&self.ld))
            .expect("same dimension")
            .scale(&(1.0 / self.delta));
        pairing(&self.pi, &y).expect("grade 2 on both sides")
    }
}

/// Contravariant momentum currents `p_τ`, `p_σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumCurrent {
    pub p_tau: Vec<f64>,
    pub p_sigma: Vec<f64>,
}

/// `p_τ = [λ̇ λ′² − λ′ (λ̇·λ′)]/Δ`, `p_σ = [λ′ λ̇² − λ̇ (λ̇·λ′)]/Δ`.
pub fn momentum_currents(ld: &[f64], lp: &[f64], m: &Metric<f64>) -> Result<MomentumCurrent> {
    let d = delta(ld, lp, m)?;
    let (aa, bb, ab) = (m.dot(ld, ld), m.dot(lp, lp), m.dot(ld, lp));
    let p_tau = ld.iter().zip(lp).map(|(a, b)| (a * bb - b * ab) / d).collect();
    let p_sigma = ld.iter().zip(lp).map(|(a, b)| (b * aa - a * ab) / d).collect();
    Ok(MomentumCurrent { p_tau, p_sigma })
}

/// Residuals of the four current identities at one element.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IdentityReport {
    /// `|p_τ² + λ′²|`
    pub tau_norm: f64,
    /// `|p_σ² + λ̇²|`
    pub sigma_norm: f64,
    /// `|p_τ · λ′|`
    pub tau_orth: f64,
    /// `|p_σ · λ̇|`
    pub sigma_orth: f64,
}

impl IdentityReport {
    pub fn max(&self) -> f64 {
        self.tau_norm
            .max(self.sigma_norm)
            .max(self.tau_orth)
            .max(self.sigma_orth)
    }
}

pub fn identity_suite(ld: &[f64], lp: &[f64], m: &Metric<f64>) -> Result<IdentityReport> {
    let c = momentum_currents(ld, lp, m)?;
    Ok(IdentityReport {
        tau_norm: (m.dot(&c.p_tau, &c.p_tau) + m.dot(lp, lp)).abs(),
        sigma_norm: (m.dot(&c.p_sigma, &c.p_sigma) + m.dot(ld, ld)).abs(),
        tau_orth: m.dot(&c.p_tau, lp).abs(),
        sigma_orth: m.dot(&c.p_sigma, ld).abs(),
    })
}

/// State of a string end: position, velocity `λ̇` and current `p_σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct EndpointSample {
    pub x: Vec<f64>,
    pub velocity: Vec<f64>,
    pub p_sigma: Vec<f64>,
}

/// Residuals `max_μ |p_σ^μ − (−1)^k q F^μ_ν λ̇^ν|` at the ends `σ_0`
/// (`k = 0`) and `σ_1` (`k = 1`).
pub fn em_boundary_residual(
    ends: &[EndpointSample; 2],
    field: &FieldForm,
    q: f64,
    m: &Metric<f64>,
) -> Result<[f64; 2]> {
    check_grade(2, field.grade())?;
    check_dim(m.dim(), field.dim())?;
    let n = m.dim();
    let mut out = [0.0; 2];
    for (k, end) in ends.iter().enumerate() {
        let f = field.eval_at(&end.x)?;
        let lowered: Vec<f64> = (0..n)
            .map(|r| (0..n).map(|c| f.component(&[r, c]) * end.velocity[c]).sum())
            .collect();
        let force = m.raise(&lowered);
        let sign = if k == 0 { 1.0 } else { -1.0 };
        out[k] = end
            .p_sigma
            .iter()
            .zip(&force)
            .map(|(p, fv)| (p - sign * q * fv).abs())
            .fold(0.0, f64::max);
    }
    Ok(out)
}

/// Extra bulk force `dF(λ̇ ∧ λ′)` picked up when the coupled 2-form is not
/// closed. Vanishes identically for `F = dA`.
pub fn field_strength_bulk_term(field: &FieldForm, x: &[f64], ld: &[f64], lp: &[f64]) -> Result<Vec<f64>> {
    check_grade(2, field.grade())?;
    let df = field.d().eval_at(x)?;
    let y = KVector::vector(ld).wedge(&KVector::vector(lp))?;
    let c = contract(&df, &y)?;
    Ok((0..field.dim()).map(|i| c.component(&[i])).collect())
}
