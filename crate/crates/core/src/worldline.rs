//! Relativistic point particle: mass shell, electromagnetic and
//! gravitational forces, proper-time integration.
//!
//! Signature is `(+,−,−,−)`: timelike tangents have positive square.

use crate::error::{check_dim, check_grade, Error, Result};
use crate::exterior::Metric;
use crate::fields::ScalarField;
use crate::forms::FieldForm;

/// Allowed `|λ̇² − κ²| / κ²` after one step, before renormalisation.
pub const MAX_SHELL_DRIFT: f64 = 1e-3;

/// Metric given either as constants or as component fields `g_{μν}(x)`.
#[derive(Clone, Debug)]
pub enum MetricField {
    Constant(Metric<f64>),
    Field {
        components: Vec<Vec<ScalarField>>,
        /// `partials[ν][ρ][α] = ∂_ν g_{ρα}`
        partials: Vec<Vec<Vec<ScalarField>>>,
    },
}

impl MetricField {
    pub fn constant(m: Metric<f64>) -> Self {
        MetricField::Constant(m)
    }

    pub fn from_fields(components: Vec<Vec<ScalarField>>) -> Result<Self> {
        let n = components.len();
        for row in &components {
            check_dim(n, row.len())?;
            for c in row {
                check_dim(n, c.nvars())?;
            }
        }
        let partials = (0..n)
            .map(|nu| {
                components
                    .iter()
                    .map(|row| row.iter().map(|c| c.partial(nu)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MetricField::Field {
            components,
            partials,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            MetricField::Constant(m) => m.dim(),
            MetricField::Field { components, .. } => components.len(),
        }
    }

    pub fn at(&self, x: &[f64]) -> Result<Metric<f64>> {
        match self {
            MetricField::Constant(m) => Ok(m.clone()),
            MetricField::Field { components, .. } => {
                check_dim(components.len(), x.len())?;
                Metric::new(
                    components
                        .iter()
                        .map(|row| row.iter().map(|c| c.eval(x)).collect())
                        .collect(),
                )
            }
        }
    }

    /// `∂_ν g_{ρα}` indexed `[ν][ρ][α]`; zero for constant metrics.
    pub fn derivatives(&self, x: &[f64]) -> Vec<Vec<Vec<f64>>> {
        match self {
            MetricField::Constant(m) => vec![vec![vec![0.0; m.dim()]; m.dim()]; m.dim()],
            MetricField::Field { partials, .. } => partials
                .iter()
                .map(|block| {
                    block
                        .iter()
                        .map(|row| row.iter().map(|c| c.eval(x)).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, MetricField::Constant(_))
    }
}

/// `Γ^β_{αν} = ½ g^{βρ}(∂_ν g_{ρα} + ∂_α g_{ρν} − ∂_ρ g_{αν})`, indexed
/// `[β][α][ν]`.
pub fn christoffel(metric: &MetricField, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = metric.dim();
    check_dim(n, x.len())?;
    let g = metric.at(x)?;
    let inv = g.inverse();
    let dg = metric.derivatives(x);
    let mut gamma = vec![vec![vec![0.0; n]; n]; n];
    for (b, gb) in gamma.iter_mut().enumerate() {
        for a in 0..n {
            for nu in a..n {
                let mut s = 0.0;
                for r in 0..n {
                    s += inv[b][r] * (dg[nu][r][a] + dg[a][r][nu] - dg[r][a][nu]);
                }
                gb[a][nu] = 0.5 * s;
                gb[nu][a] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// `p^μ = m λ̇^μ / √(λ̇²)`.
pub fn momentum(u: &[f64], mass: f64, metric: &Metric<f64>) -> Result<Vec<f64>> {
    check_dim(metric.dim(), u.len())?;
    let u2 = metric.dot(u, u);
    if !(u2 > 0.0) {
        return Err(Error::precondition(format!(
            "tangent is not timelike (λ̇² = {u2})"
        )));
    }
    let s = mass / u2.sqrt();
    Ok(u.iter().map(|v| v * s).collect())
}

/// Field strength `F = dA`.
pub fn em_field(potential: &FieldForm) -> Result<FieldForm> {
    check_grade(1, potential.grade())?;
    Ok(potential.d())
}

/// Particle parameters and initial data.
#[derive(Clone, Debug)]
pub struct ParticleScenario {
    pub mass: f64,
    pub charge: f64,
    pub metric: MetricField,
    pub potential: Option<FieldForm>,
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
    pub tau_end: f64,
    pub step: f64,
}

impl ParticleScenario {
    /// Free particle in flat spacetime of dimension `x0.len()`.
    pub fn free(mass: f64, x0: Vec<f64>, u0: Vec<f64>, tau_end: f64, step: f64) -> Self {
        ParticleScenario {
            mass,
            charge: 0.0,
            metric: MetricField::Constant(Metric::minkowski(x0.len())),
            potential: None,
            x0,
            u0,
            tau_end,
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.metric.dim();
        check_dim(n, self.x0.len())?;
        check_dim(n, self.u0.len())?;
        if !(self.mass > 0.0) {
            return Err(Error::precondition("mass must be positive"));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::precondition("step must be positive"));
        }
        if !(self.tau_end >= 0.0) || !self.tau_end.is_finite() {
            return Err(Error::precondition("tau_end must be non-negative"));
        }
        if let Some(a) = &self.potential {
            check_dim(n, a.dim())?;
            check_grade(1, a.grade())?;
        }
        let g = self.metric.at(&self.x0)?;
        momentum(&self.u0, self.mass, &g)?;
        Ok(())
    }
}

/// One worldline sample.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldlineSample {
    pub tau: f64,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorldlineTrajectory {
    pub samples: Vec<WorldlineSample>,
    /// Largest relative shell drift seen before renormalisation.
    pub max_shell_drift: f64,
}

/// Scenario with its field strength precomputed.
struct Prepared<'a> {
    scenario: &'a ParticleScenario,
    field: Option<FieldForm>,
}

impl<'a> Prepared<'a> {
    fn new(scenario: &'a ParticleScenario) -> Result<Self> {
        scenario.validate()?;
        let field = match &scenario.potential {
            Some(a) if scenario.charge != 0.0 => Some(em_field(a)?),
            _ => None,
        };
        Ok(Prepared { scenario, field })
    }

    /// `λ̈^β = κ (q/m) F^β_μ λ̇^μ − Γ^β_{αν} λ̇^α λ̇^ν` for a parameter of
    /// constant speed `κ`.
    fn rhs(&self, x: &[f64], u: &[f64], speed: f64) -> Result<Vec<f64>> {
        let sc = self.scenario;
        let n = x.len();
        let mut acc = vec![0.0; n];
        if let Some(f) = &self.field {
            let fx = f.eval_at(x)?;
            let g = sc.metric.at(x)?;
            // lowered force F_{ρμ} u^μ, then raised
            let lowered: Vec<f64> = (0..n)
                .map(|r| (0..n).map(|m| fx.component(&[r, m]) * u[m]).sum())
                .collect();
            let raised = g.raise(&lowered);
            let k = speed * sc.charge / sc.mass;
            for (a, r) in acc.iter_mut().zip(raised) {
                *a += k * r;
            }
        }
        if !sc.metric.is_constant() {
            let gamma = christoffel(&sc.metric, x)?;
            for (b, a) in acc.iter_mut().enumerate() {
                let mut s = 0.0;
                for al in 0..n {
                    for nu in 0..n {
                        s += gamma[b][al][nu] * u[al] * u[nu];
                    }
                }
                *a -= s;
            }
        }
        Ok(acc)
    }
}

/// Right-hand side of the equation of motion in proper-time gauge.
pub fn eom_rhs(x: &[f64], u: &[f64], scenario: &ParticleScenario) -> Result<Vec<f64>> {
    Prepared::new(scenario)?.rhs(x, u, 1.0)
}

/// RK4 in proper time with `λ̇` projected back onto `λ̇² = 1` after each step.
pub fn integrate_worldline(scenario: &ParticleScenario) -> Result<WorldlineTrajectory> {
    integrate_worldline_affine(scenario, 1.0)
}

/// Same as [`integrate_worldline`] but with an affine parameter `s` of
/// constant speed `λ̇² = κ²`; sample times are reported as `τ = κ s`.
pub fn integrate_worldline_affine(scenario: &ParticleScenario, speed: f64) -> Result<WorldlineTrajectory> {
    if !(speed > 0.0) {
        return Err(Error::precondition("parameter speed must be positive"));
    }
    let prep = Prepared::new(scenario)?;
    let sc = scenario;
    let n = sc.x0.len();
    let steps = (sc.tau_end / sc.step).round() as usize;
    let h = sc.step / speed;

    let normalise = |x: &[f64], u: &[f64]| -> Result<(Vec<f64>, f64)> {
        let g = sc.metric.at(x)?;
        let u2 = g.dot(u, u);
        if !(u2 > 0.0) {
            return Err(Error::numerical(format!("tangent left the light cone (λ̇² = {u2})")));
        }
        let drift = (u2 / (speed * speed) - 1.0).abs();
        let s = speed / u2.sqrt();
        Ok((u.iter().map(|v| v * s).collect(), drift))
    };
    let sample = |tau: f64, x: &[f64], u: &[f64]| -> Result<WorldlineSample> {
        let g = sc.metric.at(x)?;
        Ok(WorldlineSample {
            tau,
            x: x.to_vec(),
            u: u.to_vec(),
            p: momentum(u, sc.mass, &g)?,
        })
    };

    let mut x = sc.x0.clone();
    let (mut u, _) = normalise(&x, &sc.u0)?;
    let mut samples = vec![sample(0.0, &x, &u)?];
    let mut max_drift: f64 = 0.0;

    let deriv = |x: &[f64], u: &[f64]| -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((u.to_vec(), prep.rhs(x, u, speed)?))
    };
    let shift = |base: &[f64], d: &[f64], s: f64| -> Vec<f64> {
        base.iter().zip(d).map(|(b, v)| b + s * v).collect()
    };

    for k in 1..=steps {
        let (k1x, k1u) = deriv(&x, &u)?;
        let (k2x, k2u) = deriv(&shift(&x, &k1x, h / 2.0), &shift(&u, &k1u, h / 2.0))?;
        let (k3x, k3u) = deriv(&shift(&x, &k2x, h / 2.0), &shift(&u, &k2u, h / 2.0))?;
        let (k4x, k4u) = deriv(&shift(&x, &k3x, h), &shift(&u, &k3u, h))?;
        for i in 0..n {
            x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            u[i] += h / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
        }
        if x.iter().chain(&u).any(|v| !v.is_finite()) {
            return Err(Error::numerical(format!("non-finite state at step {k}")));
        }
        let (un, drift) = normalise(&x, &u)?;
        if drift > MAX_SHELL_DRIFT {
            return Err(Error::numerical(format!(
                "mass-shell drift {drift:.3e} at step {k} exceeds {MAX_SHELL_DRIFT:e}; reduce the step"
            )));
        }
        max_drift = max_drift.max(drift);
        u = un;
        samples.push(sample(k as f64 * sc.step, &x, &u)?);
    }
    Ok(WorldlineTrajectory {
        samples,
        max_shell_drift: max_drift,
    })
}
