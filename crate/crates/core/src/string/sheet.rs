//! Sampled worldsheets and the covariant field-equation residual.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::exterior::Metric;
use crate::string::algebra::momentum_currents;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Open,
    Closed,
}

/// Index window `points[tau][sigma]` on which a residual is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub sigma: Range<usize>,
    pub tau: Range<usize>,
}

/// Worldsheet `λ^μ(σ_i, τ_n)` on a uniform grid.
///
/// For a closed sheet the σ samples are periodic: index `n_sigma` is the
/// same point as index 0 and is not stored.
#[derive(Clone, Debug)]
pub struct StringSheet {
    points: Vec<Vec<Vec<f64>>>,
    d_sigma: f64,
    d_tau: f64,
    topology: Topology,
    metric: Metric<f64>,
}

/// Divergence residual `E^μ = ∂_σ p_σ^μ + ∂_τ p_τ^μ` over a window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EomResidual {
    /// `max |E^μ|` over window points and components.
    pub max_norm: f64,
    pub points: usize,
    /// Requested points dropped because the stencil left the grid.
    pub skipped_edges: usize,
    /// `max |E·λ̇|`; vanishes to discretisation order for any smooth sheet.
    pub noether_tau: f64,
    /// `max |E·λ′|`, likewise.
    pub noether_sigma: f64,
}

impl StringSheet {
    pub fn new(
        points: Vec<Vec<Vec<f64>>>,
        d_sigma: f64,
        d_tau: f64,
        topology: Topology,
        metric: Metric<f64>,
    ) -> Result<Self> {
        let n_sigma = points.first().map(Vec::len).unwrap_or(0);
        for row in &points {
            check_dim(n_sigma, row.len())?;
            for p in row {
                check_dim(metric.dim(), p.len())?;
            }
        }
        if !(d_sigma > 0.0 && d_tau > 0.0) {
            return Err(Error::precondition("grid spacings must be positive"));
        }
        if topology == Topology::Closed && n_sigma < 3 {
            return Err(Error::precondition("closed sheet needs at least 3 σ samples"));
        }
        Ok(StringSheet {
            points,
            d_sigma,
            d_tau,
            topology,
            metric,
        })
    }

    /// Samples `λ(σ, τ)` at `σ_i = i·dσ`, `τ_n = τ₀ + n·dτ`. Open sheets take
    /// `n_sigma` points spanning `[0, 1]`; closed ones `n_sigma` points of
    /// the period `[0, 1)`.
    pub fn from_fn(
        lambda: impl Fn(f64, f64) -> Vec<f64>,
        n_sigma: usize,
        tau0: f64,
        d_tau: f64,
        n_tau: usize,
        topology: Topology,
        metric: Metric<f64>,
    ) -> Result<Self> {
        let d_sigma = match topology {
            Topology::Open => 1.0 / (n_sigma.max(2) - 1) as f64,
            Topology::Closed => 1.0 / n_sigma as f64,
        };
        let points = (0..n_tau)
            .map(|n| {
                let tau = tau0 + n as f64 * d_tau;
                (0..n_sigma).map(|i| lambda(i as f64 * d_sigma, tau)).collect()
            })
            .collect();
        Self::new(points, d_sigma, d_tau, topology, metric)
    }

    pub fn n_sigma(&self) -> usize {
        self.points.first().map(Vec::len).unwrap_or(0)
    }

    pub fn n_tau(&self) -> usize {
        self.points.len()
    }

    pub fn d_sigma(&self) -> f64 {
        self.d_sigma
    }

    pub fn d_tau(&self) -> f64 {
        self.d_tau
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn metric(&self) -> &Metric<f64> {
        &self.metric
    }

    pub fn point(&self, tau: usize, sigma: usize) -> &[f64] {
        &self.points[tau][sigma]
    }

    /// σ neighbour at offset `di`, wrapping for closed sheets.
    fn sigma_index(&self, i: usize, di: isize) -> Option<usize> {
        let n = self.n_sigma() as isize;
        let j = i as isize + di;
        match self.topology {
            Topology::Closed => Some(j.rem_euclid(n) as usize),
            Topology::Open if (0..n).contains(&j) => Some(j as usize),
            Topology::Open => None,
        }
    }

    fn tau_index(&self, n: usize, dn: isize) -> Option<usize> {
        let j = n as isize + dn;
        (0..self.n_tau() as isize).contains(&j).then_some(j as usize)
    }

    /// Central-difference tangents `(λ̇, λ′)` at a grid point, if the
    /// stencil fits.
    pub fn tangents(&self, tau: usize, sigma: usize) -> Option<(Vec<f64>, Vec<f64>)> {
        let (tp, tm) = (self.tau_index(tau, 1)?, self.tau_index(tau, -1)?);
        let (sp, sm) = (self.sigma_index(sigma, 1)?, self.sigma_index(sigma, -1)?);
        let diff = |a: &[f64], b: &[f64], h: f64| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| (x - y) / (2.0 * h)).collect()
        };
        Some((
            diff(&self.points[tp][sigma], &self.points[tm][sigma], self.d_tau),
            diff(&self.points[tau][sp], &self.points[tau][sm], self.d_sigma),
        ))
    }

    /// Points at least two samples away from every grid edge (all σ for a
    /// closed sheet).
    pub fn interior_window(&self) -> Window {
        let sigma = match self.topology {
            Topology::Closed => 0..self.n_sigma(),
            Topology::Open => 2..self.n_sigma().saturating_sub(2),
        };
        Window {
            sigma,
            tau: 2..self.n_tau().saturating_sub(2),
        }
    }

    /// Window covering the parameter box `[σ_a, σ_b] × [τ_a, τ_b]`, given the
    /// τ of the first stored row.
    pub fn window_for(&self, sigma: (f64, f64), tau: (f64, f64), tau0: f64) -> Window {
        let lo = |v: f64, h: f64| (v / h).ceil().max(0.0) as usize;
        let hi = |v: f64, h: f64| (v / h).floor().max(-1.0) as isize + 1;
        Window {
            sigma: lo(sigma.0, self.d_sigma)..hi(sigma.1, self.d_sigma).max(0) as usize,
            tau: lo(tau.0 - tau0, self.d_tau)..hi(tau.1 - tau0, self.d_tau).max(0) as usize,
        }
    }

    /// Evaluates `∂_σ p_σ + ∂_τ p_τ` by nested central differences over the
    /// window. Points whose stencil leaves the grid are skipped and counted;
    /// a degenerate element inside the stencil is an error.
    pub fn covariant_eom_residual(&self, window: &Window) -> Result<EomResidual> {
        let m = &self.metric;
        let mut out = EomResidual::default();
        let currents = |n: usize, i: usize| -> Result<Option<(Vec<f64>, Vec<f64>)>> {
            match self.tangents(n, i) {
                None => Ok(None),
                Some((ld, lp)) => {
                    let c = momentum_currents(&ld, &lp, m).map_err(|e| {
                        Error::precondition(format!("at grid point (τ {n}, σ {i}): {e}"))
                    })?;
                    Ok(Some((c.p_tau, c.p_sigma)))
                }
            }
        };
        for n in window.tau.clone() {
            for i in window.sigma.clone() {
                let neighbours = (
                    self.tau_index(n, 1),
                    self.tau_index(n, -1),
                    self.sigma_index(i, 1),
                    self.sigma_index(i, -1),
                );
                let (Some(tp), Some(tm), Some(sp), Some(sm)) = neighbours else {
                    out.skipped_edges += 1;
                    continue;
                };
                let (Some(up), Some(dn), Some(right), Some(left), Some((ld, lp))) = (
                    currents(tp, i)?,
                    currents(tm, i)?,
                    currents(n, sp)?,
                    currents(n, sm)?,
                    self.tangents(n, i),
                ) else {
                    out.skipped_edges += 1;
                    continue;
                };
                let e: Vec<f64> = (0..m.dim())
                    .map(|mu| {
                        (right.1[mu] - left.1[mu]) / (2.0 * self.d_sigma)
                            + (up.0[mu] - dn.0[mu]) / (2.0 * self.d_tau)
                    })
                    .collect();
                out.points += 1;
                out.max_norm = e.iter().fold(out.max_norm, |acc, v| acc.max(v.abs()));
                out.noether_tau = out.noether_tau.max(m.dot(&e, &ld).abs());
                out.noether_sigma = out.noether_sigma.max(m.dot(&e, &lp).abs());
            }
        }
        Ok(out)
    }
}
