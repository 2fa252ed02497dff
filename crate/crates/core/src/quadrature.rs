//! Gauss–Legendre tensor quadrature on unit cubes.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 8;

/// Gauss–Legendre rule mapped to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_POINTS).expect("default point count is valid")
    }
}

impl QuadratureRule {
    pub fn gauss_legendre(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::precondition("quadrature needs at least one point"));
        }
        let n = points;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Chebyshev-like initial guess, then Newton on P_n
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] to [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Ok(QuadratureRule { nodes, weights })
    }

    pub fn points_per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫₀¹ f`.
    pub fn integrate_1d(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Tensor-product integral of `f` over `[0,1]^r`. For `r = 0` this is
    /// `f(&[])`.
    pub fn integrate_cube(&self, r: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let n = self.nodes.len();
        let mut idx = vec![0usize; r];
        let mut point = vec![0.0; r];
        let mut total = 0.0;
        loop {
            let mut w = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                point[k] = self.nodes[i];
                w *= self.weights[i];
            }
            total += w * f(&point);
            // odometer increment
            let mut k = 0;
            while k < r {
                idx[k] += 1;
                if idx[k] < n {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == r {
                return total;
            }
        }
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for n in 1..=20 {
            let q = QuadratureRule::gauss_legendre(n).unwrap();
            let s: f64 = q.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n = {n}: {s}");
            assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
        }
        assert!(QuadratureRule::gauss_legendre(0).is_err());
    }

    #[test]
    fn exact_for_degree_2n_minus_1() {
        let q = QuadratureRule::gauss_legendre(8).unwrap();
        for k in 0..16 {
            let got = q.integrate_1d(|x| x.powi(k));
            let want = 1.0 / (k as f64 + 1.0);
            assert!((got - want).abs() < 1e-14, "x^{k}: {got} vs {want}");
        }
    }

    #[test]
    fn known_three_point_rule() {
        let q = QuadratureRule::gauss_legendre(3).unwrap();
        let a = 0.5 * (1.0 - (0.6f64).sqrt());
        assert!((q.nodes()[0] - a).abs() < 1e-15);
        assert!((q.weights()[1] - 4.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn cube_integral() {
        let q = QuadratureRule::default();
        let v = q.integrate_cube(3, |p| p[0] * p[1] * p[1] * p[2].powi(3));
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
        assert_eq!(q.integrate_cube(0, |_| 2.5), 2.5);
    }
}
