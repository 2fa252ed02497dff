//! One runner per scenario kind. Each turns a payload into a report plus
//! plot-ready tables.

pub mod forms;
pub mod membrane;
pub mod particle;
pub mod string;

use crate::output::Table;
use crate::report::Report;

/// Deliberate defects used to confirm that the checks can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Face signs `(−1)^ε` that ignore the axis, breaking `∂² = 0`.
    BoundarySign,
}

#[derive(Clone, Copy, Debug)]
pub struct Context {
    pub seed: u64,
    pub fault: Option<Fault>,
}

/// Report and named tables from one scenario.
#[derive(Debug)]
pub struct Run {
    pub report: Report,
    pub tables: Vec<(String, Table)>,
}

/// `log₂(coarse/fine)`, the observed order between two halvings of `h`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Smallest observed order along a refinement ladder.
pub fn min_order(series: &[f64]) -> f64 {
    series
        .windows(2)
        .map(|w| observed_order(w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

pub fn max_abs_diff<'a>(a: impl IntoIterator<Item = &'a f64>, b: impl IntoIterator<Item = &'a f64>) -> f64 {
    a.into_iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_quartering_series() {
        assert!((min_order(&[1.0, 0.25, 0.0625]) - 2.0).abs() < 1e-12);
        assert!((min_order(&[1.0, 0.25, 0.125]) - 1.0).abs() < 1e-12);
        assert_eq!(max_abs_diff(&[1.0, 2.0], &[1.5, 2.0]), 0.5);
    }
}
