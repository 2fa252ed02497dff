use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// How a check value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `value ≤ tolerance`.
    Upper,
    /// Passes when `value ≥ tolerance`.
    Lower,
    /// Passes when `value == 0`; `value` counts mismatches.
    Exact,
    /// Recorded only.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    /// What the check measures.
    pub note: String,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64, bound: Bound, note: &str) -> Self {
        let passed = match bound {
            Bound::Upper => value <= tolerance,
            Bound::Lower => value >= tolerance,
            Bound::Exact => value == 0.0,
            Bound::Info => true,
        };
        Check {
            name: name.into(),
            value,
            tolerance,
            bound,
            passed,
            note: note.into(),
        }
    }

    pub fn upper(name: &str, value: f64, tolerance: f64, note: &str) -> Self {
        Check::new(name, value, tolerance, Bound::Upper, note)
    }

    pub fn lower(name: &str, value: f64, tolerance: f64, note: &str) -> Self {
        Check::new(name, value, tolerance, Bound::Lower, note)
    }

    pub fn exact(name: &str, mismatches: usize, note: &str) -> Self {
        Check::new(name, mismatches as f64, 0.0, Bound::Exact, note)
    }

    pub fn info(name: &str, value: f64, note: &str) -> Self {
        Check::new(name, value, 0.0, Bound::Info, note)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub kind: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(scenario: &str, kind: &str, seed: u64) -> Self {
        Report {
            scenario: scenario.into(),
            kind: kind.into(),
            seed,
            passed: true,
            checks: Vec::new(),
            metadata: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.metadata.insert(key.into(), value.into());
    }

    /// Multiplies upper-bound tolerances by `scale` and re-evaluates.
    pub fn scale_tolerances(&mut self, scale: f64) {
        for c in &mut self.checks {
            if c.bound == Bound::Upper {
                *c = Check::upper(&c.name, c.value, c.tolerance * scale, &c.note);
            }
        }
        self.passed = self.checks.iter().all(|c| c.passed);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn bound_text(c: &Check) -> String {
    match c.bound {
        Bound::Upper => format!("<= {:.1e}", c.tolerance),
        Bound::Lower => format!(">= {}", c.tolerance),
        Bound::Exact => "exact".into(),
        Bound::Info => "info".into(),
    }
}

/// Plain-text table of every check in `reports`.
pub fn table(reports: &[Report]) -> String {
    let width = reports
        .iter()
        .flat_map(|r| r.checks.iter().map(move |c| r.scenario.len() + c.name.len() + 1))
        .max()
        .unwrap_or(0)
        .max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:>12}  {:>10}  status", "check", "value", "bound");
    for r in reports {
        for c in &r.checks {
            let label = format!("{}/{}", r.scenario, c.name);
            let _ = writeln!(
                out,
                "{label:<width$}  {:>12.4e}  {:>10}  {}",
                c.value,
                bound_text(c),
                status(c.passed)
            );
        }
    }
    let total: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failed: usize = reports.iter().map(|r| r.failures().count()).sum();
    let _ = writeln!(out, "{} scenarios, {total} checks, {failed} failed", reports.len());
    out
}

/// One line per scenario, written next to the reports by `suite`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub scenario: String,
    pub kind: String,
    pub passed: bool,
    pub checks: usize,
    pub failed: Vec<String>,
}

impl From<&Report> for SuiteEntry {
    fn from(r: &Report) -> Self {
        SuiteEntry {
            scenario: r.scenario.clone(),
            kind: r.kind.clone(),
            passed: r.passed,
            checks: r.checks.len(),
            failed: r.failures().map(|c| c.name.clone()).collect(),
        }
    }
}
