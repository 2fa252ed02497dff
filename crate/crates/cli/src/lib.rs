//! Scenario runner for the `formdyn` engines: loads JSON scenarios,
//! dispatches them, and writes reports (JSON) and series (CSV).

pub mod engines;
pub mod error;
pub mod output;
pub mod random;
pub mod report;
pub mod scenario;
pub mod suite;

use std::path::{Path, PathBuf};

pub use engines::Fault;
pub use error::{exit, CliError, Result};
pub use report::{Check, Report};
pub use scenario::{parse_scenarios, Scenario};

use engines::{Context, Run};
use output::{json_artifact, write_atomic, Artifact};
use scenario::Payload;

#[derive(Clone, Debug)]
pub struct Options {
    /// Directory for artifacts; nothing is written when `None`.
    pub out: Option<PathBuf>,
    /// Multiplies every upper-bound tolerance.
    pub tol_scale: f64,
    /// Overrides the scenario seeds.
    pub seed: Option<u64>,
    pub fault: Option<Fault>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            out: None,
            tol_scale: 1.0,
            seed: None,
            fault: None,
        }
    }
}

/// Result of one scenario: a report, or the error that stopped it.
#[derive(Debug)]
pub struct Outcome {
    pub scenario: String,
    pub result: Result<Report>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match &self.result {
            Ok(r) if r.passed => exit::OK,
            Ok(_) => exit::CHECK_FAILED,
            Err(e) => e.exit_code(),
        }
    }
}

/// Largest code among the outcomes; errors outrank failed checks.
pub fn combined_exit_code(outcomes: &[Outcome]) -> i32 {
    outcomes.iter().map(Outcome::exit_code).max().unwrap_or(exit::OK)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenarios(&text)
}

/// Checks a scenario against engine preconditions without running it.
pub fn validate(s: &Scenario) -> Result<()> {
    if let Some(key) = s.tolerances.keys().find(|k| k.is_empty()) {
        return Err(CliError::schema(format!("empty tolerance key {key:?}")));
    }
    match &s.payload {
        Payload::FormsCheck(p) => engines::forms::validate(p),
        Payload::Particle(p) => engines::particle::validate(p),
        Payload::String(p) => engines::string::validate(p),
        Payload::Membrane(p) => engines::membrane::validate(p),
    }
}

fn apply_tolerances(s: &Scenario, report: &mut Report, scale: f64) -> Result<()> {
    for (key, tol) in &s.tolerances {
        let c = report
            .checks
            .iter_mut()
            .find(|c| &c.name == key)
            .ok_or_else(|| CliError::schema(format!("tolerance for unknown check {key:?}")))?;
        *c = match c.bound {
            report::Bound::Lower => Check::lower(&c.name, c.value, *tol, &c.note),
            _ => Check::upper(&c.name, c.value, *tol, &c.note),
        };
    }
    report.scale_tolerances(scale);
    Ok(())
}

/// Runs one scenario and returns its report with the artifacts to write.
pub fn run_scenario(s: &Scenario, opts: &Options) -> Result<(Report, Vec<Artifact>)> {
    let ctx = Context {
        seed: opts.seed.unwrap_or(s.seed),
        fault: opts.fault,
    };
    let Run { mut report, tables } = match &s.payload {
        Payload::FormsCheck(p) => engines::forms::run(&s.name, p, &ctx)?,
        Payload::Particle(p) => engines::particle::run(&s.name, p, &ctx)?,
        Payload::String(p) => engines::string::run(&s.name, p, &ctx)?,
        Payload::Membrane(p) => engines::membrane::run(&s.name, p, &ctx)?,
    };
    apply_tolerances(s, &mut report, opts.tol_scale)?;
    let mut artifacts: Vec<Artifact> = tables
        .iter()
        .map(|(series, t)| t.artifact(format!("{}.{series}.csv", s.name)))
        .collect();
    report.artifacts = artifacts.iter().map(|a| a.name.clone()).collect();
    artifacts.push(json_artifact(format!("{}.report.json", s.name), &report));
    Ok((report, artifacts))
}

fn write_all(opts: &Options, artifacts: &[Artifact]) -> Result<()> {
    if let Some(dir) = &opts.out {
        for a in artifacts {
            write_atomic(dir, a)?;
        }
    }
    Ok(())
}

/// Validates every scenario, then runs them concurrently and writes their
/// artifacts. A validation failure stops the whole batch.
pub fn run_all(scenarios: &[Scenario], opts: &Options) -> Result<Vec<Outcome>> {
    for s in scenarios {
        validate(s)?;
    }
    let outcomes = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| {
                scope.spawn(move || {
                    let result = run_scenario(s, opts).and_then(|(report, artifacts)| {
                        write_all(opts, &artifacts)?;
                        Ok(report)
                    });
                    Outcome {
                        scenario: s.name.clone(),
                        result,
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect()
    });
    Ok(outcomes)
}

/// Reads every `*.report.json` in `dir`, sorted by file name.
pub fn collect_reports(dir: &Path) -> Result<Vec<Report>> {
    let read_err = |source| CliError::Read {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(read_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.to_str().is_some_and(|s| s.ends_with(".report.json")))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Read {
                path: p.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{}: {e}", p.display())))
        })
        .collect()
}
