//! Built-in golden scenarios.

use crate::error::Result;
use crate::output::{json_artifact, write_atomic};
use crate::report::SuiteEntry;
use crate::scenario::{parse_scenarios, Scenario};
use crate::{run_all, Options, Outcome};

const GOLDEN: [(&str, &str); 4] = [
    ("forms-golden.json", include_str!("../scenarios/forms-golden.json")),
    ("particle-golden.json", include_str!("../scenarios/particle-golden.json")),
    ("string-golden.json", include_str!("../scenarios/string-golden.json")),
    ("membrane-golden.json", include_str!("../scenarios/membrane-golden.json")),
];

pub fn golden() -> Vec<Scenario> {
    GOLDEN
        .iter()
        .flat_map(|(file, text)| parse_scenarios(text).unwrap_or_else(|e| panic!("built-in {file}: {e}")))
        .collect()
}

/// Runs the golden set and, with an output directory, writes `suite.json`
/// next to the per-scenario artifacts.
pub fn run_suite(opts: &Options) -> Result<Vec<Outcome>> {
    let outcomes = run_all(&golden(), opts)?;
    if let Some(dir) = &opts.out {
        let entries: Vec<serde_json::Value> = outcomes
            .iter()
            .map(|o| match &o.result {
                Ok(r) => serde_json::to_value(SuiteEntry::from(r)).expect("plain data"),
                Err(e) => serde_json::json!({"scenario": o.scenario, "passed": false, "error": e.to_string()}),
            })
            .collect();
        write_atomic(dir, &json_artifact("suite.json".into(), &entries))?;
    }
    Ok(outcomes)
}
