//! Replays the case files in `cases/`: every case is a command line plus the JSON it
//! must produce. Fields present in `expected` are compared exactly; objects may carry
//! extra fields, arrays must match element for element.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Parser;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{execute, Cli, CliError, Command, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    /// Value stated in the literature.
    Literature,
    /// Value obtained by an independent computation.
    Computed,
    /// Holds by definition.
    Definition,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseFile {
    suite: String,
    title: String,
    cases: Vec<Case>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Case {
    id: String,
    origin: Origin,
    citation: String,
    args: Vec<String>,
    #[serde(default)]
    expected: Option<Value>,
    /// Substring of the error message, for cases that must be rejected.
    #[serde(default)]
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct Outcome {
    id: String,
    suite: String,
    file: String,
    origin: Origin,
    citation: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("cases")
}

fn load(dir: &Path) -> Result<Vec<(String, String, Case)>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Input(format!("cannot read cases in {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    let mut ids = BTreeSet::new();
    for path in files {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let file: CaseFile =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if file.title.trim().is_empty() {
            return Err(CliError::Input(format!("{}: empty title", path.display())));
        }
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        for case in file.cases {
            if case.expected.is_some() == case.error.is_some() {
                return Err(CliError::Input(format!("{}: case {} needs exactly one of expected/error", name, case.id)));
            }
            if !ids.insert(case.id.clone()) {
                return Err(CliError::Input(format!("duplicate case id {}", case.id)));
            }
            out.push((file.suite.clone(), name.clone(), case));
        }
    }
    Ok(out)
}

/// First difference between `expected` and `actual`, as a path and description.
pub fn mismatch(path: &str, expected: &Value, actual: &Value) -> Option<String> {
    match (expected, actual) {
        (Value::Object(e), Value::Object(a)) => e.iter().find_map(|(k, ev)| match a.get(k) {
            None => Some(format!("{path}.{k}: missing")),
            Some(av) => mismatch(&format!("{path}.{k}"), ev, av),
        }),
        (Value::Array(e), Value::Array(a)) => {
            if e.len() != a.len() {
                return Some(format!("{path}: expected {} entries, got {}", e.len(), a.len()));
            }
            e.iter().zip(a).enumerate().find_map(|(i, (ev, av))| mismatch(&format!("{path}[{i}]"), ev, av))
        }
        _ if expected == actual => None,
        _ => Some(format!("{path}: expected {expected}, got {actual}")),
    }
}

fn run_case(case: &Case) -> Result<(), String> {
    let argv = std::iter::once("mukai-forge".to_string()).chain(case.args.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| format!("bad arguments: {}", e.kind()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err("a case cannot run replay".into());
    }
    match (execute(&cli), &case.expected, &case.error) {
        (Ok(rep), Some(exp), _) => match mismatch("$", exp, &rep.json) {
            None if rep.code == 0 => Ok(()),
            None => Err(format!("exit code {}", rep.code)),
            Some(m) => Err(m),
        },
        (Ok(_), None, Some(want)) => Err(format!("expected an error containing {want:?}")),
        (Err(e), _, Some(want)) if e.to_string().contains(want.as_str()) => Ok(()),
        (Err(e), _, _) => Err(format!("error: {e}")),
        (Ok(_), None, None) => unreachable!("validated at load"),
    }
}

pub fn run(selector: &str, dir: Option<&Path>) -> Result<Report, CliError> {
    let dir = dir.map(Path::to_path_buf).unwrap_or_else(default_dir);
    let all = load(&dir)?;
    let chosen: Vec<_> = match selector {
        "all" => all,
        "qds" | "gm" | "atlas" => all.into_iter().filter(|(s, _, _)| s == selector).collect(),
        id => all.into_iter().filter(|(_, _, c)| c.id == id).collect(),
    };
    if chosen.is_empty() {
        return Err(CliError::Input(format!("unknown case or suite {selector:?}")));
    }
    let mut outcomes: Vec<Outcome> = chosen
        .par_iter()
        .map(|(suite, file, case)| {
            let res = run_case(case);
            Outcome {
                id: case.id.clone(),
                suite: suite.clone(),
                file: file.clone(),
                origin: case.origin,
                citation: case.citation.clone(),
                passed: res.is_ok(),
                detail: res.err(),
            }
        })
        .collect();
    outcomes.sort_by(|a, b| a.id.cmp(&b.id));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    let mut text = String::new();
    let width = outcomes.iter().map(|o| o.id.len()).max().unwrap_or(0);
    for o in &outcomes {
        let mark = if o.passed { "PASS" } else { "FAIL" };
        let origin = serde_json::to_value(o.origin).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        text.push_str(&format!("{mark}  {:<width$}  {:<10}  {}\n", o.id, origin, o.citation));
        if let Some(d) = &o.detail {
            text.push_str(&format!("      {d}\n"));
        }
    }
    text.push_str(&format!("{} cases, {} passed, {} failed\n", outcomes.len(), outcomes.len() - failed, failed));
    let json = json!({
        "suite": selector,
        "total": outcomes.len(),
        "passed": outcomes.len() - failed,
        "failed": failed,
        "cases": outcomes,
    });
    Ok(Report { json, text, code: if failed == 0 { 0 } else { 1 } })
}
