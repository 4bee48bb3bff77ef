//! Threshold checks, scenario reports and artifact emission.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::scenario::config::ScenarioKind;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Schema version of `report.json` / `failure.json`.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Between(f64, f64),
}

impl Bound {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Bound::AtMost(t) => v <= t,
            Bound::AtLeast(t) => v >= t,
            Bound::Between(lo, hi) => v >= lo && v <= hi,
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::AtMost(t) => write!(f, "<= {t:e}"),
            Bound::AtLeast(t) => write!(f, ">= {t:e}"),
            Bound::Between(lo, hi) => write!(f, "in [{lo}, {hi}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: Bound,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, threshold: Bound) -> Self {
        Self {
            name: name.into(),
            pass: threshold.holds(value),
            value,
            threshold,
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {}: {:.4e} (threshold {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.threshold
        )
    }
}

/// In-memory output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            name: name.into(),
            bytes,
        }
    }

    pub fn text(&self) -> &str {
        std::str::from_utf8(&self.bytes).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub scenario: ScenarioKind,
    pub version: String,
    pub config_sha256: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub summary: Value,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutput {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

impl ScenarioOutput {
    pub fn artifact(&self, name: &str) -> Option<&Artifact> {
        self.artifacts.iter().find(|a| a.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.report.pass {
            0
        } else {
            1
        }
    }
}

pub fn provenance(kind: ScenarioKind, hash: &str) -> String {
    format!("slowlight {VERSION} scenario={kind} config_sha256={hash}")
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

/// Writes every artifact, `report.json`, and `failure.json` when a check
/// failed. Returns the written paths.
pub fn write_output(out: &ScenarioOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        f.write_all(bytes).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for a in &out.artifacts {
        put(&a.name, &a.bytes)?;
    }
    put("report.json", &to_json_bytes(&out.report))?;
    if !out.report.pass {
        put("failure.json", &failure_json(&out.report))?;
    }
    Ok(written)
}

pub fn failure_json(report: &Report) -> Vec<u8> {
    let failed: Vec<&Check> = report.failures().collect();
    to_json_bytes(&serde_json::json!({
        "schema": REPORT_SCHEMA,
        "scenario": report.scenario,
        "config_sha256": report.config_sha256,
        "error": Value::Null,
        "failed_checks": failed,
    }))
}

/// Failure document for a run that stopped with an error.
pub fn error_json(scenario: Option<ScenarioKind>, hash: Option<&str>, err: &Error) -> Vec<u8> {
    to_json_bytes(&serde_json::json!({
        "schema": REPORT_SCHEMA,
        "scenario": scenario,
        "config_sha256": hash,
        "error": err.to_string(),
        "failed_checks": [],
    }))
}
