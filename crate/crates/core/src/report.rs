//! Structured check results and the versioned JSON report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kernel::Tolerances;
use crate::rep::ModelSpec;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Reported but not gated.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// The property being checked, in words.
    pub statement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub dims: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Gated residual: passes iff `residual ≤ threshold` (NaN fails).
    pub fn residual(name: &str, statement: &str, residual: f64, threshold: f64) -> Self {
        let status = if residual <= threshold { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            statement: statement.into(),
            residual: Some(residual),
            dims: BTreeMap::new(),
            threshold: Some(threshold),
            status,
            note: None,
        }
    }

    /// Gated lower bound: passes iff `residual > threshold`.
    pub fn exceeds(name: &str, statement: &str, residual: f64, threshold: f64) -> Self {
        Self { status: if residual > threshold { Status::Pass } else { Status::Fail }, ..Self::residual(name, statement, residual, threshold) }
    }

    pub fn info(name: &str, statement: &str) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            residual: None,
            dims: BTreeMap::new(),
            threshold: None,
            status: Status::Info,
            note: None,
        }
    }

    pub fn boolean(name: &str, statement: &str, ok: bool) -> Self {
        Self { status: if ok { Status::Pass } else { Status::Fail }, ..Self::info(name, statement) }
    }

    pub fn with_residual(mut self, r: f64) -> Self {
        self.residual = Some(r);
        self
    }

    pub fn with_dim(mut self, key: &str, d: usize) -> Self {
        self.dims.insert(key.into(), d);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Turns a gate into an info entry, keeping the would-be verdict in the note.
    pub fn as_info(mut self) -> Self {
        if self.status != Status::Info {
            let verdict = if self.status == Status::Pass { "within" } else { "outside" };
            let note = format!("trend probe, {verdict} threshold");
            self.note = Some(match self.note.take() {
                Some(n) => format!("{n}; {note}"),
                None => note,
            });
            self.status = Status::Info;
        }
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub index: usize,
    pub probe: String,
    pub model_spec: ModelSpec,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub provenance: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub model_spec: ModelSpec,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub experiments: Vec<ExperimentReport>,
}

impl Report {
    pub fn new(model_spec: ModelSpec, tolerances: Tolerances, seed: u64) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").into(),
            model_spec,
            tolerances,
            seed,
            experiments: Vec::new(),
        }
    }

    pub fn checks(&self) -> impl Iterator<Item = &Check> {
        self.experiments.iter().flat_map(|e| e.checks.iter())
    }

    pub fn failures(&self) -> usize {
        self.checks().filter(|c| c.failed()).count()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text summary, one line per check.
    pub fn summary(&self) -> String {
        let mut out = format!("model {} · seed {} · schema v{}\n", self.model_spec.name(), self.seed, self.schema_version);
        for e in &self.experiments {
            out.push_str(&format!("[{}] {} ({})\n", e.index, e.probe, e.model_spec.name()));
            for c in &e.checks {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Info => "INFO",
                };
                let mut line = format!("  {tag} {}", c.name);
                if let Some(r) = c.residual {
                    line.push_str(&format!(" = {r:.3e}"));
                }
                if let Some(t) = c.threshold {
                    line.push_str(&format!(" (threshold {t:.1e})"));
                }
                for (k, v) in &c.dims {
                    line.push_str(&format!(" {k}={v}"));
                }
                if let Some(n) = &c.note {
                    line.push_str(&format!(" · {n}"));
                }
                out.push_str(&line);
                out.push('\n');
            }
        }
        let total = self.checks().count();
        out.push_str(&format!("{} checks, {} failed\n", total, self.failures()));
        out
    }
}
