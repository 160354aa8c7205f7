//! Machine-readable suite outcomes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matrix_json::MatrixJson;

/// Bumped whenever the serialized layout of [`SuiteReport`] changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub trial: usize,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<BTreeMap<String, MatrixJson>>,
    pub min_eigenvalue: f64,
}

/// One `(trial, check)` margin; the CSV output is one row per record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub trial: usize,
    pub label: String,
    pub min_eigenvalue: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: BTreeMap<String, Value>,
    pub trials: usize,
    pub failures: Vec<Failure>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    /// Out-of-hypothesis (exploration) runs never count as failures of the
    /// statement under test.
    pub in_hypothesis: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SuiteReport>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        Self {
            suite: suite.into(),
            params: BTreeMap::new(),
            trials: 0,
            failures: Vec::new(),
            seed,
            tolerances: BTreeMap::new(),
            in_hypothesis: true,
            records: Vec::new(),
            stats: BTreeMap::new(),
            notes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn stat(&mut self, key: &str, value: impl Into<Value>) {
        self.stats.insert(key.to_string(), value.into());
    }

    pub fn record(&mut self, trial: usize, label: impl Into<String>, min_eigenvalue: f64, passed: bool) {
        self.records.push(Record {
            trial,
            label: label.into(),
            min_eigenvalue,
            passed,
            value: None,
        });
    }

    /// Failures in this report and in-hypothesis children.
    pub fn in_hypothesis_failures(&self) -> usize {
        let own = if self.in_hypothesis { self.failures.len() } else { 0 };
        own + self
            .children
            .iter()
            .map(SuiteReport::in_hypothesis_failures)
            .sum::<usize>()
    }

    pub fn passed(&self) -> bool {
        self.in_hypothesis_failures() == 0
    }

    /// Total failures regardless of hypothesis labelling.
    pub fn total_failures(&self) -> usize {
        self.failures.len() + self.children.iter().map(SuiteReport::total_failures).sum::<usize>()
    }
}
