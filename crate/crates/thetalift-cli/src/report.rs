use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything a check measured. Exact checks count cases and failures;
/// numeric checks also carry their worst residual.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub inputs: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub observed: BTreeMap<String, Value>,
    pub cases: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Outcome {
    pub fn input(&mut self, key: &str, v: impl Into<Value>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    pub fn observe(&mut self, key: &str, v: impl Into<Value>) {
        self.observed.insert(key.to_string(), v.into());
    }

    /// Folds one residual into the worst seen.
    pub fn residual(&mut self, r: f64) {
        self.cases += 1;
        let worst = self.residual.get_or_insert(0.0);
        if !(r <= *worst) {
            *worst = r;
        }
    }

    /// Records a case that could not be evaluated, keeping the first message.
    pub fn error(&mut self, msg: impl std::fmt::Display) {
        self.cases += 1;
        self.failures += 1;
        self.detail.get_or_insert_with(|| msg.to_string());
    }

    /// Records an exact case.
    pub fn exact(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.detail.is_none() {
                self.detail = Some(what());
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: &'static str,
    pub anchor: &'static str,
    pub group: &'static str,
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub passed: bool,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub failed_ids: Vec<&'static str>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub groups: Vec<&'static str>,
    pub primes: Option<Vec<u64>>,
    pub tolerances: BTreeMap<String, f64>,
    pub grid: &'static str,
    pub coeffs: Vec<String>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<String>,
}

/// The deterministic part of a run. Wall times are kept out of it so that
/// identical configurations give byte-identical reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(config: ConfigEcho, checks: Vec<CheckRecord>) -> Self {
        let failed_ids: Vec<&'static str> = checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
        let summary = Summary {
            total: checks.len(),
            passed: checks.len() - failed_ids.len(),
            failed: failed_ids.len(),
            failed_ids,
        };
        VerificationReport { schema_version: SCHEMA_VERSION, config, checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}

/// Wall time of one check, reported separately from the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub id: &'static str,
    pub seconds: f64,
}
