//! Versioned, deterministic JSON reports.

use num_rational::BigRational;
use serde::{Serialize, Serializer};

pub const REPORT_VERSION: u32 = 1;

/// Exact rational as "p/q".
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ser_rational<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_string(r))
}

pub fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational_string))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// number of instances examined
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, count: u64, failure: Option<String>) -> Self {
        Check { name: name.into(), passed: failure.is_none(), count, detail: None, counterexample: failure }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<Check>,
    pub data: serde_json::Value,
    pub failures: usize,
}

impl Report {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Report {
            report_version: REPORT_VERSION,
            command: command.into(),
            config,
            checks: vec![],
            data: serde_json::Value::Null,
            failures: 0,
        }
    }

    pub fn push(&mut self, c: Check) {
        if !c.passed {
            self.failures += 1;
        }
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = Check>) {
        for c in cs {
            self.push(c);
        }
    }

    pub fn ok(&self) -> bool {
        self.failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
