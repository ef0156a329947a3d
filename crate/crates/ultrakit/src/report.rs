//! Structured check reports: one record per checked instance, emitted as
//! text or as a line-delimited JSON stream for diffing in CI.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn pass(suite: &str, instance: impl Into<String>) -> CheckRecord {
        CheckRecord {
            suite: suite.to_string(),
            instance: instance.into(),
            status: Status::Pass,
            witness: None,
        }
    }

    pub fn fail(
        suite: &str,
        instance: impl Into<String>,
        witness: impl Into<String>,
    ) -> CheckRecord {
        CheckRecord {
            suite: suite.to_string(),
            instance: instance.into(),
            status: Status::Fail,
            witness: Some(witness.into()),
        }
    }

    pub fn from_result(
        suite: &str,
        instance: impl Into<String>,
        result: Result<(), String>,
    ) -> CheckRecord {
        match result {
            Ok(()) => CheckRecord::pass(suite, instance),
            Err(witness) => CheckRecord::fail(suite, instance, witness),
        }
    }
}

/// An ordered list of check records; merging is associative and order
/// independent given disjoint instance ids.
#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn new() -> SuiteReport {
        SuiteReport::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.records.push(record);
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.records.extend(other.records);
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.records
            .iter()
            .filter(|r| r.status == Status::Fail)
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "{} {} {}",
                r.suite,
                r.instance,
                match r.status {
                    Status::Pass => "pass",
                    Status::Fail => "FAIL",
                }
            ));
            if let Some(w) = &r.witness {
                out.push_str(&format!(" witness: {w}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }
}
