//! Machine-readable run reports. The JSON layout is versioned through the
//! `schema` field and is byte-stable for a fixed seed: timings are included
//! only on request so repeated runs serialize identically.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const SCHEMA: &str = "bigbracket-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    PreconditionFailed,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub id: usize,
    pub command: String,
    /// Resolved input expressions, keyed by argument name.
    pub inputs: BTreeMap<String, String>,
    pub status: CheckStatus,
    /// Rendered value for value-producing commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    /// Rendered defect superfunction on failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub defect: Option<String>,
    /// Per-subcheck detail lines (faces, component equations, ...).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProblemInfo {
    pub n: u32,
    pub d: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: String,
    pub problem: ProblemInfo,
    pub seed: u64,
    pub tuples_degree: u32,
    pub max_order: u32,
    pub checks: Vec<CheckRecord>,
    pub status: CheckStatus,
    pub exit_code: i32,
}

impl Report {
    /// Exit code ranking: precondition failures dominate plain failures.
    pub fn summarize(checks: &[CheckRecord]) -> (CheckStatus, i32) {
        if checks.iter().any(|c| c.status == CheckStatus::PreconditionFailed) {
            (CheckStatus::PreconditionFailed, 3)
        } else if checks.iter().any(|c| c.status == CheckStatus::Fail) {
            (CheckStatus::Fail, 1)
        } else {
            (CheckStatus::Pass, 0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_lossless() {
        let report = Report {
            schema: SCHEMA.to_string(),
            problem: ProblemInfo { n: 2, d: 2 },
            seed: 7,
            tuples_degree: 2,
            max_order: 8,
            checks: vec![CheckRecord {
                id: 0,
                command: "check-courant".into(),
                inputs: BTreeMap::from([("theta".to_string(), "p1*xi1".to_string())]),
                status: CheckStatus::Pass,
                value: None,
                defect: None,
                details: vec!["{gamma,psi} = 0".into()],
                timing_ms: None,
            }],
            status: CheckStatus::Pass,
            exit_code: 0,
        };
        let json = serde_json::to_string_pretty(&report).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn exit_code_ranking() {
        let mk = |status| CheckRecord {
            id: 0,
            command: "x".into(),
            inputs: BTreeMap::new(),
            status,
            value: None,
            defect: None,
            details: Vec::new(),
            timing_ms: None,
        };
        assert_eq!(Report::summarize(&[mk(CheckStatus::Pass)]).1, 0);
        assert_eq!(Report::summarize(&[mk(CheckStatus::Pass), mk(CheckStatus::Fail)]).1, 1);
        assert_eq!(
            Report::summarize(&[mk(CheckStatus::Fail), mk(CheckStatus::PreconditionFailed)]).1,
            3
        );
    }
}
