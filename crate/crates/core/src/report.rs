//! Machine-readable run reports: per-relation pass/fail lines with exact
//! witnesses, serialized as versioned JSON documents.

use crate::linalg::ExactMatrix;
use serde::Serialize;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A nonzero entry exhibited for a failed check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub value: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail { witness: Option<Witness> },
    Skipped { reason: String },
}

/// One checked identity: a stable id, the identity in display form, and the
/// outcome. The display string names the source relation for a failure.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RelationCheck {
    pub id: String,
    pub display: String,
    #[serde(flatten)]
    pub status: Status,
}

impl RelationCheck {
    /// Pass iff the residual matrix is exactly zero.
    pub fn from_residual(
        id: impl Into<String>,
        display: impl Into<String>,
        residual: &ExactMatrix,
    ) -> Self {
        let status = if residual.is_zero() {
            Status::Pass
        } else {
            let witness = residual.witness_entry().map(|(row, col, v)| Witness {
                row,
                col,
                value: v.to_string(),
            });
            Status::Fail { witness }
        };
        RelationCheck {
            id: id.into(),
            display: display.into(),
            status,
        }
    }

    pub fn pass(id: impl Into<String>, display: impl Into<String>) -> Self {
        RelationCheck {
            id: id.into(),
            display: display.into(),
            status: Status::Pass,
        }
    }

    pub fn fail_msg(
        id: impl Into<String>,
        display: impl Into<String>,
        msg: impl Into<String>,
    ) -> Self {
        RelationCheck {
            id: id.into(),
            display: display.into(),
            status: Status::Fail {
                witness: Some(Witness {
                    row: 0,
                    col: 0,
                    value: msg.into(),
                }),
            },
        }
    }

    pub fn skipped(
        id: impl Into<String>,
        display: impl Into<String>,
        reason: impl Into<String>,
    ) -> Self {
        RelationCheck {
            id: id.into(),
            display: display.into(),
            status: Status::Skipped {
                reason: reason.into(),
            },
        }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self.status, Status::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self.status, Status::Fail { .. })
    }
}

/// A named batch of relation checks.
#[derive(Clone, Debug, Serialize, Default)]
pub struct RelationReport {
    pub title: String,
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn new(title: impl Into<String>) -> Self {
        RelationReport {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: RelationCheck) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: RelationReport) {
        self.checks.extend(other.checks);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| !c.is_fail())
    }

    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.is_pass()).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| c.is_fail()).count()
    }

    /// One line per check, `PASS <id>` / `FAIL <id>: <witness>`.
    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| match &c.status {
                Status::Pass => format!("PASS {} :: {}", c.id, c.display),
                Status::Fail { witness } => {
                    let w = witness
                        .as_ref()
                        .map(|w| format!(" [entry ({},{}) = {}]", w.row, w.col, w.value))
                        .unwrap_or_default();
                    format!("FAIL {} :: {}{}", c.id, c.display, w)
                }
                Status::Skipped { reason } => {
                    format!("SKIP {} :: {} ({})", c.id, c.display, reason)
                }
            })
            .collect()
    }
}

/// Top-level report document.
#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument<T: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub title: String,
    pub body: T,
}

impl<T: Serialize> ReportDocument<T> {
    pub fn new(title: impl Into<String>, body: T) -> Self {
        ReportDocument {
            schema_version: REPORT_SCHEMA_VERSION,
            tool: "iqlab",
            title: title.into(),
            body,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
