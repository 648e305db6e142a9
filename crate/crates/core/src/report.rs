//! Check reports: the uniform pass/fail/indeterminate record emitted by every
//! checker, serializable as one JSON object per check.

use serde::{Deserialize, Serialize};

/// Outcome of a single finite-window check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The asserted identity/congruence holds on the whole window.
    Pass,
    /// A concrete coefficient violates it; `witness` records the exponent.
    Fail,
    /// The window was too small to decide (or the search was vacuous).
    Indeterminate,
}

/// Result record for one check.  `params` is free-form JSON describing the
/// instance (symbol, prime, case, ...); `valuations` optionally carries the
/// valuation sequence that produced the verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub params: serde_json::Value,
    pub window: i64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<Option<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, params: serde_json::Value, window: i64, verdict: Verdict) -> Self {
        CheckReport {
            name: name.into(),
            params,
            window,
            verdict,
            witness: None,
            valuations: None,
            note: None,
        }
    }

    pub fn with_witness(mut self, witness: i64) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_valuations(mut self, vals: Vec<Option<i64>>) -> Self {
        self.valuations = Some(vals);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
