//! Validation reports shared by all model validators.
//!
//! Validators never fail; they collect rule violations into a report. A
//! model is well formed exactly when its report is empty. Structural
//! problems that make a model unanalyzable (duplicate ids, dangling
//! references) are raised as [`StructuralError`] before validation runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single broken rule, attached to the offending element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Id of the node, transition or flow that breaks the rule; the
    /// literal `"process"` for process-level rules.
    pub element: String,
    /// Stable rule id, e.g. `nibm.task-fan-in`.
    pub rule: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        element: impl Into<String>,
        rule: impl Into<String>,
        message: impl Into<String>,
    ) {
        self.violations.push(Violation {
            element: element.into(),
            rule: rule.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    /// True when some violation carries the given rule id.
    pub fn has_rule(&self, rule: &str) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok: no violations");
        }
        for v in &self.violations {
            writeln!(f, "{}: [{}] {}", v.element, v.rule, v.message)?;
        }
        Ok(())
    }
}

/// Defects that prevent a model from being analyzed at all.
///
/// Validators, normalization and projection refuse such models up front;
/// readers report them as parse errors with a document path instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("duplicate node id {0}")]
    DuplicateNode(String),
    #[error("duplicate transition id {0}")]
    DuplicateTransition(String),
    #[error("duplicate performer id {0}")]
    DuplicatePerformer(String),
    #[error("transition {transition} references unknown source {node}")]
    UnresolvedSource { transition: String, node: String },
    #[error("transition {transition} references unknown target {node}")]
    UnresolvedTarget { transition: String, node: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_display_lists_violations() {
        let mut r = ValidationReport::new();
        r.push("n1", "nibm.task-label", "task label must be non-empty");
        let text = r.to_string();
        assert!(text.contains("n1"));
        assert!(text.contains("nibm.task-label"));
        assert!(!r.is_empty());
    }

    #[test]
    fn empty_report_displays_ok() {
        assert_eq!(ValidationReport::new().to_string(), "ok: no violations");
    }
}
