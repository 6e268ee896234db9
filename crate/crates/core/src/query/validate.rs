use serde::Serialize;

use super::ast::{FieldName, QueryNode};
use super::parser::{MAX_YEAR, MIN_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    /// `field:(... docs(library/K) ...)`; library membership has no field.
    DocsRefInsideFieldScope {
        key: String,
    },
    /// A bare `NOT x` at the root matches most of the corpus.
    ComplementWarning,
    /// A year range scoped to a text field.
    YearTermOutsideYearField {
        field: FieldName,
    },
    /// A Word or Phrase under `year:`.
    NonYearTermInYearField,
    InvalidYearRange {
        first: u16,
        last: u16,
    },
    EmptyPhrase,
    /// And/Or with fewer than two children.
    DegenerateBoolean,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub kind: IssueKind,
}

impl Issue {
    fn error(kind: IssueKind) -> Self {
        Issue {
            severity: Severity::Error,
            kind,
        }
    }

    fn warning(kind: IssueKind) -> Self {
        Issue {
            severity: Severity::Warning,
            kind,
        }
    }
}

/// Structural checks on a parsed (not necessarily normalized) tree.
pub fn validate(node: &QueryNode) -> Vec<Issue> {
    let mut issues = Vec::new();
    if matches!(node, QueryNode::Not { .. }) {
        issues.push(Issue::warning(IssueKind::ComplementWarning));
    }
    check(node, None, &mut issues);
    issues
}

fn check(node: &QueryNode, scope: Option<FieldName>, issues: &mut Vec<Issue>) {
    match node {
        QueryNode::DocsRef { key } => {
            if scope.is_some() {
                issues.push(Issue::error(IssueKind::DocsRefInsideFieldScope {
                    key: key.clone(),
                }));
            }
        }
        QueryNode::YearRange { first, last } => {
            if first > last || *first < MIN_YEAR || *last > MAX_YEAR {
                issues.push(Issue::error(IssueKind::InvalidYearRange {
                    first: *first,
                    last: *last,
                }));
            }
            if let Some(field) = scope.filter(|f| *f != FieldName::Year) {
                issues.push(Issue::warning(IssueKind::YearTermOutsideYearField {
                    field,
                }));
            }
        }
        QueryNode::Phrase { text, .. } | QueryNode::Word { text } => {
            if text.trim().is_empty() {
                issues.push(Issue::error(IssueKind::EmptyPhrase));
            }
            if scope == Some(FieldName::Year) {
                issues.push(Issue::warning(IssueKind::NonYearTermInYearField));
            }
        }
        QueryNode::FieldScope { field, child } => check(child, Some(*field), issues),
        QueryNode::Not { child } => check(child, scope, issues),
        QueryNode::And { children } | QueryNode::Or { children } => {
            if children.len() < 2 {
                issues.push(Issue::error(IssueKind::DegenerateBoolean));
            }
            for c in children {
                check(c, scope, issues);
            }
        }
    }
}
