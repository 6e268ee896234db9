use super::ast::{FieldName, QueryNode};
use super::parser::parse_year_form;

/// Canonical form: every Phrase/Word sits directly under exactly one
/// FieldScope (unscoped terms get `full`, the innermost scope wins), nested
/// And/Or are flattened and double negations removed. Year-form terms under
/// `year:` become year ranges. Idempotent.
pub fn normalize(node: &QueryNode) -> QueryNode {
    norm(node, None)
}

fn norm(node: &QueryNode, scope: Option<FieldName>) -> QueryNode {
    match node {
        QueryNode::Phrase { text, .. } | QueryNode::Word { text } => {
            // a year form written as a term under `year:` is the range it denotes
            let year_form = (scope == Some(FieldName::Year))
                .then(|| parse_year_form(text))
                .flatten();
            match year_form {
                Some((first, last)) => {
                    QueryNode::scope(FieldName::Year, QueryNode::year(first, last))
                }
                None => QueryNode::scope(scope.unwrap_or(FieldName::Full), node.clone()),
            }
        }
        QueryNode::YearRange { .. } => {
            QueryNode::scope(scope.unwrap_or(FieldName::Year), node.clone())
        }
        QueryNode::FieldScope { field, child } => norm(child, Some(*field)),
        QueryNode::DocsRef { .. } => node.clone(),
        QueryNode::Not { child } => match norm(child, scope) {
            QueryNode::Not { child } => *child,
            other => QueryNode::not(other),
        },
        QueryNode::And { children } => {
            let flat = flatten(children, scope, |n| match n {
                QueryNode::And { children } => Ok(children),
                other => Err(other),
            });
            collapse(flat, QueryNode::and)
        }
        QueryNode::Or { children } => {
            let flat = flatten(children, scope, |n| match n {
                QueryNode::Or { children } => Ok(children),
                other => Err(other),
            });
            collapse(flat, QueryNode::or)
        }
    }
}

fn flatten(
    children: &[QueryNode],
    scope: Option<FieldName>,
    same: impl Fn(QueryNode) -> Result<Vec<QueryNode>, QueryNode>,
) -> Vec<QueryNode> {
    let mut out = Vec::with_capacity(children.len());
    for c in children {
        match same(norm(c, scope)) {
            Ok(inner) => out.extend(inner),
            Err(other) => out.push(other),
        }
    }
    out
}

fn collapse(mut children: Vec<QueryNode>, build: fn(Vec<QueryNode>) -> QueryNode) -> QueryNode {
    if children.len() == 1 {
        children.pop().unwrap()
    } else {
        build(children)
    }
}
