use super::ast::QueryNode;
use super::normalize::normalize;

/// Canonical query text for `node`. The tree is normalized first, so
/// `parse(serialize(n)) == normalize(n)`.
pub fn serialize(node: &QueryNode) -> String {
    let mut out = String::new();
    write_node(&normalize(node), &mut out);
    out
}

fn write_node(node: &QueryNode, out: &mut String) {
    match node {
        QueryNode::FieldScope { field, child } => {
            if matches!(**child, QueryNode::Phrase { exact: true, .. }) {
                out.push('=');
            }
            out.push_str(field.as_str());
            out.push(':');
            write_node(child, out);
        }
        QueryNode::Phrase { text, .. } => {
            out.push('"');
            for c in text.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        QueryNode::Word { text } => out.push_str(text),
        QueryNode::YearRange { first, last } => {
            if first == last {
                out.push_str(&first.to_string());
            } else {
                out.push_str(&format!("{first}-{last}"));
            }
        }
        QueryNode::DocsRef { key } => {
            out.push_str("docs(library/");
            out.push_str(key);
            out.push(')');
        }
        QueryNode::Not { child } => {
            out.push_str("NOT ");
            write_grouped(child, out);
        }
        QueryNode::Or { children } => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(" OR ");
                }
                write_grouped(c, out);
            }
        }
        QueryNode::And { children } => {
            // Negated children at the tail print as binary NOT; any earlier
            // negation is parenthesized so the loose NOT cannot swallow the rest.
            let tail = children
                .iter()
                .rev()
                .take_while(|c| matches!(c, QueryNode::Not { .. }))
                .count();
            let head = children.len() - tail;
            for (i, c) in children.iter().enumerate() {
                if i >= head {
                    if i > 0 {
                        out.push(' ');
                    }
                    write_node(c, out);
                    continue;
                }
                if i > 0 {
                    out.push_str(" AND ");
                }
                match c {
                    QueryNode::Not { .. } | QueryNode::Or { .. } => {
                        out.push('(');
                        write_node(c, out);
                        out.push(')');
                    }
                    _ => write_node(c, out),
                }
            }
        }
    }
}

fn write_grouped(node: &QueryNode, out: &mut String) {
    if matches!(node, QueryNode::And { .. } | QueryNode::Or { .. }) {
        out.push('(');
        write_node(node, out);
        out.push(')');
    } else {
        write_node(node, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse, FieldName};

    #[test]
    fn single_scope() {
        let n = QueryNode::scope(FieldName::Bibgroup, QueryNode::word("SETI"));
        assert_eq!(serialize(&n), "bibgroup:SETI");
    }

    #[test]
    fn double_negation_collapses() {
        let n = QueryNode::not(QueryNode::not(QueryNode::word("x")));
        assert_eq!(serialize(&n), "full:x");
    }

    #[test]
    fn exact_and_escapes() {
        let n = QueryNode::scope(FieldName::Abs, QueryNode::exact_phrase(r#"a "b" \c"#));
        let s = serialize(&n);
        assert_eq!(s, r#"=abs:"a \"b\" \\c""#);
        assert_eq!(parse(&s).unwrap(), n);
    }

    #[test]
    fn leading_negation_is_grouped() {
        let n = QueryNode::and(vec![
            QueryNode::not(QueryNode::word("a")),
            QueryNode::word("b"),
            QueryNode::not(QueryNode::word("c")),
        ]);
        let s = serialize(&n);
        assert_eq!(s, "(NOT full:a) AND full:b NOT full:c");
        assert_eq!(parse(&s).unwrap(), normalize(&n));
    }

    #[test]
    fn strict_preset_canonical_text() {
        let n = parse(crate::presets::PRESET_STRICT).unwrap();
        let s = serialize(&n);
        assert!(
            s.starts_with(
                r#"((body:"Fermi Paradox" NOT body:"Pasta") OR (abs:"SETI" NOT abs:"Nepal") OR"#
            ),
            "{s}"
        );
        assert!(s.ends_with(
            "NOT docs(library/qazeXzDISj-d06qbiWLoXQ) NOT docs(library/k1BwfM56QgKbl6X-PXADqg)"
        ));
        assert_eq!(parse(&s).unwrap(), normalize(&n));
    }
}
