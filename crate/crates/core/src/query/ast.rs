use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Searchable fields. Closed set; anything else is a parse error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldName {
    /// Abstract, keywords and title.
    Abs,
    Body,
    Title,
    Author,
    Keyword,
    Bibgroup,
    Doctype,
    Year,
    /// Title, abstract, keywords and body. Default for unscoped terms.
    Full,
}

impl FieldName {
    pub const ALL: [FieldName; 9] = [
        FieldName::Abs,
        FieldName::Body,
        FieldName::Title,
        FieldName::Author,
        FieldName::Keyword,
        FieldName::Bibgroup,
        FieldName::Doctype,
        FieldName::Year,
        FieldName::Full,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FieldName::Abs => "abs",
            FieldName::Body => "body",
            FieldName::Title => "title",
            FieldName::Author => "author",
            FieldName::Keyword => "keyword",
            FieldName::Bibgroup => "bibgroup",
            FieldName::Doctype => "doctype",
            FieldName::Year => "year",
            FieldName::Full => "full",
        }
    }
}

impl fmt::Display for FieldName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FieldName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FieldName::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum QueryNode {
    Phrase {
        text: String,
        exact: bool,
    },
    Word {
        text: String,
    },
    FieldScope {
        field: FieldName,
        child: Box<QueryNode>,
    },
    DocsRef {
        key: String,
    },
    YearRange {
        first: u16,
        last: u16,
    },
    And {
        children: Vec<QueryNode>,
    },
    Or {
        children: Vec<QueryNode>,
    },
    Not {
        child: Box<QueryNode>,
    },
}

impl QueryNode {
    pub fn phrase(text: impl Into<String>) -> Self {
        QueryNode::Phrase {
            text: text.into(),
            exact: false,
        }
    }

    pub fn exact_phrase(text: impl Into<String>) -> Self {
        QueryNode::Phrase {
            text: text.into(),
            exact: true,
        }
    }

    pub fn word(text: impl Into<String>) -> Self {
        QueryNode::Word { text: text.into() }
    }

    pub fn scope(field: FieldName, child: QueryNode) -> Self {
        QueryNode::FieldScope {
            field,
            child: Box::new(child),
        }
    }

    pub fn docs(key: impl Into<String>) -> Self {
        QueryNode::DocsRef { key: key.into() }
    }

    pub fn year(first: u16, last: u16) -> Self {
        QueryNode::YearRange { first, last }
    }

    pub fn and(children: Vec<QueryNode>) -> Self {
        QueryNode::And { children }
    }

    pub fn or(children: Vec<QueryNode>) -> Self {
        QueryNode::Or { children }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(child: QueryNode) -> Self {
        QueryNode::Not {
            child: Box::new(child),
        }
    }

    /// `self AND year:first-last`, the form appended by year-restricted runs.
    pub fn restrict_years(self, first: u16, last: u16) -> Self {
        QueryNode::and(vec![
            self,
            QueryNode::scope(FieldName::Year, QueryNode::year(first, last)),
        ])
    }

    /// Library keys referenced anywhere in the tree.
    pub fn docs_refs(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |n| {
            if let QueryNode::DocsRef { key } = n {
                out.push(key.as_str());
            }
        });
        out
    }

    pub(crate) fn walk<'a>(&'a self, f: &mut impl FnMut(&'a QueryNode)) {
        f(self);
        match self {
            QueryNode::FieldScope { child, .. } | QueryNode::Not { child } => child.walk(f),
            QueryNode::And { children } | QueryNode::Or { children } => {
                for c in children {
                    c.walk(f);
                }
            }
            _ => {}
        }
    }
}

impl fmt::Display for QueryNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::serialize(self))
    }
}
