use thiserror::Error;

use super::ast::{FieldName, QueryNode};
use super::lexer::{lex, Spanned, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty query")]
    EmptyQuery,
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParen { offset: usize },
    #[error("unknown field `{name}` at offset {offset}")]
    UnknownField { name: String, offset: usize },
    #[error("empty phrase at offset {offset}")]
    EmptyPhrase { offset: usize },
    #[error("malformed library reference `docs({text})` at offset {offset}")]
    MalformedDocsRef { text: String, offset: usize },
    #[error("operator `{op}` at offset {offset} is missing an operand")]
    DanglingOperator { op: String, offset: usize },
    #[error("unterminated phrase starting at offset {offset}")]
    UnterminatedPhrase { offset: usize },
    #[error("malformed year `{text}` at offset {offset}")]
    MalformedYear { text: String, offset: usize },
    #[error("unexpected `{token}` at offset {offset}")]
    UnexpectedToken { token: String, offset: usize },
}

pub const MIN_YEAR: u16 = 1000;
pub const MAX_YEAR: u16 = 2999;

/// Parses query text into an AST. The result is not normalized.
pub fn parse(text: &str) -> Result<QueryNode, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::EmptyQuery);
    }
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let node = p.diff(Scope::default())?;
    match p.peek() {
        None => Ok(node),
        Some(Tok::RParen) => Err(ParseError::UnbalancedParen { offset: p.offset() }),
        Some(t) => Err(ParseError::UnexpectedToken {
            token: describe(t),
            offset: p.offset(),
        }),
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Scope {
    exact: bool,
    year: bool,
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end: usize,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
        Tok::And => "AND".into(),
        Tok::Or => "OR".into(),
        Tok::Not => "NOT".into(),
        Tok::Quoted(s) => format!("\"{s}\""),
        Tok::Bare(s) => s.clone(),
        Tok::Field { name, .. } => format!("{name}:"),
        Tok::Docs(s) => format!("docs({s})"),
    }
}

fn starts_unit(t: Option<&Tok>) -> bool {
    matches!(
        t,
        Some(
            Tok::LParen
                | Tok::Not
                | Tok::Quoted(_)
                | Tok::Bare(_)
                | Tok::Field { .. }
                | Tok::Docs(_)
        )
    )
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |s| s.offset)
    }

    fn bump(&mut self) -> Spanned {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn operand_after(&self, op: &str, offset: usize, juxtapose: bool) -> Result<(), ParseError> {
        let next = self.peek();
        let ok = if juxtapose {
            starts_unit(next) && next != Some(&Tok::Not)
        } else {
            starts_unit(next)
        };
        if ok {
            Ok(())
        } else {
            Err(ParseError::DanglingOperator {
                op: op.into(),
                offset,
            })
        }
    }

    fn diff(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let first = self.or(scope)?;
        if self.peek() != Some(&Tok::Not) {
            return Ok(first);
        }
        let mut parts = match first {
            QueryNode::And { children } => children,
            other => vec![other],
        };
        while self.peek() == Some(&Tok::Not) {
            let op = self.bump();
            self.operand_after("NOT", op.offset, false)?;
            parts.push(QueryNode::not(self.or(scope)?));
        }
        Ok(QueryNode::and(parts))
    }

    fn or(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let mut parts = vec![self.and(scope)?];
        while self.peek() == Some(&Tok::Or) {
            let op = self.bump();
            self.operand_after("OR", op.offset, false)?;
            parts.push(self.and(scope)?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            QueryNode::or(parts)
        })
    }

    fn and(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let mut parts = vec![self.unit(scope)?];
        loop {
            match self.peek() {
                Some(Tok::And) => {
                    let op = self.bump();
                    self.operand_after("AND", op.offset, false)?;
                    parts.push(self.unit(scope)?);
                }
                t if starts_unit(t) && t != Some(&Tok::Not) => parts.push(self.unit(scope)?),
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            QueryNode::and(parts)
        })
    }

    fn group(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let open = self.bump();
        if self.peek() == Some(&Tok::RParen) {
            return Err(ParseError::UnexpectedToken {
                token: ")".into(),
                offset: self.offset(),
            });
        }
        let inner = self.diff(scope)?;
        match self.peek() {
            Some(Tok::RParen) => {
                self.bump();
                Ok(inner)
            }
            None => Err(ParseError::UnbalancedParen {
                offset: open.offset,
            }),
            Some(t) => Err(ParseError::UnexpectedToken {
                token: describe(t),
                offset: self.offset(),
            }),
        }
    }

    fn unit(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let offset = self.offset();
        match self.peek().cloned() {
            None => Err(ParseError::DanglingOperator {
                op: "<end>".into(),
                offset,
            }),
            Some(Tok::Not) => {
                self.bump();
                self.operand_after("NOT", offset, false)?;
                Ok(QueryNode::not(self.unit(scope)?))
            }
            Some(Tok::LParen) => self.group(scope),
            Some(Tok::RParen) => Err(ParseError::UnbalancedParen { offset }),
            Some(op @ (Tok::And | Tok::Or)) => Err(ParseError::DanglingOperator {
                op: describe(&op),
                offset,
            }),
            Some(Tok::Field { name, exact }) => {
                self.bump();
                let field: FieldName = name
                    .parse()
                    .map_err(|name| ParseError::UnknownField { name, offset })?;
                let inner = Scope {
                    exact: scope.exact || exact,
                    year: field == FieldName::Year,
                };
                let child = match self.peek() {
                    Some(Tok::LParen) => self.group(inner)?,
                    Some(Tok::Quoted(_) | Tok::Bare(_)) => self.term(inner)?,
                    Some(t) => {
                        return Err(ParseError::UnexpectedToken {
                            token: describe(t),
                            offset: self.offset(),
                        })
                    }
                    None => {
                        return Err(ParseError::DanglingOperator {
                            op: format!("{field}:"),
                            offset,
                        })
                    }
                };
                Ok(QueryNode::scope(field, child))
            }
            Some(Tok::Docs(inner)) => {
                self.bump();
                parse_docs_ref(&inner)
                    .map(QueryNode::docs)
                    .ok_or(ParseError::MalformedDocsRef {
                        text: inner,
                        offset,
                    })
            }
            Some(Tok::Quoted(_) | Tok::Bare(_)) => self.term(scope),
        }
    }

    fn term(&mut self, scope: Scope) -> Result<QueryNode, ParseError> {
        let Spanned { tok, offset } = self.bump();
        let (text, quoted) = match tok {
            Tok::Quoted(s) => (s, true),
            Tok::Bare(s) => (s, false),
            _ => unreachable!("term called on non-term token"),
        };
        if scope.year {
            return parse_year_form(&text)
                .map(|(first, last)| QueryNode::year(first, last))
                .ok_or(ParseError::MalformedYear { text, offset });
        }
        if quoted {
            if text.trim().is_empty() {
                return Err(ParseError::EmptyPhrase { offset });
            }
            Ok(QueryNode::Phrase {
                text,
                exact: scope.exact,
            })
        } else {
            Ok(QueryNode::word(text))
        }
    }
}

pub(crate) fn is_library_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

fn parse_docs_ref(inner: &str) -> Option<String> {
    let key = inner.trim().strip_prefix("library/")?;
    (!key.is_empty() && key.chars().all(is_library_key_char)).then(|| key.to_string())
}

/// `YYYY` or `YYYY-YYYY` within the supported year range.
pub(crate) fn parse_year_form(text: &str) -> Option<(u16, u16)> {
    fn year(s: &str) -> Option<u16> {
        if s.len() != 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let y: u16 = s.parse().ok()?;
        (MIN_YEAR..=MAX_YEAR).contains(&y).then_some(y)
    }
    let text = text.trim();
    let (first, last) = match text.split_once('-') {
        Some((a, b)) => (year(a)?, year(b)?),
        None => {
            let y = year(text)?;
            (y, y)
        }
    };
    (first <= last).then_some((first, last))
}
