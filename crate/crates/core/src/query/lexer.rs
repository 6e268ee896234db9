use super::parser::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    LParen,
    RParen,
    And,
    Or,
    Not,
    Quoted(String),
    Bare(String),
    /// `name:` or `=name:`; the name is not yet checked against the field set.
    Field {
        name: String,
        exact: bool,
    },
    /// Contents between `docs(` and the matching `)`.
    Docs(String),
}

#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub offset: usize,
}

fn is_bare_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '(' | ')' | '"' | ':')
}

pub(crate) fn lex(input: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = input.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (offset, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        match c {
            '(' => {
                out.push(Spanned {
                    tok: Tok::LParen,
                    offset,
                });
                i += 1;
            }
            ')' => {
                out.push(Spanned {
                    tok: Tok::RParen,
                    offset,
                });
                i += 1;
            }
            '"' => {
                let mut text = String::new();
                let mut j = i + 1;
                let mut closed = false;
                while j < chars.len() {
                    match chars[j].1 {
                        '\\' if j + 1 < chars.len() => {
                            text.push(chars[j + 1].1);
                            j += 2;
                        }
                        '"' => {
                            closed = true;
                            j += 1;
                            break;
                        }
                        other => {
                            text.push(other);
                            j += 1;
                        }
                    }
                }
                if !closed {
                    return Err(ParseError::UnterminatedPhrase { offset });
                }
                out.push(Spanned {
                    tok: Tok::Quoted(text),
                    offset,
                });
                i = j;
            }
            ':' => {
                return Err(ParseError::UnexpectedToken {
                    token: ":".into(),
                    offset,
                })
            }
            _ => {
                let mut j = i;
                while j < chars.len() && is_bare_char(chars[j].1) {
                    j += 1;
                }
                let word: String = chars[i..j].iter().map(|(_, c)| c).collect();
                let next = chars.get(j).map(|(_, c)| *c);
                if next == Some(':') {
                    let (exact, name) = match word.strip_prefix('=') {
                        Some(rest) => (true, rest.to_string()),
                        None => (false, word),
                    };
                    out.push(Spanned {
                        tok: Tok::Field { name, exact },
                        offset,
                    });
                    i = j + 1;
                } else if word == "docs" && next == Some('(') {
                    let start = j + 1;
                    let mut k = start;
                    while k < chars.len() && chars[k].1 != ')' {
                        k += 1;
                    }
                    if k == chars.len() {
                        return Err(ParseError::UnbalancedParen { offset });
                    }
                    let inner: String = chars[start..k].iter().map(|(_, c)| c).collect();
                    out.push(Spanned {
                        tok: Tok::Docs(inner),
                        offset,
                    });
                    i = k + 1;
                } else {
                    let tok = match word.as_str() {
                        "AND" => Tok::And,
                        "OR" => Tok::Or,
                        "NOT" => Tok::Not,
                        _ => Tok::Bare(word),
                    };
                    out.push(Spanned { tok, offset });
                    i = j;
                }
            }
        }
    }
    Ok(out)
}
