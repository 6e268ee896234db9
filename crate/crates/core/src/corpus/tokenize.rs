use serde::Serialize;

/// A token occurrence. `span` is the number of positions it covers: 1 for a
/// plain part, k for the joined form of a k-part hyphenated word.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub text: String,
    pub position: u32,
    pub span: u32,
    /// True for the joined form of a hyphenated word.
    pub alternative: bool,
}

fn is_hyphen(c: char) -> bool {
    matches!(c, '-' | '\u{2010}' | '\u{2011}')
}

/// Lowercase alphanumeric runs. A hyphenated word (`Fermi-Pasta-Ulam`) emits
/// each part at consecutive positions plus one alternative token with the
/// parts concatenated, anchored at the first part and spanning all of them.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut position = 0u32;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if !chars[i].is_alphanumeric() {
            i += 1;
            continue;
        }
        // one hyphen group: part (-part)*
        let mut parts: Vec<String> = Vec::new();
        loop {
            let mut part = String::new();
            while i < chars.len() && chars[i].is_alphanumeric() {
                part.extend(chars[i].to_lowercase());
                i += 1;
            }
            parts.push(part);
            if i + 1 < chars.len() && is_hyphen(chars[i]) && chars[i + 1].is_alphanumeric() {
                i += 1;
            } else {
                break;
            }
        }
        let first = position;
        if parts.len() > 1 {
            out.push(Token {
                text: parts.concat(),
                position: first,
                span: parts.len() as u32,
                alternative: true,
            });
        }
        for part in parts {
            out.push(Token {
                text: part,
                position,
                span: 1,
                alternative: false,
            });
            position += 1;
        }
    }
    out
}

/// The plain (non-alternative) token texts, in order.
pub fn parts(text: &str) -> Vec<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !t.alternative)
        .map(|t| t.text)
        .collect()
}

/// Token texts with every hyphenated group replaced by its joined form.
pub fn joined_parts(text: &str) -> Vec<String> {
    let tokens = tokenize(text);
    let mut out = Vec::new();
    let mut skip_until = 0u32;
    for t in tokens {
        if t.position < skip_until {
            continue;
        }
        if t.alternative {
            skip_until = t.position + t.span;
        }
        out.push(t.text);
    }
    out
}
