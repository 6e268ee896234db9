//! Acronym expansion for multi-word phrases.
//!
//! The base acronym is the initial of every part. A part that starts with a
//! combining prefix may also contribute the initial of the remainder, so
//! "Extraterrestrial Intelligence" expands to both "ei" and "eti", and
//! "electrothermal instability" to "ei" and "eti".

/// Combining prefixes that may be split off a part.
pub const COMBINING_PREFIXES: &[&str] = &[
    "electro", "extra", "thermo", "ultra", "inter", "intra", "trans", "super", "hyper", "micro",
    "macro", "radio", "astro", "multi", "infra", "techno", "photo", "magneto", "geo", "bio", "exo",
    "non", "anti",
];

/// Minimum length of the remainder after a prefix for the split to count.
const MIN_REMAINDER: usize = 3;

/// Initial choices for one part: the plain initial, and the two-letter form
/// when the part starts with a combining prefix.
fn initial_choices(part: &str) -> Vec<String> {
    let Some(first) = part.chars().next() else {
        return Vec::new();
    };
    let mut out = vec![first.to_string()];
    for prefix in COMBINING_PREFIXES {
        let Some(rest) = part.strip_prefix(prefix) else {
            continue;
        };
        if rest.chars().count() < MIN_REMAINDER {
            continue;
        }
        if let Some(c) = rest.chars().next().filter(|c| c.is_alphabetic()) {
            let split: String = [first, c].iter().collect();
            if !out.contains(&split) {
                out.push(split);
            }
        }
    }
    out
}

/// Acronym forms of a phrase given its lowercase parts; empty for fewer than
/// two parts. The first entry is always the plain initials.
pub fn acronyms(parts: &[String]) -> Vec<String> {
    if parts.len() < 2 {
        return Vec::new();
    }
    let mut forms = vec![String::new()];
    for part in parts {
        let choices = initial_choices(part);
        if choices.is_empty() {
            continue;
        }
        forms = forms
            .iter()
            .flat_map(|f| choices.iter().map(move |c| format!("{f}{c}")))
            .collect();
    }
    let mut seen = std::collections::HashSet::new();
    forms.retain(|f| seen.insert(f.clone()));
    forms
}
