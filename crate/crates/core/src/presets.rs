//! Shipped query presets, stored verbatim.

use crate::query::{parse, ParseError, QueryNode};

/// Careful search: field-scoped terms with the known false-positive
/// families subtracted, plus both curated libraries excluded.
pub const PRESET_STRICT: &str = include_str!("../presets/preset-strict.txt");

/// Simplified full-text search; more false positives, fewer misses.
pub const PRESET_BROAD: &str = include_str!("../presets/preset-broad.txt");

/// The two library keys excluded by [`PRESET_STRICT`], in order of appearance.
pub const STRICT_EXCLUDED: [&str; 2] = ["qazeXzDISj-d06qbiWLoXQ", "k1BwfM56QgKbl6X-PXADqg"];

/// The two library keys excluded by [`PRESET_BROAD`], in order of appearance.
pub const BROAD_EXCLUDED: [&str; 2] = ["k1Bwfm56QgKbl6X-PXADqg", "qazeXzDISj-d06qbiWLoXQ"];

/// The library of rejected records, excluded by both presets.
pub const IRRELEVANT_KEY: &str = "qazeXzDISj-d06qbiWLoXQ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Strict,
    Broad,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Strict => "preset-strict",
            Preset::Broad => "preset-broad",
        }
    }

    pub fn text(self) -> &'static str {
        match self {
            Preset::Strict => PRESET_STRICT,
            Preset::Broad => PRESET_BROAD,
        }
    }

    pub fn excluded_keys(self) -> [&'static str; 2] {
        match self {
            Preset::Strict => STRICT_EXCLUDED,
            Preset::Broad => BROAD_EXCLUDED,
        }
    }

    /// `(relevant, irrelevant)` library keys: the excluded key other than
    /// [`IRRELEVANT_KEY`] holds the accepted records.
    pub fn curation_keys(self) -> (&'static str, &'static str) {
        let [a, b] = self.excluded_keys();
        if a == IRRELEVANT_KEY {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Accepts `strict`, `broad`, `preset-strict` and `preset-broad`.
    pub fn from_name(name: &str) -> Option<Preset> {
        match name.trim_start_matches("preset-") {
            "strict" => Some(Preset::Strict),
            "broad" => Some(Preset::Broad),
            _ => None,
        }
    }

    pub fn query(self) -> Result<QueryNode, ParseError> {
        parse(self.text())
    }
}
