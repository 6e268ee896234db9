use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{BibRecord, MatchExplanation};

/// Why a record is in or out of scope. Tags are metadata only; library
/// membership alone decides what the bibliography contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RubricTag {
    Observation,
    Instrumentation,
    FermiParadox,
    MetaSeti,
    History,
    SocialScience,
    Commensal,
    ExcludedAstrobiologyOnly,
    ExcludedFundamentalOnly,
    ExcludedPseudoscienceUfo,
    ExcludedBookReview,
    ExcludedSatire,
}

impl RubricTag {
    pub const ALL: [RubricTag; 12] = [
        RubricTag::Observation,
        RubricTag::Instrumentation,
        RubricTag::FermiParadox,
        RubricTag::MetaSeti,
        RubricTag::History,
        RubricTag::SocialScience,
        RubricTag::Commensal,
        RubricTag::ExcludedAstrobiologyOnly,
        RubricTag::ExcludedFundamentalOnly,
        RubricTag::ExcludedPseudoscienceUfo,
        RubricTag::ExcludedBookReview,
        RubricTag::ExcludedSatire,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RubricTag::Observation => "observation",
            RubricTag::Instrumentation => "instrumentation",
            RubricTag::FermiParadox => "fermi-paradox",
            RubricTag::MetaSeti => "meta-seti",
            RubricTag::History => "history",
            RubricTag::SocialScience => "social-science",
            RubricTag::Commensal => "commensal",
            RubricTag::ExcludedAstrobiologyOnly => "excluded-astrobiology-only",
            RubricTag::ExcludedFundamentalOnly => "excluded-fundamental-only",
            RubricTag::ExcludedPseudoscienceUfo => "excluded-pseudoscience-ufo",
            RubricTag::ExcludedBookReview => "excluded-book-review",
            RubricTag::ExcludedSatire => "excluded-satire",
        }
    }

    /// Exclusion tags may only accompany an Irrelevant verdict.
    pub fn is_exclusion(self) -> bool {
        self.as_str().starts_with("excluded-")
    }
}

impl fmt::Display for RubricTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RubricTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        RubricTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown rubric tag {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Relevant,
    Irrelevant,
    Skipped,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Relevant => "relevant",
            Verdict::Irrelevant => "irrelevant",
            Verdict::Skipped => "skipped",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "relevant" => Ok(Verdict::Relevant),
            "irrelevant" => Ok(Verdict::Irrelevant),
            "skipped" | "skip" => Ok(Verdict::Skipped),
            other => Err(format!("unknown verdict {other:?}")),
        }
    }
}

/// Curator-facing prompts for deciding whether a commensal paper belongs.
/// Any single "yes" is enough to include it.
pub const COMMENSAL_CHECKLIST: [&str; 5] = [
    "Was the mission designed with SETI as a main goal, or deliberately arranged to allow commensal SETI?",
    "For engineering work: is SETI an intended use of the technology?",
    "Is SETI relevance discussed substantively, beyond a passing mention in the introduction or discussion?",
    "Does the paper name a target or a method for future SETI searches?",
    "Is the work a stated prerequisite for future SETI missions or research?",
];

/// A suggested tag with the cues that triggered it. Advisory only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TagHint {
    pub tag: RubricTag,
    pub score: u32,
    pub cues: Vec<String>,
    /// Checklist to show alongside the hint (commensal only).
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    pub checklist: &'static [&'static str],
}

/// (tag, weight per cue, cues). Cues are whole lowercase word sequences.
const HEURISTICS: &[(RubricTag, u32, &[&str])] = &[
    (
        RubricTag::Commensal,
        3,
        &[
            "commensal",
            "commensally",
            "piggyback",
            "piggy back",
            "parasitic",
        ],
    ),
    (
        RubricTag::ExcludedPseudoscienceUfo,
        3,
        &[
            "ufo",
            "ufos",
            "abduction",
            "abductions",
            "unidentified aerial phenomena",
            "flying saucer",
        ],
    ),
    (
        RubricTag::ExcludedSatire,
        3,
        &["satire", "satirical", "parody", "april fools"],
    ),
    (RubricTag::ExcludedBookReview, 3, &["book review"]),
    (
        RubricTag::FermiParadox,
        2,
        &["fermi paradox", "great silence", "great filter"],
    ),
    (
        RubricTag::Instrumentation,
        1,
        &[
            "receiver",
            "spectrometer",
            "backend",
            "instrument",
            "instrumentation",
            "detector",
            "pipeline",
        ],
    ),
    (
        RubricTag::Observation,
        1,
        &[
            "survey",
            "observations",
            "observed",
            "upper limit",
            "upper limits",
            "null result",
            "non detection",
        ],
    ),
    (
        RubricTag::MetaSeti,
        1,
        &[
            "overview",
            "bibliography",
            "community",
            "funding",
            "taxonomy",
        ],
    ),
    (
        RubricTag::History,
        1,
        &["history", "historical", "project ozma", "retrospective"],
    ),
    (
        RubricTag::SocialScience,
        1,
        &[
            "sociology",
            "societal",
            "public opinion",
            "policy",
            "ethics",
            "ethical",
            "anthropology",
            "psychology",
        ],
    ),
    (
        RubricTag::ExcludedAstrobiologyOnly,
        1,
        &[
            "biosignature",
            "biosignatures",
            "microbial",
            "habitability",
            "prebiotic",
            "origin of life",
        ],
    ),
];

fn words(text: &str) -> String {
    let mut out = String::from(" ");
    for w in text
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
    {
        out.push_str(w);
        out.push(' ');
    }
    out
}

/// Ranked rubric hints from keyword cues in the title, abstract, keywords
/// and matched query terms. Highest score first.
pub fn suggest_tags(record: &BibRecord, explanations: &[MatchExplanation]) -> Vec<TagHint> {
    let mut text = format!(
        "{} {} {}",
        record.title,
        record.abstract_text,
        record.keywords.join(" ")
    );
    for e in explanations {
        text.push(' ');
        text.push_str(&e.term);
    }
    let bag = words(&text);
    let mut hints: Vec<TagHint> = HEURISTICS
        .iter()
        .filter_map(|(tag, weight, cues)| {
            let hit: Vec<String> = cues
                .iter()
                .filter(|cue| bag.contains(&words(cue)))
                .map(|cue| cue.to_string())
                .collect();
            (!hit.is_empty()).then(|| TagHint {
                tag: *tag,
                score: weight * hit.len() as u32,
                cues: hit,
                checklist: if *tag == RubricTag::Commensal {
                    &COMMENSAL_CHECKLIST
                } else {
                    &[]
                },
            })
        })
        .collect();
    hints.sort_by(|a, b| b.score.cmp(&a.score).then(a.tag.cmp(&b.tag)));
    hints
}
