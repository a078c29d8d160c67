//! Gender bias auditing for English-to-Telugu/Kannada machine translation.
//!
//! The pipeline is built from small, pure pieces:
//!
//! * [`script`] — script detection, grapheme segmentation and transliteration
//!   of native Telugu/Kannada text into the romanized form every other module
//!   works on.
//! * [`morphology`] — suffix-level gender inflection analysis plus a gendered
//!   role-noun lexicon for the target languages.
//! * [`source`] — classification of the English source sentence as neutral,
//!   gendered or plural/group context.
//! * [`bias`] — the per-pair decision table combining source and target
//!   analyses into a [`bias::BiasVerdict`].
//! * [`cot`] — prompt templates and the translate → detect → re-prompt
//!   mitigation loop.
//! * [`mt`] — pluggable translation backends (live chat-completion HTTP,
//!   record, replay).
//! * [`harness`] — corpus loading, per-domain bias rates, human-agreement
//!   scoring and report rendering.
//!
//! All tables (suffix rules, lexicons, transliteration maps, prompt
//! templates) are data files; [`resources::Resources::bundled`] loads the
//! copies shipped with the crate.

pub mod bias;
pub mod cot;
pub mod harness;
pub mod morphology;
pub mod mt;
pub mod resources;
pub mod script;
pub mod source;

use serde::{Deserialize, Serialize};

/// Target language of a translation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Telugu,
    Kannada,
}

impl Language {
    /// English name, as used in prompts ("Translate this sentence into Telugu...").
    pub fn english_name(&self) -> &'static str {
        match self {
            Language::Telugu => "Telugu",
            Language::Kannada => "Kannada",
        }
    }
}

impl std::fmt::Display for Language {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.english_name())
    }
}

impl std::str::FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "telugu" | "te" => Ok(Language::Telugu),
            "kannada" | "ka" | "kn" => Ok(Language::Kannada),
            other => Err(format!("unsupported language: {other}")),
        }
    }
}
