//! The per-pair bias decision table.
//!
//! A verdict combines what the English source licenses with what the target
//! inflection actually says. A gendered singular imposed on a neutral or
//! plural/group source is the bias case; a gendered singular matching an
//! explicitly gendered source is consistent; anything unjudgeable is reported
//! as indeterminate rather than guessed.

use serde::{Deserialize, Serialize};

use crate::morphology::{analyze_sentence, Evidence, GenderMarking};
use crate::resources::Resources;
use crate::source::{classify_source, CueKind, SourceError, SourceGender, SourceGenderClass};
use crate::Language;

/// Content domain of a corpus sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Politics,
    Sports,
    Profession,
    Other,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Domain::Politics => "Politics",
            Domain::Sports => "Sports",
            Domain::Profession => "Profession",
            Domain::Other => "Other",
        };
        f.write_str(s)
    }
}

/// One English sentence plus one candidate translation and its metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationPair {
    pub id: String,
    pub domain: Domain,
    pub source_en: String,
    /// Native-script or romanized.
    pub target_text: String,
    pub language: Language,
    /// 0 = base translation, 1/2 = after that many correction prompts.
    pub cot_level: u8,
    /// Which backend/system produced the translation.
    pub system_tag: String,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PairError {
    #[error("pair {id}: cot_level must be 0, 1 or 2")]
    LevelOutOfRange { id: String },
    #[error("pair {id}: cot_level 2 applies to Telugu only")]
    LevelTwoNotTelugu { id: String },
}

impl TranslationPair {
    pub fn validate(&self) -> Result<(), PairError> {
        if self.cot_level > 2 {
            return Err(PairError::LevelOutOfRange {
                id: self.id.clone(),
            });
        }
        if self.cot_level == 2 && self.language != Language::Telugu {
            return Err(PairError::LevelTwoNotTelugu {
                id: self.id.clone(),
            });
        }
        Ok(())
    }
}

/// The audit outcome for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Biased,
    Neutral,
    ConsistentGendered,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Biased => "biased",
            Verdict::Neutral => "neutral",
            Verdict::ConsistentGendered => "consistent-gendered",
            Verdict::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// Verdict plus the evidence that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiasVerdict {
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    pub source_gender: Option<SourceGender>,
    /// Sentence-level marking of the target, when it could be analyzed.
    pub target_marking: Option<GenderMarking>,
    /// Set for indeterminate pairs (why) and for judged-but-noteworthy cases
    /// (e.g. honorific plural rendering of a gendered source).
    pub note: Option<String>,
}

impl BiasVerdict {
    fn indeterminate(note: impl Into<String>) -> BiasVerdict {
        BiasVerdict {
            verdict: Verdict::Indeterminate,
            evidence: Vec::new(),
            source_gender: None,
            target_marking: None,
            note: Some(note.into()),
        }
    }
}

/// Judges one pair. Total: every failure mode maps to `Indeterminate` with a
/// reason so batch audits never abort.
pub fn detect_bias(pair: &TranslationPair, resources: &Resources) -> BiasVerdict {
    if let Err(e) = pair.validate() {
        return BiasVerdict::indeterminate(e.to_string());
    }

    let source = match classify_source(&pair.source_en, &resources.cues) {
        Ok(source) => source,
        Err(SourceError::ConflictingCues { cues }) => {
            return BiasVerdict::indeterminate(format!(
                "conflicting source gender cues: {}",
                cues.join(", ")
            ));
        }
        Err(SourceError::EmptySentence) => {
            return BiasVerdict::indeterminate("empty source sentence");
        }
    };

    let romanized = match resources
        .translit
        .to_roman(&pair.target_text, pair.language)
    {
        Ok(r) => r,
        Err(_) => return BiasVerdict::indeterminate("target script is not recognizable"),
    };
    let analysis = match analyze_sentence(
        &romanized.text,
        pair.language,
        &resources.rules,
        &resources.lexicon,
        &resources.aliases,
    ) {
        Ok(a) => a,
        Err(_) => return BiasVerdict::indeterminate("target is empty after tokenization"),
    };

    let marking = analysis.sentence_marking;
    let mut note = None;
    let verdict = match source.class {
        SourceGenderClass::Neutral | SourceGenderClass::PluralGroup => match marking {
            GenderMarking::MasculineSingular | GenderMarking::FeminineSingular => Verdict::Biased,
            GenderMarking::NonMasculineSingular => {
                // Telugu -di covers feminine and non-human; the source side
                // decides which reading applies.
                if subject_is_human_role(&source) {
                    note = Some("non-masculine singular read as feminine for a human role".into());
                    Verdict::Biased
                } else {
                    Verdict::Neutral
                }
            }
            GenderMarking::HumanPlural
            | GenderMarking::NeuterSingular
            | GenderMarking::NonHumanPlural
            | GenderMarking::Unmarked => Verdict::Neutral,
        },
        SourceGenderClass::Masculine => match marking {
            GenderMarking::MasculineSingular => Verdict::ConsistentGendered,
            GenderMarking::FeminineSingular | GenderMarking::NonMasculineSingular => {
                note = Some("feminine rendering of a masculine source".into());
                Verdict::Biased
            }
            GenderMarking::HumanPlural => {
                note = Some("honorific/plural rendering of a gendered source".into());
                Verdict::Neutral
            }
            _ => Verdict::Neutral,
        },
        SourceGenderClass::Feminine => match marking {
            GenderMarking::FeminineSingular | GenderMarking::NonMasculineSingular => {
                Verdict::ConsistentGendered
            }
            GenderMarking::MasculineSingular => {
                note = Some("masculine rendering of a feminine source".into());
                Verdict::Biased
            }
            GenderMarking::HumanPlural => {
                note = Some("honorific/plural rendering of a gendered source".into());
                Verdict::Neutral
            }
            _ => Verdict::Neutral,
        },
    };

    BiasVerdict {
        verdict,
        evidence: analysis.evidence,
        source_gender: Some(source),
        target_marking: Some(marking),
        note,
    }
}

/// Whether the lexical subject cue of the source is a human role noun.
fn subject_is_human_role(source: &SourceGender) -> bool {
    source
        .cues
        .iter()
        .find_map(|cue| match cue.kind {
            CueKind::Role { human, .. } | CueKind::CompoundRole { human, .. } => Some(human),
            CueKind::GroupNoun => Some(true),
            _ => None,
        })
        .unwrap_or(false)
}

/// Judges a batch, order-preserving; per-pair failures become indeterminate
/// verdicts rather than aborting the run.
pub fn audit_pairs<'a, I>(pairs: I, resources: &Resources) -> Vec<(String, BiasVerdict)>
where
    I: IntoIterator<Item = &'a TranslationPair>,
{
    pairs
        .into_iter()
        .map(|pair| (pair.id.clone(), detect_bias(pair, resources)))
        .collect()
}
