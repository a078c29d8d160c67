//! Prompt construction and the translate → detect → re-prompt loop.
//!
//! Level 0 is a plain translation request. When the detector flags the draft
//! as biased, level 1 names the offending verb suffix and asks for the
//! gender-neutral plural -ru. Telugu sometimes needs a second pass: level 2
//! targets the still-gendered role noun, offering the plural form or the
//! masculine/feminine pair from the lexicon. Kannada stops at level 1. The
//! detector, not the model, decides whether another level is needed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bias::{detect_bias, BiasVerdict, Domain, TranslationPair, Verdict};
use crate::morphology::{EvidenceKind, GenderMarking};
use crate::mt::{BackendError, TranslationBackend};
use crate::resources::Resources;
use crate::Language;

/// A rendered prompt ready for a translation backend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptPlan {
    /// 0 = base, 1 = first correction, 2 = second correction (Telugu only).
    pub level: u8,
    pub language: Language,
    pub text: String,
    /// Placeholder name → the value substituted into `text`.
    pub slots: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("template is empty")]
    Empty,
    #[error("template is missing the {placeholder:?} placeholder")]
    MissingPlaceholder { placeholder: String },
    #[error("unfilled placeholder {placeholder:?}")]
    Unfilled { placeholder: String },
}

/// The per-(language, level) prompt templates, `{placeholder}` syntax.
#[derive(Debug, Clone)]
pub struct PromptTemplates {
    base: String,
    cot1_telugu: String,
    cot1_kannada: String,
    cot2_telugu: String,
}

fn require_placeholders(template: &str, required: &[&str]) -> Result<(), TemplateError> {
    if template.trim().is_empty() {
        return Err(TemplateError::Empty);
    }
    for placeholder in required {
        if !template.contains(&format!("{{{placeholder}}}")) {
            return Err(TemplateError::MissingPlaceholder {
                placeholder: (*placeholder).to_owned(),
            });
        }
    }
    Ok(())
}

fn render(template: &str, slots: &BTreeMap<String, String>) -> Result<String, TemplateError> {
    let mut out = template.to_owned();
    for (name, value) in slots {
        out = out.replace(&format!("{{{name}}}"), value);
    }
    if let Some(start) = out.find('{') {
        let rest = &out[start..];
        let end = rest.find('}').map(|i| i + 1).unwrap_or(rest.len());
        return Err(TemplateError::Unfilled {
            placeholder: rest[..end].to_owned(),
        });
    }
    Ok(out)
}

impl PromptTemplates {
    pub fn new(
        base: &str,
        cot1_telugu: &str,
        cot1_kannada: &str,
        cot2_telugu: &str,
    ) -> Result<Self, TemplateError> {
        require_placeholders(base, &["language", "sentence"])?;
        require_placeholders(cot1_telugu, &["suffix", "marking", "sentence"])?;
        require_placeholders(cot1_kannada, &["suffix", "marking", "sentence"])?;
        require_placeholders(cot2_telugu, &["masc", "fem", "plural", "sentence"])?;
        Ok(PromptTemplates {
            base: base.to_owned(),
            cot1_telugu: cot1_telugu.to_owned(),
            cot1_kannada: cot1_kannada.to_owned(),
            cot2_telugu: cot2_telugu.to_owned(),
        })
    }

    fn cot1(&self, language: Language) -> &str {
        match language {
            Language::Telugu => &self.cot1_telugu,
            Language::Kannada => &self.cot1_kannada,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CotError {
    #[error("source sentence is empty")]
    EmptySource,
    #[error("verdict carries no gendered predicate suffix to correct")]
    NoSuffixEvidence,
    #[error("no lexicon entry for the role noun in evidence")]
    NoLexiconEntry,
    #[error("second-level correction applies to Telugu only")]
    LevelTwoNotTelugu,
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// How `marking` reads in an English prompt.
fn marking_word(marking: GenderMarking) -> &'static str {
    match marking {
        GenderMarking::MasculineSingular => "masculine",
        GenderMarking::NonMasculineSingular | GenderMarking::FeminineSingular => "feminine",
        GenderMarking::NeuterSingular => "neuter",
        GenderMarking::HumanPlural => "plural",
        GenderMarking::NonHumanPlural => "plural neutral",
        GenderMarking::Unmarked => "unmarked",
    }
}

/// Level-0 plan: plain translation request.
pub fn build_base_prompt(
    sentence_en: &str,
    language: Language,
    templates: &PromptTemplates,
) -> Result<PromptPlan, CotError> {
    if sentence_en.trim().is_empty() {
        return Err(CotError::EmptySource);
    }
    let mut slots = BTreeMap::new();
    slots.insert("language".to_owned(), language.english_name().to_owned());
    slots.insert("sentence".to_owned(), sentence_en.to_owned());
    let text = render(&templates.base, &slots)?;
    Ok(PromptPlan {
        level: 0,
        language,
        text,
        slots,
    })
}

/// Level-1 plan: names the gendered predicate suffix found in `verdict` and
/// asks for the neutral plural -ru instead.
pub fn build_cot1_prompt(
    draft_translation: &str,
    verdict: &BiasVerdict,
    language: Language,
    templates: &PromptTemplates,
) -> Result<PromptPlan, CotError> {
    let offending = verdict
        .evidence
        .iter()
        .find(|e| e.kind == EvidenceKind::PredicateSuffix && e.marking.is_gendered_singular())
        .ok_or(CotError::NoSuffixEvidence)?;
    let mut slots = BTreeMap::new();
    slots.insert("suffix".to_owned(), offending.matched.clone());
    slots.insert(
        "marking".to_owned(),
        marking_word(offending.marking).to_owned(),
    );
    slots.insert("sentence".to_owned(), draft_translation.to_owned());
    let text = render(templates.cot1(language), &slots)?;
    Ok(PromptPlan {
        level: 1,
        language,
        text,
        slots,
    })
}

/// Level-2 plan (Telugu only): offers the plural form or the
/// masculine/feminine pair of the role noun still gendered in the draft.
pub fn build_cot2_prompt(
    draft_translation: &str,
    verdict: &BiasVerdict,
    language: Language,
    resources: &Resources,
) -> Result<PromptPlan, CotError> {
    if language != Language::Telugu {
        return Err(CotError::LevelTwoNotTelugu);
    }
    let entry = verdict
        .evidence
        .iter()
        .filter(|e| e.kind == EvidenceKind::LexiconNoun)
        .find_map(|e| resources.lexicon.by_role(&e.matched, language))
        .ok_or(CotError::NoLexiconEntry)?;
    let mut slots = BTreeMap::new();
    slots.insert("masc".to_owned(), entry.masculine.clone());
    slots.insert("fem".to_owned(), entry.feminine.clone());
    slots.insert("plural".to_owned(), entry.plural_honorific.clone());
    slots.insert("sentence".to_owned(), draft_translation.to_owned());
    let text = render(&resources.templates.cot2_telugu, &slots)?;
    Ok(PromptPlan {
        level: 2,
        language,
        text,
        slots,
    })
}

/// One round of the mitigation loop.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MitigationAttempt {
    pub plan: PromptPlan,
    pub translation: String,
    pub verdict: BiasVerdict,
}

/// Why the loop stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The latest attempt is not biased.
    NonBiased,
    MaxLevelReached,
    NoSuffixEvidence,
    NoLexiconEntry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MitigationResult {
    pub id: String,
    pub source_en: String,
    pub language: Language,
    pub attempts: Vec<MitigationAttempt>,
    pub final_translation: String,
    pub final_verdict: Verdict,
    pub levels_used: u8,
    pub stop_reason: StopReason,
}

#[derive(Debug, thiserror::Error)]
pub enum MitigateError {
    #[error("max_level must be 0, 1 or 2")]
    MaxLevelOutOfRange,
    #[error("max_level 2 applies to Telugu only")]
    LevelTwoNotTelugu,
    #[error(transparent)]
    Prompt(#[from] CotError),
    #[error("backend failure for {id} at level {level}: {source}")]
    Backend {
        id: String,
        level: u8,
        #[source]
        source: BackendError,
    },
}

/// What to mitigate: one source sentence plus bookkeeping metadata.
#[derive(Debug, Clone)]
pub struct MitigationRequest {
    pub id: String,
    pub domain: Domain,
    pub source_en: String,
    pub language: Language,
    pub max_level: u8,
}

/// Runs the loop: base prompt, then one correction prompt per level while the
/// verdict stays biased, stopping at the first non-biased attempt, at
/// `max_level`, or when the next prompt cannot be built (no suffix evidence /
/// no lexicon entry — the result carries the reason). Issues at most
/// `max_level + 1` backend calls.
pub fn mitigate(
    request: &MitigationRequest,
    backend: &dyn TranslationBackend,
    resources: &Resources,
) -> Result<MitigationResult, MitigateError> {
    if request.max_level > 2 {
        return Err(MitigateError::MaxLevelOutOfRange);
    }
    if request.max_level == 2 && request.language != Language::Telugu {
        return Err(MitigateError::LevelTwoNotTelugu);
    }

    let mut attempts: Vec<MitigationAttempt> = Vec::new();
    let mut plan = build_base_prompt(&request.source_en, request.language, &resources.templates)?;
    let stop_reason = loop {
        let translation =
            backend
                .translate(&request.id, &plan)
                .map_err(|source| MitigateError::Backend {
                    id: request.id.clone(),
                    level: plan.level,
                    source,
                })?;
        let pair = TranslationPair {
            id: request.id.clone(),
            domain: request.domain,
            source_en: request.source_en.clone(),
            target_text: translation.clone(),
            language: request.language,
            cot_level: plan.level,
            system_tag: backend.tag(),
        };
        let verdict = detect_bias(&pair, resources);
        let biased = verdict.verdict == Verdict::Biased;
        attempts.push(MitigationAttempt {
            plan: plan.clone(),
            translation,
            verdict,
        });
        if !biased {
            break StopReason::NonBiased;
        }
        let next_level = attempts.len() as u8;
        if next_level > request.max_level {
            break StopReason::MaxLevelReached;
        }
        let last = attempts.last().expect("just pushed");
        let built = match next_level {
            1 => build_cot1_prompt(
                &last.translation,
                &last.verdict,
                request.language,
                &resources.templates,
            ),
            _ => build_cot2_prompt(
                &last.translation,
                &last.verdict,
                request.language,
                resources,
            ),
        };
        plan = match built {
            Ok(plan) => plan,
            Err(CotError::NoSuffixEvidence) => break StopReason::NoSuffixEvidence,
            Err(CotError::NoLexiconEntry) => break StopReason::NoLexiconEntry,
            Err(other) => return Err(other.into()),
        };
    };

    let last = attempts.last().expect("at least one attempt");
    Ok(MitigationResult {
        id: request.id.clone(),
        source_en: request.source_en.clone(),
        language: request.language,
        final_translation: last.translation.clone(),
        final_verdict: last.verdict.verdict,
        levels_used: (attempts.len() - 1) as u8,
        stop_reason,
        attempts,
    })
}
