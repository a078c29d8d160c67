//! Suffix-level gender inflection analysis for Telugu and Kannada.
//!
//! Telugu marks singular verbs as masculine vs non-masculine (feminine plus
//! every non-human entity) and plural verbs as human vs non-human. Kannada has
//! a three-gender singular system (masculine, feminine, neuter) with the same
//! human/non-human plural split. Both mark these distinctions with short final
//! suffixes, which is what makes a rule table workable.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::script::{normalize, RomanAliases};
use crate::Language;

/// Gender/number marking carried by a suffix, a lexicon form, or a whole
/// sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenderMarking {
    MasculineSingular,
    /// Telugu only: feminine humans and all non-human entities share -di.
    NonMasculineSingular,
    /// Kannada only.
    FeminineSingular,
    /// Kannada only.
    NeuterSingular,
    /// Groups of people; also the respectful singular (honorific).
    HumanPlural,
    NonHumanPlural,
    Unmarked,
}

impl GenderMarking {
    /// True for the singular markings that impose a gender reading.
    pub fn is_gendered_singular(&self) -> bool {
        matches!(
            self,
            GenderMarking::MasculineSingular
                | GenderMarking::NonMasculineSingular
                | GenderMarking::FeminineSingular
                | GenderMarking::NeuterSingular
        )
    }

    fn valid_for(&self, language: Language) -> bool {
        match self {
            GenderMarking::NonMasculineSingular => language == Language::Telugu,
            GenderMarking::FeminineSingular | GenderMarking::NeuterSingular => {
                language == Language::Kannada
            }
            _ => true,
        }
    }
}

impl std::fmt::Display for GenderMarking {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GenderMarking::MasculineSingular => "masculine-singular",
            GenderMarking::NonMasculineSingular => "non-masculine-singular",
            GenderMarking::FeminineSingular => "feminine-singular",
            GenderMarking::NeuterSingular => "neuter-singular",
            GenderMarking::HumanPlural => "human-plural",
            GenderMarking::NonHumanPlural => "non-human-plural",
            GenderMarking::Unmarked => "unmarked",
        };
        f.write_str(s)
    }
}

/// Which token positions a suffix rule is meant for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppliesTo {
    Predicate,
    Noun,
    Either,
}

/// One final-suffix rule.
#[derive(Debug, Clone)]
pub struct SuffixRule {
    pub language: Language,
    pub suffix: String,
    pub marking: GenderMarking,
    pub applies_to: AppliesTo,
    pub min_stem_graphemes: usize,
    pub provenance: String,
    suffix_clusters: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum RuleError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate suffix {suffix:?} for {language}")]
    DuplicateSuffix {
        line: usize,
        suffix: String,
        language: Language,
    },
}

/// The per-language suffix rule tables, checked longest suffix first.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<SuffixRule>,
}

fn parse_marking(s: &str) -> Option<GenderMarking> {
    Some(match s {
        "masculine_singular" => GenderMarking::MasculineSingular,
        "non_masculine_singular" => GenderMarking::NonMasculineSingular,
        "feminine_singular" => GenderMarking::FeminineSingular,
        "neuter_singular" => GenderMarking::NeuterSingular,
        "human_plural" => GenderMarking::HumanPlural,
        "non_human_plural" => GenderMarking::NonHumanPlural,
        "unmarked" => GenderMarking::Unmarked,
        _ => return None,
    })
}

impl RuleSet {
    pub fn parse(src: &str) -> Result<Self, RuleError> {
        let mut rules: Vec<SuffixRule> = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let err = |msg: &str| RuleError::Malformed {
                line: idx + 1,
                msg: msg.to_owned(),
            };
            if fields.len() != 6 {
                return Err(err("expected 6 tab-separated fields"));
            }
            let language: Language = fields[0].parse().map_err(|e: String| err(&e))?;
            let suffix = normalize(fields[1]);
            if suffix.is_empty() {
                return Err(err("empty suffix"));
            }
            let marking = parse_marking(fields[2]).ok_or_else(|| err("unknown marking"))?;
            if !marking.valid_for(language) {
                return Err(err(&format!("marking {marking} not valid for {language}")));
            }
            let applies_to = match fields[3] {
                "predicate" => AppliesTo::Predicate,
                "noun" => AppliesTo::Noun,
                "either" => AppliesTo::Either,
                _ => return Err(err("applies_to must be predicate|noun|either")),
            };
            let min_stem_graphemes: usize = fields[4]
                .parse()
                .map_err(|_| err("min_stem must be an integer"))?;
            if min_stem_graphemes < 2 {
                return Err(err("min_stem must be at least 2"));
            }
            if rules
                .iter()
                .any(|r| r.language == language && r.suffix == suffix)
            {
                return Err(RuleError::DuplicateSuffix {
                    line: idx + 1,
                    suffix,
                    language,
                });
            }
            let suffix_clusters = suffix.graphemes(true).map(str::to_owned).collect();
            rules.push(SuffixRule {
                language,
                suffix,
                marking,
                applies_to,
                min_stem_graphemes,
                provenance: fields[5].to_owned(),
                suffix_clusters,
            });
        }
        // longest suffix first; within a language suffixes are unique so the
        // order of equal lengths cannot matter
        rules.sort_by_key(|r| std::cmp::Reverse(r.suffix_clusters.len()));
        Ok(RuleSet { rules })
    }

    pub fn rules(&self) -> &[SuffixRule] {
        &self.rules
    }

    /// Longest-suffix match against `token`, which must already be lowercase
    /// romanized. Returns the winning rule and the remaining stem.
    pub fn match_suffix(&self, token: &str, language: Language) -> Option<(&SuffixRule, String)> {
        let token = normalize(token);
        let clusters: Vec<&str> = token.graphemes(true).collect();
        for rule in self.rules.iter().filter(|r| r.language == language) {
            let n = rule.suffix_clusters.len();
            if clusters.len() < n + rule.min_stem_graphemes {
                continue;
            }
            let tail = &clusters[clusters.len() - n..];
            if tail
                .iter()
                .zip(rule.suffix_clusters.iter())
                .all(|(t, s)| *t == s.as_str())
            {
                let stem = clusters[..clusters.len() - n].concat();
                return Some((rule, stem));
            }
        }
        None
    }
}

/// Which of the three lexicon forms a token matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LexiconForm {
    Masculine,
    Feminine,
    PluralHonorific,
}

/// One role noun with its three target-language forms.
#[derive(Debug, Clone)]
pub struct LexiconEntry {
    pub language: Language,
    pub english_role: String,
    pub masculine: String,
    pub feminine: String,
    pub plural_honorific: String,
    pub provenance: String,
}

impl LexiconEntry {
    pub fn form(&self, which: LexiconForm) -> &str {
        match which {
            LexiconForm::Masculine => &self.masculine,
            LexiconForm::Feminine => &self.feminine,
            LexiconForm::PluralHonorific => &self.plural_honorific,
        }
    }

    /// The gender marking a hit on `which` form implies, per language.
    pub fn marking_of(&self, which: LexiconForm) -> GenderMarking {
        match (which, self.language) {
            (LexiconForm::Masculine, _) => GenderMarking::MasculineSingular,
            (LexiconForm::Feminine, Language::Telugu) => GenderMarking::NonMasculineSingular,
            (LexiconForm::Feminine, Language::Kannada) => GenderMarking::FeminineSingular,
            (LexiconForm::PluralHonorific, _) => GenderMarking::HumanPlural,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: forms for {role:?} must be pairwise distinct")]
    IndistinctForms { line: usize, role: String },
}

/// Exact-match lookup over every form of every entry, per language.
#[derive(Debug, Clone)]
pub struct Lexicon {
    entries: Vec<LexiconEntry>,
    index: HashMap<(Language, String), (usize, LexiconForm)>,
}

impl Lexicon {
    pub fn parse(src: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let err = |msg: &str| LexiconError::Malformed {
                line: idx + 1,
                msg: msg.to_owned(),
            };
            if fields.len() != 6 {
                return Err(err("expected 6 tab-separated fields"));
            }
            let language: Language = fields[0].parse().map_err(|e: String| err(&e))?;
            let entry = LexiconEntry {
                language,
                english_role: fields[1].to_lowercase(),
                masculine: normalize(fields[2]),
                feminine: normalize(fields[3]),
                plural_honorific: normalize(fields[4]),
                provenance: fields[5].to_owned(),
            };
            if entry.masculine == entry.feminine
                || entry.masculine == entry.plural_honorific
                || entry.feminine == entry.plural_honorific
            {
                return Err(LexiconError::IndistinctForms {
                    line: idx + 1,
                    role: entry.english_role,
                });
            }
            let entry_idx = entries.len();
            for form in [
                LexiconForm::Masculine,
                LexiconForm::Feminine,
                LexiconForm::PluralHonorific,
            ] {
                index.insert((language, entry.form(form).to_owned()), (entry_idx, form));
            }
            entries.push(entry);
        }
        Ok(Lexicon { entries, index })
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn lookup_noun(
        &self,
        token: &str,
        language: Language,
    ) -> Option<(&LexiconEntry, LexiconForm)> {
        let (idx, form) = self.index.get(&(language, normalize(token)))?;
        Some((&self.entries[*idx], *form))
    }

    pub fn by_role(&self, english_role: &str, language: Language) -> Option<&LexiconEntry> {
        let role = english_role.to_lowercase();
        self.entries
            .iter()
            .find(|e| e.language == language && e.english_role == role)
    }
}

/// What a single token matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hit {
    Suffix {
        suffix: String,
        stem: String,
        marking: GenderMarking,
        applies_to: AppliesTo,
    },
    Noun {
        english_role: String,
        form: LexiconForm,
        marking: GenderMarking,
    },
    /// A slash-written masculine/feminine alternative of one lexicon entry,
    /// e.g. "vaidyuḍu/vaidyurālu"; treated as gender-neutral.
    GenderPair { english_role: String },
}

/// How a piece of evidence was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    PredicateSuffix,
    NounSuffix,
    LexiconNoun,
    GenderPair,
}

/// One (token, matched suffix or form, marking) observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub token: String,
    pub matched: String,
    pub marking: GenderMarking,
    pub kind: EvidenceKind,
    /// A gendered-singular suffix on a non-predicate token that is not in the
    /// lexicon (often a proper name or a case ending) never flips the
    /// sentence by itself.
    pub low_confidence: bool,
}

/// Token-level hits plus the sentence-level gender marking of one sentence.
#[derive(Debug, Clone)]
pub struct InflectionAnalysis {
    pub tokens: Vec<String>,
    pub hits: Vec<Option<Hit>>,
    pub predicate_index: usize,
    pub sentence_marking: GenderMarking,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("sentence is empty after tokenization")]
    EmptySentence,
}

fn strip_token(raw: &str) -> String {
    let trimmed: &str = raw.trim_matches(|c: char| !(c.is_alphanumeric() || c == '/'));
    // didactic hyphens ("banda-ru") are spelling, not morphology
    trimmed.chars().filter(|c| *c != '-').collect()
}

/// Splits romanized text into lowercase tokens, stripping edge punctuation and
/// internal hyphens.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(strip_token)
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

/// Analyzes one romanized sentence: per-token lexicon/suffix hits, then the
/// sentence-level marking. The final token is treated as the predicate
/// (verb-final word order); use [`analyze_sentence_at`] to override.
pub fn analyze_sentence(
    sentence: &str,
    language: Language,
    rules: &RuleSet,
    lexicon: &Lexicon,
    aliases: &RomanAliases,
) -> Result<InflectionAnalysis, AnalysisError> {
    let tokens = tokenize(&aliases.fold(&normalize(sentence)));
    if tokens.is_empty() {
        return Err(AnalysisError::EmptySentence);
    }
    let predicate_index = tokens.len() - 1;
    analyze_tokens(tokens, predicate_index, language, rules, lexicon)
}

/// Like [`analyze_sentence`] with an explicit predicate position.
pub fn analyze_sentence_at(
    sentence: &str,
    predicate_index: usize,
    language: Language,
    rules: &RuleSet,
    lexicon: &Lexicon,
    aliases: &RomanAliases,
) -> Result<InflectionAnalysis, AnalysisError> {
    let tokens = tokenize(&aliases.fold(&normalize(sentence)));
    if tokens.is_empty() || predicate_index >= tokens.len() {
        return Err(AnalysisError::EmptySentence);
    }
    analyze_tokens(tokens, predicate_index, language, rules, lexicon)
}

fn analyze_tokens(
    tokens: Vec<String>,
    predicate_index: usize,
    language: Language,
    rules: &RuleSet,
    lexicon: &Lexicon,
) -> Result<InflectionAnalysis, AnalysisError> {
    let hits: Vec<Option<Hit>> = tokens
        .iter()
        .map(|token| hit_for_token(token, language, rules, lexicon))
        .collect();
    let evidence = collect_evidence(&tokens, &hits, predicate_index);
    let sentence_marking = classify_sentence(&evidence);
    Ok(InflectionAnalysis {
        tokens,
        hits,
        predicate_index,
        sentence_marking,
        evidence,
    })
}

fn hit_for_token(
    token: &str,
    language: Language,
    rules: &RuleSet,
    lexicon: &Lexicon,
) -> Option<Hit> {
    if let Some((left, right)) = token.split_once('/') {
        if !left.is_empty() && !right.is_empty() {
            let a = lexicon.lookup_noun(left, language);
            let b = lexicon.lookup_noun(right, language);
            if let (Some((ea, fa)), Some((eb, fb))) = (a, b) {
                let same_entry = ea.english_role == eb.english_role;
                let masc_fem = matches!(
                    (fa, fb),
                    (LexiconForm::Masculine, LexiconForm::Feminine)
                        | (LexiconForm::Feminine, LexiconForm::Masculine)
                );
                if same_entry && masc_fem {
                    return Some(Hit::GenderPair {
                        english_role: ea.english_role.clone(),
                    });
                }
            }
        }
        return None;
    }
    if let Some((entry, form)) = lexicon.lookup_noun(token, language) {
        return Some(Hit::Noun {
            english_role: entry.english_role.clone(),
            form,
            marking: entry.marking_of(form),
        });
    }
    rules
        .match_suffix(token, language)
        .map(|(rule, stem)| Hit::Suffix {
            suffix: rule.suffix.clone(),
            stem,
            marking: rule.marking,
            applies_to: rule.applies_to,
        })
}

fn collect_evidence(
    tokens: &[String],
    hits: &[Option<Hit>],
    predicate_index: usize,
) -> Vec<Evidence> {
    let mut evidence = Vec::new();
    for (i, (token, hit)) in tokens.iter().zip(hits.iter()).enumerate() {
        let Some(hit) = hit else { continue };
        match hit {
            Hit::Suffix {
                suffix,
                marking,
                applies_to,
                ..
            } => {
                let at_predicate = i == predicate_index;
                let kind = if at_predicate {
                    EvidenceKind::PredicateSuffix
                } else {
                    EvidenceKind::NounSuffix
                };
                let low_confidence = !at_predicate
                    && (marking.is_gendered_singular() || *applies_to == AppliesTo::Predicate);
                evidence.push(Evidence {
                    token: token.clone(),
                    matched: suffix.clone(),
                    marking: *marking,
                    kind,
                    low_confidence,
                });
            }
            Hit::Noun {
                form: _,
                marking,
                english_role,
            } => {
                evidence.push(Evidence {
                    token: token.clone(),
                    matched: english_role.clone(),
                    marking: *marking,
                    kind: EvidenceKind::LexiconNoun,
                    low_confidence: false,
                });
            }
            Hit::GenderPair { english_role } => {
                evidence.push(Evidence {
                    token: token.clone(),
                    matched: english_role.clone(),
                    marking: GenderMarking::HumanPlural,
                    kind: EvidenceKind::GenderPair,
                    low_confidence: false,
                });
            }
        }
    }
    evidence
}

/// Sentence-level marking from the evidence, by priority: confident
/// masculine, then feminine, then the predicate's non-masculine (Telugu) or
/// neuter (Kannada) singular, then human plural (predicate, plural lexicon
/// form, or a gender-alternative pair), then the predicate's non-human
/// plural, else unmarked.
pub fn classify_sentence(evidence: &[Evidence]) -> GenderMarking {
    let confident = |marking: GenderMarking| {
        evidence
            .iter()
            .any(|e| e.marking == marking && !e.low_confidence)
    };
    let at_predicate = |marking: GenderMarking| {
        evidence
            .iter()
            .any(|e| e.marking == marking && e.kind == EvidenceKind::PredicateSuffix)
    };
    if confident(GenderMarking::MasculineSingular) {
        return GenderMarking::MasculineSingular;
    }
    if confident(GenderMarking::FeminineSingular) {
        return GenderMarking::FeminineSingular;
    }
    if at_predicate(GenderMarking::NonMasculineSingular) {
        return GenderMarking::NonMasculineSingular;
    }
    if at_predicate(GenderMarking::NeuterSingular) {
        return GenderMarking::NeuterSingular;
    }
    let human_plural = evidence.iter().any(|e| {
        e.marking == GenderMarking::HumanPlural
            && matches!(
                e.kind,
                EvidenceKind::PredicateSuffix
                    | EvidenceKind::LexiconNoun
                    | EvidenceKind::GenderPair
            )
    });
    if human_plural {
        return GenderMarking::HumanPlural;
    }
    if at_predicate(GenderMarking::NonHumanPlural) {
        return GenderMarking::NonHumanPlural;
    }
    GenderMarking::Unmarked
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::Resources;

    fn res() -> &'static Resources {
        use std::sync::OnceLock;
        static RES: OnceLock<Resources> = OnceLock::new();
        RES.get_or_init(Resources::bundled)
    }

    fn marking_of(token: &str, language: Language) -> Option<GenderMarking> {
        res()
            .rules
            .match_suffix(token, language)
            .map(|(rule, _)| rule.marking)
    }

    #[test]
    fn telugu_masculine_suffix() {
        let (rule, stem) = res()
            .rules
            .match_suffix("vaccāḍu", Language::Telugu)
            .unwrap();
        assert_eq!(rule.suffix, "ḍu");
        assert_eq!(rule.marking, GenderMarking::MasculineSingular);
        assert_eq!(stem, "vaccā");
    }

    #[test]
    fn telugu_non_masculine_suffix() {
        assert_eq!(
            marking_of("vaccindi", Language::Telugu),
            Some(GenderMarking::NonMasculineSingular)
        );
    }

    #[test]
    fn telugu_plural_neutral_suffix() {
        assert_eq!(
            marking_of("pravahistunnāvi", Language::Telugu),
            Some(GenderMarking::NonHumanPlural)
        );
    }

    #[test]
    fn kannada_feminine_suffix() {
        assert_eq!(
            marking_of("bandidale", Language::Kannada),
            Some(GenderMarking::FeminineSingular)
        );
    }

    #[test]
    fn kannada_neuter_suffix() {
        assert_eq!(
            marking_of("baruttide", Language::Kannada),
            Some(GenderMarking::NeuterSingular)
        );
    }

    #[test]
    fn stem_length_floor() {
        assert!(res().rules.match_suffix("ru", Language::Telugu).is_none());
        assert!(res().rules.match_suffix("āru", Language::Telugu).is_none());
    }

    #[test]
    fn retroflex_l_does_not_match_plain_l_rule() {
        // maḷe must not hit the Kannada feminine -le rule
        assert_eq!(marking_of("maḷe", Language::Kannada), None);
    }

    #[test]
    fn longest_suffix_wins_with_nested_rules() {
        let rules = RuleSet::parse(
            "kannada\tle\tfeminine_singular\tpredicate\t2\ttest\nkannada\tdale\thuman_plural\tpredicate\t2\ttest\n",
        )
        .unwrap();
        let (rule, _) = rules.match_suffix("bandidale", Language::Kannada).unwrap();
        assert_eq!(rule.suffix, "dale");
    }

    #[test]
    fn duplicate_suffix_rejected() {
        let err = RuleSet::parse(
            "telugu\tḍu\tmasculine_singular\teither\t2\ta\ntelugu\tḍu\thuman_plural\tnoun\t2\tb\n",
        );
        assert!(matches!(err, Err(RuleError::DuplicateSuffix { .. })));
    }

    #[test]
    fn wrong_language_marking_rejected() {
        let err = RuleSet::parse("telugu\tle\tfeminine_singular\tpredicate\t2\tx\n");
        assert!(matches!(err, Err(RuleError::Malformed { .. })));
    }

    #[test]
    fn match_never_returns_other_language_rule() {
        for token in ["vaccāḍu", "bandidale", "idare", "hariyuttive"] {
            for language in [Language::Telugu, Language::Kannada] {
                if let Some((rule, _)) = res().rules.match_suffix(token, language) {
                    assert_eq!(rule.language, language);
                }
            }
        }
    }

    #[test]
    fn lexicon_lookup_by_form() {
        let (entry, form) = res()
            .lexicon
            .lookup_noun("vaidyuḍu", Language::Telugu)
            .unwrap();
        assert_eq!(entry.english_role, "doctor");
        assert_eq!(form, LexiconForm::Masculine);

        let (entry, form) = res()
            .lexicon
            .lookup_noun("vaidyaru", Language::Kannada)
            .unwrap();
        assert_eq!(entry.english_role, "doctor");
        assert_eq!(form, LexiconForm::PluralHonorific);

        assert!(res()
            .lexicon
            .lookup_noun("āsupatri", Language::Telugu)
            .is_none());
    }

    fn sentence_marking(sentence: &str, language: Language) -> GenderMarking {
        analyze_sentence(
            sentence,
            language,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap()
        .sentence_marking
    }

    #[test]
    fn telugu_sentences_classify_as_glossed() {
        assert_eq!(
            sentence_marking("rāmuḍu vaccāḍu", Language::Telugu),
            GenderMarking::MasculineSingular
        );
        assert_eq!(
            sentence_marking("sīta vaccindi", Language::Telugu),
            GenderMarking::NonMasculineSingular
        );
        assert_eq!(
            sentence_marking("varṣam paḍutundi", Language::Telugu),
            GenderMarking::NonMasculineSingular
        );
        assert_eq!(
            sentence_marking("thammullu vachāru", Language::Telugu),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking("akkalu vachāru", Language::Telugu),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking("nādulu pravahistunnāvi", Language::Telugu),
            GenderMarking::NonHumanPlural
        );
    }

    #[test]
    fn kannada_sentences_classify_as_glossed() {
        assert_eq!(
            sentence_marking("rāma baruttidane", Language::Kannada),
            GenderMarking::MasculineSingular
        );
        assert_eq!(
            sentence_marking("sītā bandidale", Language::Kannada),
            GenderMarking::FeminineSingular
        );
        assert_eq!(
            sentence_marking("maḷe baruttide", Language::Kannada),
            GenderMarking::NeuterSingular
        );
        assert_eq!(
            sentence_marking("sahōdararu banda-ru", Language::Kannada),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking("sahōdariyaru bandaru", Language::Kannada),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking("nadigaḷu hariyutti-ve", Language::Kannada),
            GenderMarking::NonHumanPlural
        );
    }

    #[test]
    fn doctor_sentences() {
        assert_eq!(
            sentence_marking("vaidyuḍu āsupatri lo unnāḍu", Language::Telugu),
            GenderMarking::MasculineSingular
        );
        // level-1 shape: neutral verb, still-masculine noun
        assert_eq!(
            sentence_marking("vaidyuḍu āsupatri lo unnāru", Language::Telugu),
            GenderMarking::MasculineSingular
        );
        assert_eq!(
            sentence_marking("vaidyulu āsupatri lo unnāru", Language::Telugu),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking("vaidyaru aaspatrialli idare", Language::Kannada),
            GenderMarking::HumanPlural
        );
    }

    #[test]
    fn gender_pair_counts_as_neutral() {
        let analysis = analyze_sentence(
            "vaidyuḍu/vaidyurālu āsupatri lo unnāru",
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        assert!(matches!(analysis.hits[0], Some(Hit::GenderPair { .. })));
        assert_eq!(analysis.sentence_marking, GenderMarking::HumanPlural);
    }

    #[test]
    fn caregiver_case_ending_does_not_flip_sentence() {
        // ūṭavanu carries -nu but is a case-marked object, not a gendered noun
        assert_eq!(
            sentence_marking(
                "araikedāraru kuṭumbakke ūṭavanu siddhapaḍisidaru",
                Language::Kannada
            ),
            GenderMarking::HumanPlural
        );
        assert_eq!(
            sentence_marking(
                "araikedāranu kuṭumbakke ūṭavanu siddhapaḍisidanu",
                Language::Kannada
            ),
            GenderMarking::MasculineSingular
        );
    }

    #[test]
    fn empty_sentence_is_an_error() {
        assert_eq!(
            analyze_sentence(
                " .,! ",
                Language::Telugu,
                &res().rules,
                &res().lexicon,
                &res().aliases
            )
            .unwrap_err(),
            AnalysisError::EmptySentence
        );
    }

    #[test]
    fn no_hits_is_unmarked() {
        assert_eq!(classify_sentence(&[]), GenderMarking::Unmarked);
    }

    #[test]
    fn predicate_override_changes_the_reading() {
        // verb-medial word order: the masculine verb is not the last token
        let analysis = analyze_sentence_at(
            "vaccāḍu rāmu inṭiki",
            0,
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        assert_eq!(analysis.predicate_index, 0);
        assert_eq!(analysis.sentence_marking, GenderMarking::MasculineSingular);

        let out_of_range = analyze_sentence_at(
            "vaccāḍu",
            3,
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        );
        assert!(out_of_range.is_err());
    }

    #[test]
    fn kannada_gender_pair_also_counts_as_neutral() {
        let analysis = analyze_sentence(
            "vaidya/vaidye āspatreyalli iddāre",
            Language::Kannada,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        assert!(matches!(analysis.hits[0], Some(Hit::GenderPair { .. })));
        assert_eq!(analysis.sentence_marking, GenderMarking::HumanPlural);
    }

    #[test]
    fn slashed_token_of_unrelated_forms_is_not_a_pair() {
        let analysis = analyze_sentence(
            "vaidyuḍu/vaidyulu āsupatri lo unnāru",
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        // masculine/plural is not a masculine/feminine alternative
        assert_eq!(analysis.hits[0], None);
    }

    #[test]
    fn analysis_is_deterministic() {
        let a = analyze_sentence(
            "rāmuḍu vaccāḍu",
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        let b = analyze_sentence(
            "rāmuḍu vaccāḍu",
            Language::Telugu,
            &res().rules,
            &res().lexicon,
            &res().aliases,
        )
        .unwrap();
        assert_eq!(a.tokens, b.tokens);
        assert_eq!(a.evidence, b.evidence);
        assert_eq!(a.sentence_marking, b.sentence_marking);
    }
}
