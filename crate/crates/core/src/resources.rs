//! Loading of the data tables everything runs on.
//!
//! The crate ships working copies of every table under `data/`; linguists can
//! point the loaders at a directory of edited files instead — the formats are
//! plain tab-separated text and the prompt templates are plain text with
//! `{placeholder}` slots.

use std::path::Path;

use crate::cot::{PromptTemplates, TemplateError};
use crate::morphology::{Lexicon, LexiconError, RuleError, RuleSet};
use crate::script::{RomanAliases, TableError, TranslitTables, TransliterationTable};
use crate::source::{CueLexicon, CueLexiconError};
use crate::Language;

const TELUGU_TRANSLIT: &str = include_str!("../data/telugu_translit.tsv");
const KANNADA_TRANSLIT: &str = include_str!("../data/kannada_translit.tsv");
const SUFFIX_RULES: &str = include_str!("../data/suffix_rules.tsv");
const ROLE_LEXICON: &str = include_str!("../data/role_lexicon.tsv");
const CUE_LEXICON: &str = include_str!("../data/cue_lexicon.tsv");
const ROMAN_ALIASES: &str = include_str!("../data/roman_aliases.tsv");
const TEMPLATE_BASE: &str = include_str!("../data/templates/base.txt");
const TEMPLATE_COT1_TELUGU: &str = include_str!("../data/templates/cot1_telugu.txt");
const TEMPLATE_COT1_KANNADA: &str = include_str!("../data/templates/cot1_kannada.txt");
const TEMPLATE_COT2_TELUGU: &str = include_str!("../data/templates/cot2_telugu.txt");

/// Every table the pipeline needs, loaded once and then shared immutably.
#[derive(Debug, Clone)]
pub struct Resources {
    pub translit: TranslitTables,
    pub aliases: RomanAliases,
    pub rules: RuleSet,
    pub lexicon: Lexicon,
    pub cues: CueLexicon,
    pub templates: PromptTemplates,
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("{file}: {source}")]
    Table {
        file: String,
        #[source]
        source: TableError,
    },
    #[error("{file}: {source}")]
    Rules {
        file: String,
        #[source]
        source: RuleError,
    },
    #[error("{file}: {source}")]
    Lexicon {
        file: String,
        #[source]
        source: LexiconError,
    },
    #[error("{file}: {source}")]
    Cues {
        file: String,
        #[source]
        source: CueLexiconError,
    },
    #[error("{file}: {source}")]
    Template {
        file: String,
        #[source]
        source: TemplateError,
    },
    #[error("cannot read {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
}

impl Resources {
    /// The tables shipped with the crate. Their validity is enforced by the
    /// test suite, so a parse failure here is a build defect.
    pub fn bundled() -> Resources {
        Resources::from_sources(
            TELUGU_TRANSLIT,
            KANNADA_TRANSLIT,
            SUFFIX_RULES,
            ROLE_LEXICON,
            CUE_LEXICON,
            ROMAN_ALIASES,
            TEMPLATE_BASE,
            TEMPLATE_COT1_TELUGU,
            TEMPLATE_COT1_KANNADA,
            TEMPLATE_COT2_TELUGU,
        )
        .expect("bundled data files are valid")
    }

    /// Loads the same file set from `dir` (same names as the shipped
    /// `data/` directory).
    pub fn from_dir(dir: &Path) -> Result<Resources, ResourceError> {
        let read = |name: &str| -> Result<String, ResourceError> {
            std::fs::read_to_string(dir.join(name)).map_err(|source| ResourceError::Io {
                file: name.to_owned(),
                source,
            })
        };
        Resources::from_sources(
            &read("telugu_translit.tsv")?,
            &read("kannada_translit.tsv")?,
            &read("suffix_rules.tsv")?,
            &read("role_lexicon.tsv")?,
            &read("cue_lexicon.tsv")?,
            &read("roman_aliases.tsv")?,
            &read("templates/base.txt")?,
            &read("templates/cot1_telugu.txt")?,
            &read("templates/cot1_kannada.txt")?,
            &read("templates/cot2_telugu.txt")?,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn from_sources(
        telugu_translit: &str,
        kannada_translit: &str,
        suffix_rules: &str,
        role_lexicon: &str,
        cue_lexicon: &str,
        roman_aliases: &str,
        template_base: &str,
        template_cot1_telugu: &str,
        template_cot1_kannada: &str,
        template_cot2_telugu: &str,
    ) -> Result<Resources, ResourceError> {
        let telugu =
            TransliterationTable::parse(Language::Telugu, telugu_translit).map_err(|source| {
                ResourceError::Table {
                    file: "telugu_translit.tsv".into(),
                    source,
                }
            })?;
        let kannada =
            TransliterationTable::parse(Language::Kannada, kannada_translit).map_err(|source| {
                ResourceError::Table {
                    file: "kannada_translit.tsv".into(),
                    source,
                }
            })?;
        let rules = RuleSet::parse(suffix_rules).map_err(|source| ResourceError::Rules {
            file: "suffix_rules.tsv".into(),
            source,
        })?;
        let lexicon = Lexicon::parse(role_lexicon).map_err(|source| ResourceError::Lexicon {
            file: "role_lexicon.tsv".into(),
            source,
        })?;
        let cues = CueLexicon::parse(cue_lexicon).map_err(|source| ResourceError::Cues {
            file: "cue_lexicon.tsv".into(),
            source,
        })?;
        let aliases =
            RomanAliases::parse(roman_aliases).map_err(|source| ResourceError::Table {
                file: "roman_aliases.tsv".into(),
                source,
            })?;
        let templates = PromptTemplates::new(
            template_base,
            template_cot1_telugu,
            template_cot1_kannada,
            template_cot2_telugu,
        )
        .map_err(|source| ResourceError::Template {
            file: "templates/".into(),
            source,
        })?;
        Ok(Resources {
            translit: TranslitTables { telugu, kannada },
            aliases,
            rules,
            lexicon,
            cues,
            templates,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_parses() {
        let res = Resources::bundled();
        assert!(!res.rules.rules().is_empty());
        assert!(!res.lexicon.entries().is_empty());
    }

    #[test]
    fn from_dir_loads_the_shipped_files() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
        let res = Resources::from_dir(&dir).unwrap();
        assert_eq!(
            res.rules.rules().len(),
            Resources::bundled().rules.rules().len()
        );
    }
}
