//! Classification of the English source sentence.
//!
//! A translation can only be judged against what the source licenses: an
//! explicitly gendered source (pronoun or known name) may be rendered with
//! the matching gender; a neutral or plural/group source must not acquire a
//! gendered singular in translation. Subject detection is lexical — the first
//! cue in token order — which is adequate for the short, subject-initial
//! corpus sentences this tool is aimed at.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

/// The four source classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceGenderClass {
    Neutral,
    Masculine,
    Feminine,
    PluralGroup,
}

impl std::fmt::Display for SourceGenderClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SourceGenderClass::Neutral => "neutral",
            SourceGenderClass::Masculine => "masculine",
            SourceGenderClass::Feminine => "feminine",
            SourceGenderClass::PluralGroup => "plural-group",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CueKind {
    MasculinePronoun,
    FemininePronoun,
    PluralPronoun,
    MaleName,
    FemaleName,
    Role { human: bool, plural: bool },
    CompoundRole { human: bool, plural: bool },
    GroupNoun,
    PluralAuxiliary,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCue {
    pub token: String,
    pub kind: CueKind,
}

/// Classification result with the cues that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceGender {
    pub class: SourceGenderClass,
    pub cues: Vec<SourceCue>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SourceError {
    #[error("source sentence is empty")]
    EmptySentence,
    #[error("both masculine and feminine cues present: {cues:?}")]
    ConflictingCues { cues: Vec<String> },
}

#[derive(Debug, Clone)]
struct RoleNoun {
    singular: String,
    plural: String,
    human: bool,
}

/// English-side cue tables: pronouns, seed name lists, role nouns with
/// plurals and a humanness flag, multiword compounds, and group nouns.
#[derive(Debug, Clone, Default)]
pub struct CueLexicon {
    masculine_pronouns: HashSet<String>,
    feminine_pronouns: HashSet<String>,
    plural_pronouns: HashSet<String>,
    male_names: HashSet<String>,
    female_names: HashSet<String>,
    roles: Vec<RoleNoun>,
    role_singular: HashMap<String, usize>,
    role_plural: HashMap<String, usize>,
    compounds: Vec<RoleNoun>,
    groups: HashSet<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CueLexiconError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {token:?} cannot be both masculine and feminine")]
    ContradictoryCue { line: usize, token: String },
}

impl CueLexicon {
    pub fn parse(src: &str) -> Result<Self, CueLexiconError> {
        let mut lex = CueLexicon::default();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let err = |msg: &str| CueLexiconError::Malformed {
                line: idx + 1,
                msg: msg.to_owned(),
            };
            match fields[0] {
                "masc_pronoun" | "fem_pronoun" | "plural_pronoun" | "male_name" | "female_name"
                | "group" => {
                    if fields.len() != 2 || fields[1].is_empty() {
                        return Err(err("expected one value"));
                    }
                    let value = fields[1];
                    match fields[0] {
                        "masc_pronoun" => {
                            let v = value.to_lowercase();
                            if lex.feminine_pronouns.contains(&v) {
                                return Err(CueLexiconError::ContradictoryCue {
                                    line: idx + 1,
                                    token: v,
                                });
                            }
                            lex.masculine_pronouns.insert(v);
                        }
                        "fem_pronoun" => {
                            let v = value.to_lowercase();
                            if lex.masculine_pronouns.contains(&v) {
                                return Err(CueLexiconError::ContradictoryCue {
                                    line: idx + 1,
                                    token: v,
                                });
                            }
                            lex.feminine_pronouns.insert(v);
                        }
                        "plural_pronoun" => {
                            lex.plural_pronouns.insert(value.to_lowercase());
                        }
                        // names keep their case: matching is case-sensitive
                        "male_name" => {
                            if lex.female_names.contains(value) {
                                return Err(CueLexiconError::ContradictoryCue {
                                    line: idx + 1,
                                    token: value.to_owned(),
                                });
                            }
                            lex.male_names.insert(value.to_owned());
                        }
                        "female_name" => {
                            if lex.male_names.contains(value) {
                                return Err(CueLexiconError::ContradictoryCue {
                                    line: idx + 1,
                                    token: value.to_owned(),
                                });
                            }
                            lex.female_names.insert(value.to_owned());
                        }
                        "group" => {
                            lex.groups.insert(value.to_lowercase());
                        }
                        _ => unreachable!(),
                    }
                }
                "noun" | "compound" => {
                    if fields.len() != 4 {
                        return Err(err("expected singular, plural and humanness"));
                    }
                    let human = match fields[3] {
                        "human" => true,
                        "nonhuman" => false,
                        _ => return Err(err("humanness must be human|nonhuman")),
                    };
                    let role = RoleNoun {
                        singular: fields[1].to_lowercase(),
                        plural: fields[2].to_lowercase(),
                        human,
                    };
                    if fields[0] == "noun" {
                        let i = lex.roles.len();
                        lex.role_singular.insert(role.singular.clone(), i);
                        lex.role_plural.insert(role.plural.clone(), i);
                        lex.roles.push(role);
                    } else {
                        lex.compounds.push(role);
                    }
                }
                other => return Err(err(&format!("unknown cue kind {other:?}"))),
            }
        }
        Ok(lex)
    }

    /// Humanness of an English role noun (singular or plural form).
    pub fn role_humanness(&self, role: &str) -> Option<bool> {
        let role = role.to_lowercase();
        self.role_singular
            .get(&role)
            .or_else(|| self.role_plural.get(&role))
            .map(|i| self.roles[*i].human)
            .or_else(|| {
                self.compounds
                    .iter()
                    .find(|c| c.singular == role || c.plural == role)
                    .map(|c| c.human)
            })
    }
}

fn words(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric() && c != '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Classifies `sentence`: `Masculine`/`Feminine` on any pronoun or name cue
/// (conflicts are an error so callers can route the pair to Indeterminate),
/// `PluralGroup` when the lexical subject is a plural role, group noun or
/// plural pronoun, `Neutral` otherwise. Compound roles are matched before
/// their single-word tails.
pub fn classify_source(sentence: &str, lexicon: &CueLexicon) -> Result<SourceGender, SourceError> {
    let original = words(sentence);
    if original.is_empty() {
        return Err(SourceError::EmptySentence);
    }
    let lower: Vec<String> = original.iter().map(|w| w.to_lowercase()).collect();

    // (position, cue); sorted before returning so cue order follows the sentence
    let mut cues: Vec<(usize, SourceCue)> = Vec::new();
    let mut consumed = vec![false; original.len()];
    // subject candidate: (token index, is_plural); earliest position wins
    let mut subject: Option<(usize, bool)> = None;
    let note_subject = |subject: &mut Option<(usize, bool)>, idx: usize, plural: bool| {
        if subject.is_none_or(|(existing, _)| idx < existing) {
            *subject = Some((idx, plural));
        }
    };

    // compounds first, so "policy advisor" never records a bare "advisor" cue
    for compound in &lexicon.compounds {
        for (phrase, plural) in [(&compound.singular, false), (&compound.plural, true)] {
            let parts: Vec<&str> = phrase.split_whitespace().collect();
            if parts.is_empty() {
                continue;
            }
            for start in 0..lower.len().saturating_sub(parts.len() - 1) {
                let window = &lower[start..start + parts.len()];
                let already = consumed[start..start + parts.len()].iter().any(|c| *c);
                if !already && window.iter().map(String::as_str).eq(parts.iter().copied()) {
                    cues.push((
                        start,
                        SourceCue {
                            token: phrase.clone(),
                            kind: CueKind::CompoundRole {
                                human: compound.human,
                                plural,
                            },
                        },
                    ));
                    consumed[start..start + parts.len()]
                        .iter_mut()
                        .for_each(|c| *c = true);
                    note_subject(&mut subject, start, plural);
                }
            }
        }
    }

    let mut masculine: Vec<String> = Vec::new();
    let mut feminine: Vec<String> = Vec::new();
    for (i, (word, low)) in original.iter().zip(lower.iter()).enumerate() {
        if consumed[i] {
            continue;
        }
        if lexicon.masculine_pronouns.contains(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::MasculinePronoun,
                },
            ));
            masculine.push(word.clone());
        } else if lexicon.feminine_pronouns.contains(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::FemininePronoun,
                },
            ));
            feminine.push(word.clone());
        } else if lexicon.plural_pronouns.contains(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::PluralPronoun,
                },
            ));
            note_subject(&mut subject, i, true);
        } else if lexicon.male_names.contains(word) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::MaleName,
                },
            ));
            masculine.push(word.clone());
        } else if lexicon.female_names.contains(word) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::FemaleName,
                },
            ));
            feminine.push(word.clone());
        } else if let Some(role_idx) = lexicon.role_singular.get(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::Role {
                        human: lexicon.roles[*role_idx].human,
                        plural: false,
                    },
                },
            ));
            note_subject(&mut subject, i, false);
        } else if let Some(role_idx) = lexicon.role_plural.get(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::Role {
                        human: lexicon.roles[*role_idx].human,
                        plural: true,
                    },
                },
            ));
            note_subject(&mut subject, i, true);
        } else if let Some(role_idx) = strip_plural_s(low, lexicon) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::Role {
                        human: lexicon.roles[role_idx].human,
                        plural: true,
                    },
                },
            ));
            note_subject(&mut subject, i, true);
        } else if lexicon.groups.contains(low) {
            cues.push((
                i,
                SourceCue {
                    token: word.clone(),
                    kind: CueKind::GroupNoun,
                },
            ));
            note_subject(&mut subject, i, true);
        }
    }

    if !masculine.is_empty() && !feminine.is_empty() {
        let mut conflict = masculine;
        conflict.extend(feminine);
        return Err(SourceError::ConflictingCues { cues: conflict });
    }

    let finalize = |mut cues: Vec<(usize, SourceCue)>| -> Vec<SourceCue> {
        cues.sort_by_key(|(pos, _)| *pos);
        cues.into_iter().map(|(_, cue)| cue).collect()
    };

    if !masculine.is_empty() {
        return Ok(SourceGender {
            class: SourceGenderClass::Masculine,
            cues: finalize(cues),
        });
    }
    if !feminine.is_empty() {
        return Ok(SourceGender {
            class: SourceGenderClass::Feminine,
            cues: finalize(cues),
        });
    }

    if let Some((subject_idx, mut plural)) = subject {
        if !plural {
            // "the staff are ..." — plural agreement on the nearest auxiliary
            if let Some((aux_idx, aux)) = lower[subject_idx + 1..]
                .iter()
                .enumerate()
                .find(|(_, w)| matches!(w.as_str(), "is" | "are" | "was" | "were"))
            {
                if matches!(aux.as_str(), "are" | "were") {
                    cues.push((
                        subject_idx + 1 + aux_idx,
                        SourceCue {
                            token: aux.clone(),
                            kind: CueKind::PluralAuxiliary,
                        },
                    ));
                    plural = true;
                }
            }
        }
        if plural {
            return Ok(SourceGender {
                class: SourceGenderClass::PluralGroup,
                cues: finalize(cues),
            });
        }
    }

    Ok(SourceGender {
        class: SourceGenderClass::Neutral,
        cues: finalize(cues),
    })
}

/// Determinerless plural: "-s"/"-es" stripped back to a known role noun.
fn strip_plural_s(word: &str, lexicon: &CueLexicon) -> Option<usize> {
    if let Some(stem) = word.strip_suffix("es") {
        if let Some(i) = lexicon.role_singular.get(stem) {
            return Some(*i);
        }
    }
    let stem = word.strip_suffix('s')?;
    lexicon.role_singular.get(stem).copied()
}
