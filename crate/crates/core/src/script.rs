//! Script detection, grapheme segmentation and transliteration.
//!
//! Everything downstream (suffix matching, lexicon lookup) operates on one
//! canonical form: romanized text with combining diacritics composed (NFC).
//! Native Telugu/Kannada input is transliterated into that form first.

use std::collections::HashMap;

use unicode_normalization::UnicodeNormalization;
use unicode_segmentation::UnicodeSegmentation;

use crate::Language;

/// Classification of the script(s) a piece of text is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScriptTag {
    TeluguNative,
    KannadaNative,
    Romanized,
    Mixed,
    Unknown,
}

impl std::fmt::Display for ScriptTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScriptTag::TeluguNative => "telugu-native",
            ScriptTag::KannadaNative => "kannada-native",
            ScriptTag::Romanized => "romanized",
            ScriptTag::Mixed => "mixed",
            ScriptTag::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

/// Text split into extended grapheme clusters; concatenating `clusters`
/// reproduces `original` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphemeString {
    clusters: Vec<String>,
    original: String,
}

impl GraphemeString {
    pub fn clusters(&self) -> &[String] {
        &self.clusters
    }

    pub fn original(&self) -> &str {
        &self.original
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ScriptError {
    #[error("cannot transliterate text of unknown script")]
    UnknownScript,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: expected `<native>\\t<roman>`")]
    Malformed { line: usize },
    #[error("line {line}: duplicate entry for {key:?}")]
    Duplicate { line: usize, key: String },
}

const TELUGU_BLOCK: std::ops::RangeInclusive<char> = '\u{0C00}'..='\u{0C7F}';
const KANNADA_BLOCK: std::ops::RangeInclusive<char> = '\u{0C80}'..='\u{0CFF}';

fn is_latin_letter(c: char) -> bool {
    c.is_ascii_alphabetic()
        || (('\u{00C0}'..='\u{024F}').contains(&c) && c.is_alphabetic())
        || ('\u{1E00}'..='\u{1EFF}').contains(&c)
}

/// Classifies the script of `text`. Letterless text is `Unknown`; two or more
/// of Telugu/Kannada/Latin co-occurring is `Mixed`; letters outside all three
/// classes prevent any single-script tag.
pub fn detect_script(text: &str) -> ScriptTag {
    let mut telugu = false;
    let mut kannada = false;
    let mut latin = false;
    let mut other = false;
    for c in text.chars().filter(|c| c.is_alphabetic()) {
        if TELUGU_BLOCK.contains(&c) {
            telugu = true;
        } else if KANNADA_BLOCK.contains(&c) {
            kannada = true;
        } else if is_latin_letter(c) {
            latin = true;
        } else {
            other = true;
        }
    }
    match (telugu, kannada, latin) {
        (false, false, false) => ScriptTag::Unknown,
        (true, false, false) if !other => ScriptTag::TeluguNative,
        (false, true, false) if !other => ScriptTag::KannadaNative,
        (false, false, true) if !other => ScriptTag::Romanized,
        (t, k, l) if (t as u8 + k as u8 + l as u8) >= 2 => ScriptTag::Mixed,
        _ => ScriptTag::Unknown,
    }
}

/// Splits `text` into extended grapheme clusters.
pub fn segment_graphemes(text: &str) -> GraphemeString {
    GraphemeString {
        clusters: text.graphemes(true).map(str::to_owned).collect(),
        original: text.to_owned(),
    }
}

/// Normalizes to canonical composition; applied before any segmentation or
/// matching so the suffix tables see one spelling per grapheme.
pub fn normalize(text: &str) -> String {
    text.nfc().collect()
}

/// Result of [`TransliterationTable::to_roman`]: the romanized text plus any
/// native clusters the table had no mapping for (kept verbatim in `text`,
/// never dropped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Romanized {
    pub text: String,
    pub unmapped: Vec<String>,
}

enum NativeClass {
    IndependentVowel,
    Consonant,
    VowelSign,
    Virama,
    Modifier,
}

fn classify_native(c: char, language: Language) -> Option<NativeClass> {
    let base = match language {
        Language::Telugu => 0x0C00u32,
        Language::Kannada => 0x0C80u32,
    };
    let cp = c as u32;
    if !(base..base + 0x80).contains(&cp) {
        return None;
    }
    Some(match cp - base {
        0x00..=0x04 => NativeClass::Modifier,
        0x05..=0x14 => NativeClass::IndependentVowel,
        0x15..=0x39 => NativeClass::Consonant,
        0x3E..=0x4C => NativeClass::VowelSign,
        0x4D => NativeClass::Virama,
        0x55..=0x56 => NativeClass::VowelSign, // length marks from decomposed signs
        0x58..=0x5A => NativeClass::Consonant,
        0x60..=0x63 => NativeClass::IndependentVowel,
        _ => return None,
    })
}

/// Maps native-script graphemes of one language to the romanization used by
/// the suffix rules. Loaded from a tab-separated data file so coverage can be
/// extended without a rebuild.
#[derive(Debug, Clone)]
pub struct TransliterationTable {
    language: Language,
    entries: HashMap<String, String>,
}

impl TransliterationTable {
    pub fn parse(language: Language, src: &str) -> Result<Self, TableError> {
        let mut entries = HashMap::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let native = parts.next().unwrap_or("").trim();
            let roman = parts.next().map(str::trim);
            let (native, roman) = match (native, roman) {
                (n, Some(r)) if !n.is_empty() => (normalize(n), normalize(r)),
                _ => return Err(TableError::Malformed { line: idx + 1 }),
            };
            if entries.insert(native.clone(), roman).is_some() {
                return Err(TableError::Duplicate {
                    line: idx + 1,
                    key: native,
                });
            }
        }
        Ok(TransliterationTable { language, entries })
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn entries(&self) -> &HashMap<String, String> {
        &self.entries
    }

    fn sound(&self, c: char) -> Option<&str> {
        let mut key = String::new();
        key.push(c);
        self.entries.get(&key).map(String::as_str)
    }

    /// Transliterates `text` into romanized form. Already-romanized input is
    /// returned unchanged (idempotence). Mixed input has its native clusters
    /// mapped and everything else passed through.
    pub fn to_roman(&self, text: &str) -> Result<Romanized, ScriptError> {
        match detect_script(text) {
            ScriptTag::Unknown => Err(ScriptError::UnknownScript),
            ScriptTag::Romanized => Ok(Romanized {
                text: text.to_owned(),
                unmapped: Vec::new(),
            }),
            _ => Ok(self.transliterate(&normalize(text))),
        }
    }

    fn transliterate(&self, text: &str) -> Romanized {
        let clusters: Vec<&str> = text.graphemes(true).collect();
        let mut out = String::with_capacity(text.len());
        let mut unmapped = Vec::new();
        for (i, cluster) in clusters.iter().enumerate() {
            let next_initial = clusters.get(i + 1).and_then(|c| self.cluster_initial(c));
            match self.transliterate_cluster(cluster, next_initial) {
                Some(roman) => out.push_str(&roman),
                None => {
                    out.push_str(cluster);
                    unmapped.push((*cluster).to_owned());
                }
            }
        }
        Romanized {
            text: out,
            unmapped,
        }
    }

    /// Romanized first consonant sound of a cluster, used to resolve an
    /// anusvara at the end of the preceding cluster.
    fn cluster_initial(&self, cluster: &str) -> Option<char> {
        let c = cluster.chars().next()?;
        match classify_native(c, self.language)? {
            NativeClass::Consonant => self.sound(c).and_then(|s| s.chars().next()),
            _ => None,
        }
    }

    fn transliterate_cluster(&self, cluster: &str, next_initial: Option<char>) -> Option<String> {
        // A lone consonant entry holds the bare sound, not a transliteration;
        // it must go through the engine to pick up its inherent vowel. Any
        // other cluster listed verbatim in the table is an explicit override.
        let lone_consonant = {
            let mut chars = cluster.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => {
                    matches!(
                        classify_native(c, self.language),
                        Some(NativeClass::Consonant)
                    )
                }
                _ => false,
            }
        };
        if !lone_consonant {
            if let Some(direct) = self.entries.get(cluster) {
                return Some(direct.clone());
            }
        }
        if !cluster
            .chars()
            .any(|c| classify_native(c, self.language).is_some())
        {
            if cluster
                .chars()
                .any(|c| TELUGU_BLOCK.contains(&c) || KANNADA_BLOCK.contains(&c))
            {
                // native script, but not this table's language
                return None;
            }
            // Nothing native here (Latin text, punctuation, whitespace in
            // mixed input) — pass through untouched.
            return Some(cluster.to_owned());
        }
        let mut out = String::new();
        let mut pending: Option<&str> = None;
        let flush = |out: &mut String, pending: &mut Option<&str>| {
            if let Some(sound) = pending.take() {
                out.push_str(sound);
                out.push('a');
            }
        };
        for c in cluster.chars() {
            if matches!(c, '\u{200C}' | '\u{200D}') {
                continue;
            }
            let class = classify_native(c, self.language)?;
            match class {
                NativeClass::IndependentVowel => {
                    flush(&mut out, &mut pending);
                    out.push_str(self.sound(c)?);
                }
                NativeClass::Consonant => {
                    flush(&mut out, &mut pending);
                    pending = Some(self.sound(c)?);
                }
                NativeClass::VowelSign => {
                    let consonant = pending.take()?;
                    out.push_str(consonant);
                    out.push_str(self.sound(c)?);
                }
                NativeClass::Virama => {
                    let consonant = pending.take()?;
                    out.push_str(consonant);
                }
                NativeClass::Modifier => {
                    flush(&mut out, &mut pending);
                    if self.is_anusvara(c) {
                        out.push(homorganic_nasal(next_initial));
                    } else {
                        out.push_str(self.sound(c)?);
                    }
                }
            }
        }
        flush(&mut out, &mut pending);
        Some(out)
    }

    fn is_anusvara(&self, c: char) -> bool {
        matches!(
            (self.language, c),
            (Language::Telugu, '\u{0C02}') | (Language::Kannada, '\u{0C82}')
        )
    }
}

/// Anusvara assimilates to the class of the following consonant; word-finally
/// (or before a vowel) it reads as m.
fn homorganic_nasal(next_initial: Option<char>) -> char {
    match next_initial {
        Some('k') | Some('g') => 'ṅ',
        Some('c') | Some('j') => 'ñ',
        Some('ṭ') | Some('ḍ') | Some('ṇ') => 'ṇ',
        Some('t') | Some('d') | Some('n') => 'n',
        _ => 'm',
    }
}

/// Informal-to-canonical romanization aliases (doubled vowels to macrons).
#[derive(Debug, Clone, Default)]
pub struct RomanAliases {
    // sorted longest-first so the longest alias wins
    pairs: Vec<(String, String)>,
}

impl RomanAliases {
    pub fn parse(src: &str) -> Result<Self, TableError> {
        let mut pairs = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            match (parts.next().map(str::trim), parts.next().map(str::trim)) {
                (Some(from), Some(to)) if !from.is_empty() => {
                    pairs.push((normalize(from), normalize(to)));
                }
                _ => return Err(TableError::Malformed { line: idx + 1 }),
            }
        }
        pairs.sort_by_key(|(from, _)| std::cmp::Reverse(from.chars().count()));
        Ok(RomanAliases { pairs })
    }

    /// Folds informal spellings into canonical form in one left-to-right pass.
    pub fn fold(&self, text: &str) -> String {
        if self.pairs.is_empty() {
            return text.to_owned();
        }
        let mut out = String::with_capacity(text.len());
        let mut rest = text;
        'outer: while !rest.is_empty() {
            for (from, to) in &self.pairs {
                if rest.starts_with(from.as_str()) {
                    out.push_str(to);
                    rest = &rest[from.len()..];
                    continue 'outer;
                }
            }
            let c = rest.chars().next().unwrap();
            out.push(c);
            rest = &rest[c.len_utf8()..];
        }
        out
    }
}

/// The pair of per-language transliteration tables.
#[derive(Debug, Clone)]
pub struct TranslitTables {
    pub telugu: TransliterationTable,
    pub kannada: TransliterationTable,
}

impl TranslitTables {
    pub fn table(&self, language: Language) -> &TransliterationTable {
        match language {
            Language::Telugu => &self.telugu,
            Language::Kannada => &self.kannada,
        }
    }

    pub fn to_roman(&self, text: &str, language: Language) -> Result<Romanized, ScriptError> {
        self.table(language).to_roman(text)
    }
}
