//! Corpus loading, per-domain bias rates, human-agreement scoring and report
//! rendering.
//!
//! A corpus is a JSON Lines file of translation pairs, one object per line,
//! optionally carrying a human label. Reports group verdicts by
//! (system, language, CoT level) and show one column per domain; rates are
//! reported both as exact fractions and whole percentages (half-up).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bias::{BiasVerdict, Domain, TranslationPair, Verdict};
use crate::morphology::Evidence;
use crate::source::SourceGenderClass;
use crate::Language;

/// Human judgment of one pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanLabel {
    Biased,
    NotBiased,
}

/// One corpus line: a pair plus the optional human label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusEntry {
    #[serde(flatten)]
    pub pair: TranslationPair,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_label: Option<HumanLabel>,
}

/// A loaded corpus; ids are unique and all entries share one language.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub name: String,
    pub language: Language,
    pub entries: Vec<CorpusEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Schema {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}:{line}: duplicate id {id:?}")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("{path}:{line}: language {found} differs from the corpus language {expected}")]
    MixedLanguage {
        path: String,
        line: usize,
        expected: Language,
        found: Language,
    },
}

/// Loads and validates a JSON Lines corpus.
pub fn load_corpus(path: &Path) -> Result<Corpus, CorpusError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| display.clone());

    let mut entries: Vec<CorpusEntry> = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let mut language: Option<Language> = None;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: CorpusEntry = serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
            path: display.clone(),
            line: line_no,
            msg: e.to_string(),
        })?;
        if let Err(e) = entry.pair.validate() {
            return Err(CorpusError::Schema {
                path: display.clone(),
                line: line_no,
                msg: e.to_string(),
            });
        }
        if !seen.insert(entry.pair.id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: display.clone(),
                line: line_no,
                id: entry.pair.id.clone(),
            });
        }
        match language {
            None => language = Some(entry.pair.language),
            Some(expected) if expected != entry.pair.language => {
                return Err(CorpusError::MixedLanguage {
                    path: display.clone(),
                    line: line_no,
                    expected,
                    found: entry.pair.language,
                });
            }
            _ => {}
        }
        entries.push(entry);
    }
    Ok(Corpus {
        name,
        // an empty corpus is valid; the language default is arbitrary
        language: language.unwrap_or(Language::Telugu),
        entries,
    })
}

/// One audited pair, as written to verdict files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub id: String,
    pub domain: Domain,
    pub language: Language,
    pub cot_level: u8,
    pub system_tag: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_gender: Option<SourceGenderClass>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_label: Option<HumanLabel>,
}

impl VerdictRecord {
    pub fn new(entry: &CorpusEntry, verdict: &BiasVerdict) -> VerdictRecord {
        VerdictRecord {
            id: entry.pair.id.clone(),
            domain: entry.pair.domain,
            language: entry.pair.language,
            cot_level: entry.pair.cot_level,
            system_tag: entry.pair.system_tag.clone(),
            verdict: verdict.verdict,
            source_gender: verdict.source_gender.as_ref().map(|s| s.class),
            evidence: verdict.evidence.clone(),
            note: verdict.note.clone(),
            human_label: entry.human_label,
        }
    }
}

/// Reads a verdict JSON Lines file.
pub fn load_verdicts(path: &Path) -> Result<Vec<VerdictRecord>, CorpusError> {
    let display = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    let mut records = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: VerdictRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Schema {
                path: display.clone(),
                line: idx + 1,
                msg: e.to_string(),
            })?;
        records.push(record);
    }
    Ok(records)
}

/// Key of one report row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemKey {
    pub language: Language,
    pub system_tag: String,
    pub cot_level: u8,
}

impl SystemKey {
    /// Row label in the style of the published tables, e.g.
    /// "Eng-Telugu (ChatGPT + 2nd CoT)".
    pub fn label(&self) -> String {
        let suffix = match self.cot_level {
            0 => String::new(),
            1 => " + 1st CoT".to_owned(),
            2 => " + 2nd CoT".to_owned(),
            n => format!(" + CoT level {n}"),
        };
        format!(
            "Eng-{} ({}{})",
            self.language.english_name(),
            self.system_tag,
            suffix
        )
    }
}

/// Counts for one (system, domain) cell.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateCell {
    pub biased: usize,
    pub judged: usize,
    pub indeterminate: usize,
    pub total: usize,
}

impl RateCell {
    pub fn rate(&self) -> f64 {
        if self.judged == 0 {
            0.0
        } else {
            self.biased as f64 / self.judged as f64
        }
    }

    /// Whole percentage, rounded half-up, matching hand-computed table style.
    pub fn percent(&self) -> u32 {
        if self.judged == 0 {
            return 0;
        }
        ((200 * self.biased + self.judged) / (2 * self.judged)) as u32
    }

    fn add(&mut self, verdict: Verdict, include_indeterminate: bool) {
        self.total += 1;
        match verdict {
            Verdict::Indeterminate => {
                self.indeterminate += 1;
                if include_indeterminate {
                    self.judged += 1;
                }
            }
            Verdict::Biased => {
                self.judged += 1;
                self.biased += 1;
            }
            Verdict::Neutral | Verdict::ConsistentGendered => {
                self.judged += 1;
            }
        }
    }
}

/// Per-domain bias rates for every (system, language, CoT level) group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainReport {
    pub rows: BTreeMap<String, BTreeMap<Domain, RateCell>>,
    /// Row keys in render order, mapped back to their structured form.
    pub systems: BTreeMap<String, SystemKey>,
    pub grand_total: RateCell,
    /// Whether indeterminate verdicts were counted into the denominator.
    pub include_indeterminate: bool,
}

/// Aggregates verdicts into per-domain rates. With `include_indeterminate`
/// false (the default posture), indeterminate pairs are reported but excluded
/// from the denominator.
pub fn compute_rates(records: &[VerdictRecord], include_indeterminate: bool) -> DomainReport {
    let mut rows: BTreeMap<String, BTreeMap<Domain, RateCell>> = BTreeMap::new();
    let mut systems: BTreeMap<String, SystemKey> = BTreeMap::new();
    let mut grand_total = RateCell::default();
    for record in records {
        let key = SystemKey {
            language: record.language,
            system_tag: record.system_tag.clone(),
            cot_level: record.cot_level,
        };
        let label = key.label();
        systems.entry(label.clone()).or_insert(key);
        rows.entry(label)
            .or_default()
            .entry(record.domain)
            .or_default()
            .add(record.verdict, include_indeterminate);
        grand_total.add(record.verdict, include_indeterminate);
    }
    DomainReport {
        rows,
        systems,
        grand_total,
        include_indeterminate,
    }
}

/// Confusion counts of the automated judge against human labels. Positive
/// class is "biased"; indeterminate verdicts are excluded from the matrix and
/// reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub labeled: usize,
    pub true_positive: usize,
    pub false_positive: usize,
    pub false_negative: usize,
    pub true_negative: usize,
    pub indeterminate: usize,
    /// True when every labeled pair came back indeterminate — nothing judged.
    pub degenerate: bool,
}

impl AgreementReport {
    pub fn judged(&self) -> usize {
        self.true_positive + self.false_positive + self.false_negative + self.true_negative
    }

    pub fn accuracy(&self) -> f64 {
        let judged = self.judged();
        if judged == 0 {
            0.0
        } else {
            (self.true_positive + self.true_negative) as f64 / judged as f64
        }
    }

    pub fn precision(&self) -> f64 {
        let denom = self.true_positive + self.false_positive;
        if denom == 0 {
            0.0
        } else {
            self.true_positive as f64 / denom as f64
        }
    }

    pub fn recall(&self) -> f64 {
        let denom = self.true_positive + self.false_negative;
        if denom == 0 {
            0.0
        } else {
            self.true_positive as f64 / denom as f64
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("no human-labeled entries to compare against")]
    NoLabels,
}

/// Compares verdicts with the human labels carried on the same records.
pub fn compare_with_human(records: &[VerdictRecord]) -> Result<AgreementReport, AgreementError> {
    let mut report = AgreementReport {
        labeled: 0,
        true_positive: 0,
        false_positive: 0,
        false_negative: 0,
        true_negative: 0,
        indeterminate: 0,
        degenerate: false,
    };
    for record in records {
        let Some(label) = record.human_label else {
            continue;
        };
        report.labeled += 1;
        match record.verdict {
            Verdict::Indeterminate => report.indeterminate += 1,
            Verdict::Biased => match label {
                HumanLabel::Biased => report.true_positive += 1,
                HumanLabel::NotBiased => report.false_positive += 1,
            },
            Verdict::Neutral | Verdict::ConsistentGendered => match label {
                HumanLabel::Biased => report.false_negative += 1,
                HumanLabel::NotBiased => report.true_negative += 1,
            },
        }
    }
    if report.labeled == 0 {
        return Err(AgreementError::NoLabels);
    }
    report.degenerate = report.judged() == 0;
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Json,
}

/// Renders a report. Markdown mirrors the published table shape (one row per
/// system, one column per domain); JSON carries the exact counts.
pub fn render_report(report: &DomainReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::Markdown => render_markdown(report),
    }
}

/// Parses the JSON form back; counts survive the round trip exactly.
pub fn parse_report_json(text: &str) -> Result<DomainReport, serde_json::Error> {
    serde_json::from_str(text)
}

fn render_markdown(report: &DomainReport) -> String {
    let mut domains: BTreeSet<Domain> =
        [Domain::Politics, Domain::Sports, Domain::Profession].into();
    for cells in report.rows.values() {
        domains.extend(cells.keys().copied());
    }
    let mut out = String::new();
    out.push_str("| Gender Bias |");
    for domain in &domains {
        out.push_str(&format!(" {domain} |"));
    }
    out.push('\n');
    out.push_str("|---|");
    for _ in &domains {
        out.push_str("---|");
    }
    out.push('\n');
    for (label, cells) in &report.rows {
        out.push_str(&format!("| {label} |"));
        for domain in &domains {
            match cells.get(domain) {
                Some(cell) => out.push_str(&format!(
                    " {}% ({}/{}) |",
                    cell.percent(),
                    cell.biased,
                    cell.judged
                )),
                None => out.push_str(" — |"),
            }
        }
        out.push('\n');
    }
    out
}

/// Render an agreement report as markdown.
pub fn render_agreement(report: &AgreementReport) -> String {
    let mut out = String::new();
    out.push_str("| Metric | Value |\n|---|---|\n");
    out.push_str(&format!("| Labeled entries | {} |\n", report.labeled));
    out.push_str(&format!("| True positives | {} |\n", report.true_positive));
    out.push_str(&format!(
        "| False positives | {} |\n",
        report.false_positive
    ));
    out.push_str(&format!(
        "| False negatives | {} |\n",
        report.false_negative
    ));
    out.push_str(&format!("| True negatives | {} |\n", report.true_negative));
    out.push_str(&format!(
        "| Indeterminate (excluded) | {} |\n",
        report.indeterminate
    ));
    out.push_str(&format!("| Accuracy | {:.3} |\n", report.accuracy()));
    out.push_str(&format!("| Precision | {:.3} |\n", report.precision()));
    out.push_str(&format!("| Recall | {:.3} |\n", report.recall()));
    if report.degenerate {
        out.push_str("\nEvery labeled pair came back indeterminate; metrics above are vacuous.\n");
    }
    out
}

/// Convenience used by tests and the fixture generator: audit a corpus into
/// verdict records.
pub fn audit_corpus(
    corpus: &Corpus,
    resources: &crate::resources::Resources,
) -> Vec<VerdictRecord> {
    corpus
        .entries
        .iter()
        .map(|entry| {
            let verdict = crate::bias::detect_bias(&entry.pair, resources);
            VerdictRecord::new(entry, &verdict)
        })
        .collect()
}
