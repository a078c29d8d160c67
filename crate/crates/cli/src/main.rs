//! Command-line gender bias auditor for English→Telugu/Kannada translation.
//!
//! Subcommands: `analyze` one sentence, `transliterate` native text, `audit`
//! a corpus, `mitigate` source sentences through a translation backend, and
//! `report` over audited verdict files. Human-facing output goes to stdout,
//! diagnostics to stderr. Exit codes are stable for scripting: 0 success,
//! 1 policy failure (strict mode), 2 input error, 3 backend error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mtaudit_core::bias::{detect_bias, Domain, Verdict};
use mtaudit_core::cot::{mitigate, MitigateError, MitigationRequest};
use mtaudit_core::harness::{
    compare_with_human, compute_rates, load_corpus, load_verdicts, render_agreement, render_report,
    CorpusEntry, ReportFormat, VerdictRecord,
};
use mtaudit_core::morphology::{analyze_sentence, Hit};
use mtaudit_core::mt::{backend_from_config, BackendConfig, BackendError, BackendKind};
use mtaudit_core::resources::Resources;
use mtaudit_core::script::detect_script;
use mtaudit_core::Language;

#[derive(Parser)]
#[command(
    name = "mtaudit",
    version,
    about = "Audit English→Telugu/Kannada translations for gender bias and mitigate it with corrective re-prompting"
)]
struct Cli {
    /// Load data tables from this directory instead of the built-in copies.
    #[arg(long, global = true, value_name = "DIR")]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze the gender inflection of one target-language sentence.
    Analyze {
        #[arg(long = "lang", value_enum)]
        language: CliLanguage,
        /// Sentence, native script or romanized.
        text: String,
    },
    /// Transliterate native-script text into the canonical romanization.
    Transliterate {
        #[arg(long = "lang", value_enum)]
        language: CliLanguage,
        text: String,
    },
    /// Audit a corpus file and write verdicts plus a per-domain report.
    Audit {
        corpus: PathBuf,
        /// Directory for the verdicts and report files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Exit with status 1 if any pair is indeterminate.
        #[arg(long)]
        strict: bool,
        /// Count indeterminate pairs into the rate denominator.
        #[arg(long)]
        include_indeterminate: bool,
        /// Also score the verdicts against human labels in the corpus.
        #[arg(long)]
        agreement: bool,
        /// Worker threads for verdict computation.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Translate source sentences and re-prompt while bias is detected.
    Mitigate {
        /// JSON Lines of {"id", "domain", "source_en"}.
        sources: PathBuf,
        #[arg(long = "lang", value_enum)]
        language: CliLanguage,
        /// Highest correction level to apply (2 is Telugu-only).
        #[arg(long, default_value_t = 1)]
        max_level: u8,
        /// Output corpus of final translations with attempt logs.
        #[arg(long, default_value = "mitigated.jsonl")]
        out: PathBuf,
        #[command(flatten)]
        backend: BackendArgs,
    },
    /// Merge verdict files into one per-domain report.
    Report {
        /// Verdict files produced by `audit`.
        #[arg(required = true)]
        verdicts: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = CliFormat::Markdown)]
        format: CliFormat,
        /// Write the report here as well as to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        include_indeterminate: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliLanguage {
    Telugu,
    Kannada,
}

impl From<CliLanguage> for Language {
    fn from(l: CliLanguage) -> Language {
        match l {
            CliLanguage::Telugu => Language::Telugu,
            CliLanguage::Kannada => Language::Kannada,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFormat {
    Markdown,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliBackendKind {
    Live,
    Replay,
    Record,
}

#[derive(Args)]
struct BackendArgs {
    /// Key=value backend config file; flags below override it.
    #[arg(long, value_name = "FILE")]
    backend_config: Option<PathBuf>,
    /// Backend kind (default: replay).
    #[arg(long = "backend", value_enum)]
    kind: Option<CliBackendKind>,
    /// Exchange fixture for replay/record backends.
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Chat-completion endpoint URL for the live backend.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Environment variable holding the bearer token.
    #[arg(long)]
    auth_env: Option<String>,
    #[arg(long)]
    max_retries: Option<u32>,
    #[arg(long)]
    rate_limit_per_min: Option<u32>,
    /// Let record replace exchanges already present in the fixture.
    #[arg(long)]
    overwrite_fixtures: bool,
}

/// Failures mapped onto the exit-code contract.
enum CliError {
    /// Exit 1: the run completed but a policy gate failed.
    Policy(String),
    /// Exit 2: bad input (arguments, files, schemas).
    Input(String),
    /// Exit 3: translation backend failure.
    Backend(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Policy(_) => 1,
            CliError::Input(_) => 2,
            CliError::Backend(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Policy(m) | CliError::Input(m) | CliError::Backend(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resources = match &cli.data_dir {
        Some(dir) => match Resources::from_dir(dir) {
            Ok(res) => res,
            Err(e) => {
                eprintln!("mtaudit: {e}");
                return ExitCode::from(2);
            }
        },
        None => Resources::bundled(),
    };
    let result = match cli.command {
        Command::Analyze { language, text } => cmd_analyze(language.into(), &text, &resources),
        Command::Transliterate { language, text } => {
            cmd_transliterate(language.into(), &text, &resources)
        }
        Command::Audit {
            corpus,
            out_dir,
            strict,
            include_indeterminate,
            agreement,
            jobs,
        } => cmd_audit(
            &corpus,
            &out_dir,
            strict,
            include_indeterminate,
            agreement,
            jobs,
            &resources,
        ),
        Command::Mitigate {
            sources,
            language,
            max_level,
            out,
            backend,
        } => cmd_mitigate(
            &sources,
            language.into(),
            max_level,
            &out,
            &backend,
            &resources,
        ),
        Command::Report {
            verdicts,
            format,
            out,
            include_indeterminate,
        } => cmd_report(&verdicts, format, out.as_deref(), include_indeterminate),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mtaudit: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn cmd_analyze(language: Language, text: &str, resources: &Resources) -> Result<(), CliError> {
    let romanized = resources
        .translit
        .to_roman(text, language)
        .map_err(|e| CliError::Input(e.to_string()))?;
    warn_unmapped(&romanized.unmapped);
    let analysis = analyze_sentence(
        &romanized.text,
        language,
        &resources.rules,
        &resources.lexicon,
        &resources.aliases,
    )
    .map_err(|e| CliError::Input(e.to_string()))?;

    println!("script: {}", detect_script(text));
    println!("tokens:");
    for (i, (token, hit)) in analysis.tokens.iter().zip(analysis.hits.iter()).enumerate() {
        let predicate = if i == analysis.predicate_index {
            " [predicate]"
        } else {
            ""
        };
        match hit {
            Some(Hit::Suffix {
                suffix, marking, ..
            }) => {
                let low = analysis
                    .evidence
                    .iter()
                    .find(|e| e.token == *token && e.matched == *suffix)
                    .map(|e| e.low_confidence)
                    .unwrap_or(false);
                let qualifier = if low { " (low confidence)" } else { "" };
                println!("  {token}\tsuffix -{suffix} → {marking}{qualifier}{predicate}");
            }
            Some(Hit::Noun {
                english_role,
                marking,
                ..
            }) => {
                println!("  {token}\trole noun {english_role} → {marking}{predicate}");
            }
            Some(Hit::GenderPair { english_role }) => {
                println!(
                    "  {token}\tgender-alternative pair {english_role} → human-plural{predicate}"
                );
            }
            None => println!("  {token}\t—{predicate}"),
        }
    }
    println!("sentence marking: {}", analysis.sentence_marking);
    Ok(())
}

fn cmd_transliterate(
    language: Language,
    text: &str,
    resources: &Resources,
) -> Result<(), CliError> {
    let romanized = resources
        .translit
        .to_roman(text, language)
        .map_err(|e| CliError::Input(e.to_string()))?;
    warn_unmapped(&romanized.unmapped);
    println!("{}", romanized.text);
    Ok(())
}

fn warn_unmapped(unmapped: &[String]) {
    if !unmapped.is_empty() {
        eprintln!(
            "warning: {} unmapped cluster(s): {}",
            unmapped.len(),
            unmapped.join(" ")
        );
    }
}

fn cmd_audit(
    corpus_path: &Path,
    out_dir: &Path,
    strict: bool,
    include_indeterminate: bool,
    agreement: bool,
    jobs: usize,
    resources: &Resources,
) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_path).map_err(|e| CliError::Input(e.to_string()))?;
    let records = audit_entries(&corpus.entries, jobs.max(1), resources);

    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Input(format!("cannot create {}: {e}", out_dir.display())))?;
    let stem = corpus.name.clone();

    let mut verdict_lines = String::new();
    for record in &records {
        verdict_lines.push_str(&serde_json::to_string(record).expect("record serializes"));
        verdict_lines.push('\n');
    }
    let verdicts_path = out_dir.join(format!("{stem}.verdicts.jsonl"));
    write_atomic(&verdicts_path, verdict_lines.as_bytes())?;

    let report = compute_rates(&records, include_indeterminate);
    let markdown = render_report(&report, ReportFormat::Markdown);
    let json = render_report(&report, ReportFormat::Json);
    write_atomic(
        &out_dir.join(format!("{stem}.report.md")),
        markdown.as_bytes(),
    )?;
    write_atomic(
        &out_dir.join(format!("{stem}.report.json")),
        json.as_bytes(),
    )?;

    print!("{markdown}");
    eprintln!(
        "audited {} pair(s): {} biased, {} indeterminate → {}",
        records.len(),
        records
            .iter()
            .filter(|r| r.verdict == Verdict::Biased)
            .count(),
        records
            .iter()
            .filter(|r| r.verdict == Verdict::Indeterminate)
            .count(),
        verdicts_path.display(),
    );

    if agreement {
        let agreement_report =
            compare_with_human(&records).map_err(|e| CliError::Input(e.to_string()))?;
        let rendered = render_agreement(&agreement_report);
        write_atomic(
            &out_dir.join(format!("{stem}.agreement.md")),
            rendered.as_bytes(),
        )?;
        print!("{rendered}");
    }

    let indeterminate = records.iter().any(|r| r.verdict == Verdict::Indeterminate);
    if strict && indeterminate {
        return Err(CliError::Policy(
            "indeterminate verdicts present (strict mode)".into(),
        ));
    }
    Ok(())
}

/// Order-preserving parallel audit.
fn audit_entries(
    entries: &[CorpusEntry],
    jobs: usize,
    resources: &Resources,
) -> Vec<VerdictRecord> {
    if jobs <= 1 || entries.len() < 2 {
        return entries
            .iter()
            .map(|entry| VerdictRecord::new(entry, &detect_bias(&entry.pair, resources)))
            .collect();
    }
    let chunk_size = entries.len().div_ceil(jobs);
    let mut out: Vec<Vec<VerdictRecord>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = entries
            .chunks(chunk_size)
            .map(|chunk| {
                scope.spawn(move || {
                    chunk
                        .iter()
                        .map(|entry| {
                            VerdictRecord::new(entry, &detect_bias(&entry.pair, resources))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            out.push(handle.join().expect("audit worker panicked"));
        }
    });
    out.into_iter().flatten().collect()
}

fn cmd_mitigate(
    sources_path: &Path,
    language: Language,
    max_level: u8,
    out: &Path,
    backend_args: &BackendArgs,
    resources: &Resources,
) -> Result<(), CliError> {
    let config = resolve_backend_config(backend_args)?;
    let backend = backend_from_config(&config).map_err(backend_error)?;
    let sources = load_sources(sources_path)?;

    let mut lines = String::new();
    for source in &sources {
        let request = MitigationRequest {
            id: source.id.clone(),
            domain: source.domain,
            source_en: source.source_en.clone(),
            language,
            max_level,
        };
        let result = mitigate(&request, backend.as_ref(), resources).map_err(|e| match e {
            MitigateError::Backend { .. } => CliError::Backend(e.to_string()),
            other => CliError::Input(other.to_string()),
        })?;
        let entry = serde_json::json!({
            "id": result.id,
            "domain": source.domain,
            "source_en": result.source_en,
            "target_text": result.final_translation,
            "language": result.language,
            "cot_level": result.levels_used,
            "system_tag": backend.tag(),
            "levels_used": result.levels_used,
            "final_verdict": result.final_verdict,
            "stop_reason": result.stop_reason,
            "attempts": result.attempts.iter().map(|a| serde_json::json!({
                "level": a.plan.level,
                "prompt": a.plan.text,
                "translation": a.translation,
                "verdict": a.verdict.verdict,
            })).collect::<Vec<_>>(),
        });
        lines.push_str(&entry.to_string());
        lines.push('\n');
        eprintln!(
            "{}: levels_used={} final={}",
            result.id, result.levels_used, result.final_verdict
        );
    }
    write_atomic(out, lines.as_bytes())?;
    println!(
        "wrote {} mitigated pair(s) to {}",
        sources.len(),
        out.display()
    );
    Ok(())
}

struct SourceLine {
    id: String,
    domain: Domain,
    source_en: String,
}

fn load_sources(path: &Path) -> Result<Vec<SourceLine>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(line)
            .map_err(|e| CliError::Input(format!("{}:{}: {e}", path.display(), idx + 1)))?;
        let id = value["id"]
            .as_str()
            .ok_or_else(|| CliError::Input(format!("{}:{}: missing id", path.display(), idx + 1)))?
            .to_owned();
        let source_en = value["source_en"]
            .as_str()
            .ok_or_else(|| {
                CliError::Input(format!("{}:{}: missing source_en", path.display(), idx + 1))
            })?
            .to_owned();
        let domain: Domain = serde_json::from_value(value["domain"].clone()).map_err(|e| {
            CliError::Input(format!("{}:{}: bad domain: {e}", path.display(), idx + 1))
        })?;
        out.push(SourceLine {
            id,
            domain,
            source_en,
        });
    }
    Ok(out)
}

fn cmd_report(
    verdict_paths: &[PathBuf],
    format: CliFormat,
    out: Option<&Path>,
    include_indeterminate: bool,
) -> Result<(), CliError> {
    let mut records = Vec::new();
    for path in verdict_paths {
        records.extend(load_verdicts(path).map_err(|e| CliError::Input(e.to_string()))?);
    }
    let report = compute_rates(&records, include_indeterminate);
    let rendered = match format {
        CliFormat::Markdown => render_report(&report, ReportFormat::Markdown),
        CliFormat::Json => render_report(&report, ReportFormat::Json),
    };
    print!("{rendered}");
    if let Some(path) = out {
        write_atomic(path, rendered.as_bytes())?;
    }
    Ok(())
}

fn backend_error(e: BackendError) -> CliError {
    match e {
        BackendError::InvalidConfig(_) | BackendError::AuthMissing { .. } => {
            CliError::Input(e.to_string())
        }
        other => CliError::Backend(other.to_string()),
    }
}

/// Config file (key=value lines) overridden by flags.
fn resolve_backend_config(args: &BackendArgs) -> Result<BackendConfig, CliError> {
    let mut config = BackendConfig::default();
    if let Some(path) = &args.backend_config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    idx + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad =
                |msg: String| CliError::Input(format!("{}:{}: {msg}", path.display(), idx + 1));
            match key {
                "kind" => {
                    config.kind = match value {
                        "live" => BackendKind::Live,
                        "replay" => BackendKind::Replay,
                        "record" => BackendKind::Record,
                        other => return Err(bad(format!("unknown kind {other:?}"))),
                    }
                }
                "endpoint" => config.endpoint = Some(value.to_owned()),
                "model" => config.model = value.to_owned(),
                "auth_env" => config.auth_env = Some(value.to_owned()),
                "timeout_secs" => {
                    config.timeout_secs = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "max_retries" => {
                    config.max_retries = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "backoff_ms" => {
                    config.backoff_ms = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                "rate_limit_per_min" => {
                    config.rate_limit_per_min =
                        Some(value.parse().map_err(|e| bad(format!("{e}")))?)
                }
                "fixture" => config.fixture_path = Some(PathBuf::from(value)),
                "overwrite_fixtures" => {
                    config.overwrite_fixtures = value.parse().map_err(|e| bad(format!("{e}")))?
                }
                other => return Err(bad(format!("unknown key {other:?}"))),
            }
        }
    }
    if let Some(kind) = args.kind {
        config.kind = match kind {
            CliBackendKind::Live => BackendKind::Live,
            CliBackendKind::Replay => BackendKind::Replay,
            CliBackendKind::Record => BackendKind::Record,
        };
    }
    if let Some(fixture) = &args.fixture {
        config.fixture_path = Some(fixture.clone());
    }
    if let Some(endpoint) = &args.endpoint {
        config.endpoint = Some(endpoint.clone());
    }
    if let Some(model) = &args.model {
        config.model = model.clone();
    }
    if let Some(auth_env) = &args.auth_env {
        config.auth_env = Some(auth_env.clone());
    }
    if let Some(max_retries) = args.max_retries {
        config.max_retries = max_retries;
    }
    if let Some(rate) = args.rate_limit_per_min {
        config.rate_limit_per_min = Some(rate);
    }
    if args.overwrite_fixtures {
        config.overwrite_fixtures = true;
    }
    Ok(config)
}

/// Write via temp file + rename so interrupted runs never leave a half file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| {
        CliError::Input(format!("cannot create temp file in {}: {e}", dir.display()))
    })?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::Input(format!("cannot persist {}: {e}", path.display())))?;
    Ok(())
}
