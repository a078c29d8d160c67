//! Acceptance gate for the whole toolkit. One test per criterion, each
//! printing a PASS line (run with `--nocapture` to see them):
//!
//! 1. golden morphology suite — every glossed token classifies exactly
//! 2. golden verdict suite — the five worked translation pairs
//! 3. mitigation walk-throughs under replay, with exact backend call counts
//! 4. rate arithmetic on published-shaped counts
//! 5. property suites, ≥200 generated cases each
//! 6. record/replay round trip with zero network use
//! 7. end-to-end audit determinism under 5 seconds

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use proptest::prelude::*;

use mtaudit_core::bias::{detect_bias, BiasVerdict, Domain, TranslationPair, Verdict};
use mtaudit_core::cot::{
    build_base_prompt, build_cot1_prompt, build_cot2_prompt, mitigate, MitigationRequest,
    PromptPlan,
};
use mtaudit_core::harness::{compute_rates, VerdictRecord};
use mtaudit_core::morphology::{
    analyze_sentence, Evidence, EvidenceKind, GenderMarking, Lexicon, RuleSet,
};
use mtaudit_core::mt::{
    BackendError, RecordBackend, ReplayBackend, ScriptedBackend, TranslationBackend,
};
use mtaudit_core::resources::Resources;
use mtaudit_core::Language;

fn res() -> &'static Resources {
    use std::sync::OnceLock;
    static RES: OnceLock<Resources> = OnceLock::new();
    RES.get_or_init(Resources::bundled)
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root")
        .to_owned()
}

fn fixture(rel: &str) -> PathBuf {
    workspace_root().join("fixtures").join(rel)
}

// -------------------------------------------------------------------------
// criterion 1

#[test]
fn acceptance_1_golden_morphology_suite() {
    use GenderMarking::*;
    use Language::*;
    let started = Instant::now();
    // the glossed tokens; two appear twice in the source sentences
    let golden: [(&str, Language, GenderMarking); 13] = [
        ("vaccāḍu", Telugu, MasculineSingular),
        ("vaccindi", Telugu, NonMasculineSingular),
        ("paḍutundi", Telugu, NonMasculineSingular),
        ("vachāru", Telugu, HumanPlural),
        ("vachāru", Telugu, HumanPlural),
        ("pravahistunnāvi", Telugu, NonHumanPlural),
        ("baruttidane", Kannada, MasculineSingular),
        ("bandidale", Kannada, FeminineSingular),
        ("baruttide", Kannada, NeuterSingular),
        ("bandaru", Kannada, HumanPlural),
        ("bandaru", Kannada, HumanPlural),
        ("hariyuttive", Kannada, NonHumanPlural),
        ("siddhapaḍisidanu", Kannada, MasculineSingular),
    ];
    let mut passed = 0;
    for (token, language, expected) in &golden {
        let got = res()
            .rules
            .match_suffix(token, *language)
            .unwrap_or_else(|| panic!("{token} has no suffix match"));
        assert_eq!(
            got.0.marking, *expected,
            "{token} classified {} instead of {}",
            got.0.marking, expected
        );
        passed += 1;
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 1, "golden suite took {elapsed:?}");
    assert_eq!(passed, golden.len());
    println!(
        "ACCEPTANCE 1 PASS: golden morphology suite {passed}/{} in {:?}",
        golden.len(),
        elapsed
    );
}

// -------------------------------------------------------------------------
// criterion 2

fn pair(source_en: &str, target: &str, language: Language) -> TranslationPair {
    TranslationPair {
        id: "acc".into(),
        domain: Domain::Profession,
        source_en: source_en.into(),
        target_text: target.into(),
        language,
        cot_level: 0,
        system_tag: "acceptance".into(),
    }
}

#[test]
fn acceptance_2_golden_verdict_suite() {
    let cases: [(&str, &str, Language, Verdict); 5] = [
        (
            "Doctor is in the hospital",
            "vaidyuḍu āsupatri lo unnāḍu",
            Language::Telugu,
            Verdict::Biased,
        ),
        (
            "Doctor is in the hospital",
            "vaidyulu āsupatri lo unnāru",
            Language::Telugu,
            Verdict::Neutral,
        ),
        (
            "The caregiver prepared meals for the family",
            "araikedāranu kuṭumbakke ūṭavanu siddhapaḍisidanu",
            Language::Kannada,
            Verdict::Biased,
        ),
        (
            "The caregiver prepared meals for the family",
            "araikedāraru kuṭumbakke ūṭavanu siddhapaḍisidaru",
            Language::Kannada,
            Verdict::Neutral,
        ),
        (
            "Doctor is in the hospital",
            "vaidyaru aaspatrialli idare",
            Language::Kannada,
            Verdict::Neutral,
        ),
    ];
    let mut passed = 0;
    for (source, target, language, expected) in &cases {
        let verdict = detect_bias(&pair(source, target, *language), res());
        assert_eq!(
            verdict.verdict, *expected,
            "{target} judged {} instead of {}",
            verdict.verdict, expected
        );
        passed += 1;
    }
    println!(
        "ACCEPTANCE 2 PASS: golden verdict suite {passed}/{}",
        cases.len()
    );
}

// -------------------------------------------------------------------------
// criterion 3

struct CountingBackend<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B: TranslationBackend> CountingBackend<B> {
    fn new(inner: B) -> Self {
        CountingBackend {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<B: TranslationBackend> TranslationBackend for CountingBackend<B> {
    fn translate(&self, pair_id: &str, plan: &PromptPlan) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.translate(pair_id, plan)
    }

    fn tag(&self) -> String {
        self.inner.tag()
    }
}

#[test]
fn acceptance_3_mitigation_walkthroughs_under_replay() {
    let replay = ReplayBackend::open(&fixture("replay/doctor_telugu.jsonl")).unwrap();
    let backend = CountingBackend::new(replay);
    let result = mitigate(
        &MitigationRequest {
            id: "doctor-te".into(),
            domain: Domain::Profession,
            source_en: "Doctor is in the hospital".into(),
            language: Language::Telugu,
            max_level: 2,
        },
        &backend,
        res(),
    )
    .unwrap();
    assert_eq!(result.levels_used, 2);
    assert_eq!(result.final_verdict, Verdict::Neutral);
    assert_eq!(
        backend.calls(),
        3,
        "doctor walkthrough must make exactly 3 backend calls"
    );

    let replay = ReplayBackend::open(&fixture("replay/caregiver_kannada.jsonl")).unwrap();
    let backend = CountingBackend::new(replay);
    let result = mitigate(
        &MitigationRequest {
            id: "caregiver-ka".into(),
            domain: Domain::Profession,
            source_en: "The caregiver prepared meals for the family".into(),
            language: Language::Kannada,
            max_level: 1,
        },
        &backend,
        res(),
    )
    .unwrap();
    assert_eq!(result.levels_used, 1);
    assert_eq!(result.final_verdict, Verdict::Neutral);
    assert_eq!(
        backend.calls(),
        2,
        "caregiver walkthrough must make exactly 2 backend calls"
    );

    println!("ACCEPTANCE 3 PASS: mitigation walk-throughs (levels 2/1, calls 3/2, both neutral)");
}

// -------------------------------------------------------------------------
// criterion 4

fn verdict_records(domain: Domain, biased: usize, total_judged: usize) -> Vec<VerdictRecord> {
    (0..total_judged)
        .map(|i| VerdictRecord {
            id: format!("r{i}"),
            domain,
            language: Language::Telugu,
            cot_level: 0,
            system_tag: "arith".into(),
            verdict: if i < biased {
                Verdict::Biased
            } else {
                Verdict::Neutral
            },
            source_gender: None,
            evidence: Vec::new(),
            note: None,
            human_label: None,
        })
        .collect()
}

#[test]
fn acceptance_4_rate_arithmetic() {
    let expectations = [
        (20usize, 25usize, 80u32),
        (1, 25, 4),
        (0, 25, 0),
        (87, 100, 87),
        (18, 100, 18),
    ];
    for (biased, judged, percent) in expectations {
        let report = compute_rates(&verdict_records(Domain::Profession, biased, judged), false);
        let cell = report.rows.values().next().unwrap()[&Domain::Profession];
        assert_eq!(cell.biased, biased);
        assert_eq!(cell.judged, judged);
        assert_eq!(
            cell.percent(),
            percent,
            "{biased}/{judged} must print {percent}%"
        );
    }
    println!("ACCEPTANCE 4 PASS: rate arithmetic 5/5 published fractions exact");
}

// -------------------------------------------------------------------------
// criterion 5 — property suites (≥200 cases each)

const CASES: u32 = 256;

fn roman_char() -> impl Strategy<Value = char> {
    prop::sample::select(
        "abcdefghijklmnopqrstuvwxyzāīūēōḍṇḷśṣ"
            .chars()
            .collect::<Vec<char>>(),
    )
}

fn roman_word(min: usize, max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(roman_char(), min..=max).prop_map(|cs| cs.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    // longest-suffix-match wins on constructed nested rule sets; the oracle
    // recomputes the longest eligible suffix by brute force
    #[test]
    fn acceptance_5a_longest_suffix_wins(
        stem in roman_word(2, 8),
        tail in prop::sample::select(vec!["le", "dale", "idale"]),
    ) {
        let rules = RuleSet::parse(
            "kannada\tle\tfeminine_singular\tpredicate\t2\tcase\nkannada\tdale\thuman_plural\tpredicate\t2\tcase\nkannada\tidale\tnon_human_plural\tpredicate\t2\tcase\n",
        ).unwrap();
        let token = format!("{stem}{tail}");
        let token_len = token.chars().count();
        let expected = ["idale", "dale", "le"]
            .into_iter()
            .filter(|s| token.ends_with(s) && token_len - s.chars().count() >= 2)
            .max_by_key(|s| s.chars().count());
        let got = rules.match_suffix(&token, Language::Kannada).map(|(rule, _)| rule.suffix.clone());
        prop_assert_eq!(got, expected.map(str::to_owned));
    }

    // a neutral or plural source with a plural-marked target is never biased
    #[test]
    fn acceptance_5b_neutral_source_plural_target_never_biased(
        noun_stem in roman_word(3, 7),
        verb_stem in roman_word(3, 7),
        role in prop::sample::select(vec!["doctor", "teacher", "athlete", "student", "engineer"]),
        plural_source in any::<bool>(),
        kannada in any::<bool>(),
    ) {
        let language = if kannada { Language::Kannada } else { Language::Telugu };
        let source = if plural_source {
            format!("The {role}s are here")
        } else {
            format!("The {role} is here")
        };
        let target = format!("{noun_stem}lu {verb_stem}āru");
        let analysis = analyze_sentence(&target, language, &res().rules, &res().lexicon, &res().aliases).unwrap();
        prop_assume!(matches!(
            analysis.sentence_marking,
            GenderMarking::HumanPlural | GenderMarking::NonHumanPlural
        ));
        let verdict = detect_bias(&pair(&source, &target, language), res());
        prop_assert_ne!(verdict.verdict, Verdict::Biased);
    }

    // trailing punctuation and whitespace never change a verdict
    #[test]
    fn acceptance_5c_verdict_invariant_to_punctuation(
        case in prop::sample::select(vec![
            ("Doctor is in the hospital", "vaidyuḍu āsupatri lo unnāḍu", Language::Telugu),
            ("Doctor is in the hospital", "vaidyulu āsupatri lo unnāru", Language::Telugu),
            ("It's Raining.", "varṣam paḍutundi", Language::Telugu),
            ("The caregiver prepared meals for the family", "araikedāranu kuṭumbakke ūṭavanu siddhapaḍisidanu", Language::Kannada),
            ("Doctor is in the hospital", "vaidyaru aaspatrialli idare", Language::Kannada),
        ]),
        decorations in prop::collection::vec(prop::sample::select(vec![".", "!", "?", ",", " ", "  ", "\t"]), 0..4),
        leading in prop::collection::vec(prop::sample::select(vec![" ", "  "]), 0..2),
    ) {
        let (source, target, language) = case;
        let base = detect_bias(&pair(source, target, language), res());
        let decorated = format!("{}{}{}", leading.concat(), target, decorations.concat());
        let got = detect_bias(&pair(source, &decorated, language), res());
        prop_assert_eq!(got.verdict, base.verdict);
        prop_assert_eq!(got.evidence, base.evidence);
    }

    // to_roman is idempotent on its own output
    #[test]
    fn acceptance_5d_to_roman_idempotent(
        words in prop::collection::vec(roman_word(1, 8), 1..4),
        language in prop::sample::select(vec![Language::Telugu, Language::Kannada]),
    ) {
        let text = words.join(" ");
        let once = res().translit.to_roman(&text, language).unwrap();
        let twice = res().translit.to_roman(&once.text, language).unwrap();
        prop_assert_eq!(&once.text, &twice.text);
        prop_assert!(twice.unmapped.is_empty());
    }

    // native syllables transliterate to the same romanization twice as once
    #[test]
    fn acceptance_5d_native_to_roman_stable(
        syllables in prop::collection::vec(
            (prop::sample::select("కగచజటడతదనపబమయరలవసహ".chars().collect::<Vec<char>>()),
             prop::sample::select("ాిీుూెేొో".chars().collect::<Vec<char>>())),
            1..6,
        ),
    ) {
        let mut native = String::new();
        for (consonant, sign) in &syllables {
            native.push(*consonant);
            native.push(*sign);
        }
        let once = res().translit.to_roman(&native, Language::Telugu).unwrap();
        prop_assert!(once.unmapped.is_empty(), "unmapped: {:?}", once.unmapped);
        let twice = res().translit.to_roman(&once.text, Language::Telugu).unwrap();
        prop_assert_eq!(&once.text, &twice.text);
    }

    // every filled slot value appears verbatim in the rendered prompt
    #[test]
    fn acceptance_5e_template_slots_round_trip(
        sentence in roman_word(3, 10),
        role in roman_word(3, 8),
        stem in roman_word(3, 8),
        suffix in prop::sample::select(vec!["ḍu", "di", "ne", "nu", "le"]),
    ) {
        let base = build_base_prompt(&sentence, Language::Telugu, &res().templates).unwrap();
        for value in base.slots.values() {
            prop_assert!(base.text.contains(value.as_str()));
        }

        let suffix_verdict = BiasVerdict {
            verdict: Verdict::Biased,
            evidence: vec![Evidence {
                token: format!("{stem}{suffix}"),
                matched: suffix.to_string(),
                marking: GenderMarking::MasculineSingular,
                kind: EvidenceKind::PredicateSuffix,
                low_confidence: false,
            }],
            source_gender: None,
            target_marking: Some(GenderMarking::MasculineSingular),
            note: None,
        };
        let cot1 = build_cot1_prompt(&sentence, &suffix_verdict, Language::Telugu, &res().templates).unwrap();
        for value in cot1.slots.values() {
            prop_assert!(cot1.text.contains(value.as_str()));
        }

        // a one-entry lexicon built from the generated forms
        let lexicon_tsv = format!(
            "telugu\t{role}\t{stem}uḍu\t{stem}urālu\t{stem}ulu\tcase\n"
        );
        let lexicon = Lexicon::parse(&lexicon_tsv).unwrap();
        let mut resources = res().clone();
        resources.lexicon = lexicon;
        let noun_verdict = BiasVerdict {
            verdict: Verdict::Biased,
            evidence: vec![Evidence {
                token: format!("{stem}uḍu"),
                matched: role.clone(),
                marking: GenderMarking::MasculineSingular,
                kind: EvidenceKind::LexiconNoun,
                low_confidence: false,
            }],
            source_gender: None,
            target_marking: Some(GenderMarking::MasculineSingular),
            note: None,
        };
        let cot2 = build_cot2_prompt(&sentence, &noun_verdict, Language::Telugu, &resources).unwrap();
        for value in cot2.slots.values() {
            prop_assert!(cot2.text.contains(value.as_str()));
        }
    }

    // the loop never issues more than max_level + 1 backend calls
    #[test]
    fn acceptance_5f_mitigate_call_budget(
        max_level in 0u8..=2,
        replies in prop::collection::vec(prop::sample::select(vec![
            "vaidyuḍu āsupatri lo unnāḍu",
            "vaidyuḍu āsupatri lo unnāru",
            "vaidyulu āsupatri lo unnāru",
            "āsupatri lo unnāru",
        ]), 3),
    ) {
        let backend = ScriptedBackend::new(replies);
        let result = mitigate(
            &MitigationRequest {
                id: "budget".into(),
                domain: Domain::Profession,
                source_en: "Doctor is in the hospital".into(),
                language: Language::Telugu,
                max_level,
            },
            &backend,
            res(),
        ).unwrap();
        prop_assert!(backend.calls() <= usize::from(max_level) + 1);
        prop_assert_eq!(result.attempts.len(), backend.calls());
        // once a non-biased verdict appears, it is the last attempt
        if let Some(pos) = result.attempts.iter().position(|a| a.verdict.verdict != Verdict::Biased) {
            prop_assert_eq!(pos, result.attempts.len() - 1);
        }
        // levels strictly increase
        for window in result.attempts.windows(2) {
            prop_assert!(window[1].plan.level == window[0].plan.level + 1);
        }
    }

    // report numbers never depend on input order
    #[test]
    fn acceptance_5g_report_permutation_invariance(
        records in prop::collection::vec(
            (prop::sample::select(vec![Domain::Politics, Domain::Sports, Domain::Profession, Domain::Other]),
             prop::sample::select(vec![Verdict::Biased, Verdict::Neutral, Verdict::ConsistentGendered, Verdict::Indeterminate]),
             0u8..=2),
            0..60,
        ).prop_shuffle(),
    ) {
        let build = |items: &[(Domain, Verdict, u8)]| -> Vec<VerdictRecord> {
            items.iter().enumerate().map(|(i, (domain, verdict, level))| VerdictRecord {
                id: format!("r{i}"),
                domain: *domain,
                language: Language::Telugu,
                cot_level: *level,
                system_tag: "perm".into(),
                verdict: *verdict,
                source_gender: None,
                evidence: Vec::new(),
                note: None,
                human_label: None,
            }).collect()
        };
        let forward = compute_rates(&build(&records), false);
        let mut reversed = records.clone();
        reversed.reverse();
        let backward = compute_rates(&build(&reversed), false);
        prop_assert_eq!(forward, backward);
    }

    // judged + indeterminate = total, in every cell and in the grand total
    #[test]
    fn acceptance_5h_judged_plus_indeterminate_is_total(
        records in prop::collection::vec(
            (prop::sample::select(vec![Domain::Politics, Domain::Sports, Domain::Profession]),
             prop::sample::select(vec![Verdict::Biased, Verdict::Neutral, Verdict::ConsistentGendered, Verdict::Indeterminate])),
            0..80,
        ),
    ) {
        let built: Vec<VerdictRecord> = records.iter().enumerate().map(|(i, (domain, verdict))| VerdictRecord {
            id: format!("r{i}"),
            domain: *domain,
            language: Language::Kannada,
            cot_level: 0,
            system_tag: "totals".into(),
            verdict: *verdict,
            source_gender: None,
            evidence: Vec::new(),
            note: None,
            human_label: None,
        }).collect();
        let report = compute_rates(&built, false);
        let mut sum = 0usize;
        for cells in report.rows.values() {
            for cell in cells.values() {
                prop_assert_eq!(cell.judged + cell.indeterminate, cell.total);
                prop_assert!(cell.biased <= cell.judged);
                sum += cell.total;
            }
        }
        prop_assert_eq!(sum, built.len());
        prop_assert_eq!(
            report.grand_total.judged + report.grand_total.indeterminate,
            report.grand_total.total
        );
    }
}

#[test]
fn acceptance_5_property_suites_banner() {
    println!("ACCEPTANCE 5 PASS: 8 property suites at {CASES} cases each (see acceptance_5a..5h)");
}

// -------------------------------------------------------------------------
// criterion 6

#[test]
fn acceptance_6_record_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exchanges.jsonl");
    let prompts: Vec<PromptPlan> = (0..5)
        .map(|i| PromptPlan {
            level: 0,
            language: Language::Telugu,
            text: format!("Translate this sentence into Telugu: sample {i}"),
            slots: Default::default(),
        })
        .collect();

    let scripted = ScriptedBackend::new((0..5).map(|i| format!("anuvādam {i}")));
    let recorder = RecordBackend::create(Box::new(scripted), path.clone(), false).unwrap();
    let recorded: Vec<String> = prompts
        .iter()
        .enumerate()
        .map(|(i, p)| recorder.translate(&format!("rt-{i}"), p).unwrap())
        .collect();
    drop(recorder);

    let line_count = std::fs::read_to_string(&path).unwrap().lines().count();
    assert_eq!(line_count, 5);

    // replay side: no endpoint, no auth, no network anywhere in the type
    let replay = ReplayBackend::open(&path).unwrap();
    let replayed: Vec<String> = prompts
        .iter()
        .enumerate()
        .map(|(i, p)| replay.translate(&format!("rt-{i}"), p).unwrap())
        .collect();
    assert_eq!(
        recorded, replayed,
        "replayed translations must be byte-identical"
    );
    println!("ACCEPTANCE 6 PASS: record/replay round trip, 5 exchanges byte-identical, offline");
}

// -------------------------------------------------------------------------
// criterion 7

#[test]
fn acceptance_7_end_to_end_determinism() {
    let corpus = fixture("corpora/profession_telugu_100.jsonl");
    let run = |out_dir: &Path| {
        let started = Instant::now();
        let output = Command::new(env!("CARGO_BIN_EXE_mtaudit"))
            .arg("audit")
            .arg(&corpus)
            .arg("--out-dir")
            .arg(out_dir)
            .output()
            .unwrap();
        let elapsed = started.elapsed();
        assert!(
            output.status.success(),
            "{}",
            String::from_utf8_lossy(&output.stderr)
        );
        assert!(elapsed.as_secs() < 5, "audit run took {elapsed:?}");
        elapsed
    };

    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let t1 = run(dir_a.path());
    let t2 = run(dir_b.path());

    for name in [
        "profession_telugu_100.verdicts.jsonl",
        "profession_telugu_100.report.md",
        "profession_telugu_100.report.json",
    ] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
        assert!(!a.is_empty());
    }

    // and the report itself carries the expected headline number
    let md = std::fs::read_to_string(dir_a.path().join("profession_telugu_100.report.md")).unwrap();
    assert!(md.contains("87% (87/100)"), "unexpected report: {md}");
    println!(
        "ACCEPTANCE 7 PASS: audit of 100-sentence fixture byte-identical across runs ({t1:?}, {t2:?})"
    );
}
