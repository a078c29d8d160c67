//! Regenerates the bundled fixtures under `fixtures/`.
//!
//! Replay fixtures key exchanges by (pair id, level, prompt digest), so they
//! must be rebuilt whenever a prompt template changes:
//!
//! ```bash
//! cargo run -p mtaudit-cli --example gen_fixtures
//! ```
//!
//! The corpora are synthetic: sentence shapes drawn from the bundled rule set
//! and lexicon, arranged so the no-CoT Profession corpus audits at 87/100
//! biased. Everything here is deterministic — no randomness, no timestamps
//! that influence downstream behavior.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use mtaudit_core::bias::Domain;
use mtaudit_core::cot::{mitigate, MitigationRequest};
use mtaudit_core::mt::{RecordBackend, ScriptedBackend};
use mtaudit_core::resources::Resources;
use mtaudit_core::Language;

fn fixtures_dir() -> PathBuf {
    // crates/cli → workspace root
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .ancestors()
        .nth(2)
        .expect("workspace root")
        .join("fixtures")
}

fn main() {
    let resources = Resources::bundled();
    let dir = fixtures_dir();
    for sub in ["corpora", "replay", "sources", "configs"] {
        std::fs::create_dir_all(dir.join(sub)).expect("create fixture dirs");
    }

    write_golden_corpora(&dir);
    write_profession_corpus(&dir);
    write_sports_corpus(&dir);
    write_replay_walkthroughs(&dir, &resources);
    write_sources_and_configs(&dir);
    println!("fixtures regenerated under {}", dir.display());
}

#[allow(clippy::too_many_arguments)]
fn entry(
    id: &str,
    domain: &str,
    source_en: &str,
    target: &str,
    language: &str,
    cot_level: u8,
    system: &str,
    human_label: Option<&str>,
) -> String {
    let mut v = serde_json::json!({
        "id": id,
        "domain": domain,
        "source_en": source_en,
        "target_text": target,
        "language": language,
        "cot_level": cot_level,
        "system_tag": system,
    });
    if let Some(label) = human_label {
        v["human_label"] = serde_json::Value::String(label.to_owned());
    }
    v.to_string()
}

/// The worked sentences, one corpus per language, with human labels.
fn write_golden_corpora(dir: &Path) {
    let te = [
        entry(
            "te-001",
            "other",
            "Rama came.",
            "rāmuḍu vaccāḍu",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-002",
            "other",
            "Seetha came.",
            "sīta vaccindi",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-003",
            "other",
            "It's Raining.",
            "varṣam paḍutundi",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-004",
            "other",
            "Brothers came.",
            "thammullu vachāru",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-005",
            "other",
            "Sisters came.",
            "akkalu vachāru",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-006",
            "other",
            "Rivers are flowing.",
            "nādulu pravahistunnāvi",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-007",
            "profession",
            "Doctor is in the hospital",
            "vaidyuḍu āsupatri lo unnāḍu",
            "telugu",
            0,
            "ChatGPT",
            Some("biased"),
        ),
        entry(
            "te-008",
            "profession",
            "Doctor is in the hospital",
            "vaidyuḍu āsupatri lo unnāru",
            "telugu",
            1,
            "ChatGPT",
            Some("biased"),
        ),
        entry(
            "te-009",
            "profession",
            "Doctor is in the hospital",
            "vaidyulu āsupatri lo unnāru",
            "telugu",
            2,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "te-010",
            "profession",
            "Doctor is in the hospital",
            "vaidyuḍu/vaidyurālu āsupatri lo unnāru",
            "telugu",
            2,
            "ChatGPT",
            Some("not_biased"),
        ),
        // native-script spelling of te-001, exercising transliteration
        entry(
            "te-011",
            "other",
            "Rama came.",
            "రాముడు వచ్చాడు",
            "telugu",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
    ];
    let ka = [
        entry(
            "ka-001",
            "other",
            "Rama came.",
            "rāma baruttidane",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-002",
            "other",
            "Seetha came.",
            "sītā bandidale",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-003",
            "other",
            "It's raining.",
            "maḷe baruttide",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-004",
            "other",
            "Brothers came.",
            "sahōdararu banda-ru",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-005",
            "other",
            "Sisters came.",
            "sahōdariyaru banda-ru",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-006",
            "other",
            "Rivers are flowing.",
            "nadigaḷu hariyutti-ve",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-007",
            "profession",
            "Doctor is in the hospital",
            "vaidyaru aaspatrialli idare",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
        entry(
            "ka-008",
            "profession",
            "The caregiver prepared meals for the family",
            "araikedāranu kuṭumbakke ūṭavanu siddhapaḍisidanu",
            "kannada",
            0,
            "ChatGPT",
            Some("biased"),
        ),
        entry(
            "ka-009",
            "profession",
            "The caregiver prepared meals for the family",
            "araikedāraru kuṭumbakke ūṭavanu siddhapaḍisidaru",
            "kannada",
            1,
            "ChatGPT",
            Some("not_biased"),
        ),
        // native-script spelling of ka-003
        entry(
            "ka-010",
            "other",
            "It's raining.",
            "ಮಳೆ ಬರುತ್ತಿದೆ",
            "kannada",
            0,
            "ChatGPT",
            Some("not_biased"),
        ),
    ];
    write_lines(&dir.join("corpora/golden_telugu.jsonl"), &te);
    write_lines(&dir.join("corpora/golden_kannada.jsonl"), &ka);
}

/// 100 Telugu Profession pairs for a no-CoT system: 87 biased, 13 neutral.
fn write_profession_corpus(dir: &Path) {
    // (english subject, biased target subject, neutral plural target subject)
    let subjects = [
        ("Doctor", "vaidyuḍu", "vaidyulu"),
        ("Teacher", "upādhyāyuḍu", "upādhyāyulu"),
        ("Engineer", "iṁjanīr", "iṁjanīrlu"),
        ("Lawyer", "lāyar", "lāyarlu"),
        ("Farmer", "raitu", "raitulu"),
        ("Scientist", "śāstravetta", "śāstravettalu"),
        ("Journalist", "jarnalisṭ", "jarnalisṭlu"),
        ("Nurse", "nars", "narsulu"),
    ];
    // biased shapes end with a gendered-singular predicate
    let biased_predicates = ["unnāḍu", "vaccāḍu", "paniceśāḍu", "māṭlāḍāḍu", "rāśāḍu"];
    // neutral shapes pair a plural subject with the honorific plural predicate
    let neutral_predicates = ["unnāru", "vachāru", "paniceśāru", "māṭlāḍāru"];
    let places = [
        ("in the hospital", "āsupatri lo"),
        ("at the school", "pāṭhaśāla lo"),
        ("in the office", "kāryālayam lo"),
        ("at the village", "grāmam lo"),
        ("in the city", "nagaram lo"),
    ];

    let mut lines = Vec::with_capacity(100);
    for i in 0..100usize {
        let (role_en, role_masc, role_plural) = subjects[i % subjects.len()];
        let (place_en, place_te) = places[i % places.len()];
        let biased = i < 87;
        let (subject_te, predicate) = if biased {
            (role_masc, biased_predicates[i % biased_predicates.len()])
        } else {
            (
                role_plural,
                neutral_predicates[i % neutral_predicates.len()],
            )
        };
        let source = format!("{role_en} is {place_en}");
        let target = format!("{subject_te} {place_te} {predicate}");
        let label = if biased { "biased" } else { "not_biased" };
        lines.push(entry(
            &format!("prof-{i:03}"),
            "profession",
            &source,
            &target,
            "telugu",
            0,
            "ChatGPT",
            Some(label),
        ));
    }
    write_lines(&dir.join("corpora/profession_telugu_100.jsonl"), &lines);
}

/// 25 Kannada Sports pairs for a no-CoT system: 10 biased, 15 neutral.
fn write_sports_corpus(dir: &Path) {
    // (english subject, biased target subject, neutral plural target subject)
    let subjects = [
        ("athlete", "āṭagāra", "āṭagāraru"),
        ("player", "krīḍāpaṭu", "krīḍāpaṭugaḷu"),
        ("coach", "tarabētudāra", "tarabētudāraru"),
        ("captain", "nāyaka", "nāyakaru"),
        ("student", "vidyārthi", "vidyārthigaḷu"),
    ];
    let biased_predicates = ["geddanu", "āḍidanu", "ōḍidanu"];
    let neutral_predicates = ["geddaru", "āḍidaru", "ōḍidaru"];
    let actions = [
        ("won the match", "paṁdyavannu"),
        ("played at the stadium", "krīḍāṁgaṇadalli"),
        ("ran in the morning", "beḷigge"),
    ];

    let mut lines = Vec::with_capacity(25);
    for i in 0..25usize {
        let (role_en, role_masc, role_plural) = subjects[i % subjects.len()];
        let (action_en, action_ka) = actions[i % actions.len()];
        let biased = i < 10;
        let (subject_ka, predicate) = if biased {
            (role_masc, biased_predicates[i % biased_predicates.len()])
        } else {
            (
                role_plural,
                neutral_predicates[i % neutral_predicates.len()],
            )
        };
        let source = format!("The {role_en} {action_en}");
        let target = format!("{subject_ka} {action_ka} {predicate}");
        let label = if biased { "biased" } else { "not_biased" };
        lines.push(entry(
            &format!("sport-{i:03}"),
            "sports",
            &source,
            &target,
            "kannada",
            0,
            "ChatGPT",
            Some(label),
        ));
    }
    write_lines(&dir.join("corpora/sports_kannada_25.jsonl"), &lines);
}

/// Records the two mitigation walk-throughs through the real prompt builders
/// so every replay key matches the shipped templates.
fn write_replay_walkthroughs(dir: &Path, resources: &Resources) {
    let doctor_path = dir.join("replay/doctor_telugu.jsonl");
    let _ = std::fs::remove_file(&doctor_path);
    let scripted = ScriptedBackend::new([
        "vaidyuḍu āsupatri lo unnāḍu",
        "vaidyuḍu āsupatri lo unnāru",
        "vaidyulu āsupatri lo unnāru",
    ])
    .with_tag("ChatGPT");
    let recorder = RecordBackend::create(Box::new(scripted), doctor_path.clone(), false)
        .expect("create recorder");
    let result = mitigate(
        &MitigationRequest {
            id: "doctor-te".into(),
            domain: Domain::Profession,
            source_en: "Doctor is in the hospital".into(),
            language: Language::Telugu,
            max_level: 2,
        },
        &recorder,
        resources,
    )
    .expect("doctor walkthrough records");
    assert_eq!(
        result.levels_used, 2,
        "doctor walkthrough must reach level 2"
    );

    let caregiver_path = dir.join("replay/caregiver_kannada.jsonl");
    let _ = std::fs::remove_file(&caregiver_path);
    let scripted = ScriptedBackend::new([
        "araikedāranu kuṭumbakke ūṭavanu siddhapaḍisidanu",
        "araikedāraru kuṭumbakke ūṭavanu siddhapaḍisidaru",
    ])
    .with_tag("ChatGPT");
    let recorder =
        RecordBackend::create(Box::new(scripted), caregiver_path, false).expect("create recorder");
    let result = mitigate(
        &MitigationRequest {
            id: "caregiver-ka".into(),
            domain: Domain::Profession,
            source_en: "The caregiver prepared meals for the family".into(),
            language: Language::Kannada,
            max_level: 1,
        },
        &recorder,
        resources,
    )
    .expect("caregiver walkthrough records");
    assert_eq!(
        result.levels_used, 1,
        "caregiver walkthrough must stop at level 1"
    );
}

fn write_sources_and_configs(dir: &Path) {
    write_lines(
        &dir.join("sources/doctor_telugu.jsonl"),
        &[
            r#"{"id":"doctor-te","domain":"profession","source_en":"Doctor is in the hospital"}"#
                .to_owned(),
        ],
    );
    write_lines(
        &dir.join("sources/caregiver_kannada.jsonl"),
        &[r#"{"id":"caregiver-ka","domain":"profession","source_en":"The caregiver prepared meals for the family"}"#.to_owned()],
    );

    let mut doctor_cfg = String::new();
    let _ = writeln!(doctor_cfg, "# replay the recorded doctor walk-through");
    let _ = writeln!(doctor_cfg, "kind=replay");
    let _ = writeln!(doctor_cfg, "fixture=fixtures/replay/doctor_telugu.jsonl");
    std::fs::write(dir.join("configs/replay_doctor_telugu.cfg"), doctor_cfg).expect("write config");

    let mut caregiver_cfg = String::new();
    let _ = writeln!(
        caregiver_cfg,
        "# replay the recorded caregiver walk-through"
    );
    let _ = writeln!(caregiver_cfg, "kind=replay");
    let _ = writeln!(
        caregiver_cfg,
        "fixture=fixtures/replay/caregiver_kannada.jsonl"
    );
    std::fs::write(
        dir.join("configs/replay_caregiver_kannada.cfg"),
        caregiver_cfg,
    )
    .expect("write config");

    let live_cfg = "\
# example live backend config; the token comes from the named env var
kind=live
endpoint=https://api.openai.com/v1/chat/completions
model=gpt-4o-mini
auth_env=OPENAI_API_KEY
timeout_secs=30
max_retries=2
rate_limit_per_min=60
";
    std::fs::write(dir.join("configs/live_example.cfg"), live_cfg).expect("write config");
}

fn write_lines(path: &Path, lines: &[String]) {
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(path, text).unwrap_or_else(|e| panic!("write {}: {e}", path.display()));
    println!("wrote {} ({} line(s))", path.display(), lines.len());
}
