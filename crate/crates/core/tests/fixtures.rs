use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use efs_core::card::{export_card, import_card, parse_card};
use efs_core::model::vocab::{Design, Judge, OutputSource, Purpose, SizeCategory};
use efs_core::model::{Dimension, Vocabulary};
use efs_core::render::{render, render_diagnostics, RenderTarget};
use efs_core::text::{from_interchange, parse_canonical, serialize_canonical, to_interchange};
use efs_core::{completeness, corpus_stats, diff, is_publishable, validate, DiffStatus, Factsheet, QuestionId};

const NAMES: [&str; 3] = ["imagenet", "humaneval", "mtbench"];

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn imported(name: &str) -> Factsheet {
    import_card(&fixture(&format!("{name}.tex"))).unwrap().factsheet
}

fn tokens<V: Vocabulary>(terms: &[efs_core::model::VocabTerm<V>]) -> Vec<V> {
    terms.iter().map(|t| t.token).collect()
}

fn codes(fs: &Factsheet) -> Vec<String> {
    validate(fs).iter().map(|d| d.code.as_string()).collect()
}

#[test]
fn imagenet_card_fields() {
    let fs = imported("imagenet");
    assert_eq!(tokens(&fs.context.purposes), [Purpose::Research, Purpose::Selection]);
    assert_eq!(fs.method.heldout, Some(true));
    assert_eq!(
        fs.method.heldout_details.as_deref(),
        Some("Test set: 100K images with labels withheld on evaluation server")
    );
    let size = fs.structure.size.as_ref().unwrap();
    assert_eq!(size.category, SizeCategory::Large);
    assert_eq!(size.count, Some(14_000_000));
    assert_eq!(tokens(&fs.method.judges), [Judge::AutoReference]);
    assert_eq!(fs.context.authors.as_deref(), Some("Priceton University"));
    assert_eq!(fs.structure.splits.len(), 3);
}

#[test]
fn humaneval_card_fields() {
    let fs = imported("humaneval");
    assert_eq!(tokens(&fs.method.judges), [Judge::AutoExecution]);
    assert_eq!(fs.method.heldout, Some(false));
    assert!(fs.structure.size.is_none());
    assert_eq!(tokens(&fs.structure.output_sources), [OutputSource::Programmatic]);
    assert_eq!(fs.context.release_date.as_deref(), Some("2021"));
    assert_eq!(
        fs.context.code_link.as_deref(),
        Some("https://github.com/openai/human-eval")
    );
}

#[test]
fn mtbench_card_fields() {
    let fs = imported("mtbench");
    assert_eq!(tokens(&fs.context.purposes), [Purpose::Research]);
    assert_eq!(tokens(&fs.method.judges), [Judge::ModelLlm]);
    assert_eq!(fs.method.judges[0].raw, "Model-based (LLM judge: GPT-4)");
    assert_eq!(fs.method.judge_details.judge_model.as_deref(), Some("GPT-4"));
    assert_eq!(fs.structure.design.as_ref().unwrap().token, Design::Dynamic);
    let size = fs.structure.size.as_ref().unwrap();
    assert_eq!((size.category, size.count), (SizeCategory::Small, Some(80)));
    assert_eq!(fs.method.heldout, Some(false));
    assert_eq!(fs.context.release_date.as_deref(), Some("2023"));
    assert_eq!(
        fs.context.code_link.as_deref(),
        Some("https://github.com/lm-sys/FastChat/tree/main/fastchat/llm_judge#mt-bench/")
    );
}

#[test]
fn card_command_inventory() {
    let commands = |name: &str| -> Vec<String> {
        parse_card(&fixture(&format!("{name}.tex")))
            .unwrap()
            .commands
            .into_iter()
            .map(|c| c.name)
            .collect()
    };
    let imagenet = commands("imagenet");
    let humaneval = commands("humaneval");
    let mtbench = commands("mtbench");
    assert_eq!(mtbench, efs_core::card::COMMANDS);
    assert_eq!(imagenet.len(), 19);
    assert!(!imagenet.contains(&"BaselineModels".to_string()));
    assert_eq!(humaneval.len(), 18);
    assert!(!humaneval.iter().any(|c| c == "Size" || c == "Splits"));
    let doc = parse_card(&fixture("humaneval.tex")).unwrap();
    assert_eq!(doc.option("date"), Some("2021"));
    for cmd in doc.commands {
        assert!(cmd.argument.matches('{').count() == cmd.argument.matches('}').count());
    }
}

#[test]
fn import_never_drops_commands() {
    for name in NAMES {
        let report = import_card(&fixture(&format!("{name}.tex"))).unwrap();
        assert!(report.factsheet.extensions.is_empty(), "{name}");
        assert!(report.factsheet.is_valid());
        assert!(report.notes.iter().all(|n| !n.is_error()));
    }
}

#[test]
fn golden_canonical_files_are_fixed_points() {
    for name in NAMES {
        let golden = fixture(&format!("{name}.efs"));
        let parsed = parse_canonical(&golden).unwrap();
        assert_eq!(serialize_canonical(&parsed), golden, "{name}");
        assert_eq!(parsed, imported(name), "{name}");
    }
}

#[test]
fn golden_interchange_files_match() {
    for name in NAMES {
        let golden = fixture(&format!("{name}.json"));
        let parsed = from_interchange(&golden).unwrap();
        assert_eq!(parsed, imported(name));
        assert_eq!(to_interchange(&parsed), golden, "{name}");
    }
}

fn token_sets(fs: &Factsheet) -> Vec<(QuestionId, BTreeSet<&'static str>)> {
    QuestionId::ALL
        .iter()
        .filter_map(|q| fs.answer(*q).map(|a| (*q, a.tokens().into_iter().collect())))
        .collect()
}

#[test]
fn card_export_import_round_trip() {
    for name in NAMES {
        let fs = imported(name);
        let again = import_card(&export_card(&fs)).unwrap().factsheet;
        assert_eq!(token_sets(&again), token_sets(&fs), "{name}");
        assert_eq!(again, fs, "{name}");
    }
}

#[test]
fn export_header_order() {
    let text = export_card(&imported("mtbench"));
    let keys: Vec<&str> = text
        .lines()
        .skip(1)
        .take_while(|l| *l != "]")
        .map(|l| l.trim().split('=').next().unwrap())
        .collect();
    assert_eq!(keys, ["title", "subtitle", "authors", "link", "code-link", "date"]);
}

#[test]
fn validator_on_fixtures() {
    let imagenet = imported("imagenet");
    assert!(codes(&imagenet).contains(&"W-T301".to_string()));
    assert!(is_publishable(&imagenet));

    let humaneval = imported("humaneval");
    let c = codes(&humaneval);
    assert!(c.contains(&"W-T302".to_string()));
    assert!(!c.contains(&"E-M102".to_string()));
    assert!(is_publishable(&humaneval));

    let mut mtbench = imported("mtbench");
    assert!(validate(&mtbench).iter().all(|d| !d.is_error()), "{:?}", codes(&mtbench));
    let report = completeness(&mtbench);
    assert_eq!(report.per_dimension[&Dimension::Method], 1.0);
    assert_eq!(report.applicable[&Dimension::Method], 5);

    mtbench.method.judges.clear();
    assert!(codes(&mtbench).contains(&"E-M001".to_string()));
    assert!(!is_publishable(&mtbench));
}

#[test]
fn corpus_on_fixtures() {
    let sheets: Vec<Factsheet> = NAMES.iter().map(|n| imported(n)).collect();
    let stats = corpus_stats(&sheets);
    assert_eq!(stats.sheet_count, 3);
    let judges: Vec<(&str, usize)> = stats.vocab_hist[&QuestionId::M1]
        .iter()
        .map(|(k, v)| (k.as_str(), *v))
        .collect();
    assert_eq!(judges, [("auto_execution", 1), ("auto_reference", 1), ("model_llm", 1)]);
    assert!((stats.fill_rate[&QuestionId::T3] - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(stats.fill_rate[&QuestionId::M2], 1.0);

    let d = diff(&sheets[1], &sheets[2]);
    let m1 = d.entry(QuestionId::M1).unwrap();
    assert_eq!(m1.status, DiffStatus::Differs);
    assert_eq!(m1.left.as_deref(), Some("auto_execution"));
    assert_eq!(m1.right.as_deref(), Some("model_llm"));
}

#[test]
fn rendering_fixtures() {
    let fs = imported("imagenet");
    let html = render(&fs, RenderTarget::Hypertext);
    let mut last = 0;
    for dim in Dimension::ALL {
        let heading = format!("<h2>{}</h2>", dim.section_title().replace('&', "&amp;"));
        let at = html.find(&heading).unwrap_or_else(|| panic!("missing {heading}"));
        assert!(at > last);
        last = at;
    }
    assert!(html.contains("<a href=\"https://ieeexplore.ieee.org/document/5206848\">"));
    assert!(html.find("<h1>ImageNet</h1>").unwrap() < html.find("<h2>").unwrap());
    let report = render_diagnostics(&validate(&fs), RenderTarget::Plainmark).unwrap();
    assert!(report.contains("W-T301"));
    assert_eq!(render(&fs, RenderTarget::Canonical), fixture("imagenet.efs"));
}
