//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Expected values are written out literally or recomputed here from the
//! raw data, never taken from the function under test.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use efs_core::card::{export_card, import_card};
use efs_core::model::{Dimension, QuestionId, Vocabulary};
use efs_core::testing::{arb_factsheet, transplant};
use efs_core::{
    catalog, completeness, corpus_stats, diff, empty_factsheet, parse_canonical,
    serialize_canonical, validate, DiffStatus, Factsheet, Severity,
};
use efs_service::{router, Store};
use http_body_util::BodyExt;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};
use serde_json::Value;
use tower::ServiceExt;

type Check = Result<(), String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn config() -> Config {
    Config {
        cases: 1000,
        failure_persistence: None,
        ..Config::default()
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

macro_rules! ensure_eq {
    ($left:expr, $right:expr) => {{
        let (l, r) = (&$left, &$right);
        if l != r {
            return Err(format!("{} = {:?}, expected {:?}", stringify!($left), l, r));
        }
    }};
}

const HEADINGS: [&str; 5] = [
    "Basic Information",
    "What Does It Evaluate",
    "How Is It Structured",
    "How Does It Work",
    "Quality &amp; Reliability",
];

const FIXTURES: [&str; 3] = ["imagenet", "humaneval", "mtbench"];

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn read(name: &str) -> String {
    fs::read_to_string(fixture_dir().join(name)).unwrap()
}

fn imported(name: &str) -> Factsheet {
    import_card(&read(&format!("{name}.tex"))).unwrap().factsheet
}

fn tokens<V: Vocabulary>(terms: &[efs_core::model::VocabTerm<V>]) -> BTreeSet<&'static str> {
    terms.iter().map(|t| t.token.token()).collect()
}

fn set(items: &[&'static str]) -> BTreeSet<&'static str> {
    items.iter().copied().collect()
}

fn fixture_fidelity() -> Check {
    let imagenet = imported("imagenet");
    ensure_eq!(tokens(&imagenet.context.purposes), set(&["research", "selection"]));
    ensure_eq!(imagenet.method.heldout, Some(true));
    ensure_eq!(imagenet.structure.size.as_ref().and_then(|s| s.count), Some(14_000_000));
    ensure_eq!(tokens(&imagenet.method.judges), set(&["auto_reference"]));

    let humaneval = imported("humaneval");
    ensure_eq!(tokens(&humaneval.method.judges), set(&["auto_execution"]));
    ensure_eq!(humaneval.method.heldout, Some(false));
    ensure!(humaneval.structure.size.is_none(), "HumanEval has a size answer");
    ensure_eq!(tokens(&humaneval.structure.output_sources), set(&["programmatic"]));

    let mtbench = imported("mtbench");
    ensure_eq!(tokens(&mtbench.method.judges), set(&["model_llm"]));
    ensure_eq!(mtbench.method.judge_details.judge_model.as_deref(), Some("GPT-4"));
    ensure_eq!(mtbench.structure.design.as_ref().map(|d| d.token.token()), Some("dynamic"));
    let size = mtbench.structure.size.as_ref().ok_or("MT-Bench has no size")?;
    ensure_eq!((size.category.token(), size.count), ("small", Some(80)));
    ensure_eq!(mtbench.context.release_date.as_deref(), Some("2023"));
    Ok(())
}

fn section_sizes(ids: impl Iterator<Item = QuestionId>) -> Vec<usize> {
    let mut counts = [0usize; 5];
    for q in ids {
        let i = "CSTMA".find(&q.as_str()[..1]).unwrap();
        counts[i] += 1;
    }
    counts.to_vec()
}

async fn call(app: &axum::Router, req: Request<Body>) -> (StatusCode, String) {
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Runtime::new().unwrap()
}

fn catalog_contract() -> Check {
    let cat = catalog();
    ensure_eq!(cat.questions.len(), 27);
    ensure_eq!(cat.mandatory().count(), 15);
    ensure_eq!(cat.predicates().len(), 2);
    ensure_eq!(section_sizes(cat.questions.iter().map(|q| q.id)), vec![7, 4, 6, 5, 5]);
    let order: Vec<Dimension> = cat.questions.iter().map(|q| q.section).collect();
    ensure!(order.windows(2).all(|w| w[0] <= w[1]), "sections out of order");

    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(Store::open(dir.path()).unwrap()));
    let (status, body) = runtime().block_on(call(
        &app,
        Request::get("/api/v1/schema").body(Body::empty()).unwrap(),
    ));
    ensure_eq!(status, StatusCode::OK);
    let doc: Value = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    let questions = doc["questions"].as_array().ok_or("no questions array")?;
    ensure_eq!(questions.len(), 27);
    ensure_eq!(questions.iter().filter(|q| q["mandatory"] == true).count(), 15);
    let conditional = questions
        .iter()
        .flat_map(|q| std::iter::once(q).chain(q["sub_answers"].as_array().into_iter().flatten()))
        .filter(|q| q.get("visible_if").is_some())
        .count();
    ensure_eq!(conditional, 2);
    let sections: Vec<(String, usize)> = doc["sections"]
        .as_array()
        .ok_or("no sections")?
        .iter()
        .map(|s| (s["title"].as_str().unwrap_or("").to_string(), s["questions"].as_array().map_or(0, Vec::len)))
        .collect();
    let expected: Vec<(String, usize)> = HEADINGS
        .iter()
        .map(|h| h.replace("&amp;", "&"))
        .zip([7, 4, 6, 5, 5])
        .collect();
    ensure_eq!(sections, expected);
    Ok(())
}

fn round_trips() -> Check {
    let mut runner = TestRunner::new(config());
    let cases = std::cell::Cell::new(0);
    runner
        .run(&arb_factsheet(), |fs| {
            cases.set(cases.get() + 1);
            let back = parse_canonical(&serialize_canonical(&fs));
            proptest::prop_assert_eq!(back, Ok(fs));
            Ok(())
        })
        .map_err(|e| format!("canonical round trip: {e}"))?;
    ensure!(cases.get() >= 1000, "only {} generated factsheets", cases.get());

    for name in FIXTURES {
        let golden = read(&format!("{name}.efs"));
        let parsed = parse_canonical(&golden).map_err(|e| format!("{name}: {e:?}"))?;
        ensure!(serialize_canonical(&parsed) == golden, "{name}.efs is not a fixed point");
    }

    for name in FIXTURES {
        let fs = imported(name);
        let back = import_card(&export_card(&fs)).map_err(|e| format!("{name}: {e:?}"))?.factsheet;
        for q in QuestionId::ALL {
            let before: Option<BTreeSet<_>> = fs.answer(q).map(|a| a.tokens().into_iter().collect());
            let after: Option<BTreeSet<_>> = back.answer(q).map(|a| a.tokens().into_iter().collect());
            ensure!(before == after, "{name} {q}: {before:?} became {after:?}");
        }
    }
    Ok(())
}

fn error_codes(fs: &Factsheet) -> Vec<String> {
    validate(fs)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.code.as_string())
        .collect()
}

fn all_codes(fs: &Factsheet) -> Vec<String> {
    validate(fs).into_iter().map(|d| d.code.as_string()).collect()
}

fn validator_behaviour() -> Check {
    let imagenet = imported("imagenet");
    ensure!(all_codes(&imagenet).contains(&"W-T301".into()), "ImageNet lacks W-T301");
    ensure_eq!(error_codes(&imagenet), Vec::<String>::new());

    let humaneval = imported("humaneval");
    ensure!(all_codes(&humaneval).contains(&"W-T302".into()), "HumanEval lacks W-T302");
    ensure_eq!(error_codes(&humaneval), Vec::<String>::new());

    ensure_eq!(error_codes(&imported("mtbench")), Vec::<String>::new());

    let diags = validate(&empty_factsheet());
    let errors: BTreeSet<QuestionId> = diags
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .filter_map(|d| d.question_id)
        .collect();
    let error_count = diags.iter().filter(|d| d.severity == Severity::Error).count();
    let mandatory: BTreeSet<QuestionId> = catalog().questions.iter().filter(|q| q.mandatory).map(|q| q.id).collect();
    ensure_eq!(error_count, 15);
    ensure_eq!(errors, mandatory);

    let mut synthetic = imported("mtbench");
    synthetic.method.judge_details.judge_model = None;
    ensure!(error_codes(&synthetic).contains(&"E-M101".into()), "no E-M101: {:?}", all_codes(&synthetic));
    Ok(())
}

fn method_ratio(fs: &Factsheet) -> f64 {
    // independent recount: answered over applicable in the method section
    let applicable: Vec<QuestionId> = fs
        .applicable_questions()
        .filter(|q| q.dimension() == Dimension::Method)
        .collect();
    let answered = applicable.iter().filter(|q| fs.is_answered(**q)).count();
    answered as f64 / applicable.len() as f64
}

fn completeness_properties() -> Check {
    let mut runner = TestRunner::new(config());
    let strategy = (arb_factsheet(), arb_factsheet(), 0..QuestionId::ALL.len());
    let empty = empty_factsheet();
    let mut violations = Vec::new();
    for _ in 0..1000 {
        let (mut base, donor, start) = strategy.new_tree(&mut runner).unwrap().current();
        let Some(q) = (0..27)
            .map(|i| QuestionId::ALL[(start + i) % 27])
            .find(|q| donor.is_answered(*q))
        else {
            continue;
        };
        transplant(&empty, &mut base, q);
        let before = completeness(&base);
        let mut after_fs = base.clone();
        transplant(&donor, &mut after_fs, q);
        let after = completeness(&after_fs);
        let regressed = Dimension::ALL
            .iter()
            .any(|d| after.per_dimension[d] < before.per_dimension[d])
            || after.overall < before.overall;
        if regressed {
            violations.push(q);
        }
    }
    ensure!(violations.is_empty(), "{} monotonicity violations: {violations:?}", violations.len());

    let mut fs = empty_factsheet();
    fs.method.judges = efs_core::model::map_terms("auto_reference").map_err(|e| e.to_string())?;
    fs.method.protocol = vec!["score outputs".into()];
    let before = completeness(&fs).per_dimension[&Dimension::Method];
    ensure_eq!(before, method_ratio(&fs));
    fs.method.judges.extend(efs_core::model::map_terms("LLM judge").map_err(|e| e.to_string())?);
    ensure!(tokens(&fs.method.judges).contains("model_llm"), "mapping missed model_llm");
    let after = completeness(&fs).per_dimension[&Dimension::Method];
    ensure_eq!(after, method_ratio(&fs));
    ensure!(after < before, "Method ratio went from {before} to {after}");
    Ok(())
}

fn corpus_analytics() -> Check {
    let sheets: Vec<Factsheet> = FIXTURES.iter().map(|n| imported(n)).collect();
    let stats = corpus_stats(&sheets);

    let mut expected_hist: BTreeMap<String, usize> = BTreeMap::new();
    for fs in &sheets {
        for t in &fs.method.judges {
            *expected_hist.entry(t.token.token().to_string()).or_default() += 1;
        }
    }
    let literal: BTreeMap<String, usize> = [("auto_reference", 1), ("auto_execution", 1), ("model_llm", 1)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    ensure_eq!(expected_hist, literal);
    ensure_eq!(stats.vocab_hist.get(&QuestionId::M1).cloned(), Some(literal));

    let with_size = sheets.iter().filter(|fs| fs.structure.size.is_some()).count();
    ensure_eq!(with_size, 2);
    let t3 = stats.fill_rate.get(&QuestionId::T3).copied().ok_or("no T3 fill rate")?;
    ensure!((t3 - 2.0 / 3.0).abs() < 1e-12, "fill_rate(T3) = {t3}");

    let d = diff(&sheets[1], &sheets[2]);
    let m1 = d.entry(QuestionId::M1).ok_or("no M1 entry")?;
    ensure_eq!(m1.status, DiffStatus::Differs);
    Ok(())
}

fn efs(args: &[&str], cwd: &Path) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_efs"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap_or(-1)
}

fn end_to_end() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let card = fixture_dir().join("imagenet.tex");
    ensure_eq!(efs(&["import-card", card.to_str().unwrap(), "-o", "imagenet.efs"], cwd), 0);
    ensure_eq!(efs(&["validate", "imagenet.efs"], cwd), 0);
    ensure_eq!(efs(&["render", "imagenet.efs", "--target", "hypertext", "-o", "imagenet.html"], cwd), 0);
    let html = fs::read_to_string(cwd.join("imagenet.html")).map_err(|e| e.to_string())?;
    let mut last = 0;
    for h in HEADINGS {
        let at = html.find(h).ok_or_else(|| format!("heading `{h}` missing"))?;
        ensure!(at >= last, "heading `{h}` out of order");
        last = at;
    }

    ensure_eq!(efs(&["new", "empty"], cwd), 0);
    ensure_eq!(efs(&["validate", "empty.efs"], cwd), 1);
    fs::write(cwd.join("torn.efs"), "#%EFS 1.0\n[context]\ntitle = \"unterminated\n").unwrap();
    ensure_eq!(efs(&["validate", "torn.efs"], cwd), 2);
    ensure_eq!(efs(&["validate", "absent.efs"], cwd), 3);
    ensure_eq!(efs(&["no-such-command"], cwd), 3);

    let store_dir = cwd.join("store");
    let app = router(Arc::new(Store::open(&store_dir).map_err(|e| e.to_string())?));
    let body = fs::read_to_string(cwd.join("imagenet.efs")).unwrap();
    let put = |if_match: Option<&str>| {
        let mut r = Request::put("/api/v1/factsheets/imagenet-2009").header("content-type", "text/x-efs");
        if let Some(m) = if_match {
            r = r.header("if-match", m);
        }
        r.body(Body::from(body.clone())).unwrap()
    };
    let rt = runtime();
    let (s1, b1) = rt.block_on(call(&app, put(None)));
    ensure_eq!(s1, StatusCode::OK);
    let first: Value = serde_json::from_str(&b1).map_err(|e| e.to_string())?;
    ensure_eq!(first["revision"], Value::from(1));
    let (s2, b2) = rt.block_on(call(
        &app,
        Request::get("/api/v1/factsheets/imagenet-2009").body(Body::empty()).unwrap(),
    ));
    ensure_eq!(s2, StatusCode::OK);
    let got: Value = serde_json::from_str(&b2).map_err(|e| e.to_string())?;
    let expected = serde_json::to_value(parse_canonical(&body).unwrap()).unwrap();
    ensure!(got["factsheet"] == expected, "GET returned a different factsheet");
    let (s3, _) = rt.block_on(call(&app, put(Some("1"))));
    ensure_eq!(s3, StatusCode::OK);
    let (s4, b4) = rt.block_on(call(&app, put(Some("1"))));
    ensure_eq!(s4, StatusCode::CONFLICT);
    let conflict: Value = serde_json::from_str(&b4).map_err(|e| e.to_string())?;
    ensure_eq!(conflict["code"], Value::from("conflict"));
    let (s5, _) = rt.block_on(call(
        &app,
        Request::get("/api/v1/factsheets/nope").body(Body::empty()).unwrap(),
    ));
    ensure_eq!(s5, StatusCode::NOT_FOUND);
    ensure_eq!(fs::read_to_string(store_dir.join("imagenet-2009.efs")).unwrap(), body);
    Ok(())
}

fn main() {
    let criteria: [Criterion; 7] = [
        (1, "fixture fidelity", fixture_fidelity),
        (2, "catalog contract", catalog_contract),
        (3, "round trips", round_trips),
        (4, "validator behaviour", validator_behaviour),
        (5, "completeness properties", completeness_properties),
        (6, "corpus analytics", corpus_analytics),
        (7, "end-to-end pipeline", end_to_end),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(()) => println!("criterion {n} PASS {name}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
