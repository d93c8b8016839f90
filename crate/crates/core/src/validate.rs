//! Rule-based validation and completeness scoring.
//!
//! | code | severity | rule |
//! |------|----------|------|
//! | `E-C001`..`E-M005` | error | mandatory question unanswered |
//! | `E-M101` | error | model-based judge without a judge model |
//! | `E-M102` | error | held-out set declared without details |
//! | `W-T301` | warning | count outside the size category's band |
//! | `W-T302` | warning | size unanswered |
//! | `W-A401` | warning | robustness unanswered |
//! | `W-A402` | warning | no limitations listed |
//! | `W-C101` | warning | release date is neither `YYYY` nor `YYYY-MM-DD` |
//! | `N-X001` | note | extension fields present |
//!
//! Size bands are half-open: small `[0, 10^3)`, medium `[10^3, 10^5)`,
//! large `[10^5, 10^6)`, very large `[10^6, ∞)`.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::{catalog, Dimension, Factsheet, QuestionId, MODEL_JUDGE_TOKENS};
use crate::model::Vocabulary;

fn has_text(s: &Option<String>) -> bool {
    s.as_deref().is_some_and(|s| !s.trim().is_empty())
}

fn is_release_date(s: &str) -> bool {
    let year = |y: &str| y.len() == 4 && y.chars().all(|c| c.is_ascii_digit());
    year(s) || (s.len() == 10 && NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok() && year(&s[..4]))
}

/// Every finding for `fs`, sorted by severity, code and question id.
pub fn validate(fs: &Factsheet) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for q in catalog().mandatory() {
        if fs.is_applicable(q.id) && !fs.is_answered(q.id) {
            out.push(Diagnostic::new(
                Code::Missing(q.id),
                Some(q.id),
                format!("{} `{}` is mandatory: {}", q.id, q.key, q.prompt),
            ));
        }
    }

    let m = &fs.method;
    let model_judge = m
        .judges
        .iter()
        .any(|j| MODEL_JUDGE_TOKENS.contains(&j.token.token()));
    if model_judge && !has_text(&m.judge_details.judge_model) {
        out.push(Diagnostic::new(
            Code::JudgeModelMissing,
            Some(QuestionId::M2),
            "a model-based judge is used but the judge model is not named",
        ));
    }
    if m.heldout == Some(true) && !has_text(&m.heldout_details) {
        out.push(Diagnostic::new(
            Code::HeldoutDetailsMissing,
            Some(QuestionId::M5),
            "a held-out test set is declared but not described",
        ));
    }

    match &fs.structure.size {
        Some(size) => {
            if let Some(count) = size.count.filter(|&n| !size.category.admits(n)) {
                out.push(Diagnostic::new(
                    Code::SizeMismatch,
                    Some(QuestionId::T3),
                    format!(
                        "{count} samples is {}, not {}",
                        crate::model::vocab::SizeCategory::for_count(count).token(),
                        size.category.token()
                    ),
                ));
            }
        }
        None => out.push(Diagnostic::new(
            Code::SizeMissing,
            Some(QuestionId::T3),
            "evaluation size is not documented",
        )),
    }
    if !fs.is_answered(QuestionId::A3) {
        out.push(Diagnostic::new(
            Code::RobustnessMissing,
            Some(QuestionId::A3),
            "robustness measures are not documented",
        ));
    }
    if !fs.is_answered(QuestionId::A4) {
        out.push(Diagnostic::new(
            Code::LimitationsMissing,
            Some(QuestionId::A4),
            "no known limitations are listed",
        ));
    }
    if let Some(date) = fs.context.release_date.as_deref().filter(|d| !d.trim().is_empty()) {
        if !is_release_date(date) {
            out.push(Diagnostic::new(
                Code::BadReleaseDate,
                Some(QuestionId::C4),
                format!("release date `{date}` is neither YYYY nor YYYY-MM-DD"),
            ));
        }
    }
    if !fs.extensions.is_empty() {
        let keys: Vec<&str> = fs.extensions.keys().map(String::as_str).collect();
        out.push(Diagnostic::new(
            Code::ExtensionsPresent,
            None,
            format!("extension fields: {}", keys.join(", ")),
        ));
    }
    sort_diagnostics(&mut out);
    out
}

/// True iff [`validate`] reports no errors.
pub fn is_publishable(fs: &Factsheet) -> bool {
    !validate(fs).iter().any(Diagnostic::is_error)
}

/// Answered share of applicable questions, per dimension and overall.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub per_dimension: BTreeMap<Dimension, f64>,
    /// Unweighted mean of the dimension ratios with at least one
    /// applicable question.
    pub overall: f64,
    pub applicable: BTreeMap<Dimension, usize>,
    pub answered: BTreeMap<Dimension, usize>,
}

pub fn completeness(fs: &Factsheet) -> CompletenessReport {
    let mut applicable = BTreeMap::new();
    let mut answered = BTreeMap::new();
    for dim in Dimension::ALL {
        applicable.insert(dim, 0usize);
        answered.insert(dim, 0usize);
    }
    for q in fs.applicable_questions() {
        let dim = q.dimension();
        *applicable.get_mut(&dim).unwrap() += 1;
        if fs.is_answered(q) {
            *answered.get_mut(&dim).unwrap() += 1;
        }
    }
    let per_dimension: BTreeMap<Dimension, f64> = Dimension::ALL
        .iter()
        .map(|d| {
            let total = applicable[d];
            let ratio = if total == 0 {
                0.0
            } else {
                answered[d] as f64 / total as f64
            };
            (*d, ratio)
        })
        .collect();
    let counted: Vec<f64> = Dimension::ALL
        .iter()
        .filter(|d| applicable[d] > 0)
        .map(|d| per_dimension[d])
        .collect();
    let overall = if counted.is_empty() {
        0.0
    } else {
        counted.iter().sum::<f64>() / counted.len() as f64
    };
    CompletenessReport {
        per_dimension,
        overall,
        applicable,
        answered,
    }
}
