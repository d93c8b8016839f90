//! Pairwise diffs and corpus coverage statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{catalog, Factsheet, QuestionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiffStatus {
    Equal,
    Differs,
    LeftOnly,
    RightOnly,
}

impl DiffStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DiffStatus::Equal => "equal",
            DiffStatus::Differs => "differs",
            DiffStatus::LeftOnly => "left_only",
            DiffStatus::RightOnly => "right_only",
        }
    }

    fn mirrored(self) -> DiffStatus {
        match self {
            DiffStatus::LeftOnly => DiffStatus::RightOnly,
            DiffStatus::RightOnly => DiffStatus::LeftOnly,
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub question_id: QuestionId,
    pub status: DiffStatus,
    pub left: Option<String>,
    pub right: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactsheetDiff {
    pub entries: Vec<DiffEntry>,
}

impl FactsheetDiff {
    /// The same diff seen from the other side.
    pub fn mirrored(&self) -> FactsheetDiff {
        FactsheetDiff {
            entries: self
                .entries
                .iter()
                .map(|e| DiffEntry {
                    question_id: e.question_id,
                    status: e.status.mirrored(),
                    left: e.right.clone(),
                    right: e.left.clone(),
                })
                .collect(),
        }
    }

    pub fn entry(&self, id: QuestionId) -> Option<&DiffEntry> {
        self.entries.iter().find(|e| e.question_id == id)
    }

    pub fn changed(&self) -> impl Iterator<Item = &DiffEntry> {
        self.entries.iter().filter(|e| e.status != DiffStatus::Equal)
    }
}

/// One entry per question applicable in either sheet. Token answers
/// compare as sets, lists in order, text exactly. Both-unanswered
/// questions are equal.
pub fn diff(a: &Factsheet, b: &Factsheet) -> FactsheetDiff {
    let entries = QuestionId::ALL
        .into_iter()
        .filter(|q| a.is_applicable(*q) || b.is_applicable(*q))
        .map(|q| {
            let left = a.answer(q).filter(|_| a.is_applicable(q));
            let right = b.answer(q).filter(|_| b.is_applicable(q));
            let status = match (&left, &right) {
                (Some(l), Some(r)) if l == r => DiffStatus::Equal,
                (Some(_), Some(_)) => DiffStatus::Differs,
                (Some(_), None) => DiffStatus::LeftOnly,
                (None, Some(_)) => DiffStatus::RightOnly,
                (None, None) => DiffStatus::Equal,
            };
            DiffEntry {
                question_id: q,
                status,
                left: left.map(|x| x.to_string()),
                right: right.map(|x| x.to_string()),
            }
        })
        .collect();
    FactsheetDiff { entries }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sheet_count: usize,
    /// Sheets answering a question over sheets where it is applicable;
    /// questions applicable nowhere are absent.
    pub fill_rate: BTreeMap<QuestionId, f64>,
    /// Token occurrences per vocabulary-valued question.
    pub vocab_hist: BTreeMap<QuestionId, BTreeMap<String, usize>>,
}

pub fn corpus_stats(sheets: &[Factsheet]) -> CorpusStats {
    let mut applicable: BTreeMap<QuestionId, usize> = BTreeMap::new();
    let mut answered: BTreeMap<QuestionId, usize> = BTreeMap::new();
    let mut vocab_hist: BTreeMap<QuestionId, BTreeMap<String, usize>> = BTreeMap::new();
    for fs in sheets {
        for q in fs.applicable_questions() {
            *applicable.entry(q).or_default() += 1;
            let Some(answer) = fs.answer(q) else { continue };
            *answered.entry(q).or_default() += 1;
            if catalog().get(q).answer_kind.is_vocabulary() {
                let hist = vocab_hist.entry(q).or_default();
                for token in answer.tokens() {
                    *hist.entry(token.to_string()).or_default() += 1;
                }
            }
        }
    }
    let fill_rate = applicable
        .iter()
        .map(|(q, n)| (*q, answered.get(q).copied().unwrap_or(0) as f64 / *n as f64))
        .collect();
    CorpusStats {
        sheet_count: sheets.len(),
        fill_rate,
        vocab_hist,
    }
}
