//! Uniform per-question view of a factsheet.

use std::collections::BTreeSet;
use std::fmt;

use super::catalog::{catalog, QuestionId};
use super::factsheet::{has_text, Annotated, Factsheet, JudgeDetails, SizeSpec, SplitSpec};
use super::vocab::{VocabTerm, Vocabulary};

/// A vocabulary term with its token as a plain string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRef {
    pub token: &'static str,
    pub raw: String,
}

impl<V: Vocabulary> From<&VocabTerm<V>> for TokenRef {
    fn from(t: &VocabTerm<V>) -> Self {
        TokenRef {
            token: t.token.token(),
            raw: t.raw.clone(),
        }
    }
}

/// The answer to one catalog question. Only answered questions produce one.
#[derive(Debug, Clone)]
pub enum Answer {
    Text(String),
    Tokens {
        terms: Vec<TokenRef>,
        detail: Option<String>,
    },
    List(Vec<String>),
    Size(SizeSpec),
    Splits(Vec<SplitSpec>),
    Judge(JudgeDetails),
    Flag {
        value: bool,
        details: Option<String>,
    },
    Annotated {
        text: String,
        tags: Vec<&'static str>,
    },
}

impl PartialEq for Answer {
    /// Token answers compare as sets of tokens; everything else exactly.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                Answer::Tokens { terms: a, detail: da },
                Answer::Tokens { terms: b, detail: db },
            ) => {
                let sa: BTreeSet<_> = a.iter().map(|t| t.token).collect();
                let sb: BTreeSet<_> = b.iter().map(|t| t.token).collect();
                sa == sb && da == db
            }
            (Answer::Text(a), Answer::Text(b)) => a == b,
            (Answer::List(a), Answer::List(b)) => a == b,
            (Answer::Size(a), Answer::Size(b)) => a == b,
            (Answer::Splits(a), Answer::Splits(b)) => a == b,
            (Answer::Judge(a), Answer::Judge(b)) => a == b,
            (
                Answer::Flag { value: a, details: da },
                Answer::Flag { value: b, details: db },
            ) => a == b && da == db,
            (
                Answer::Annotated { text: a, tags: ta },
                Answer::Annotated { text: b, tags: tb },
            ) => {
                let sa: BTreeSet<_> = ta.iter().collect();
                let sb: BTreeSet<_> = tb.iter().collect();
                a == b && sa == sb
            }
            _ => false,
        }
    }
}

impl Answer {
    /// Canonical tokens carried by the answer, if any.
    pub fn tokens(&self) -> Vec<&'static str> {
        match self {
            Answer::Tokens { terms, .. } => terms.iter().map(|t| t.token).collect(),
            Answer::Size(s) => vec![s.category.token()],
            Answer::Splits(s) => s.iter().map(|s| s.kind.token()).collect(),
            Answer::Flag { value, .. } => vec![if *value { "true" } else { "false" }],
            Answer::Annotated { tags, .. } => tags.clone(),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Answer {
    /// Compact single-string form used in diffs and listings.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Text(t) => f.write_str(t),
            Answer::Tokens { terms, detail } => {
                let toks: Vec<_> = terms.iter().map(|t| t.token).collect();
                f.write_str(&toks.join(", "))?;
                if let Some(d) = detail {
                    write!(f, " ({d})")?;
                }
                Ok(())
            }
            Answer::List(items) => f.write_str(&items.join("; ")),
            Answer::Size(s) => match s.count {
                Some(n) => write!(f, "{} ({n})", s.category.token()),
                None => f.write_str(s.category.token()),
            },
            Answer::Splits(splits) => {
                let parts: Vec<String> = splits
                    .iter()
                    .map(|s| format!("{}: {}", s.kind.token(), s.description))
                    .collect();
                f.write_str(&parts.join("; "))
            }
            Answer::Judge(d) => {
                let parts: Vec<String> = [
                    ("model", &d.judge_model),
                    ("prompting", &d.prompting_strategy),
                    ("temperature", &d.temperature),
                    ("agreement", &d.agreement),
                ]
                .iter()
                .filter_map(|(k, v)| v.as_ref().map(|v| format!("{k}: {v}")))
                .collect();
                f.write_str(&parts.join("; "))
            }
            Answer::Flag { value, details } => {
                write!(f, "{value}")?;
                if let Some(d) = details {
                    write!(f, " ({d})")?;
                }
                Ok(())
            }
            Answer::Annotated { text, tags } => {
                f.write_str(text)?;
                if !tags.is_empty() {
                    write!(f, " [{}]", tags.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

fn text(s: &Option<String>) -> Option<Answer> {
    has_text(s.as_deref()).then(|| Answer::Text(s.clone().unwrap_or_default()))
}

fn tokens<V: Vocabulary>(set: &[VocabTerm<V>], detail: Option<&String>) -> Option<Answer> {
    (!set.is_empty()).then(|| Answer::Tokens {
        terms: set.iter().map(TokenRef::from).collect(),
        detail: detail.cloned(),
    })
}

fn list(items: &[String]) -> Option<Answer> {
    (!items.is_empty()).then(|| Answer::List(items.to_vec()))
}

fn annotated<T: Vocabulary>(note: &Option<Annotated<T>>) -> Option<Answer> {
    note.as_ref()
        .filter(|n| n.is_answered())
        .map(|n| Answer::Annotated {
            text: n.text.clone(),
            tags: n.tags.iter().map(|t| t.token()).collect(),
        })
}

impl Factsheet {
    /// The answer to `id`, or `None` when unanswered.
    pub fn answer(&self, id: QuestionId) -> Option<Answer> {
        use QuestionId::*;
        let c = &self.context;
        let s = &self.scope;
        let t = &self.structure;
        let m = &self.method;
        let a = &self.alignment;
        match id {
            C1 => text(&c.title),
            C2 => text(&c.subtitle),
            C3 => text(&c.authors),
            C4 => text(&c.release_date),
            C5 => text(&c.paper_link),
            C6 => text(&c.code_link),
            C7 => tokens(&c.purposes, None),
            S1 => list(&s.capabilities),
            S2 => tokens(&s.model_properties, None),
            S3 => tokens(&s.input_modality.terms, s.input_modality.detail.as_ref()),
            S4 => tokens(&s.output_modality.terms, s.output_modality.detail.as_ref()),
            T1 => tokens(&t.input_sources, None),
            T2 => tokens(&t.output_sources, None),
            T3 => t.size.clone().map(Answer::Size),
            T4 => (!t.splits.is_empty()).then(|| Answer::Splits(t.splits.clone())),
            T5 => t.design.as_ref().map(|d| Answer::Tokens {
                terms: vec![d.into()],
                detail: None,
            }),
            T6 => list(&t.dataset_refs),
            M1 => tokens(&m.judges, None),
            M2 => (!m.judge_details.is_empty()).then(|| Answer::Judge(m.judge_details.clone())),
            M3 => list(&m.protocol),
            M4 => m.model_access.as_ref().map(|d| Answer::Tokens {
                terms: vec![d.into()],
                detail: None,
            }),
            M5 => m.heldout.map(|value| Answer::Flag {
                value,
                details: m.heldout_details.clone(),
            }),
            A1 => annotated(&a.validation),
            A2 => annotated(&a.baselines),
            A3 => annotated(&a.robustness),
            A4 => list(&a.limitations),
            A5 => list(&a.similar_evals),
        }
    }

    pub fn is_answered(&self, id: QuestionId) -> bool {
        self.answer(id).is_some()
    }

    /// Whether `id` is shown given the current answers.
    pub fn is_applicable(&self, id: QuestionId) -> bool {
        match &catalog().get(id).visible_if {
            None => true,
            Some(pred) => self.answer(pred.question_id).is_some_and(|ans| {
                ans.tokens().iter().any(|t| pred.contains_any.contains(t))
            }),
        }
    }

    /// Whether the held-out details sub-answer is shown.
    pub fn heldout_details_visible(&self) -> bool {
        self.method.heldout == Some(true)
    }

    /// Applicable question ids in catalog order.
    pub fn applicable_questions(&self) -> impl Iterator<Item = QuestionId> + '_ {
        QuestionId::ALL.into_iter().filter(|q| self.is_applicable(*q))
    }
}
