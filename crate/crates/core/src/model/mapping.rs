//! Free text → vocabulary tokens.
//!
//! Input is split on `;`, each segment trimmed and lowercased, then matched
//! by substring containment against every term's triggers. A term's
//! triggers are its own lowercase label, its token (underscores read as
//! spaces) and its keyword list. The longest matching trigger wins; equal
//! lengths go to the term declared first. Unmatched segments become `other`
//! on open vocabularies.

use serde::Serialize;

use super::catalog::{catalog, QuestionId};
use super::vocab::{push_unique, TermInfo, VocabId, VocabTerm, Vocabulary, OTHER};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabError {
    #[error("unknown question id `{0}`")]
    UnknownQuestion(String),
    #[error("question {0} is not vocabulary-valued")]
    KindMismatch(QuestionId),
    #[error("no text to map")]
    EmptyInput,
    #[error("`{segment}` matches no {vocabulary} token and the vocabulary has no `other`")]
    NoMatch { vocabulary: VocabId, segment: String },
}

/// A mapped answer with the token as a plain string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappedTerm {
    pub token: &'static str,
    pub raw: String,
}

fn best_term(terms: &[TermInfo], segment: &str) -> Option<usize> {
    let lower = segment.to_lowercase();
    let mut best: Option<(usize, usize)> = None;
    for (idx, term) in terms.iter().enumerate() {
        if term.token == OTHER {
            continue;
        }
        let label = term.label.to_lowercase();
        let spaced = term.token.replace('_', " ");
        let own = [label.as_str(), term.token, spaced.as_str()];
        for trig in own.iter().copied().chain(term.triggers.iter().copied()) {
            let len = trig.chars().count();
            if len == 0 || !lower.contains(trig) {
                continue;
            }
            if best.is_none_or(|(best_len, _)| len > best_len) {
                best = Some((len, idx));
            }
        }
    }
    best.map(|(_, idx)| idx)
}

fn segments(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(';').map(str::trim).filter(|s| !s.is_empty())
}

/// Maps text onto one vocabulary, returning term indices and raw segments.
fn map_indices(vocab: VocabId, raw: &str) -> Result<Vec<(usize, String)>, VocabError> {
    let terms = vocab.terms();
    let other = terms.iter().position(|t| t.token == OTHER);
    let mut out: Vec<(usize, String)> = Vec::new();
    for seg in segments(raw) {
        let idx = match best_term(terms, seg) {
            Some(idx) => idx,
            None => other.ok_or_else(|| VocabError::NoMatch {
                vocabulary: vocab,
                segment: seg.to_string(),
            })?,
        };
        let dup = out
            .iter()
            .any(|(i, r)| *i == idx && (terms[idx].token != OTHER || r == seg));
        if !dup {
            out.push((idx, seg.to_string()));
        }
    }
    if out.is_empty() {
        return Err(VocabError::EmptyInput);
    }
    Ok(out)
}

/// Maps free text onto `vocab`.
pub fn map_text(vocab: VocabId, raw: &str) -> Result<Vec<MappedTerm>, VocabError> {
    let terms = vocab.terms();
    Ok(map_indices(vocab, raw)?
        .into_iter()
        .map(|(idx, raw)| MappedTerm {
            token: terms[idx].token,
            raw,
        })
        .collect())
}

/// Typed variant of [`map_text`].
pub fn map_terms<V: Vocabulary>(raw: &str) -> Result<Vec<VocabTerm<V>>, VocabError> {
    let mut set = Vec::new();
    for (idx, raw) in map_indices(V::ID, raw)? {
        push_unique(&mut set, VocabTerm::with_raw(V::all()[idx], raw));
    }
    Ok(set)
}

/// Maps free text for a vocabulary-valued catalog question.
pub fn map_vocab(question_id: &str, raw: &str) -> Result<Vec<MappedTerm>, VocabError> {
    let id: QuestionId = question_id
        .parse()
        .map_err(|_| VocabError::UnknownQuestion(question_id.to_string()))?;
    let question = catalog().get(id);
    match question.vocabulary {
        Some(vocab) if question.answer_kind.is_vocabulary() => map_text(vocab, raw),
        _ => Err(VocabError::KindMismatch(id)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vocab::{Judge, Purpose};

    fn tokens(q: &str, raw: &str) -> Vec<&'static str> {
        map_vocab(q, raw).unwrap().into_iter().map(|t| t.token).collect()
    }

    #[test]
    fn card_values_map_to_expected_tokens() {
        assert_eq!(tokens("C7", "Research; Model Selection"), ["research", "selection"]);
        assert_eq!(tokens("M1", "Model-based (LLM judge: GPT-4)"), ["model_llm"]);
        assert_eq!(tokens("M4", "Black-box (outputs only)"), ["output_only"]);
        assert_eq!(tokens("M4", "Outputs"), ["output_only"]);
        assert_eq!(tokens("M1", "Automatic (Reference-based)"), ["auto_reference"]);
        assert_eq!(tokens("M1", "Automatic (Execution-based)"), ["auto_execution"]);
        assert_eq!(tokens("T2", "Programmatically generated (unit tests)"), ["programmatic"]);
        assert_eq!(tokens("T2", "Human annotated"), ["human_annotation"]);
        assert_eq!(tokens("T5", "Static benchmark"), ["static"]);
        assert_eq!(
            tokens("T5", "Dynamic data-driven (continuous arena with periodic updates)"),
            ["dynamic"]
        );
        assert_eq!(tokens("S3", "Images"), ["vision"]);
        assert_eq!(tokens("S3", "Text (programming problems)"), ["text"]);
        assert_eq!(tokens("S4", "Code (Python functions)"), ["code"]);
        assert_eq!(tokens("T1", "New dataset (released with eval)"), ["new_dataset"]);
    }

    #[test]
    fn raw_is_preserved() {
        let m = map_vocab("M1", "Model-based (LLM judge: GPT-4)").unwrap();
        assert_eq!(m[0].raw, "Model-based (LLM judge: GPT-4)");
    }

    #[test]
    fn unmatched_falls_through_to_other() {
        let m = map_vocab("M1", "Tarot reading").unwrap();
        assert_eq!(m, vec![MappedTerm { token: "other", raw: "Tarot reading".into() }]);
    }

    #[test]
    fn closed_vocabulary_without_match_is_an_error() {
        assert_eq!(
            map_vocab("T5", "Whatever"),
            Err(VocabError::NoMatch {
                vocabulary: VocabId::Design,
                segment: "Whatever".into()
            })
        );
    }

    #[test]
    fn longest_trigger_wins() {
        // "expert model" beats "model-based"
        assert_eq!(tokens("M1", "Model-based (Expert model)"), ["model_expert"]);
        assert_eq!(tokens("M1", "Model-based (General LLM)"), ["model_llm"]);
        assert_eq!(tokens("S2", "Adversarial robustness"), ["adversarial_robustness"]);
    }

    #[test]
    fn duplicates_collapse_in_first_occurrence_order() {
        assert_eq!(tokens("C7", "Research; research; Model selection"), ["research", "selection"]);
        let typed = map_terms::<Purpose>("Research; scientific discovery").unwrap();
        assert_eq!(typed.len(), 1);
        assert_eq!(typed[0].raw, "Research");
    }

    #[test]
    fn errors() {
        assert_eq!(map_vocab("Z1", "x"), Err(VocabError::UnknownQuestion("Z1".into())));
        assert_eq!(map_vocab("C1", "x"), Err(VocabError::KindMismatch(QuestionId::C1)));
        assert_eq!(map_vocab("A1", "x"), Err(VocabError::KindMismatch(QuestionId::A1)));
        assert_eq!(map_vocab("M1", " ; ;"), Err(VocabError::EmptyInput));
    }

    #[test]
    fn labels_map_to_their_own_token_in_every_vocabulary() {
        for vocab in VocabId::ALL {
            for term in vocab.terms() {
                if term.token == OTHER {
                    assert_eq!(map_text(vocab, term.label).unwrap()[0].token, OTHER);
                    continue;
                }
                let m = map_text(vocab, term.label).unwrap();
                assert_eq!(m.len(), 1);
                assert_eq!(m[0].token, term.token, "{vocab}: {}", term.label);
                assert_eq!(map_text(vocab, term.token).unwrap()[0].token, term.token);
            }
        }
        let typed = map_terms::<Judge>("Hybrid").unwrap();
        assert_eq!(typed[0].token, Judge::Hybrid);
    }
}
