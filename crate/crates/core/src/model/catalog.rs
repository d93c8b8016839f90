//! The fixed 27-question catalog.
//!
//! Questions are grouped into five sections, one per taxonomy dimension.
//! Each question names the canonical-text key that stores its answer and,
//! for vocabulary-valued questions, the vocabulary its tokens come from.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize, Serializer};

use super::vocab::VocabId;

/// The five taxonomy dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Context,
    Scope,
    Structure,
    Method,
    Alignment,
}

impl Dimension {
    pub const ALL: [Dimension; 5] = [
        Dimension::Context,
        Dimension::Scope,
        Dimension::Structure,
        Dimension::Method,
        Dimension::Alignment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Context => "context",
            Dimension::Scope => "scope",
            Dimension::Structure => "structure",
            Dimension::Method => "method",
            Dimension::Alignment => "alignment",
        }
    }

    /// Questionnaire section title for this dimension.
    pub fn section_title(self) -> &'static str {
        match self {
            Dimension::Context => "Basic Information",
            Dimension::Scope => "What Does It Evaluate",
            Dimension::Structure => "How Is It Structured",
            Dimension::Method => "How Does It Work",
            Dimension::Alignment => "Quality & Reliability",
        }
    }

    pub(crate) fn prefix(self) -> char {
        match self {
            Dimension::Context => 'C',
            Dimension::Scope => 'S',
            Dimension::Structure => 'T',
            Dimension::Method => 'M',
            Dimension::Alignment => 'A',
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! question_ids {
    ($($id:ident => $dim:ident),+ $(,)?) => {
        /// Stable catalog identifier (`C1` .. `A5`).
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum QuestionId { $($id),+ }

        impl QuestionId {
            pub const ALL: [QuestionId; 27] = [$(QuestionId::$id),+];

            pub fn as_str(self) -> &'static str {
                match self { $(QuestionId::$id => stringify!($id)),+ }
            }

            pub fn dimension(self) -> Dimension {
                match self { $(QuestionId::$id => Dimension::$dim),+ }
            }
        }
    };
}

question_ids! {
    C1 => Context, C2 => Context, C3 => Context, C4 => Context, C5 => Context, C6 => Context, C7 => Context,
    S1 => Scope, S2 => Scope, S3 => Scope, S4 => Scope,
    T1 => Structure, T2 => Structure, T3 => Structure, T4 => Structure, T5 => Structure, T6 => Structure,
    M1 => Method, M2 => Method, M3 => Method, M4 => Method, M5 => Method,
    A1 => Alignment, A2 => Alignment, A3 => Alignment, A4 => Alignment, A5 => Alignment,
}

impl QuestionId {
    /// Position within its section, starting at 1.
    pub fn number(self) -> u32 {
        self.as_str()[1..].parse().expect("ids are letter + digits")
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown question id `{0}`")]
pub struct UnknownQuestion(pub String);

impl FromStr for QuestionId {
    type Err = UnknownQuestion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        QuestionId::ALL
            .iter()
            .copied()
            .find(|q| q.as_str() == upper)
            .ok_or_else(|| UnknownQuestion(s.to_string()))
    }
}

impl Serialize for QuestionId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for QuestionId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Text,
    LongText,
    Url,
    Date,
    Flag,
    EnumOne,
    EnumMany,
    TextList,
    SplitList,
    StepList,
    Structured,
}

impl AnswerKind {
    pub fn is_vocabulary(self) -> bool {
        matches!(self, AnswerKind::EnumOne | AnswerKind::EnumMany)
    }
}

/// Shows a question (or sub-answer) only when another answer holds one of
/// the listed tokens. Flag answers expose the tokens `true` / `false`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VisibleIf {
    pub question_id: QuestionId,
    pub contains_any: Vec<&'static str>,
}

/// A named part of a structured answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubAnswer {
    pub key: &'static str,
    pub prompt: &'static str,
    pub answer_kind: AnswerKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<VocabId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visible_if: Option<VisibleIf>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Question {
    pub id: QuestionId,
    pub section: Dimension,
    /// Canonical-text key holding the primary answer.
    pub key: &'static str,
    pub prompt: &'static str,
    pub answer_kind: AnswerKind,
    pub mandatory: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vocabulary: Option<VocabId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub visible_if: Option<VisibleIf>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_answers: Vec<SubAnswer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuestionCatalog {
    pub questions: Vec<Question>,
}

impl QuestionCatalog {
    pub fn get(&self, id: QuestionId) -> &Question {
        // ids and positions are aligned by construction
        &self.questions[QuestionId::ALL.iter().position(|q| *q == id).unwrap()]
    }

    pub fn section(&self, dim: Dimension) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(move |q| q.section == dim)
    }

    pub fn mandatory(&self) -> impl Iterator<Item = &Question> {
        self.questions.iter().filter(|q| q.mandatory)
    }

    /// Every visibility predicate, on questions and on sub-answers.
    pub fn predicates(&self) -> Vec<(&str, &VisibleIf)> {
        let mut out = Vec::new();
        for q in &self.questions {
            if let Some(p) = &q.visible_if {
                out.push((q.key, p));
            }
            for sub in &q.sub_answers {
                if let Some(p) = &sub.visible_if {
                    out.push((sub.key, p));
                }
            }
        }
        out
    }
}

/// Model-based judge tokens that make M2 applicable.
pub const MODEL_JUDGE_TOKENS: [&str; 2] = ["model_expert", "model_llm"];

fn q(
    id: QuestionId,
    key: &'static str,
    prompt: &'static str,
    answer_kind: AnswerKind,
    mandatory: bool,
) -> Question {
    Question {
        id,
        section: id.dimension(),
        key,
        prompt,
        answer_kind,
        mandatory,
        vocabulary: None,
        visible_if: None,
        sub_answers: Vec::new(),
    }
}

fn sub(key: &'static str, prompt: &'static str, answer_kind: AnswerKind) -> SubAnswer {
    SubAnswer {
        key,
        prompt,
        answer_kind,
        vocabulary: None,
        visible_if: None,
    }
}

impl Question {
    fn vocab(mut self, v: VocabId) -> Self {
        self.vocabulary = Some(v);
        self
    }

    fn subs(mut self, subs: Vec<SubAnswer>) -> Self {
        self.sub_answers = subs;
        self
    }
}

impl SubAnswer {
    fn vocab(mut self, v: VocabId) -> Self {
        self.vocabulary = Some(v);
        self
    }
}

fn build() -> QuestionCatalog {
    use AnswerKind::*;
    use QuestionId as Q;

    let questions = vec![
        q(Q::C1, "title", "What is the name of the evaluation?", Text, true),
        q(Q::C2, "subtitle", "Summarise in one or two sentences what the evaluation does and why it was created.", LongText, false),
        q(Q::C3, "authors", "Which organisation(s) and people created the evaluation?", Text, true),
        q(Q::C4, "release_date", "When was the evaluation released (year or YYYY-MM-DD)?", Date, true),
        q(Q::C5, "paper_link", "Link to the paper describing the evaluation.", Url, false),
        q(Q::C6, "code_link", "Link to the code or data release.", Url, false),
        q(Q::C7, "purpose", "What is the evaluation for: development, selection, deployment, or research?", EnumMany, true)
            .vocab(VocabId::Purpose),
        q(Q::S1, "capability", "Which capabilities or principles does the evaluation test?", TextList, true),
        q(Q::S2, "property", "Which model properties does it assess?", EnumMany, true)
            .vocab(VocabId::ModelProperty),
        q(Q::S3, "input_modality", "What does the model receive as input?", EnumMany, true)
            .vocab(VocabId::Modality)
            .subs(vec![sub("input_modality_detail", "Describe the inputs in more detail.", LongText)]),
        q(Q::S4, "output_modality", "What does the model produce as output?", EnumMany, true)
            .vocab(VocabId::Modality)
            .subs(vec![sub("output_modality_detail", "Describe the outputs in more detail.", LongText)]),
        q(Q::T1, "input_source", "Where do the evaluation inputs come from?", EnumMany, true)
            .vocab(VocabId::InputSource),
        q(Q::T2, "output_source", "Where do the reference outputs or labels come from?", EnumMany, true)
            .vocab(VocabId::OutputSource),
        q(Q::T3, "size", "How large is the evaluation?", Structured, false).subs(vec![
            sub("size", "Size category.", EnumOne).vocab(VocabId::SizeCategory),
            sub("size_count", "Number of samples, if known.", Text),
        ]),
        q(Q::T4, "split", "Which data splits exist and what does each contain?", SplitList, false)
            .vocab(VocabId::SplitKind),
        q(Q::T5, "design", "Is the evaluation data static, dynamic, or composite?", EnumOne, true)
            .vocab(VocabId::Design),
        q(Q::T6, "dataset_ref", "Links to datasheets or source datasets the evaluation builds on.", TextList, false),
        q(Q::M1, "judge", "Who or what judges the model outputs?", EnumMany, true)
            .vocab(VocabId::Judge),
        Question {
            visible_if: Some(VisibleIf {
                question_id: Q::M1,
                contains_any: MODEL_JUDGE_TOKENS.to_vec(),
            }),
            ..q(Q::M2, "judge_model", "For model-based judges: which judge model, prompting strategy, temperature, and measured agreement?", Structured, false)
                .subs(vec![
                    sub("judge_model", "Judge model.", Text),
                    sub("judge_prompting", "Prompting strategy.", LongText),
                    sub("judge_temperature", "Sampling temperature.", Text),
                    sub("judge_agreement", "Measured agreement with humans or other judges.", LongText),
                ])
        },
        q(Q::M3, "step", "List the evaluation protocol step by step.", StepList, true),
        q(Q::M4, "model_access", "What access to the model does the evaluation need?", EnumOne, true)
            .vocab(VocabId::ModelAccess),
        q(Q::M5, "heldout", "Is there a held-out private test set?", Flag, true).subs(vec![SubAnswer {
            visible_if: Some(VisibleIf {
                question_id: Q::M5,
                contains_any: vec!["true"],
            }),
            ..sub("heldout_details", "Describe the held-out set: size, access, refresh policy, purpose.", LongText)
        }]),
        q(Q::A1, "validation", "How was it verified that the evaluation measures its intended construct?", Structured, false)
            .vocab(VocabId::ValidationTag),
        q(Q::A2, "baselines", "Which baselines or reference points contextualise scores?", Structured, false)
            .vocab(VocabId::BaselineTag),
        q(Q::A3, "robustness", "Which robustness measures were taken?", Structured, false)
            .vocab(VocabId::RobustnessTag),
        q(Q::A4, "limitation", "What are the known limitations and sensitivities?", TextList, false),
        q(Q::A5, "similar_eval", "Which similar evaluations exist and how does this one differ?", TextList, false),
    ];
    QuestionCatalog { questions }
}

static CATALOG: LazyLock<QuestionCatalog> = LazyLock::new(build);

/// The fixed question catalog.
pub fn catalog() -> &'static QuestionCatalog {
    &CATALOG
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn twenty_seven_questions_in_section_order() {
        let cat = catalog();
        assert_eq!(cat.questions.len(), 27);
        let sizes: Vec<usize> = Dimension::ALL
            .iter()
            .map(|d| cat.section(*d).count())
            .collect();
        assert_eq!(sizes, vec![7, 4, 6, 5, 5]);
        let mut last = Dimension::Context;
        for q in &cat.questions {
            assert!(q.section >= last);
            last = q.section;
            assert_eq!(q.id.as_str().chars().next(), Some(q.section.prefix()));
        }
    }

    #[test]
    fn fifteen_mandatory_questions() {
        let ids: Vec<&str> = catalog().mandatory().map(|q| q.id.as_str()).collect();
        assert_eq!(
            ids,
            ["C1", "C3", "C4", "C7", "S1", "S2", "S3", "S4", "T1", "T2", "T5", "M1", "M3", "M4", "M5"]
        );
    }

    #[test]
    fn two_conditional_predicates() {
        let preds = catalog().predicates();
        assert_eq!(preds.len(), 2);
        let m2 = catalog().get(QuestionId::M2).visible_if.as_ref().unwrap();
        assert_eq!(m2.question_id, QuestionId::M1);
        assert_eq!(m2.contains_any, vec!["model_expert", "model_llm"]);
        assert_eq!(preds[1].0, "heldout_details");
        assert_eq!(preds[1].1.question_id, QuestionId::M5);
        assert_eq!(preds[1].1.contains_any, vec!["true"]);
    }

    #[test]
    fn ids_unique_and_predicate_targets_exist() {
        let cat = catalog();
        let ids: HashSet<_> = cat.questions.iter().map(|q| q.id).collect();
        assert_eq!(ids.len(), 27);
        for (_, p) in cat.predicates() {
            assert!(ids.contains(&p.question_id));
            let target = cat.get(p.question_id);
            for tok in &p.contains_any {
                match target.vocabulary {
                    Some(v) => assert!(v.contains(tok)),
                    None => assert!(target.answer_kind == AnswerKind::Flag && (*tok == "true" || *tok == "false")),
                }
            }
        }
        for q in QuestionId::ALL {
            assert_eq!(cat.get(q).id, q);
            assert_eq!(q.to_string().parse::<QuestionId>().unwrap(), q);
        }
    }

    #[test]
    fn catalog_is_constant() {
        assert_eq!(catalog(), &build());
        assert!(std::ptr::eq(catalog(), catalog()));
    }

    #[test]
    fn vocabulary_questions_name_their_vocabulary() {
        for q in &catalog().questions {
            if q.answer_kind.is_vocabulary() {
                assert!(q.vocabulary.is_some(), "{}", q.id);
            }
        }
    }

    #[test]
    fn parse_question_ids() {
        assert_eq!("m2".parse::<QuestionId>().unwrap(), QuestionId::M2);
        assert!("Z9".parse::<QuestionId>().is_err());
        assert_eq!(QuestionId::T3.number(), 3);
    }
}
