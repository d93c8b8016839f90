//! Factsheet data model, controlled vocabularies and the question catalog.

mod answer;
mod catalog;
mod factsheet;
mod mapping;
pub mod vocab;

pub use answer::{Answer, TokenRef};
pub use catalog::{
    catalog, AnswerKind, Dimension, Question, QuestionCatalog, QuestionId, SubAnswer,
    UnknownQuestion, VisibleIf, MODEL_JUDGE_TOKENS,
};
pub use factsheet::{
    empty_factsheet, is_extension_key, is_supported_version, AlignmentDim, Annotated, ContextDim,
    Factsheet, JudgeDetails, MethodDim, ModalityAnswer, ScopeDim, SizeSpec, SplitSpec,
    StructureDim, Violation, EFS_VERSION,
};
pub use mapping::{map_terms, map_text, map_vocab, MappedTerm, VocabError};
pub use vocab::{VocabId, VocabTerm, Vocabulary};
