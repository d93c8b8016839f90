//! Evaluation factsheets: a typed model for documenting AI evaluation
//! methodologies, with a canonical text format, a JSON interchange form,
//! `evaluationcard` import/export, a rule-based validator with completeness
//! scoring, renderers and corpus analytics.

pub mod analyze;
pub mod card;
pub mod diagnostic;
pub mod model;
pub mod render;
pub mod span;
pub mod text;
#[cfg(feature = "testing")]
pub mod testing;
pub mod validate;

pub use analyze::{corpus_stats, diff, CorpusStats, DiffEntry, DiffStatus, FactsheetDiff};
pub use card::{export_card, import_card, parse_card, ImportReport};
pub use diagnostic::{Code, Diagnostic, Severity};
pub use model::{catalog, empty_factsheet, map_vocab, Factsheet, QuestionId};
pub use render::{render, render_diagnostics, RenderError, RenderTarget};
pub use span::SourceSpan;
pub use text::{from_interchange, parse_canonical, serialize_canonical, to_interchange, ErrorCode, ParseError};
pub use validate::{completeness, is_publishable, validate, CompletenessReport};
