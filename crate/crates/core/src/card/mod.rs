//! `evaluationcard` markup: a bracketed option list followed by
//! `\Field{value}` commands.
//!
//! ```text
//! \begin{evaluationcard}[
//!   title={MT-Bench},
//!   date={2023}
//! ]
//!   \Purpose{Research}
//!   \Judge{Model-based (LLM judge: GPT-4)}
//! \end{evaluationcard}
//! ```

mod export;
mod import;
mod parse;

pub use export::export_card;
pub use import::{import_card, ImportReport, COMMANDS, OPTIONS};
pub use parse::{escape, parse_card, unescape, CardCommand, CardDocument, CardOption};
