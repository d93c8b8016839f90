//! The commented template written by `efs new`.

use std::fmt::Write;

use efs_core::model::{AnswerKind, Dimension, VocabId, EFS_VERSION};
use efs_core::render::field_title;
use efs_core::catalog;

/// A canonical document with every question present as a comment. It
/// parses to an empty factsheet.
pub fn skeleton(id: &str) -> String {
    let mut out = format!("#%EFS {EFS_VERSION}\n");
    out.push_str(&format!("# Factsheet `{id}`. Uncomment a key and fill in its value.\n"));
    out.push_str("# Repeat a key to give several values. Vocabulary answers take a\n");
    out.push_str("# token, optionally followed by `: your own wording`.\n");
    out.push_str("# Multi-line text goes between lines holding only \"\"\".\n");

    let cat = catalog();
    for dim in Dimension::ALL {
        let _ = write!(out, "\n[{}]\n# {}\n", dim.name(), dim.section_title());
        for q in cat.section(dim) {
            let need = if q.mandatory { "required" } else { "optional" };
            let _ = write!(out, "\n# {} {} ({need})\n# {}\n", q.id, field_title(q.id), q.prompt);
            if let Some(p) = &q.visible_if {
                let _ = writeln!(out, "# Only when {} includes {}.", p.question_id, p.contains_any.join(" or "));
            }
            match q.answer_kind {
                AnswerKind::Structured if !q.sub_answers.is_empty() => {}
                AnswerKind::Structured => {
                    key_line(&mut out, q.key, "\"\"");
                    if let Some(v) = q.vocabulary {
                        let tag_key = match v {
                            VocabId::ValidationTag => "validation_tag",
                            VocabId::BaselineTag => "baseline_tag",
                            _ => "robustness_tag",
                        };
                        choices(&mut out, v);
                        key_line(&mut out, tag_key, "\"\"");
                    }
                }
                AnswerKind::Flag => key_line(&mut out, q.key, "false"),
                AnswerKind::SplitList => {
                    if let Some(v) = q.vocabulary {
                        choices(&mut out, v);
                    }
                    key_line(&mut out, q.key, "\"test: what the split holds\"");
                }
                _ => {
                    if let Some(v) = q.vocabulary {
                        choices(&mut out, v);
                    }
                    key_line(&mut out, q.key, "\"\"");
                }
            }
            for sub in &q.sub_answers {
                if sub.key == q.key && q.answer_kind != AnswerKind::Structured {
                    continue;
                }
                let _ = writeln!(out, "# {}", sub.prompt);
                if let Some(p) = &sub.visible_if {
                    let _ = writeln!(out, "# Only when {} is {}.", p.question_id, p.contains_any.join(" or "));
                }
                if let Some(v) = sub.vocabulary {
                    choices(&mut out, v);
                }
                key_line(&mut out, sub.key, "\"\"");
            }
        }
    }
    out
}

fn key_line(out: &mut String, key: &str, value: &str) {
    let _ = writeln!(out, "# {key} = {value}");
}

fn choices(out: &mut String, v: VocabId) {
    let tokens: Vec<&str> = v.terms().iter().map(|t| t.token).collect();
    let _ = writeln!(out, "#   one of: {}", tokens.join(", "));
}
