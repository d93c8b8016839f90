//! The canonical `.efs` text format.
//!
//! ```text
//! #%EFS 1.0
//!
//! [context]
//! title = "ImageNet"
//! purpose = "research"
//! purpose = "selection: Model Selection"
//!
//! [method]
//! step = """
//! a value with
//! two lines
//! """
//! heldout = true
//! ```
//!
//! Line 1 is the magic line. Entries are `key = value`; scalars are
//! double-quoted with `\"`, `\\` and `\n` escapes; values containing a
//! newline use a `"""` block whose content lines are verbatim (a content
//! line of backslashes followed by `"""` gets one extra leading backslash).
//! List answers repeat their key. Flags are bare `true` / `false`.
//! Vocabulary values are `token` when the raw text equals the token's
//! display label and `token: raw text` otherwise. `#` lines are comments.
//!
//! The serializer emits the unique canonical form: fixed section order,
//! keys in catalog order, one blank line before each section header, LF
//! endings and a single trailing LF. `[x-extensions]` is emitted only when
//! non-empty.

use std::collections::HashSet;

use crate::model::vocab::{
    push_unique, BaselineTag, RobustnessTag, SplitKind, ValidationTag, VocabTerm, Vocabulary,
};
use crate::model::{
    is_extension_key, is_supported_version, Annotated, Factsheet, SizeSpec, SplitSpec,
    EFS_VERSION,
};
use crate::span::SourceSpan;

use super::error::{ErrorCode, ParseError};

const MAGIC_PREFIX: &str = "#%EFS ";
const BLOCK: &str = "\"\"\"";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Context,
    Scope,
    Structure,
    Method,
    Alignment,
    Extensions,
}

impl Section {
    fn from_name(name: &str) -> Option<Section> {
        Some(match name {
            "context" => Section::Context,
            "scope" => Section::Scope,
            "structure" => Section::Structure,
            "method" => Section::Method,
            "alignment" => Section::Alignment,
            "x-extensions" => Section::Extensions,
            _ => return None,
        })
    }
}

// ---------------------------------------------------------------------------
// Serialization

struct Emitter {
    out: String,
}

impl Emitter {
    fn section(&mut self, name: &str) {
        self.out.push('\n');
        self.out.push('[');
        self.out.push_str(name);
        self.out.push_str("]\n");
    }

    fn value(&mut self, key: &str, value: &str) {
        self.out.push_str(key);
        self.out.push_str(" = ");
        if value.contains('\n') {
            self.out.push_str(BLOCK);
            self.out.push('\n');
            for line in value.split('\n') {
                if is_escaped_fence(line) {
                    self.out.push('\\');
                }
                self.out.push_str(line);
                self.out.push('\n');
            }
            self.out.push_str(BLOCK);
        } else {
            self.out.push('"');
            for c in value.chars() {
                match c {
                    '"' => self.out.push_str("\\\""),
                    '\\' => self.out.push_str("\\\\"),
                    c => self.out.push(c),
                }
            }
            self.out.push('"');
        }
        self.out.push('\n');
    }

    fn opt(&mut self, key: &str, value: &Option<String>) {
        if let Some(v) = value {
            self.value(key, v);
        }
    }

    fn list(&mut self, key: &str, items: &[String]) {
        for item in items {
            self.value(key, item);
        }
    }

    fn term<V: Vocabulary>(&mut self, key: &str, term: &VocabTerm<V>) {
        if term.is_native() {
            self.value(key, term.token.token());
        } else {
            self.value(key, &format!("{}: {}", term.token.token(), term.raw));
        }
    }

    fn terms<V: Vocabulary>(&mut self, key: &str, terms: &[VocabTerm<V>]) {
        for t in terms {
            self.term(key, t);
        }
    }

    fn annotated<T: Vocabulary>(&mut self, key: &str, tag_key: &str, note: &Option<Annotated<T>>) {
        if let Some(note) = note {
            self.value(key, &note.text);
            for tag in &note.tags {
                self.value(tag_key, tag.token());
            }
        }
    }
}

/// `"""` preceded by zero or more backslashes.
fn is_escaped_fence(line: &str) -> bool {
    line.trim_start_matches('\\') == BLOCK
}

/// Writes `fs` in canonical form.
pub fn serialize_canonical(fs: &Factsheet) -> String {
    let mut e = Emitter {
        out: format!("{MAGIC_PREFIX}{}\n", fs.efs_version),
    };

    let c = &fs.context;
    e.section("context");
    e.opt("title", &c.title);
    e.opt("subtitle", &c.subtitle);
    e.opt("authors", &c.authors);
    e.opt("release_date", &c.release_date);
    e.opt("paper_link", &c.paper_link);
    e.opt("code_link", &c.code_link);
    e.terms("purpose", &c.purposes);

    let s = &fs.scope;
    e.section("scope");
    e.list("capability", &s.capabilities);
    e.terms("property", &s.model_properties);
    e.terms("input_modality", &s.input_modality.terms);
    e.opt("input_modality_detail", &s.input_modality.detail);
    e.terms("output_modality", &s.output_modality.terms);
    e.opt("output_modality_detail", &s.output_modality.detail);

    let t = &fs.structure;
    e.section("structure");
    e.terms("input_source", &t.input_sources);
    e.terms("output_source", &t.output_sources);
    if let Some(size) = &t.size {
        e.term("size", &VocabTerm::with_raw(size.category, size.raw.clone()));
        if let Some(n) = size.count {
            e.value("size_count", &n.to_string());
        }
    }
    for split in &t.splits {
        e.value("split", &format!("{}: {}", split.kind.token(), split.description));
    }
    if let Some(d) = &t.design {
        e.term("design", d);
    }
    e.list("dataset_ref", &t.dataset_refs);

    let m = &fs.method;
    e.section("method");
    e.terms("judge", &m.judges);
    e.opt("judge_model", &m.judge_details.judge_model);
    e.opt("judge_prompting", &m.judge_details.prompting_strategy);
    e.opt("judge_temperature", &m.judge_details.temperature);
    e.opt("judge_agreement", &m.judge_details.agreement);
    e.list("step", &m.protocol);
    if let Some(a) = &m.model_access {
        e.term("model_access", a);
    }
    if let Some(h) = m.heldout {
        e.out.push_str(if h { "heldout = true\n" } else { "heldout = false\n" });
    }
    e.opt("heldout_details", &m.heldout_details);

    let a = &fs.alignment;
    e.section("alignment");
    e.annotated("validation", "validation_tag", &a.validation);
    e.annotated("baselines", "baseline_tag", &a.baselines);
    e.annotated("robustness", "robustness_tag", &a.robustness);
    e.list("limitation", &a.limitations);
    e.list("similar_eval", &a.similar_evals);

    if !fs.extensions.is_empty() {
        e.section("x-extensions");
        for (k, v) in &fs.extensions {
            e.value(k, v);
        }
    }
    e.out
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug)]
enum Value {
    Str(String),
    Flag(bool),
}

struct Entry<'a> {
    key: &'a str,
    key_span: SourceSpan,
    value: Value,
    value_span: SourceSpan,
}

struct Builder {
    fs: Factsheet,
    errors: Vec<ParseError>,
    seen: HashSet<(Section, String)>,
    size_count: Option<(String, SourceSpan)>,
}

impl Builder {
    fn err(&mut self, code: ErrorCode, span: SourceSpan, msg: impl Into<String>) {
        self.errors.push(ParseError::new(code, span, msg));
    }

    fn text(&mut self, e: &Entry) -> Option<String> {
        match &e.value {
            Value::Str(s) => Some(s.clone()),
            Value::Flag(_) => {
                self.err(
                    ErrorCode::P004,
                    e.value_span,
                    format!("`{}` takes a quoted string, not a bare flag", e.key),
                );
                None
            }
        }
    }

    fn nonempty(&mut self, e: &Entry) -> Option<String> {
        let s = self.text(e)?;
        if s.is_empty() {
            self.err(ErrorCode::P004, e.value_span, format!("`{}` must not be empty", e.key));
            return None;
        }
        Some(s)
    }

    fn claim(&mut self, section: Section, e: &Entry) -> bool {
        if self.seen.insert((section, e.key.to_string())) {
            true
        } else {
            self.err(ErrorCode::P006, e.key_span, format!("duplicate key `{}`", e.key));
            false
        }
    }

    fn scalar(&mut self, section: Section, e: &Entry, slot: fn(&mut Factsheet) -> &mut Option<String>) {
        if self.claim(section, e) {
            if let Some(v) = self.text(e) {
                *slot(&mut self.fs) = Some(v);
            }
        }
    }

    fn list(&mut self, e: &Entry, nonempty: bool, slot: fn(&mut Factsheet) -> &mut Vec<String>) {
        let v = if nonempty { self.nonempty(e) } else { self.text(e) };
        if let Some(v) = v {
            slot(&mut self.fs).push(v);
        }
    }

    fn term<V: Vocabulary>(&mut self, e: &Entry) -> Option<VocabTerm<V>> {
        let s = self.text(e)?;
        let (token, raw) = match s.split_once(':') {
            Some((token, rest)) => match rest.strip_prefix(' ') {
                Some(raw) if !raw.is_empty() => (token, Some(raw.to_string())),
                _ => {
                    self.err(
                        ErrorCode::P004,
                        e.value_span,
                        format!("expected `token: raw text` in `{}`", e.key),
                    );
                    return None;
                }
            },
            None => (s.as_str(), None),
        };
        match V::from_token(token) {
            Some(v) => Some(match raw {
                Some(raw) => VocabTerm::with_raw(v, raw),
                None => VocabTerm::native(v),
            }),
            None => {
                self.err(
                    ErrorCode::P005,
                    e.value_span,
                    format!("`{token}` is not a {} token", V::ID.name()),
                );
                None
            }
        }
    }

    fn terms<V: Vocabulary>(&mut self, e: &Entry, slot: fn(&mut Factsheet) -> &mut Vec<VocabTerm<V>>) {
        if let Some(t) = self.term::<V>(e) {
            let tok = t.token.token();
            if !push_unique(slot(&mut self.fs), t) {
                self.err(ErrorCode::P006, e.value_span, format!("`{tok}` repeated in `{}`", e.key));
            }
        }
    }

    fn single_term<V: Vocabulary>(
        &mut self,
        section: Section,
        e: &Entry,
        slot: fn(&mut Factsheet) -> &mut Option<VocabTerm<V>>,
    ) {
        if self.claim(section, e) {
            if let Some(t) = self.term::<V>(e) {
                *slot(&mut self.fs) = Some(t);
            }
        }
    }

    fn annotated_text<T>(&mut self, section: Section, e: &Entry, slot: fn(&mut Factsheet) -> &mut Option<Annotated<T>>) {
        if self.claim(section, e) {
            if let Some(v) = self.text(e) {
                slot(&mut self.fs).get_or_insert_with(|| Annotated::text("")).text = v;
            }
        }
    }

    fn tag<T: Vocabulary>(&mut self, e: &Entry, slot: fn(&mut Factsheet) -> &mut Option<Annotated<T>>) {
        let Some(s) = self.text(e) else { return };
        let Some(tag) = T::from_token(&s) else {
            self.err(
                ErrorCode::P005,
                e.value_span,
                format!("`{s}` is not a {} token", T::ID.name()),
            );
            return;
        };
        let note = slot(&mut self.fs).get_or_insert_with(|| Annotated::text(""));
        if note.tags.contains(&tag) {
            self.err(ErrorCode::P006, e.value_span, format!("tag `{s}` repeated"));
        } else {
            note.tags.push(tag);
        }
    }

    fn split(&mut self, e: &Entry) {
        let Some(s) = self.text(e) else { return };
        let Some((kind, desc)) = s.split_once(':') else {
            self.err(ErrorCode::P004, e.value_span, "expected `kind: description` in `split`");
            return;
        };
        let Some(kind) = SplitKind::from_token(kind) else {
            self.err(ErrorCode::P005, e.value_span, format!("`{kind}` is not a split_kind token"));
            return;
        };
        let desc = match desc.strip_prefix(' ') {
            Some(d) if !d.is_empty() => d.to_string(),
            _ => {
                self.err(ErrorCode::P004, e.value_span, "split description must not be empty");
                return;
            }
        };
        if self.fs.structure.splits.iter().any(|s| s.kind == kind) {
            self.err(
                ErrorCode::P006,
                e.value_span,
                format!("more than one `{}` split", kind.token()),
            );
            return;
        }
        self.fs.structure.splits.push(SplitSpec {
            kind,
            description: desc,
        });
    }

    fn size(&mut self, e: &Entry) {
        if !self.claim(Section::Structure, e) {
            return;
        }
        if let Some(t) = self.term(e) {
            self.fs.structure.size = Some(SizeSpec {
                category: t.token,
                count: None,
                raw: t.raw,
            });
        }
    }

    fn apply(&mut self, section: Section, e: Entry) {
        use Section as S;
        match (section, e.key) {
            (S::Context, "title") => self.scalar(section, &e, |f| &mut f.context.title),
            (S::Context, "subtitle") => self.scalar(section, &e, |f| &mut f.context.subtitle),
            (S::Context, "authors") => self.scalar(section, &e, |f| &mut f.context.authors),
            (S::Context, "release_date") => self.scalar(section, &e, |f| &mut f.context.release_date),
            (S::Context, "paper_link") => self.scalar(section, &e, |f| &mut f.context.paper_link),
            (S::Context, "code_link") => self.scalar(section, &e, |f| &mut f.context.code_link),
            (S::Context, "purpose") => self.terms(&e, |f| &mut f.context.purposes),

            (S::Scope, "capability") => self.list(&e, false, |f| &mut f.scope.capabilities),
            (S::Scope, "property") => self.terms(&e, |f| &mut f.scope.model_properties),
            (S::Scope, "input_modality") => self.terms(&e, |f| &mut f.scope.input_modality.terms),
            (S::Scope, "input_modality_detail") => {
                self.scalar(section, &e, |f| &mut f.scope.input_modality.detail)
            }
            (S::Scope, "output_modality") => self.terms(&e, |f| &mut f.scope.output_modality.terms),
            (S::Scope, "output_modality_detail") => {
                self.scalar(section, &e, |f| &mut f.scope.output_modality.detail)
            }

            (S::Structure, "input_source") => self.terms(&e, |f| &mut f.structure.input_sources),
            (S::Structure, "output_source") => self.terms(&e, |f| &mut f.structure.output_sources),
            (S::Structure, "size") => self.size(&e),
            (S::Structure, "size_count") => {
                if self.claim(section, &e) {
                    if let Some(v) = self.text(&e) {
                        self.size_count = Some((v, e.value_span));
                    }
                }
            }
            (S::Structure, "split") => self.split(&e),
            (S::Structure, "design") => self.single_term(section, &e, |f| &mut f.structure.design),
            (S::Structure, "dataset_ref") => self.list(&e, false, |f| &mut f.structure.dataset_refs),

            (S::Method, "judge") => self.terms(&e, |f| &mut f.method.judges),
            (S::Method, "judge_model") => {
                self.scalar(section, &e, |f| &mut f.method.judge_details.judge_model)
            }
            (S::Method, "judge_prompting") => {
                self.scalar(section, &e, |f| &mut f.method.judge_details.prompting_strategy)
            }
            (S::Method, "judge_temperature") => {
                self.scalar(section, &e, |f| &mut f.method.judge_details.temperature)
            }
            (S::Method, "judge_agreement") => {
                self.scalar(section, &e, |f| &mut f.method.judge_details.agreement)
            }
            (S::Method, "step") => self.list(&e, true, |f| &mut f.method.protocol),
            (S::Method, "model_access") => {
                self.single_term(section, &e, |f| &mut f.method.model_access)
            }
            (S::Method, "heldout") => {
                if self.claim(section, &e) {
                    match e.value {
                        Value::Flag(b) => self.fs.method.heldout = Some(b),
                        Value::Str(_) => self.err(
                            ErrorCode::P004,
                            e.value_span,
                            "`heldout` takes a bare `true` or `false`",
                        ),
                    }
                }
            }
            (S::Method, "heldout_details") => {
                self.scalar(section, &e, |f| &mut f.method.heldout_details)
            }

            (S::Alignment, "validation") => {
                self.annotated_text(section, &e, |f| &mut f.alignment.validation)
            }
            (S::Alignment, "validation_tag") => {
                self.tag::<ValidationTag>(&e, |f| &mut f.alignment.validation)
            }
            (S::Alignment, "baselines") => {
                self.annotated_text(section, &e, |f| &mut f.alignment.baselines)
            }
            (S::Alignment, "baseline_tag") => {
                self.tag::<BaselineTag>(&e, |f| &mut f.alignment.baselines)
            }
            (S::Alignment, "robustness") => {
                self.annotated_text(section, &e, |f| &mut f.alignment.robustness)
            }
            (S::Alignment, "robustness_tag") => {
                self.tag::<RobustnessTag>(&e, |f| &mut f.alignment.robustness)
            }
            (S::Alignment, "limitation") => self.list(&e, false, |f| &mut f.alignment.limitations),
            (S::Alignment, "similar_eval") => {
                self.list(&e, false, |f| &mut f.alignment.similar_evals)
            }

            (S::Extensions, key) => {
                if !is_extension_key(key) {
                    self.err(
                        ErrorCode::P003,
                        e.key_span,
                        format!("extension key `{key}` must match x-[A-Za-z0-9_.-]+"),
                    );
                } else if self.claim(section, &e) {
                    if let Some(v) = self.text(&e) {
                        self.fs.extensions.insert(key.to_string(), v);
                    }
                }
            }
            (_, key) => self.err(ErrorCode::P003, e.key_span, format!("unknown key `{key}`")),
        }
    }

    fn finish(mut self) -> Result<Factsheet, Vec<ParseError>> {
        if let Some((raw, span)) = self.size_count.take() {
            let parsed = raw
                .parse::<u64>()
                .ok()
                .filter(|_| raw.chars().all(|c| c.is_ascii_digit()));
            match (parsed, self.fs.structure.size.as_mut()) {
                (Some(n), Some(size)) => size.count = Some(n),
                (None, _) => self.err(
                    ErrorCode::P004,
                    span,
                    format!("`size_count` must be a nonnegative integer, got `{raw}`"),
                ),
                (Some(_), None) => {
                    self.err(ErrorCode::P004, span, "`size_count` given without `size`")
                }
            }
        }
        if self.errors.is_empty() {
            debug_assert!(self.fs.is_valid(), "{:?}", self.fs.violations());
            Ok(self.fs)
        } else {
            Err(self.errors)
        }
    }
}

fn parse_quoted(s: &str) -> Result<String, &'static str> {
    let mut out = String::new();
    let mut chars = s.chars();
    // caller guarantees the opening quote
    chars.next();
    loop {
        match chars.next() {
            None => return Err("unterminated string"),
            Some('"') => break,
            Some('\\') => match chars.next() {
                Some('"') => out.push('"'),
                Some('\\') => out.push('\\'),
                Some('n') => out.push('\n'),
                Some(_) => return Err("unknown escape (only \\\" \\\\ \\n are allowed)"),
                None => return Err("unterminated string"),
            },
            Some(c) => out.push(c),
        }
    }
    if chars.as_str().trim().is_empty() {
        Ok(out)
    } else {
        Err("unexpected text after closing quote")
    }
}

/// Parses a canonical document. Comments and blank lines are accepted
/// anywhere after the magic line; every recoverable error is reported.
pub fn parse_canonical(input: &str) -> Result<Factsheet, Vec<ParseError>> {
    let lines: Vec<&str> = input.split('\n').collect();
    let mut builder = Builder {
        fs: Factsheet::default(),
        errors: Vec::new(),
        seen: HashSet::new(),
        size_count: None,
    };

    let magic = lines[0];
    match magic.strip_prefix(MAGIC_PREFIX) {
        Some(v) if is_supported_version(v) => builder.fs.efs_version = v.to_string(),
        _ => {
            return Err(vec![ParseError::new(
                ErrorCode::P001,
                SourceSpan::new(1, 1, magic.chars().count().max(1)),
                format!("line 1 must be `{MAGIC_PREFIX}{EFS_VERSION}` (major version 1)"),
            )]);
        }
    }

    let mut section: Option<Option<Section>> = None;
    let mut i = 1;
    while i < lines.len() {
        let line_no = i + 1;
        let raw = lines[i];
        i += 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        let col = raw[..indent].chars().count() + 1;
        let line_span = SourceSpan::new(line_no, col, trimmed.chars().count());

        if let Some(name) = trimmed.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let s = Section::from_name(name);
            if s.is_none() {
                builder.err(ErrorCode::P002, line_span, format!("unknown section `[{name}]`"));
            }
            section = Some(s);
            continue;
        }

        let Some(eq) = trimmed.find('=') else {
            builder.err(ErrorCode::P004, line_span, "expected `key = value`");
            continue;
        };
        let key = trimmed[..eq].trim_end();
        let value_text = trimmed[eq + 1..].trim_start();
        let key_span = SourceSpan::new(line_no, col, key.chars().count());
        let value_col = col + trimmed[..trimmed.len() - value_text.len()].chars().count();
        let value_span = SourceSpan::new(line_no, value_col, value_text.chars().count());
        if key.is_empty() || key.contains(char::is_whitespace) {
            builder.err(ErrorCode::P004, line_span, "expected `key = value`");
            continue;
        }

        let value = if value_text == BLOCK {
            let mut content: Vec<String> = Vec::new();
            let mut closed = false;
            while i < lines.len() {
                let l = lines[i];
                i += 1;
                if l == BLOCK {
                    closed = true;
                    break;
                }
                content.push(match l.strip_prefix('\\') {
                    Some(rest) if is_escaped_fence(rest) => rest.to_string(),
                    _ => l.to_string(),
                });
            }
            if !closed {
                builder.err(ErrorCode::P004, value_span, "unterminated `\"\"\"` block");
                return Err(builder.errors);
            }
            Value::Str(content.join("\n"))
        } else if value_text.starts_with('"') {
            match parse_quoted(value_text) {
                Ok(s) => Value::Str(s),
                Err(msg) => {
                    builder.err(ErrorCode::P004, value_span, msg);
                    continue;
                }
            }
        } else if value_text == "true" {
            Value::Flag(true)
        } else if value_text == "false" {
            Value::Flag(false)
        } else {
            builder.err(
                ErrorCode::P004,
                value_span,
                "values are quoted strings, `\"\"\"` blocks, or bare true/false",
            );
            continue;
        };

        let entry = Entry {
            key,
            key_span,
            value,
            value_span,
        };
        match section {
            None => builder.err(
                ErrorCode::P003,
                key_span,
                format!("key `{key}` appears before any section"),
            ),
            // entries of an unknown section were already reported with it
            Some(None) => {}
            Some(Some(s)) => builder.apply(s, entry),
        }
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vocab::{Judge, ModelAccess, Purpose, SizeCategory};
    use crate::model::empty_factsheet;

    const EMPTY: &str = "#%EFS 1.0\n\n[context]\n\n[scope]\n\n[structure]\n\n[method]\n\n[alignment]\n";

    fn codes(input: &str) -> Vec<(ErrorCode, usize)> {
        parse_canonical(input)
            .unwrap_err()
            .into_iter()
            .map(|e| (e.code, e.span.line))
            .collect()
    }

    #[test]
    fn empty_factsheet_serializes_to_headers_only() {
        assert_eq!(serialize_canonical(&empty_factsheet()), EMPTY);
        assert_eq!(parse_canonical(EMPTY).unwrap(), empty_factsheet());
    }

    #[test]
    fn minimal_document() {
        let fs = parse_canonical("#%EFS 1.0\n[context]\ntitle = \"ImageNet\"\n").unwrap();
        let mut expected = empty_factsheet();
        expected.context.title = Some("ImageNet".into());
        assert_eq!(fs, expected);
    }

    #[test]
    fn unknown_judge_token_is_p005_on_its_line() {
        let doc = "#%EFS 1.0\n[method]\njudge = \"model_llm\"\njudge = \"vibes\"\n";
        assert_eq!(codes(doc), vec![(ErrorCode::P005, 4)]);
    }

    #[test]
    fn magic_line_errors_stop_parsing() {
        assert_eq!(codes(""), vec![(ErrorCode::P001, 1)]);
        assert_eq!(codes("#%EFS 2.0\n[context]\n"), vec![(ErrorCode::P001, 1)]);
        assert_eq!(codes("[context]\n"), vec![(ErrorCode::P001, 1)]);
    }

    #[test]
    fn recoverable_errors_accumulate() {
        let doc = "#%EFS 1.0\n[bogus]\nfoo = \"x\"\n[context]\nwho = \"x\"\ntitle = \"a\"\ntitle = \"b\"\nauthors = \"unterminated\n[method]\nheldout = \"yes\"\n";
        assert_eq!(
            codes(doc),
            vec![
                (ErrorCode::P002, 2),
                (ErrorCode::P003, 5),
                (ErrorCode::P006, 7),
                (ErrorCode::P004, 8),
                (ErrorCode::P004, 10),
            ]
        );
    }

    #[test]
    fn unterminated_block_is_unrecoverable() {
        let doc = "#%EFS 1.0\n[context]\nsubtitle = \"\"\"\nline\n[scope]\nfoo = \"x\"\n";
        assert_eq!(codes(doc), vec![(ErrorCode::P004, 3)]);
    }

    #[test]
    fn extension_keys_must_be_namespaced() {
        let doc = "#%EFS 1.0\n[x-extensions]\nlicense = \"MIT\"\nx-license = \"MIT\"\n";
        assert_eq!(codes(doc), vec![(ErrorCode::P003, 3)]);
    }

    #[test]
    fn closed_vocabularies_reject_unknown_tokens() {
        let doc = "#%EFS 1.0\n[structure]\ndesign = \"wobbly\"\nsize = \"huge\"\nsplit = \"dev: x\"\n[method]\nmodel_access = \"other: api\"\n[alignment]\nbaseline_tag = \"random: chance\"\n";
        let c = codes(doc);
        assert_eq!(c.len(), 5);
        assert!(c.iter().all(|(code, _)| *code == ErrorCode::P005));
    }

    #[test]
    fn comments_blank_lines_and_order_are_tolerated() {
        let doc = "#%EFS 1.0\n# a comment\n[method]\n  # indented comment\nheldout = false\njudge = \"model_llm: Model-based (LLM judge: GPT-4)\"\n[context]\npurpose = \"research\"\n";
        let fs = parse_canonical(doc).unwrap();
        assert_eq!(fs.method.heldout, Some(false));
        assert_eq!(fs.method.judges[0].token, Judge::ModelLlm);
        assert_eq!(fs.method.judges[0].raw, "Model-based (LLM judge: GPT-4)");
        assert_eq!(fs.context.purposes, vec![VocabTerm::native(Purpose::Research)]);
    }

    #[test]
    fn block_values_and_fence_escaping() {
        let mut fs = empty_factsheet();
        fs.context.subtitle = Some("a\n\"\"\"\n\\\"\"\"\n".into());
        fs.method.protocol = vec!["one".into(), "two\nlines".into()];
        let text = serialize_canonical(&fs);
        assert!(text.contains("subtitle = \"\"\"\na\n\\\"\"\"\n\\\\\"\"\"\n\n\"\"\"\n"));
        assert_eq!(parse_canonical(&text).unwrap(), fs);
    }

    #[test]
    fn quoted_escapes() {
        let mut fs = empty_factsheet();
        fs.context.title = Some(r#"say "hi" \ bye"#.into());
        let text = serialize_canonical(&fs);
        assert!(text.contains(r#"title = "say \"hi\" \\ bye""#));
        assert_eq!(parse_canonical(&text).unwrap(), fs);
        assert_eq!(
            codes("#%EFS 1.0\n[context]\ntitle = \"bad \\t escape\"\n"),
            vec![(ErrorCode::P004, 3)]
        );
    }

    #[test]
    fn size_and_count() {
        let doc = "#%EFS 1.0\n[structure]\nsize = \"large: Large (>100K samples): 14 million images total\"\nsize_count = \"14000000\"\n";
        let fs = parse_canonical(doc).unwrap();
        let size = fs.structure.size.as_ref().unwrap();
        assert_eq!(size.category, SizeCategory::Large);
        assert_eq!(size.count, Some(14_000_000));
        assert_eq!(size.raw, "Large (>100K samples): 14 million images total");
        assert_eq!(codes("#%EFS 1.0\n[structure]\nsize_count = \"12\"\n"), vec![(ErrorCode::P004, 3)]);
        assert_eq!(
            codes("#%EFS 1.0\n[structure]\nsize = \"small\"\nsize_count = \"-1\"\n"),
            vec![(ErrorCode::P004, 4)]
        );
    }

    #[test]
    fn duplicate_set_members_and_splits() {
        let doc = "#%EFS 1.0\n[context]\npurpose = \"research\"\npurpose = \"research: again\"\n[structure]\nsplit = \"test: a\"\nsplit = \"test: b\"\n";
        assert_eq!(codes(doc), vec![(ErrorCode::P006, 4), (ErrorCode::P006, 7)]);
    }

    #[test]
    fn single_terms_keep_raw() {
        let doc = "#%EFS 1.0\n[method]\nmodel_access = \"output_only: Black-box (outputs only)\"\n";
        let fs = parse_canonical(doc).unwrap();
        let access = fs.method.model_access.unwrap();
        assert_eq!(access.token, ModelAccess::OutputOnly);
        assert!(!access.is_native());
    }

    #[test]
    fn error_spans_stay_inside_input() {
        let doc = "#%EFS 1.0\n[context]\ntitle = \"x";
        let errs = parse_canonical(doc).unwrap_err();
        assert_eq!(errs[0].span.line, 3);
        assert_eq!(errs[0].span.column, 9);
    }
}
