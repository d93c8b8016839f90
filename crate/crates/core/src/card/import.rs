use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;

use crate::diagnostic::{Code, Diagnostic};
use crate::model::vocab::{
    BaselineTag, Design, InputSource, Judge, Modality, ModelAccess, ModelProperty, OutputSource,
    Purpose, RobustnessTag, SizeCategory, SplitKind, ValidationTag,
};
use crate::model::{
    empty_factsheet, is_extension_key, map_terms, Annotated, Factsheet, QuestionId, SizeSpec,
    SplitSpec, VocabError, VocabTerm, Vocabulary,
};
use crate::text::ParseError;

use super::parse::{parse_card, unescape, CardCommand, CardDocument};

/// Header options in card order.
pub const OPTIONS: [&str; 6] = ["title", "subtitle", "authors", "link", "code-link", "date"];

/// Body commands in card order.
pub const COMMANDS: [&str; 20] = [
    "Purpose",
    "PrinciplesTested",
    "FunctionalProps",
    "InputModality",
    "OutputModality",
    "InputSource",
    "OutputSource",
    "Size",
    "Splits",
    "Design",
    "Judge",
    "Protocol",
    "ModelAccess",
    "HasHeldout",
    "HeldoutDetails",
    "AlignmentValidation",
    "BaselineModels",
    "RobustnessMeasures",
    "KnownLimitations",
    "BenchmarksList",
];

/// Commands this crate writes for fields the base card layout has no slot
/// for. They are optional on import.
pub(crate) const EXTRA_COMMANDS: [&str; 13] = [
    "InputModalityDetail",
    "OutputModalityDetail",
    "SizeCategory",
    "SizeCount",
    "DatasetRefs",
    "JudgeModel",
    "JudgePrompting",
    "JudgeTemperature",
    "JudgeAgreement",
    "ValidationTags",
    "BaselineTags",
    "RobustnessTags",
    "Extension",
];

fn option_question(key: &str) -> Option<QuestionId> {
    use QuestionId::*;
    Some(match key {
        "title" => C1,
        "subtitle" => C2,
        "authors" => C3,
        "date" => C4,
        "link" => C5,
        "code-link" => C6,
        _ => return None,
    })
}

fn command_question(name: &str) -> Option<QuestionId> {
    use QuestionId::*;
    Some(match name {
        "Purpose" => C7,
        "PrinciplesTested" => S1,
        "FunctionalProps" => S2,
        "InputModality" | "InputModalityDetail" => S3,
        "OutputModality" | "OutputModalityDetail" => S4,
        "InputSource" => T1,
        "OutputSource" => T2,
        "Size" | "SizeCategory" | "SizeCount" => T3,
        "Splits" => T4,
        "Design" => T5,
        "DatasetRefs" => T6,
        "Judge" => M1,
        "JudgeModel" | "JudgePrompting" | "JudgeTemperature" | "JudgeAgreement" => M2,
        "Protocol" => M3,
        "ModelAccess" => M4,
        "HasHeldout" | "HeldoutDetails" => M5,
        "AlignmentValidation" | "ValidationTags" => A1,
        "BaselineModels" | "BaselineTags" => A2,
        "RobustnessMeasures" | "RobustnessTags" => A3,
        "KnownLimitations" => A4,
        "BenchmarksList" => A5,
        _ => return None,
    })
}

/// The imported factsheet plus everything worth telling the author about
/// the conversion, in source order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportReport {
    pub factsheet: Factsheet,
    pub notes: Vec<Diagnostic>,
}

static COUNT: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)(\d[\d,]*(?:\.\d+)?)(?:\s*(thousand|million|billion)\b|([km])\b)?").unwrap()
});
static STEP_MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?m)^[ \t]*\d+\)[ \t]*").unwrap());
static JUDGE_MODEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\bjudge(?:\s+model)?\s*:\s*([^);]+)").unwrap());

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(';').map(str::trim).filter(|s| !s.is_empty())
}

fn strip_parens(text: &str) -> String {
    let mut depth = 0usize;
    let mut out = String::new();
    for c in text.chars() {
        match c {
            '(' => depth += 1,
            ')' if depth > 0 => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

/// Category keyword in `text`, most specific first.
pub(crate) fn size_category(text: &str) -> Option<SizeCategory> {
    let norm = text.to_lowercase().replace(['_', '-'], " ");
    [
        ("infinite", SizeCategory::Infinite),
        ("unbounded", SizeCategory::Infinite),
        ("continuously generated", SizeCategory::Infinite),
        ("very large", SizeCategory::VeryLarge),
        ("large", SizeCategory::Large),
        ("medium", SizeCategory::Medium),
        ("small", SizeCategory::Small),
    ]
    .into_iter()
    .find(|(kw, _)| norm.contains(kw))
    .map(|(_, c)| c)
}

/// First count outside parentheses, honoring `K`/`M` suffixes and the
/// words thousand/million/billion.
pub(crate) fn size_count(text: &str) -> Option<u64> {
    let text = strip_parens(text);
    let caps = COUNT.captures(&text)?;
    let number: f64 = caps[1].replace(',', "").parse().ok()?;
    let word = caps.get(2).map(|m| m.as_str().to_lowercase());
    let letter = caps.get(3).map(|m| m.as_str().to_lowercase());
    let mult = match (word.as_deref(), letter.as_deref()) {
        (Some("thousand"), _) | (_, Some("k")) => 1e3,
        (Some("million"), _) | (_, Some("m")) => 1e6,
        (Some("billion"), _) => 1e9,
        _ => 1.0,
    };
    let value = (number * mult).round();
    (value.is_finite() && value >= 0.0 && value < u64::MAX as f64).then_some(value as u64)
}

fn split_kind(label: &str) -> Option<SplitKind> {
    let label = label.to_lowercase();
    [
        ("fine-tun", SplitKind::FinetuneDev),
        ("development", SplitKind::FinetuneDev),
        ("validation", SplitKind::Validation),
        ("private", SplitKind::PrivateTest),
        ("hidden", SplitKind::PrivateTest),
        ("test", SplitKind::Test),
    ]
    .into_iter()
    .find(|(kw, _)| label.contains(kw))
    .map(|(_, k)| k)
}

/// Split kind stated by a line's label, the text before its first `:`.
pub(crate) fn line_split_kind(line: &str) -> Option<SplitKind> {
    split_kind(line.split(':').next().unwrap_or(line))
}

pub(crate) fn protocol_steps(text: &str) -> Vec<String> {
    let mut steps = Vec::new();
    let mut last = 0;
    for m in STEP_MARKER.find_iter(text) {
        steps.push(text[last..m.start()].trim().to_string());
        last = m.end();
    }
    steps.push(text[last..].trim().to_string());
    steps.retain(|s| !s.is_empty());
    steps
}

/// Judge model named inside a judge answer, as in `LLM judge: GPT-4`.
pub(crate) fn extract_judge_model(judges: &[VocabTerm<Judge>]) -> Option<String> {
    judges
        .iter()
        .find_map(|j| JUDGE_MODEL.captures(&j.raw))
        .map(|c| c[1].trim().to_string())
        .filter(|m| !m.is_empty())
}

struct Importer {
    fs: Factsheet,
    notes: Vec<Diagnostic>,
    seen: HashSet<String>,
    size_category: Option<SizeCategory>,
    size_count: Option<Option<u64>>,
    bare_size: Option<(CardCommand, String)>,
}

impl Importer {
    fn note(&mut self, code: Code, q: Option<QuestionId>, cmd: &CardCommand, msg: String) {
        self.notes.push(Diagnostic::new(code, q, msg).with_span(cmd.span));
    }

    /// Stores `value` under `base` or the first free `base-N`.
    fn stash(&mut self, base: &str, value: &str) -> String {
        let mut key = base.to_string();
        let mut n = 2;
        while self.fs.extensions.contains_key(&key) {
            key = format!("{base}-{n}");
            n += 1;
        }
        self.fs.extensions.insert(key.clone(), value.to_string());
        key
    }

    fn unparseable(&mut self, q: Option<QuestionId>, cmd: &CardCommand, value: &str, why: &str) {
        let key = self.stash(&format!("x-{}", cmd.name), value);
        self.note(
            Code::UnparseableValue,
            q,
            cmd,
            format!("\\{}: {why}; kept as `{key}`", cmd.name),
        );
    }

    fn terms<V: Vocabulary>(&mut self, q: QuestionId, cmd: &CardCommand, value: &str) -> Vec<VocabTerm<V>> {
        let mut out: Vec<VocabTerm<V>> = Vec::new();
        let mut unmatched = Vec::new();
        for seg in split_list(value) {
            let term = match map_terms::<V>(seg) {
                Ok(mut ts) => ts.remove(0),
                Err(VocabError::NoMatch { .. }) => {
                    unmatched.push(seg);
                    continue;
                }
                Err(e) => unreachable!("nonempty segment: {e}"),
            };
            if term.token.is_other() {
                self.note(
                    Code::UnmappedVocabulary,
                    Some(q),
                    cmd,
                    format!("\\{}: `{seg}` matches no {} token; stored as other", cmd.name, V::ID),
                );
                if out.iter().any(|t| t.token == term.token && t.raw == term.raw) {
                    continue;
                }
                out.push(term);
            } else if let Some(prev) = out.iter_mut().find(|t| t.token == term.token) {
                prev.raw.push_str("; ");
                prev.raw.push_str(seg);
            } else {
                out.push(term);
            }
        }
        if !unmatched.is_empty() {
            let joined = unmatched.join("; ");
            self.unparseable(Some(q), cmd, &joined, &format!("no {} token matches", V::ID));
        }
        out
    }

    fn single<V: Vocabulary>(&mut self, q: QuestionId, cmd: &CardCommand, value: &str) -> Option<VocabTerm<V>> {
        let mut tokens: Vec<V> = Vec::new();
        for seg in split_list(value) {
            if let Ok(ts) = map_terms::<V>(seg) {
                if !tokens.contains(&ts[0].token) {
                    tokens.push(ts[0].token);
                }
            }
        }
        let Some(&first) = tokens.first() else {
            self.unparseable(Some(q), cmd, value, &format!("no {} token matches", V::ID));
            return None;
        };
        if tokens.len() > 1 {
            let names: Vec<&str> = tokens.iter().map(|t| t.token()).collect();
            self.note(
                Code::AmbiguousChoice,
                Some(q),
                cmd,
                format!("\\{}: maps to {}; kept `{}`", cmd.name, names.join(", "), first.token()),
            );
        }
        Some(VocabTerm::with_raw(first, value))
    }

    fn tags<T: Vocabulary + PartialEq>(
        &mut self,
        q: QuestionId,
        cmd: &CardCommand,
        value: &str,
        slot: fn(&mut Factsheet) -> &mut Option<Annotated<T>>,
    ) {
        let mut bad = Vec::new();
        for seg in split_list(value) {
            match T::from_token(seg) {
                Some(tag) => {
                    let note = slot(&mut self.fs).get_or_insert_with(|| Annotated::text(""));
                    if !note.tags.contains(&tag) {
                        note.tags.push(tag);
                    }
                }
                None => bad.push(seg),
            }
        }
        if !bad.is_empty() {
            let joined = bad.join("; ");
            self.unparseable(Some(q), cmd, &joined, &format!("not {} tokens", T::ID));
        }
    }

    fn list(value: &str) -> Vec<String> {
        split_list(value).map(str::to_string).collect()
    }

    fn splits(&mut self, cmd: &CardCommand, value: &str) {
        let splits = &mut self.fs.structure.splits;
        let mut assumed = false;
        for line in value.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let kind = line_split_kind(line).filter(|k| !splits.iter().any(|s| s.kind == *k));
            match (kind, splits.last_mut()) {
                (Some(kind), _) => splits.push(SplitSpec {
                    kind,
                    description: line.to_string(),
                }),
                (None, Some(prev)) => {
                    prev.description.push('\n');
                    prev.description.push_str(line);
                }
                (None, None) => {
                    assumed = true;
                    splits.push(SplitSpec {
                        kind: SplitKind::Test,
                        description: line.to_string(),
                    });
                }
            }
        }
        if assumed {
            self.note(
                Code::UnmappedVocabulary,
                Some(QuestionId::T4),
                cmd,
                "\\Splits: first line names no split kind; assumed test".into(),
            );
        }
    }

    fn size(&mut self, cmd: &CardCommand, value: &str) {
        let count = size_count(value);
        let category = size_category(value).or(count.map(SizeCategory::for_count));
        match category {
            Some(category) => {
                self.fs.structure.size = Some(SizeSpec {
                    category,
                    count,
                    raw: value.to_string(),
                })
            }
            None => self.bare_size = Some((cmd.clone(), value.to_string())),
        }
    }

    fn option(&mut self, key: &str, value: &str, cmd: &CardCommand) {
        if !self.seen.insert(format!("[{key}]")) {
            let stored = self.stash(&format!("x-option-{key}"), value);
            self.note(
                Code::DuplicateCommand,
                option_question(key),
                cmd,
                format!("option `{key}` repeated; kept as `{stored}`"),
            );
            return;
        }
        let c = &mut self.fs.context;
        let slot = match key {
            "title" => &mut c.title,
            "subtitle" => &mut c.subtitle,
            "authors" => &mut c.authors,
            "link" => &mut c.paper_link,
            "code-link" => &mut c.code_link,
            "date" => &mut c.release_date,
            _ => {
                let stored = self.stash(&format!("x-option-{key}"), value);
                self.note(
                    Code::UnknownOption,
                    None,
                    cmd,
                    format!("unknown option `{key}`; kept as `{stored}`"),
                );
                return;
            }
        };
        *slot = Some(value.to_string());
    }

    fn command(&mut self, cmd: &CardCommand) {
        let name = cmd.name.as_str();
        let value = unescape(&cmd.argument).trim().to_string();
        let value = value.as_str();
        let known = COMMANDS.contains(&name) || EXTRA_COMMANDS.contains(&name);
        let q = command_question(name);
        if !known {
            let key = self.stash(&format!("x-{name}"), value);
            self.note(
                Code::UnknownCommand,
                None,
                cmd,
                format!("unknown command \\{name}; kept as `{key}`"),
            );
            return;
        }
        if name != "Extension" && !self.seen.insert(name.to_string()) {
            let key = self.stash(&format!("x-{name}"), value);
            self.note(
                Code::DuplicateCommand,
                q,
                cmd,
                format!("\\{name} repeated; kept as `{key}`"),
            );
            return;
        }
        if value.is_empty() {
            self.note(Code::MissingCardField, q, cmd, format!("\\{name} is empty"));
            return;
        }
        let q_id = q.unwrap_or(QuestionId::C1);
        match name {
            "Purpose" => self.fs.context.purposes = self.terms::<Purpose>(q_id, cmd, value),
            "PrinciplesTested" => self.fs.scope.capabilities = Self::list(value),
            "FunctionalProps" => {
                self.fs.scope.model_properties = self.terms::<ModelProperty>(q_id, cmd, value)
            }
            "InputModality" => {
                self.fs.scope.input_modality.terms = self.terms::<Modality>(q_id, cmd, value)
            }
            "OutputModality" => {
                self.fs.scope.output_modality.terms = self.terms::<Modality>(q_id, cmd, value)
            }
            "InputModalityDetail" => self.fs.scope.input_modality.detail = Some(value.into()),
            "OutputModalityDetail" => self.fs.scope.output_modality.detail = Some(value.into()),
            "InputSource" => {
                self.fs.structure.input_sources = self.terms::<InputSource>(q_id, cmd, value)
            }
            "OutputSource" => {
                self.fs.structure.output_sources = self.terms::<OutputSource>(q_id, cmd, value)
            }
            "Size" => self.size(cmd, value),
            "SizeCategory" => match SizeCategory::from_token(value) {
                Some(c) => self.size_category = Some(c),
                None => self.unparseable(q, cmd, value, "not a size_category token"),
            },
            "SizeCount" => match value {
                "none" => self.size_count = Some(None),
                _ => match value.parse::<u64>() {
                    Ok(n) => self.size_count = Some(Some(n)),
                    Err(_) => self.unparseable(q, cmd, value, "not a count"),
                },
            },
            "Splits" => self.splits(cmd, value),
            "Design" => self.fs.structure.design = self.single::<Design>(q_id, cmd, value),
            "DatasetRefs" => self.fs.structure.dataset_refs = Self::list(value),
            "Judge" => self.fs.method.judges = self.terms::<Judge>(q_id, cmd, value),
            "JudgeModel" => self.fs.method.judge_details.judge_model = Some(value.into()),
            "JudgePrompting" => {
                self.fs.method.judge_details.prompting_strategy = Some(value.into())
            }
            "JudgeTemperature" => self.fs.method.judge_details.temperature = Some(value.into()),
            "JudgeAgreement" => self.fs.method.judge_details.agreement = Some(value.into()),
            "Protocol" => self.fs.method.protocol = protocol_steps(value),
            "ModelAccess" => {
                self.fs.method.model_access = self.single::<ModelAccess>(q_id, cmd, value)
            }
            "HasHeldout" => match value.to_lowercase().as_str() {
                "true" => self.fs.method.heldout = Some(true),
                "false" => self.fs.method.heldout = Some(false),
                _ => self.unparseable(q, cmd, value, "expected true or false"),
            },
            "HeldoutDetails" => self.fs.method.heldout_details = Some(value.into()),
            "AlignmentValidation" => {
                self.fs
                    .alignment
                    .validation
                    .get_or_insert_with(|| Annotated::text(""))
                    .text = value.into()
            }
            "BaselineModels" => {
                self.fs
                    .alignment
                    .baselines
                    .get_or_insert_with(|| Annotated::text(""))
                    .text = value.into()
            }
            "RobustnessMeasures" => {
                self.fs
                    .alignment
                    .robustness
                    .get_or_insert_with(|| Annotated::text(""))
                    .text = value.into()
            }
            "ValidationTags" => self.tags::<ValidationTag>(q_id, cmd, value, |f| &mut f.alignment.validation),
            "BaselineTags" => self.tags::<BaselineTag>(q_id, cmd, value, |f| &mut f.alignment.baselines),
            "RobustnessTags" => self.tags::<RobustnessTag>(q_id, cmd, value, |f| &mut f.alignment.robustness),
            "KnownLimitations" => self.fs.alignment.limitations = Self::list(value),
            "BenchmarksList" => self.fs.alignment.similar_evals = Self::list(value),
            "Extension" => match value.split_once(": ") {
                Some((key, v)) if is_extension_key(key) && !self.fs.extensions.contains_key(key) => {
                    self.fs.extensions.insert(key.to_string(), v.to_string());
                }
                _ => self.unparseable(None, cmd, value, "expected `x-key: value`"),
            },
            _ => unreachable!("command table covers {name}"),
        }
    }

    fn finish(&mut self) {
        let bare_size = self.bare_size.take();
        let structure = &mut self.fs.structure;
        match (self.size_category, &mut structure.size, bare_size) {
            (Some(category), Some(size), _) => size.category = category,
            (Some(category), None, raw) => {
                structure.size = Some(SizeSpec {
                    category,
                    count: None,
                    raw: raw.map_or_else(|| category.label().to_string(), |(_, raw)| raw),
                })
            }
            (None, _, Some((cmd, raw))) => {
                self.unparseable(Some(QuestionId::T3), &cmd, &raw, "no size category or count")
            }
            (None, _, None) => {}
        }
        let structure = &mut self.fs.structure;
        if let (Some(count), Some(size)) = (self.size_count, structure.size.as_mut()) {
            size.count = count;
        }
        let method = &mut self.fs.method;
        if method.judge_details.judge_model.is_none() {
            method.judge_details.judge_model = extract_judge_model(&method.judges);
        }
    }
}

fn missing_notes(doc: &CardDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for key in OPTIONS {
        if doc.option(key).is_none() {
            out.push(Diagnostic::new(
                Code::MissingCardField,
                option_question(key),
                format!("card has no `{key}` option"),
            ));
        }
    }
    for name in COMMANDS {
        if !doc.commands.iter().any(|c| c.name == name) {
            out.push(Diagnostic::new(
                Code::MissingCardField,
                command_question(name),
                format!("card has no \\{name}"),
            ));
        }
    }
    out
}

/// Converts card markup into a factsheet. Every body command ends up in
/// an answer or an `x-` extension.
pub fn import_card(input: &str) -> Result<ImportReport, Vec<ParseError>> {
    let doc = parse_card(input)?;
    let mut im = Importer {
        fs: empty_factsheet(),
        notes: Vec::new(),
        seen: HashSet::new(),
        size_category: None,
        size_count: None,
        bare_size: None,
    };
    for opt in &doc.options {
        let as_cmd = CardCommand {
            name: opt.key.clone(),
            argument: opt.value.clone(),
            span: opt.span,
        };
        let value = unescape(&opt.value).trim().to_string();
        im.option(&opt.key, &value, &as_cmd);
    }
    for cmd in &doc.commands {
        im.command(cmd);
    }
    im.finish();
    im.notes.extend(missing_notes(&doc));
    debug_assert!(im.fs.is_valid(), "{:?}", im.fs.violations());
    Ok(ImportReport {
        factsheet: im.fs,
        notes: im.notes,
    })
}
