//! Coded findings shared by the validator and the card importer.
//!
//! Codes are a closed set. The prefix letter encodes severity: `E-` errors,
//! `W-` warnings, `N-` notes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::model::{catalog, QuestionId};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Note,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        }
    }

    fn prefix(self) -> char {
        match self {
            Severity::Error => 'E',
            Severity::Warning => 'W',
            Severity::Note => 'N',
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    /// A mandatory question is unanswered.
    Missing(QuestionId),
    /// E-M101
    JudgeModelMissing,
    /// E-M102
    HeldoutDetailsMissing,
    /// W-T301
    SizeMismatch,
    /// W-T302
    SizeMissing,
    /// W-A401
    RobustnessMissing,
    /// W-A402
    LimitationsMissing,
    /// W-C101
    BadReleaseDate,
    /// N-X001
    ExtensionsPresent,
    /// N-I001
    UnknownCommand,
    /// N-I002
    UnmappedVocabulary,
    /// N-I003
    MissingCardField,
    /// W-I004
    UnparseableValue,
    /// N-I005
    UnknownOption,
    /// W-I006
    DuplicateCommand,
    /// W-I007
    AmbiguousChoice,
}

impl Code {
    /// Every code with a one-line description, in documentation order.
    pub fn catalog() -> Vec<(Code, &'static str)> {
        let mut out: Vec<(Code, &'static str)> = catalog()
            .mandatory()
            .map(|q| (Code::Missing(q.id), "mandatory question unanswered"))
            .collect();
        out.extend([
            (Code::JudgeModelMissing, "model-based judge without a documented judge model"),
            (Code::HeldoutDetailsMissing, "held-out test set declared without details"),
            (Code::SizeMismatch, "sample count inconsistent with size category"),
            (Code::SizeMissing, "evaluation size unanswered"),
            (Code::RobustnessMissing, "robustness measures unanswered"),
            (Code::LimitationsMissing, "no known limitations listed"),
            (Code::BadReleaseDate, "release date is not a year or YYYY-MM-DD date"),
            (Code::ExtensionsPresent, "extension fields present"),
            (Code::UnknownCommand, "card command outside the field table kept as extension"),
            (Code::UnmappedVocabulary, "card value matched no vocabulary token; stored as other"),
            (Code::MissingCardField, "card field absent"),
            (Code::UnparseableValue, "card value could not be interpreted; kept as extension"),
            (Code::UnknownOption, "card header option outside the known set kept as extension"),
            (Code::DuplicateCommand, "card command repeated; later value kept as extension"),
            (Code::AmbiguousChoice, "single-choice card value mapped to several tokens; first kept"),
        ]);
        out
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::Missing(_) | Code::JudgeModelMissing | Code::HeldoutDetailsMissing => {
                Severity::Error
            }
            Code::SizeMismatch
            | Code::SizeMissing
            | Code::RobustnessMissing
            | Code::LimitationsMissing
            | Code::BadReleaseDate
            | Code::UnparseableValue
            | Code::DuplicateCommand
            | Code::AmbiguousChoice => Severity::Warning,
            Code::ExtensionsPresent
            | Code::UnknownCommand
            | Code::UnmappedVocabulary
            | Code::MissingCardField
            | Code::UnknownOption => Severity::Note,
        }
    }

    pub fn as_string(self) -> String {
        let suffix = match self {
            Code::Missing(q) => format!("{}{:03}", q.dimension().prefix(), q.number()),
            Code::JudgeModelMissing => "M101".into(),
            Code::HeldoutDetailsMissing => "M102".into(),
            Code::SizeMismatch => "T301".into(),
            Code::SizeMissing => "T302".into(),
            Code::RobustnessMissing => "A401".into(),
            Code::LimitationsMissing => "A402".into(),
            Code::BadReleaseDate => "C101".into(),
            Code::ExtensionsPresent => "X001".into(),
            Code::UnknownCommand => "I001".into(),
            Code::UnmappedVocabulary => "I002".into(),
            Code::MissingCardField => "I003".into(),
            Code::UnparseableValue => "I004".into(),
            Code::UnknownOption => "I005".into(),
            Code::DuplicateCommand => "I006".into(),
            Code::AmbiguousChoice => "I007".into(),
        };
        format!("{}-{}", self.severity().prefix(), suffix)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown diagnostic code `{0}`")]
pub struct UnknownCode(pub String);

impl FromStr for Code {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Code::catalog()
            .into_iter()
            .map(|(c, _)| c)
            .find(|c| c.as_string() == s)
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.as_string())
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question_id: Option<QuestionId>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn new(code: Code, question_id: Option<QuestionId>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            question_id,
            message: message.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Order used for every diagnostic list: severity, code, question id.
    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.severity
            .cmp(&other.severity)
            .then_with(|| self.code.as_string().cmp(&other.code.as_string()))
            .then_with(|| self.question_id.cmp(&other.question_id))
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code, self.severity)?;
        if let Some(q) = self.question_id {
            write!(f, " [{q}]")?;
        }
        if let Some(span) = self.span {
            write!(f, " at {span}")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Sorts in place by severity, code, then question id.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(Diagnostic::sort_key_cmp);
}
