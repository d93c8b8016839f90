use std::fmt;

use serde::{Serialize, Serializer};

use crate::span::SourceSpan;

/// Stable error codes for every reader in the crate.
///
/// `P` codes come from the canonical text parser, `I` codes from the
/// interchange reader and `C` codes from the card parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ErrorCode {
    /// Missing or garbled magic line.
    P001,
    /// Unknown section.
    P002,
    /// Unknown key outside `[x-extensions]`, or a malformed extension key.
    P003,
    /// Bad value syntax.
    P004,
    /// Token outside the field's vocabulary.
    P005,
    /// Duplicate scalar key or repeated set member.
    P006,
    /// Interchange document lacks `efs_version`.
    I001,
    /// Interchange value has the wrong shape.
    I002,
    /// Missing `evaluationcard` begin or end.
    C001,
    /// Unbalanced braces.
    C002,
    /// Malformed option list.
    C003,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 11] = [
        ErrorCode::P001,
        ErrorCode::P002,
        ErrorCode::P003,
        ErrorCode::P004,
        ErrorCode::P005,
        ErrorCode::P006,
        ErrorCode::I001,
        ErrorCode::I002,
        ErrorCode::C001,
        ErrorCode::C002,
        ErrorCode::C003,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::P001 => "P001",
            ErrorCode::P002 => "P002",
            ErrorCode::P003 => "P003",
            ErrorCode::P004 => "P004",
            ErrorCode::P005 => "P005",
            ErrorCode::P006 => "P006",
            ErrorCode::I001 => "I001",
            ErrorCode::I002 => "I002",
            ErrorCode::C001 => "C001",
            ErrorCode::C002 => "C002",
            ErrorCode::C003 => "C003",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ErrorCode::P001 => "missing or garbled magic line",
            ErrorCode::P002 => "unknown section",
            ErrorCode::P003 => "unknown key outside [x-extensions]",
            ErrorCode::P004 => "bad value syntax",
            ErrorCode::P005 => "non-canonical token for the field's vocabulary",
            ErrorCode::P006 => "duplicate scalar key or set member",
            ErrorCode::I001 => "missing efs_version",
            ErrorCode::I002 => "wrong value shape for a known field",
            ErrorCode::C001 => "missing evaluationcard begin/end",
            ErrorCode::C002 => "unbalanced braces",
            ErrorCode::C003 => "malformed option list",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ErrorCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{code} at {span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub code: ErrorCode,
    pub message: String,
}

impl ParseError {
    pub fn new(code: ErrorCode, span: SourceSpan, message: impl Into<String>) -> Self {
        ParseError {
            span,
            code,
            message: message.into(),
        }
    }
}
