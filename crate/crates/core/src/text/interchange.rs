//! JSON interchange form: the serde representation of [`Factsheet`].

use crate::model::Factsheet;
use crate::span::SourceSpan;

use super::error::{ErrorCode, ParseError};

/// Pretty-printed JSON with fields in declaration order.
pub fn to_interchange(fs: &Factsheet) -> String {
    let mut out = serde_json::to_string_pretty(fs).expect("factsheet serializes");
    out.push('\n');
    out
}

fn json_span(err: &serde_json::Error) -> SourceSpan {
    SourceSpan::new(err.line().max(1), err.column().max(1), 1)
}

/// Reads the interchange form. Unknown fields and invariant violations are
/// rejected.
pub fn from_interchange(input: &str) -> Result<Factsheet, Vec<ParseError>> {
    let value: serde_json::Value = serde_json::from_str(input).map_err(|e| {
        vec![ParseError::new(ErrorCode::I002, json_span(&e), format!("invalid JSON: {e}"))]
    })?;
    let has_version = value
        .as_object()
        .is_some_and(|o| o.contains_key("efs_version"));
    if !has_version {
        return Err(vec![ParseError::new(
            ErrorCode::I001,
            SourceSpan::new(1, 1, 1),
            "document has no `efs_version`",
        )]);
    }
    let fs: Factsheet = serde_json::from_str(input)
        .map_err(|e| vec![ParseError::new(ErrorCode::I002, json_span(&e), e.to_string())])?;
    let violations = fs.violations();
    if violations.is_empty() {
        Ok(fs)
    } else {
        Err(violations
            .into_iter()
            .map(|v| {
                ParseError::new(
                    ErrorCode::I002,
                    SourceSpan::new(1, 1, 1),
                    format!("{}: {}", v.field, v.message),
                )
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::empty_factsheet;

    #[test]
    fn round_trip_empty() {
        let fs = empty_factsheet();
        assert_eq!(from_interchange(&to_interchange(&fs)).unwrap(), fs);
    }

    #[test]
    fn missing_version_is_i001() {
        let errs = from_interchange("{\"context\": {}}").unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I001);
        assert_eq!(from_interchange("[]").unwrap_err()[0].code, ErrorCode::I001);
    }

    #[test]
    fn wrong_shape_is_i002_with_position() {
        let doc = "{\n  \"efs_version\": \"1.0\",\n  \"context\": {\"title\": 5}\n}";
        let errs = from_interchange(doc).unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I002);
        assert_eq!(errs[0].span.line, 3);
        let errs = from_interchange("{\"efs_version\": \"1.0\", \"bogus\": 1}").unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I002);
        let errs = from_interchange("{\"efs_version\": \"2.0\"}").unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I002);
        let errs = from_interchange("{").unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I002);
    }

    #[test]
    fn vocabulary_tokens_are_checked() {
        let doc = r#"{"efs_version": "1.0", "method": {"judges": [{"token": "vibes", "raw": "x"}]}}"#;
        let errs = from_interchange(doc).unwrap_err();
        assert_eq!(errs[0].code, ErrorCode::I002);
        assert!(errs[0].message.contains("vibes"), "{}", errs[0].message);
    }
}
