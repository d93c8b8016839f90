//! The factsheet record and its five dimensions.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::vocab::{
    same_member, BaselineTag, Design, InputSource, Judge, Modality, ModelAccess, ModelProperty,
    OutputSource, Purpose, RobustnessTag, SizeCategory, SplitKind, ValidationTag, VocabTerm,
    Vocabulary,
};

/// Format version written by this crate.
pub const EFS_VERSION: &str = "1.0";

/// One documented evaluation methodology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factsheet {
    pub efs_version: String,
    #[serde(default)]
    pub context: ContextDim,
    #[serde(default)]
    pub scope: ScopeDim,
    #[serde(default)]
    pub structure: StructureDim,
    #[serde(default)]
    pub method: MethodDim,
    #[serde(default)]
    pub alignment: AlignmentDim,
    /// Namespaced (`x-`) fields outside the schema, in insertion order.
    #[serde(default)]
    pub extensions: IndexMap<String, String>,
}

/// Who made the evaluation, when, and why.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContextDim {
    pub title: Option<String>,
    pub subtitle: Option<String>,
    pub authors: Option<String>,
    /// A four-digit year or a `YYYY-MM-DD` date; checked by the validator.
    pub release_date: Option<String>,
    pub paper_link: Option<String>,
    pub code_link: Option<String>,
    pub purposes: Vec<VocabTerm<Purpose>>,
}

/// What the evaluation measures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScopeDim {
    pub capabilities: Vec<String>,
    pub model_properties: Vec<VocabTerm<ModelProperty>>,
    pub input_modality: ModalityAnswer,
    pub output_modality: ModalityAnswer,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModalityAnswer {
    pub terms: Vec<VocabTerm<Modality>>,
    pub detail: Option<String>,
}

/// Data sources and organisation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StructureDim {
    pub input_sources: Vec<VocabTerm<InputSource>>,
    pub output_sources: Vec<VocabTerm<OutputSource>>,
    pub size: Option<SizeSpec>,
    pub splits: Vec<SplitSpec>,
    pub design: Option<VocabTerm<Design>>,
    pub dataset_refs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub category: SizeCategory,
    #[serde(default)]
    pub count: Option<u64>,
    pub raw: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSpec {
    pub kind: SplitKind,
    pub description: String,
}

/// How the evaluation is run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodDim {
    pub judges: Vec<VocabTerm<Judge>>,
    pub judge_details: JudgeDetails,
    pub protocol: Vec<String>,
    pub model_access: Option<VocabTerm<ModelAccess>>,
    pub heldout: Option<bool>,
    pub heldout_details: Option<String>,
}

/// Extra documentation required when a model acts as judge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgeDetails {
    pub judge_model: Option<String>,
    pub prompting_strategy: Option<String>,
    pub temperature: Option<String>,
    pub agreement: Option<String>,
}

impl JudgeDetails {
    pub fn is_empty(&self) -> bool {
        [
            &self.judge_model,
            &self.prompting_strategy,
            &self.temperature,
            &self.agreement,
        ]
        .iter()
        .all(|v| !has_text(v.as_deref()))
    }
}

/// Reliability, validity and robustness documentation.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlignmentDim {
    pub validation: Option<Annotated<ValidationTag>>,
    pub baselines: Option<Annotated<BaselineTag>>,
    pub robustness: Option<Annotated<RobustnessTag>>,
    pub limitations: Vec<String>,
    pub similar_evals: Vec<String>,
}

/// Free text with optional tags from a closed set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Annotated<T> {
    pub text: String,
    #[serde(default = "Vec::new")]
    pub tags: Vec<T>,
}

impl<T> Annotated<T> {
    pub fn text(text: impl Into<String>) -> Self {
        Annotated {
            text: text.into(),
            tags: Vec::new(),
        }
    }

    pub fn is_answered(&self) -> bool {
        !self.text.trim().is_empty() || !self.tags.is_empty()
    }
}

pub(crate) fn has_text(s: Option<&str>) -> bool {
    s.is_some_and(|s| !s.trim().is_empty())
}

/// A broken structural invariant of a [`Factsheet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

/// `[A-Za-z0-9_.-]` after the `x-` prefix, at least one character.
pub fn is_extension_key(key: &str) -> bool {
    key.strip_prefix("x-").is_some_and(|rest| {
        !rest.is_empty()
            && rest
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
    })
}

/// `MAJOR.MINOR` with major version 1.
pub fn is_supported_version(version: &str) -> bool {
    version.split_once('.').is_some_and(|(major, minor)| {
        major == "1"
            && !minor.is_empty()
            && minor.chars().all(|c| c.is_ascii_digit())
            && (minor == "0" || !minor.starts_with('0'))
    })
}

impl Default for Factsheet {
    fn default() -> Self {
        empty_factsheet()
    }
}

/// A factsheet with nothing answered.
pub fn empty_factsheet() -> Factsheet {
    Factsheet {
        efs_version: EFS_VERSION.to_string(),
        context: ContextDim::default(),
        scope: ScopeDim::default(),
        structure: StructureDim::default(),
        method: MethodDim::default(),
        alignment: AlignmentDim::default(),
        extensions: IndexMap::new(),
    }
}

fn check_set<V: Vocabulary>(field: &'static str, set: &[VocabTerm<V>], out: &mut Vec<Violation>) {
    for (i, term) in set.iter().enumerate() {
        if term.raw.is_empty() {
            out.push(Violation {
                field,
                message: format!("term `{}` has empty raw text", term.token.token()),
            });
        }
        if set[..i].iter().any(|t| same_member(t, term)) {
            out.push(Violation {
                field,
                message: format!("duplicate token `{}`", term.token.token()),
            });
        }
    }
}

fn check_tags<T: Vocabulary>(field: &'static str, note: &Option<Annotated<T>>, out: &mut Vec<Violation>) {
    if let Some(note) = note {
        for (i, tag) in note.tags.iter().enumerate() {
            if note.tags[..i].contains(tag) {
                out.push(Violation {
                    field,
                    message: format!("duplicate tag `{}`", tag.token()),
                });
            }
        }
    }
}

impl Factsheet {
    /// Structural invariants every stored or serialized factsheet must hold.
    /// Semantic rules (mandatory answers, size consistency) belong to the
    /// validator, not here.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !is_supported_version(&self.efs_version) {
            out.push(Violation {
                field: "efs_version",
                message: format!("unsupported version `{}`", self.efs_version),
            });
        }
        check_set("context.purposes", &self.context.purposes, &mut out);
        check_set("scope.model_properties", &self.scope.model_properties, &mut out);
        check_set("scope.input_modality", &self.scope.input_modality.terms, &mut out);
        check_set("scope.output_modality", &self.scope.output_modality.terms, &mut out);
        check_set("structure.input_sources", &self.structure.input_sources, &mut out);
        check_set("structure.output_sources", &self.structure.output_sources, &mut out);
        check_set("method.judges", &self.method.judges, &mut out);
        if let Some(size) = &self.structure.size {
            if size.raw.is_empty() {
                out.push(Violation {
                    field: "structure.size",
                    message: "size has empty raw text".into(),
                });
            }
        }
        for (i, split) in self.structure.splits.iter().enumerate() {
            if split.description.is_empty() {
                out.push(Violation {
                    field: "structure.splits",
                    message: format!("split `{}` has an empty description", split.kind.token()),
                });
            }
            if self.structure.splits[..i].iter().any(|s| s.kind == split.kind) {
                out.push(Violation {
                    field: "structure.splits",
                    message: format!("more than one `{}` split", split.kind.token()),
                });
            }
        }
        for term in self.structure.design.iter() {
            if term.raw.is_empty() {
                out.push(Violation {
                    field: "structure.design",
                    message: "design has empty raw text".into(),
                });
            }
        }
        for term in self.method.model_access.iter() {
            if term.raw.is_empty() {
                out.push(Violation {
                    field: "method.model_access",
                    message: "model access has empty raw text".into(),
                });
            }
        }
        if self.method.protocol.iter().any(|s| s.is_empty()) {
            out.push(Violation {
                field: "method.protocol",
                message: "protocol steps must be nonempty".into(),
            });
        }
        check_tags("alignment.validation", &self.alignment.validation, &mut out);
        check_tags("alignment.baselines", &self.alignment.baselines, &mut out);
        check_tags("alignment.robustness", &self.alignment.robustness, &mut out);
        for key in self.extensions.keys() {
            if !is_extension_key(key) {
                out.push(Violation {
                    field: "extensions",
                    message: format!("extension key `{key}` must match x-[A-Za-z0-9_.-]+"),
                });
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_factsheet_is_blank_and_valid() {
        let fs = empty_factsheet();
        assert_eq!(fs.efs_version, "1.0");
        assert!(fs.context.purposes.is_empty());
        assert!(fs.method.heldout.is_none());
        assert!(fs.extensions.is_empty());
        assert!(fs.is_valid());
    }

    #[test]
    fn version_pattern() {
        assert!(is_supported_version("1.0"));
        assert!(is_supported_version("1.12"));
        assert!(!is_supported_version("2.0"));
        assert!(!is_supported_version("1"));
        assert!(!is_supported_version("1.01"));
        assert!(!is_supported_version("1.x"));
    }

    #[test]
    fn extension_keys() {
        assert!(is_extension_key("x-license"));
        assert!(is_extension_key("x-Option.code-link"));
        assert!(!is_extension_key("x-"));
        assert!(!is_extension_key("license"));
        assert!(!is_extension_key("x-has space"));
    }

    #[test]
    fn duplicate_split_kind_is_a_violation() {
        let mut fs = empty_factsheet();
        for d in ["a", "b"] {
            fs.structure.splits.push(SplitSpec {
                kind: SplitKind::Test,
                description: d.into(),
            });
        }
        let v = fs.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "structure.splits");
    }

    #[test]
    fn duplicate_tags_and_tokens_are_violations() {
        let mut fs = empty_factsheet();
        fs.context.purposes = vec![
            VocabTerm::native(Purpose::Research),
            VocabTerm::with_raw(Purpose::Research, "again"),
        ];
        fs.alignment.robustness = Some(Annotated {
            text: String::new(),
            tags: vec![RobustnessTag::Judge, RobustnessTag::Judge],
        });
        fs.extensions.insert("bad".into(), "v".into());
        assert_eq!(fs.violations().len(), 3);
    }
}
