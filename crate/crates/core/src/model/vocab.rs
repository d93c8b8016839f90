//! Controlled vocabularies.
//!
//! Every enumerated answer in a factsheet draws its token from one of the
//! vocabularies declared here. Open vocabularies carry an `other` escape
//! token whose raw text holds the unmapped answer; closed vocabularies are
//! exhaustive classifications and have no escape.

use std::fmt;
use std::hash::Hash;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Identifies one vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VocabId {
    Purpose,
    ModelProperty,
    Modality,
    InputSource,
    OutputSource,
    SizeCategory,
    SplitKind,
    Design,
    Judge,
    ModelAccess,
    ValidationTag,
    BaselineTag,
    RobustnessTag,
}

/// Static description of one term: canonical token, display label and the
/// lowercase trigger substrings used when mapping free text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermInfo {
    pub token: &'static str,
    pub label: &'static str,
    pub triggers: &'static [&'static str],
}

/// Behaviour shared by every vocabulary enum.
pub trait Vocabulary:
    Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static
{
    const ID: VocabId;

    fn all() -> &'static [Self];
    fn info(self) -> &'static TermInfo;

    fn token(self) -> &'static str {
        self.info().token
    }

    fn label(self) -> &'static str {
        self.info().label
    }

    fn from_token(token: &str) -> Option<Self> {
        Self::all().iter().copied().find(|v| v.token() == token)
    }

    /// The escape term, present only on open vocabularies.
    fn other() -> Option<Self> {
        Self::from_token(OTHER)
    }

    fn is_other(self) -> bool {
        self.token() == OTHER
    }
}

/// Token of the escape term on open vocabularies.
pub const OTHER: &str = "other";

macro_rules! vocabulary {
    (
        $(#[$meta:meta])*
        $name:ident ($id:ident) {
            $( $(#[$vmeta:meta])* $variant:ident => $token:literal, $label:literal, [$($trigger:literal),* $(,)?]; )+
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $( $(#[$vmeta])* $variant, )+
        }

        impl $name {
            const TABLE: &'static [TermInfo] = &[
                $( TermInfo { token: $token, label: $label, triggers: &[$($trigger),*] }, )+
            ];
            const ALL: &'static [$name] = &[ $( $name::$variant, )+ ];
        }

        impl Vocabulary for $name {
            const ID: VocabId = VocabId::$id;

            fn all() -> &'static [Self] {
                Self::ALL
            }

            fn info(self) -> &'static TermInfo {
                &Self::TABLE[self as usize]
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.token())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let token = String::deserialize(d)?;
                $name::from_token(&token).ok_or_else(|| {
                    de::Error::custom(format_args!(
                        "`{}` is not a {} token",
                        token,
                        VocabId::$id.name()
                    ))
                })
            }
        }
    };
}

vocabulary! {
    /// Why the evaluation exists.
    Purpose (Purpose) {
        Development => "development", "Development", ["development", "develop", "model training", "debugging"];
        Selection => "selection", "Selection", ["selection", "model selection", "comparison", "choose between"];
        Deployment => "deployment", "Deployment", ["deployment", "production readiness", "production"];
        Research => "research", "Research", ["research", "scientific"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Cross-cutting model properties an evaluation may assess.
    ModelProperty (ModelProperty) {
        Performance => "performance", "Performance", ["performance", "accuracy", "general capability", "precision", "recall", "f1"];
        Quality => "quality", "Quality", ["quality", "fluency", "coherence", "factuality", "helpfulness"];
        Robustness => "robustness", "Robustness", ["robustness", "distribution shift", "perturbation"];
        Calibration => "calibration", "Calibration", ["calibration", "confidence"];
        AdversarialRobustness => "adversarial_robustness", "Adversarial Robustness", ["adversarial", "jailbreak"];
        Memorization => "memorization", "Memorization", ["memorization", "memorisation"];
        Fairness => "fairness", "Fairness", ["fairness", "bias", "demographic"];
        Safety => "safety", "Safety", ["safety", "harmful", "toxic"];
        LeakageContamination => "leakage_contamination", "Leakage and Contamination", ["leakage", "contamination"];
        Privacy => "privacy", "Privacy", ["privacy"];
        Interpretability => "interpretability", "Interpretability", ["interpretability", "explainability"];
        Efficiency => "efficiency", "Efficiency", ["efficiency", "latency", "throughput", "compute", "energy"];
        Retrainability => "retrainability", "Retrainability", ["retrainability", "retraining"];
        MetaLearning => "meta_learning", "Meta-Learning", ["meta-learning", "meta learning", "few-shot adaptation"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Input and output modalities.
    Modality (Modality) {
        Text => "text", "Text", ["text", "natural language"];
        Vision => "vision", "Vision", ["vision", "image", "visual", "photo"];
        Audio => "audio", "Audio", ["audio", "speech", "sound"];
        Video => "video", "Video", ["video"];
        Code => "code", "Code", ["code", "source code"];
        Structured => "structured", "Structured data", ["structured", "tabular", "table"];
        Multimodal => "multimodal", "Multimodal", ["multimodal", "multi-modal"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Where evaluation inputs come from.
    InputSource (InputSource) {
        ExistingDataset => "existing_dataset", "Existing dataset", ["existing", "established benchmark", "publicly available", "public dataset"];
        NewDataset => "new_dataset", "New dataset", ["new dataset", "released with", "purpose-built"];
        Proprietary => "proprietary", "Proprietary/closed dataset", ["proprietary", "closed", "private"];
        Synthetic => "synthetic", "Synthetic/generated data", ["synthetic", "procedural", "generated"];
        Crowdsourced => "crowdsourced", "Crowdsourced data", ["crowdsourced", "crowd"];
        ExpertCurated => "expert_curated", "Expert-curated data", ["curated", "expert", "hand-written"];
        DeploymentData => "deployment_data", "Real-world deployment data", ["deployment", "real-world", "user logs", "production"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Where reference outputs come from.
    OutputSource (OutputSource) {
        HumanAnnotation => "human_annotation", "Human annotations", ["human", "annotat"];
        InheritedLabels => "inherited_labels", "Existing dataset labels", ["inherited", "existing label", "dataset label"];
        Programmatic => "programmatic", "Programmatic generation", ["programmatic", "rule-based", "simulation"];
        ExecutionVerified => "execution_verified", "Execution-based verification", ["execution", "executed", "interpreter"];
        ModelGenerated => "model_generated", "Model-generated references", ["model-generated", "model generated", "generated by"];
        ReferenceFree => "reference_free", "Reference-free", ["reference-free", "reference free", "no reference"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Evaluation size classes, from smallest to unbounded.
    SizeCategory (SizeCategory) {
        Small => "small", "Small", ["small"];
        Medium => "medium", "Medium", ["medium"];
        Large => "large", "Large", ["large"];
        VeryLarge => "very_large", "Very Large", ["very large"];
        Infinite => "infinite", "Infinite", ["infinite", "continuously generated", "unbounded"];
    }
}

vocabulary! {
    /// Kinds of data split.
    SplitKind (SplitKind) {
        FinetuneDev => "finetune_dev", "Fine-tuning/Development set", ["fine-tun", "development"];
        Validation => "validation", "Validation set", ["validation"];
        Test => "test", "Test set", ["test"];
        PrivateTest => "private_test", "Private/Hidden test set", ["private", "hidden"];
    }
}

vocabulary! {
    /// Temporal character of the evaluation data.
    Design (Design) {
        Static => "static", "Static", ["static", "fixed"];
        Dynamic => "dynamic", "Dynamic", ["dynamic", "adaptive", "continuous", "periodic"];
        Composite => "composite", "Composite", ["composite", "mixed", "combin"];
    }
}

vocabulary! {
    /// Who or what judges model outputs.
    Judge (Judge) {
        HumanExpert => "human_expert", "Human (Expert)", ["human expert", "expert human", "domain expert", "expert judge", "expert annotator"];
        HumanRepresentative => "human_representative", "Human (Representative)", ["crowdworker", "crowd worker", "representative", "general population", "human rater"];
        AutoReference => "auto_reference", "Automatic (Reference-based)", ["reference-based", "reference based", "exact match", "bleu"];
        AutoReferenceFree => "auto_reference_free", "Automatic (Reference-free)", ["reference-free", "reference free", "perplexity"];
        AutoExecution => "auto_execution", "Automatic (Execution-based)", ["execution", "unit test", "simulator"];
        ModelExpert => "model_expert", "Model-based (Expert model)", ["expert model", "reward model", "preference model", "trained evaluator"];
        ModelLlm => "model_llm", "Model-based (General LLM)", ["llm judge", "model-based", "llm-as-judge", "llm as judge", "general llm"];
        Hybrid => "hybrid", "Hybrid", ["hybrid", "combination of"];
        Other => "other", "Other", [];
    }
}

vocabulary! {
    /// Level of model access the evaluation requires.
    ModelAccess (ModelAccess) {
        OutputOnly => "output_only", "Output-only", ["output", "black-box", "black box", "api"];
        Partial => "partial", "Partial", ["partial", "gray-box", "grey-box", "hidden state", "logits", "gradient"];
        Full => "full", "Full", ["full", "white-box", "white box", "weights"];
    }
}

vocabulary! {
    /// Measurement validation approaches.
    ValidationTag (ValidationTag) {
        ExpertReview => "expert_review", "Expert review", ["expert review", "domain specialist", "hand-written by"];
        Pilot => "pilot", "Pilot studies", ["pilot"];
        Correlation => "correlation", "Correlation with established measures", ["correlat"];
        Ablation => "ablation", "Ablation studies", ["ablation"];
        ConstructAnalysis => "construct_analysis", "Construct validity analysis", ["construct"];
    }
}

vocabulary! {
    /// Baseline kinds.
    BaselineTag (BaselineTag) {
        Random => "random", "Random performance", ["random", "chance"];
        Heuristic => "heuristic", "Simple heuristics", ["heuristic", "rule-based"];
        PriorSota => "prior_sota", "Prior state-of-the-art", ["state-of-the-art", "sota", "prior best"];
        Human => "human", "Human performance", ["human"];
        Specialized => "specialized", "Specialized models", ["specialized", "domain-specific"];
    }
}

vocabulary! {
    /// Robustness dimensions.
    RobustnessTag (RobustnessTag) {
        Input => "input", "Input robustness", ["prompt", "paraphras", "formatting", "input robustness"];
        Output => "output", "Output robustness", ["seed", "stochastic", "output robustness"];
        Procedure => "procedure", "Evaluation procedure robustness", ["procedure", "temperature", "multiple runs"];
        Judge => "judge", "Judge robustness", ["inter-judge", "inter-rater", "judge", "position bias"];
        Statistical => "statistical", "Statistical robustness", ["confidence interval", "significance", "bootstrap", "statistical"];
        Confound => "confound", "Confound controls", ["confound", "minimal pair", "negative control"];
    }
}

impl SizeCategory {
    /// Half-open sample-count bands: small below 10^3, medium below 10^5,
    /// large below 10^6, very large from there. `Infinite` has no band.
    pub fn for_count(count: u64) -> SizeCategory {
        match count {
            0..1_000 => SizeCategory::Small,
            1_000..100_000 => SizeCategory::Medium,
            100_000..1_000_000 => SizeCategory::Large,
            _ => SizeCategory::VeryLarge,
        }
    }

    /// Whether `count` falls in this category's band. Always true for
    /// `Infinite`.
    pub fn admits(self, count: u64) -> bool {
        self == SizeCategory::Infinite || SizeCategory::for_count(count) == self
    }
}

impl VocabId {
    pub const ALL: [VocabId; 13] = [
        VocabId::Purpose,
        VocabId::ModelProperty,
        VocabId::Modality,
        VocabId::InputSource,
        VocabId::OutputSource,
        VocabId::SizeCategory,
        VocabId::SplitKind,
        VocabId::Design,
        VocabId::Judge,
        VocabId::ModelAccess,
        VocabId::ValidationTag,
        VocabId::BaselineTag,
        VocabId::RobustnessTag,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VocabId::Purpose => "purpose",
            VocabId::ModelProperty => "model_property",
            VocabId::Modality => "modality",
            VocabId::InputSource => "input_source",
            VocabId::OutputSource => "output_source",
            VocabId::SizeCategory => "size_category",
            VocabId::SplitKind => "split_kind",
            VocabId::Design => "design",
            VocabId::Judge => "judge",
            VocabId::ModelAccess => "model_access",
            VocabId::ValidationTag => "validation_tag",
            VocabId::BaselineTag => "baseline_tag",
            VocabId::RobustnessTag => "robustness_tag",
        }
    }

    /// Terms in declaration order.
    pub fn terms(self) -> &'static [TermInfo] {
        match self {
            VocabId::Purpose => Purpose::TABLE,
            VocabId::ModelProperty => ModelProperty::TABLE,
            VocabId::Modality => Modality::TABLE,
            VocabId::InputSource => InputSource::TABLE,
            VocabId::OutputSource => OutputSource::TABLE,
            VocabId::SizeCategory => SizeCategory::TABLE,
            VocabId::SplitKind => SplitKind::TABLE,
            VocabId::Design => Design::TABLE,
            VocabId::Judge => Judge::TABLE,
            VocabId::ModelAccess => ModelAccess::TABLE,
            VocabId::ValidationTag => ValidationTag::TABLE,
            VocabId::BaselineTag => BaselineTag::TABLE,
            VocabId::RobustnessTag => RobustnessTag::TABLE,
        }
    }

    pub fn is_open(self) -> bool {
        self.terms().iter().any(|t| t.token == OTHER)
    }

    pub fn contains(self, token: &str) -> bool {
        self.terms().iter().any(|t| t.token == token)
    }

    pub fn label_of(self, token: &str) -> Option<&'static str> {
        self.terms().iter().find(|t| t.token == token).map(|t| t.label)
    }
}

impl fmt::Display for VocabId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A vocabulary answer: canonical token plus the verbatim text it came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VocabTerm<V> {
    pub token: V,
    pub raw: String,
}

impl<V: Vocabulary> VocabTerm<V> {
    /// A natively authored term whose raw text is the display label.
    pub fn native(token: V) -> Self {
        VocabTerm {
            token,
            raw: token.label().to_string(),
        }
    }

    pub fn with_raw(token: V, raw: impl Into<String>) -> Self {
        VocabTerm {
            token,
            raw: raw.into(),
        }
    }

    /// Raw text equals the display label, so the token alone reproduces it.
    pub fn is_native(&self) -> bool {
        self.raw == self.token.label()
    }
}

/// Whether two terms count as the same member of an answer set: named
/// tokens collapse on the token, `other` terms only when raw text matches.
pub fn same_member<V: Vocabulary>(a: &VocabTerm<V>, b: &VocabTerm<V>) -> bool {
    a.token == b.token && (!a.token.is_other() || a.raw == b.raw)
}

/// Appends `term` unless an equivalent member is already present.
pub fn push_unique<V: Vocabulary>(set: &mut Vec<VocabTerm<V>>, term: VocabTerm<V>) -> bool {
    if set.iter().any(|t| same_member(t, &term)) {
        false
    } else {
        set.push(term);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn term_counts_match_the_taxonomy() {
        let named = |id: VocabId| id.terms().iter().filter(|t| t.token != OTHER).count();
        assert_eq!(named(VocabId::Purpose), 4);
        assert_eq!(named(VocabId::ModelProperty), 14);
        assert_eq!(named(VocabId::Modality), 7);
        assert_eq!(named(VocabId::InputSource), 7);
        assert_eq!(named(VocabId::OutputSource), 6);
        assert_eq!(named(VocabId::SizeCategory), 5);
        assert_eq!(named(VocabId::SplitKind), 4);
        assert_eq!(named(VocabId::Design), 3);
        assert_eq!(named(VocabId::Judge), 8);
        assert_eq!(named(VocabId::ModelAccess), 3);
        assert_eq!(named(VocabId::ValidationTag), 5);
        assert_eq!(named(VocabId::BaselineTag), 5);
        assert_eq!(named(VocabId::RobustnessTag), 6);
    }

    #[test]
    fn closed_vocabularies_have_no_escape() {
        for id in [
            VocabId::SizeCategory,
            VocabId::SplitKind,
            VocabId::Design,
            VocabId::ModelAccess,
            VocabId::ValidationTag,
            VocabId::BaselineTag,
            VocabId::RobustnessTag,
        ] {
            assert!(!id.is_open(), "{id} should be closed");
        }
        for id in [
            VocabId::Purpose,
            VocabId::ModelProperty,
            VocabId::Modality,
            VocabId::InputSource,
            VocabId::OutputSource,
            VocabId::Judge,
        ] {
            assert!(id.is_open(), "{id} should be open");
        }
    }

    #[test]
    fn every_named_token_lives_in_exactly_one_vocabulary() {
        let mut seen: HashMap<&str, VocabId> = HashMap::new();
        for id in VocabId::ALL {
            for term in id.terms() {
                if term.token == OTHER {
                    continue;
                }
                if let Some(prev) = seen.insert(term.token, id) {
                    panic!("token {} in both {} and {}", term.token, prev, id);
                }
            }
        }
    }

    #[test]
    fn tokens_are_lowercase_identifiers_and_triggers_lowercase() {
        for id in VocabId::ALL {
            for term in id.terms() {
                assert!(term
                    .token
                    .chars()
                    .all(|c| c.is_ascii_lowercase() || c == '_'));
                for trig in term.triggers {
                    assert_eq!(*trig, trig.to_lowercase());
                }
                assert!(!term.label.contains(';'));
            }
        }
    }

    #[test]
    fn serde_uses_tokens() {
        let json = serde_json::to_string(&VocabTerm::native(Judge::ModelLlm)).unwrap();
        assert_eq!(json, r#"{"token":"model_llm","raw":"Model-based (General LLM)"}"#);
        let err = serde_json::from_str::<Judge>(r#""vibes""#).unwrap_err();
        assert!(err.to_string().contains("not a judge token"));
    }

    #[test]
    fn other_terms_collapse_only_on_equal_raw() {
        let mut set = Vec::new();
        assert!(push_unique(&mut set, VocabTerm::with_raw(Judge::Other, "a")));
        assert!(push_unique(&mut set, VocabTerm::with_raw(Judge::Other, "b")));
        assert!(!push_unique(&mut set, VocabTerm::with_raw(Judge::Other, "a")));
        assert!(push_unique(&mut set, VocabTerm::with_raw(Judge::ModelLlm, "x")));
        assert!(!push_unique(&mut set, VocabTerm::with_raw(Judge::ModelLlm, "y")));
        assert_eq!(set.len(), 3);
    }
}
