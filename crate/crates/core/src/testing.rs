//! Proptest strategies producing structurally valid factsheets, plus a
//! helper that copies one question's answer between sheets.

use indexmap::IndexMap;
use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;

use crate::model::vocab::{push_unique, SplitKind};
use crate::model::{
    AlignmentDim, Annotated, ContextDim, Factsheet, JudgeDetails, MethodDim, ModalityAnswer,
    QuestionId, ScopeDim, SizeSpec, SplitSpec, StructureDim, VocabTerm, Vocabulary,
};

/// Text that stresses the encoders: quotes, backslashes, fences, markup,
/// newlines and non-ASCII.
pub fn arb_text() -> impl Strategy<Value = String> {
    prop_oneof![
        4 => "[a-zA-Z0-9 ,.;:()-]{0,16}",
        2 => "\\PC{0,12}",
        1 => "[\"\\\\{}%#<>&'\n\r\t a]{0,10}",
        1 => Just("\"\"\"".to_string()),
        1 => "(\\\\{0,2}\"\"\"\n?){1,3}",
        1 => Just("<script>alert('x')</script>".to_string()),
        1 => "[a-z ]{0,6}\n[a-z =\"]{0,6}",
    ]
}

pub fn arb_nonempty_text() -> impl Strategy<Value = String> {
    arb_text().prop_filter("nonempty", |s| !s.is_empty())
}

pub fn arb_term<V: Vocabulary + std::fmt::Debug>() -> impl Strategy<Value = VocabTerm<V>> {
    (
        proptest::sample::select(V::all()),
        option::weighted(0.5, arb_nonempty_text()),
    )
        .prop_map(|(token, raw)| match raw {
            Some(raw) => VocabTerm::with_raw(token, raw),
            None => VocabTerm::native(token),
        })
}

pub fn arb_terms<V: Vocabulary + std::fmt::Debug>() -> impl Strategy<Value = Vec<VocabTerm<V>>> {
    vec(arb_term::<V>(), 0..4).prop_map(|terms| {
        let mut set = Vec::new();
        for t in terms {
            push_unique(&mut set, t);
        }
        set
    })
}

fn arb_tags<T: Vocabulary + std::fmt::Debug>() -> impl Strategy<Value = Vec<T>> {
    proptest::sample::subsequence(T::all(), 0..=T::all().len().min(3))
}

fn arb_annotated<T: Vocabulary + std::fmt::Debug>() -> impl Strategy<Value = Option<Annotated<T>>> {
    option::of((arb_text(), arb_tags::<T>()).prop_map(|(text, tags)| Annotated { text, tags }))
}

fn arb_opt_text() -> impl Strategy<Value = Option<String>> {
    option::of(arb_text())
}

fn arb_list() -> impl Strategy<Value = Vec<String>> {
    vec(arb_text(), 0..4)
}

fn arb_context() -> BoxedStrategy<ContextDim> {
    (
        arb_opt_text(),
        arb_opt_text(),
        arb_opt_text(),
        option::of(prop_oneof!["[0-9]{4}", "[0-9]{4}-[01][0-9]-[0-3][0-9]", arb_text()]),
        arb_opt_text(),
        option::of(prop_oneof!["https://[a-z]{1,8}\\.org/[a-z#_-]{0,8}", arb_text()]),
        arb_terms(),
    )
        .prop_map(
            |(title, subtitle, authors, release_date, paper_link, code_link, purposes)| ContextDim {
                title,
                subtitle,
                authors,
                release_date,
                paper_link,
                code_link,
                purposes,
            },
        )
        .boxed()
}

fn arb_modality() -> impl Strategy<Value = ModalityAnswer> {
    (arb_terms(), arb_opt_text()).prop_map(|(terms, detail)| ModalityAnswer { terms, detail })
}

fn arb_scope() -> BoxedStrategy<ScopeDim> {
    (arb_list(), arb_terms(), arb_modality(), arb_modality()).prop_map(
        |(capabilities, model_properties, input_modality, output_modality)| ScopeDim {
            capabilities,
            model_properties,
            input_modality,
            output_modality,
        },
    )
        .boxed()
}

fn arb_size() -> impl Strategy<Value = Option<SizeSpec>> {
    option::of(
        (
            proptest::sample::select(crate::model::vocab::SizeCategory::all()),
            option::of(prop_oneof![0u64..2_000_000, any::<u64>()]),
            arb_nonempty_text(),
        )
            .prop_map(|(category, count, raw)| SizeSpec {
                category,
                count,
                raw,
            }),
    )
}

fn arb_splits() -> impl Strategy<Value = Vec<SplitSpec>> {
    (
        proptest::sample::subsequence(SplitKind::all(), 0..=SplitKind::all().len()),
        vec(arb_nonempty_text(), 4),
    )
        .prop_map(|(kinds, descs)| {
            kinds
                .into_iter()
                .zip(descs)
                .map(|(kind, description)| SplitSpec { kind, description })
                .collect()
        })
}

fn arb_structure() -> BoxedStrategy<StructureDim> {
    (
        arb_terms(),
        arb_terms(),
        arb_size(),
        arb_splits(),
        option::of(arb_term()),
        arb_list(),
    )
        .prop_map(
            |(input_sources, output_sources, size, splits, design, dataset_refs)| StructureDim {
                input_sources,
                output_sources,
                size,
                splits,
                design,
                dataset_refs,
            },
        )
        .boxed()
}

fn arb_method() -> BoxedStrategy<MethodDim> {
    (
        arb_terms(),
        (arb_opt_text(), arb_opt_text(), arb_opt_text(), arb_opt_text()),
        vec(arb_nonempty_text(), 0..4),
        option::of(arb_term()),
        option::of(any::<bool>()),
        arb_opt_text(),
    )
        .prop_map(
            |(judges, (judge_model, prompting_strategy, temperature, agreement), protocol, model_access, heldout, heldout_details)| MethodDim {
                judges,
                judge_details: JudgeDetails {
                    judge_model,
                    prompting_strategy,
                    temperature,
                    agreement,
                },
                protocol,
                model_access,
                heldout,
                heldout_details,
            },
        )
        .boxed()
}

fn arb_alignment() -> BoxedStrategy<AlignmentDim> {
    (
        arb_annotated(),
        arb_annotated(),
        arb_annotated(),
        arb_list(),
        arb_list(),
    )
        .prop_map(
            |(validation, baselines, robustness, limitations, similar_evals)| AlignmentDim {
                validation,
                baselines,
                robustness,
                limitations,
                similar_evals,
            },
        )
        .boxed()
}

fn arb_extensions() -> impl Strategy<Value = IndexMap<String, String>> {
    vec(("x-[A-Za-z0-9_.-]{1,8}", arb_text()), 0..3).prop_map(|pairs| pairs.into_iter().collect())
}

/// Any factsheet satisfying [`Factsheet::is_valid`].
pub fn arb_factsheet() -> BoxedStrategy<Factsheet> {
    (
        prop_oneof![4 => Just("1.0".to_string()), 1 => "1\\.[1-9][0-9]?"],
        arb_context(),
        arb_scope(),
        arb_structure(),
        arb_method(),
        arb_alignment(),
        arb_extensions(),
    )
        .prop_map(
            |(efs_version, context, scope, structure, method, alignment, extensions)| Factsheet {
                efs_version,
                context,
                scope,
                structure,
                method,
                alignment,
                extensions,
            },
        )
        .boxed()
}

/// Copies the fields holding `q`'s answer from `from` into `to`.
pub fn transplant(from: &Factsheet, to: &mut Factsheet, q: QuestionId) {
    use QuestionId::*;
    let (f, t) = (from, to);
    match q {
        C1 => t.context.title = f.context.title.clone(),
        C2 => t.context.subtitle = f.context.subtitle.clone(),
        C3 => t.context.authors = f.context.authors.clone(),
        C4 => t.context.release_date = f.context.release_date.clone(),
        C5 => t.context.paper_link = f.context.paper_link.clone(),
        C6 => t.context.code_link = f.context.code_link.clone(),
        C7 => t.context.purposes = f.context.purposes.clone(),
        S1 => t.scope.capabilities = f.scope.capabilities.clone(),
        S2 => t.scope.model_properties = f.scope.model_properties.clone(),
        S3 => t.scope.input_modality = f.scope.input_modality.clone(),
        S4 => t.scope.output_modality = f.scope.output_modality.clone(),
        T1 => t.structure.input_sources = f.structure.input_sources.clone(),
        T2 => t.structure.output_sources = f.structure.output_sources.clone(),
        T3 => t.structure.size = f.structure.size.clone(),
        T4 => t.structure.splits = f.structure.splits.clone(),
        T5 => t.structure.design = f.structure.design.clone(),
        T6 => t.structure.dataset_refs = f.structure.dataset_refs.clone(),
        M1 => t.method.judges = f.method.judges.clone(),
        M2 => t.method.judge_details = f.method.judge_details.clone(),
        M3 => t.method.protocol = f.method.protocol.clone(),
        M4 => t.method.model_access = f.method.model_access.clone(),
        M5 => {
            t.method.heldout = f.method.heldout;
            t.method.heldout_details = f.method.heldout_details.clone();
        }
        A1 => t.alignment.validation = f.alignment.validation.clone(),
        A2 => t.alignment.baselines = f.alignment.baselines.clone(),
        A3 => t.alignment.robustness = f.alignment.robustness.clone(),
        A4 => t.alignment.limitations = f.alignment.limitations.clone(),
        A5 => t.alignment.similar_evals = f.alignment.similar_evals.clone(),
    }
}
