use crate::model::vocab::{SizeCategory, VocabTerm, Vocabulary};
use crate::model::Factsheet;

use super::import::{size_category, size_count, COMMANDS, EXTRA_COMMANDS};
use super::parse::escape;

fn join_terms<V: Vocabulary>(terms: &[VocabTerm<V>]) -> String {
    terms
        .iter()
        .map(|t| t.raw.as_str())
        .collect::<Vec<_>>()
        .join("; ")
}

fn tag_list<T: Vocabulary>(tags: &[T]) -> String {
    tags.iter().map(|t| t.token()).collect::<Vec<_>>().join("; ")
}

#[derive(Default)]
struct Group(Vec<(String, String)>);

impl Group {
    fn put(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        if !value.is_empty() {
            self.0.push((name.to_string(), value));
        }
    }

    fn opt(&mut self, name: &str, value: &Option<String>) {
        if let Some(v) = value {
            self.put(name, v.as_str());
        }
    }
}

/// Writes `fs` as an `evaluationcard` document. Fields the base card
/// layout has no slot for use additional commands, emitted only when
/// needed.
pub fn export_card(fs: &Factsheet) -> String {
    let c = &fs.context;
    let mut options: Vec<(String, &str)> = [
        ("title", &c.title),
        ("subtitle", &c.subtitle),
        ("authors", &c.authors),
        ("link", &c.paper_link),
        ("code-link", &c.code_link),
        ("date", &c.release_date),
    ]
    .into_iter()
    .filter_map(|(k, v)| v.as_deref().map(|v| (k.to_string(), v)))
    .collect();

    let mut context = Group::default();
    context.put("Purpose", join_terms(&c.purposes));
    let s = &fs.scope;
    context.put("PrinciplesTested", s.capabilities.join("; "));
    context.put("FunctionalProps", join_terms(&s.model_properties));
    context.put("InputModality", join_terms(&s.input_modality.terms));
    context.opt("InputModalityDetail", &s.input_modality.detail);
    context.put("OutputModality", join_terms(&s.output_modality.terms));
    context.opt("OutputModalityDetail", &s.output_modality.detail);

    let t = &fs.structure;
    let mut structure = Group::default();
    structure.put("InputSource", join_terms(&t.input_sources));
    structure.put("OutputSource", join_terms(&t.output_sources));
    if let Some(size) = &t.size {
        structure.put("Size", size.raw.as_str());
        let count = size_count(&size.raw);
        let category = size_category(&size.raw).or(count.map(SizeCategory::for_count));
        if category != Some(size.category) {
            structure.put("SizeCategory", size.category.token());
        }
        if count != size.count {
            structure.put(
                "SizeCount",
                size.count.map_or("none".to_string(), |n| n.to_string()),
            );
        }
    }
    let splits: Vec<&str> = t.splits.iter().map(|s| s.description.as_str()).collect();
    structure.put("Splits", splits.join("\n"));
    if let Some(d) = &t.design {
        structure.put("Design", d.raw.as_str());
    }
    structure.put("DatasetRefs", t.dataset_refs.join("; "));

    let m = &fs.method;
    let mut method = Group::default();
    method.put("Judge", join_terms(&m.judges));
    let extracted = super::import::extract_judge_model(&m.judges);
    if m.judge_details.judge_model != extracted {
        method.opt("JudgeModel", &m.judge_details.judge_model);
    }
    method.opt("JudgePrompting", &m.judge_details.prompting_strategy);
    method.opt("JudgeTemperature", &m.judge_details.temperature);
    method.opt("JudgeAgreement", &m.judge_details.agreement);
    let steps: Vec<String> = m
        .protocol
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{}) {s}", i + 1))
        .collect();
    method.put("Protocol", steps.join("\n"));
    if let Some(a) = &m.model_access {
        method.put("ModelAccess", a.raw.as_str());
    }
    if let Some(h) = m.heldout {
        method.put("HasHeldout", h.to_string());
    }
    method.opt("HeldoutDetails", &m.heldout_details);

    let a = &fs.alignment;
    let mut alignment = Group::default();
    if let Some(v) = &a.validation {
        alignment.put("AlignmentValidation", v.text.as_str());
        alignment.put("ValidationTags", tag_list(&v.tags));
    }
    if let Some(b) = &a.baselines {
        alignment.put("BaselineModels", b.text.as_str());
        alignment.put("BaselineTags", tag_list(&b.tags));
    }
    if let Some(r) = &a.robustness {
        alignment.put("RobustnessMeasures", r.text.as_str());
        alignment.put("RobustnessTags", tag_list(&r.tags));
    }
    alignment.put("KnownLimitations", a.limitations.join("; "));
    alignment.put("BenchmarksList", a.similar_evals.join("; "));

    let mut extensions = Group::default();
    for (key, value) in &fs.extensions {
        let name = &key[2..];
        let as_option = name
            .strip_prefix("option-")
            .filter(|o| !o.is_empty() && !options.iter().any(|(k, _)| k == o) && !super::import::OPTIONS.contains(o));
        if let Some(opt) = as_option {
            options.push((opt.to_string(), value));
        } else if !value.is_empty()
            && name.chars().all(|c| c.is_ascii_alphabetic())
            && !COMMANDS.contains(&name)
            && !EXTRA_COMMANDS.contains(&name)
        {
            extensions.put(name, value.as_str());
        } else {
            extensions.put("Extension", format!("{key}: {value}"));
        }
    }

    let mut out = String::from("\\begin{evaluationcard}");
    if !options.is_empty() {
        out.push_str("[\n");
        let lines: Vec<String> = options
            .iter()
            .map(|(k, v)| format!("  {k}={{{}}}", escape(v)))
            .collect();
        out.push_str(&lines.join(",\n"));
        out.push_str("\n]");
    }
    out.push('\n');
    let groups = [context, structure, method, alignment, extensions];
    let mut any = false;
    for group in groups.iter().filter(|g| !g.0.is_empty()) {
        any = true;
        out.push('\n');
        for (name, value) in &group.0 {
            out.push_str(&format!("  \\{name}{{{}}}\n", escape(value)));
        }
    }
    if any {
        out.push('\n');
    }
    out.push_str("\\end{evaluationcard}\n");
    out
}
