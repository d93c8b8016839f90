//! Human-readable documents: self-contained HTML (`hypertext`) and Markdown
//! (`plainmark`). The `card` and `canonical` targets delegate to
//! [`export_card`] and [`serialize_canonical`].

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::card::export_card;
use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::model::{catalog, Answer, Dimension, Factsheet, QuestionId, Vocabulary};
use crate::text::serialize_canonical;

pub const NOT_DOCUMENTED: &str = "not documented";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenderTarget {
    Hypertext,
    Plainmark,
    Card,
    Canonical,
}

impl RenderTarget {
    pub const ALL: [RenderTarget; 4] = [
        RenderTarget::Hypertext,
        RenderTarget::Plainmark,
        RenderTarget::Card,
        RenderTarget::Canonical,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RenderTarget::Hypertext => "hypertext",
            RenderTarget::Plainmark => "plainmark",
            RenderTarget::Card => "card",
            RenderTarget::Canonical => "canonical",
        }
    }

    /// Conventional file extension for output of this target.
    pub fn extension(self) -> &'static str {
        match self {
            RenderTarget::Hypertext => "html",
            RenderTarget::Plainmark => "md",
            RenderTarget::Card => "tex",
            RenderTarget::Canonical => "efs",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            RenderTarget::Hypertext => "text/html; charset=utf-8",
            RenderTarget::Plainmark => "text/markdown; charset=utf-8",
            RenderTarget::Card | RenderTarget::Canonical => "text/plain; charset=utf-8",
        }
    }
}

impl fmt::Display for RenderTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenderError {
    #[error("unknown render target `{0}` (expected hypertext, plainmark, card or canonical)")]
    UnknownTarget(String),
    #[error("diagnostics can only be rendered as hypertext or plainmark, not {0}")]
    UnsupportedTarget(RenderTarget),
}

impl FromStr for RenderTarget {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RenderTarget::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| RenderError::UnknownTarget(s.to_string()))
    }
}

/// Short row label for a question.
pub fn field_title(id: QuestionId) -> &'static str {
    use QuestionId::*;
    match id {
        C1 => "Title",
        C2 => "Subtitle",
        C3 => "Authors",
        C4 => "Release date",
        C5 => "Paper link",
        C6 => "Code link",
        C7 => "Purpose",
        S1 => "Capabilities",
        S2 => "Model properties",
        S3 => "Input modality",
        S4 => "Output modality",
        T1 => "Input sources",
        T2 => "Output sources",
        T3 => "Size",
        T4 => "Splits",
        T5 => "Design",
        T6 => "Dataset references",
        M1 => "Judges",
        M2 => "Judge details",
        M3 => "Protocol",
        M4 => "Model access",
        M5 => "Held-out test set",
        A1 => "Validation",
        A2 => "Baselines",
        A3 => "Robustness",
        A4 => "Known limitations",
        A5 => "Similar evaluations",
    }
}

/// One value line of a row; `link` marks text that may become an anchor.
struct Line {
    text: String,
    link: bool,
}

fn plain(text: impl Into<String>) -> Line {
    Line {
        text: text.into(),
        link: false,
    }
}

fn terms<V: Vocabulary>(set: &[crate::model::VocabTerm<V>]) -> Vec<Line> {
    set.iter().map(|t| plain(t.raw.clone())).collect()
}

/// Display lines for an answered question, using the author's raw text.
fn lines(fs: &Factsheet, id: QuestionId) -> Option<Vec<Line>> {
    use QuestionId::*;
    let answer = fs.answer(id)?;
    let s = &fs.scope;
    let t = &fs.structure;
    let m = &fs.method;
    Some(match (id, answer) {
        (C5 | C6, Answer::Text(url)) => vec![Line {
            text: url,
            link: true,
        }],
        (C7, _) => terms(&fs.context.purposes),
        (S2, _) => terms(&s.model_properties),
        (S3 | S4, _) => {
            let modality = if id == S3 { &s.input_modality } else { &s.output_modality };
            let mut out = terms(&modality.terms);
            if let Some(d) = &modality.detail {
                out.push(plain(format!("Detail: {d}")));
            }
            out
        }
        (T1, _) => terms(&t.input_sources),
        (T2, _) => terms(&t.output_sources),
        (T5, _) => terms(t.design.as_slice()),
        (M1, _) => terms(&m.judges),
        (M4, _) => terms(m.model_access.as_slice()),
        (_, Answer::Text(text)) => vec![plain(text)],
        (_, Answer::List(items)) => items.into_iter().map(plain).collect(),
        (_, Answer::Tokens { terms, .. }) => terms.into_iter().map(|t| plain(t.raw)).collect(),
        (_, Answer::Size(size)) => {
            let mut out = vec![plain(size.raw)];
            if let Some(n) = size.count {
                out.push(plain(format!("Count: {n} ({})", size.category.label())));
            }
            out
        }
        (_, Answer::Splits(splits)) => splits
            .into_iter()
            .map(|s| plain(s.description))
            .collect(),
        (_, Answer::Judge(d)) => [
            ("Judge model", d.judge_model),
            ("Prompting strategy", d.prompting_strategy),
            ("Temperature", d.temperature),
            ("Agreement", d.agreement),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| plain(format!("{k}: {v}"))))
        .collect(),
        (_, Answer::Flag { value, details }) => {
            let mut out = vec![plain(if value { "Yes" } else { "No" })];
            if let Some(d) = details {
                out.push(plain(format!("Details: {d}")));
            }
            out
        }
        (_, Answer::Annotated { text, tags }) => {
            let mut out = Vec::new();
            if !text.trim().is_empty() {
                out.push(plain(text));
            }
            if !tags.is_empty() {
                out.push(plain(format!("Tags: {}", tags.join(", "))));
            }
            out
        }
    })
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn is_web_url(s: &str) -> bool {
    (s.starts_with("https://") || s.starts_with("http://")) && !s.contains(char::is_whitespace)
}

fn html_line(line: &Line) -> String {
    let text = html_escape(&line.text).replace('\n', "<br>");
    if line.link && is_web_url(&line.text) {
        format!("<a href=\"{text}\">{text}</a>")
    } else {
        text
    }
}

const STYLE: &str = "body{font-family:system-ui,sans-serif;max-width:60rem;margin:2rem auto;padding:0 1rem;color:#1d1d1f}\
header{border-bottom:2px solid #444;margin-bottom:1rem}\
h1{margin-bottom:.2rem}\
.subtitle{font-style:italic;margin-top:0}\
.meta{color:#555}\
h2{background:#eef;padding:.3rem .5rem;margin-top:1.5rem}\
table{border-collapse:collapse;width:100%}\
th{text-align:left;vertical-align:top;width:14rem;padding:.3rem .5rem}\
td{padding:.3rem .5rem}\
tr+tr{border-top:1px solid #ddd}\
.missing{color:#999;font-style:italic}\
.qid{color:#777;font-weight:normal}\
ul{margin:0;padding-left:1.2rem}\
.sev-error{color:#b00020}.sev-warning{color:#a06000}.sev-note{color:#205080}";

fn html_document(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n{body}</body>\n</html>\n",
        html_escape(title)
    )
}

fn hypertext(fs: &Factsheet) -> String {
    let c = &fs.context;
    let title = c.title.as_deref().unwrap_or("Untitled evaluation");
    let mut body = String::from("<header>\n");
    let _ = writeln!(body, "<h1>{}</h1>", html_escape(title));
    if let Some(sub) = &c.subtitle {
        let _ = writeln!(body, "<p class=\"subtitle\">{}</p>", html_escape(sub));
    }
    let mut meta = Vec::new();
    if let Some(a) = &c.authors {
        meta.push(html_escape(a));
    }
    if let Some(d) = &c.release_date {
        meta.push(html_escape(d));
    }
    for (label, url) in [("Paper", &c.paper_link), ("Code", &c.code_link)] {
        if let Some(url) = url {
            let line = Line {
                text: url.clone(),
                link: true,
            };
            meta.push(format!("{label}: {}", html_line(&line)));
        }
    }
    if !meta.is_empty() {
        let _ = writeln!(body, "<p class=\"meta\">{}</p>", meta.join(" &middot; "));
    }
    body.push_str("</header>\n");

    for dim in Dimension::ALL {
        let _ = writeln!(
            body,
            "<section id=\"{}\">\n<h2>{}</h2>\n<table>",
            dim.name(),
            html_escape(dim.section_title())
        );
        for q in catalog().section(dim).filter(|q| fs.is_applicable(q.id)) {
            let _ = write!(
                body,
                "<tr><th>{} <span class=\"qid\">{}</span></th>",
                field_title(q.id),
                q.id
            );
            match lines(fs, q.id) {
                None => {
                    let _ = writeln!(body, "<td class=\"missing\">{NOT_DOCUMENTED}</td></tr>");
                }
                Some(ls) if ls.len() == 1 => {
                    let _ = writeln!(body, "<td>{}</td></tr>", html_line(&ls[0]));
                }
                Some(ls) => {
                    body.push_str("<td><ul>");
                    for l in &ls {
                        let _ = write!(body, "<li>{}</li>", html_line(l));
                    }
                    body.push_str("</ul></td></tr>\n");
                }
            }
        }
        body.push_str("</table>\n</section>\n");
    }
    html_document(title, &body)
}

/// Escapes Markdown punctuation so user text renders literally.
fn md_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if matches!(c, '\\' | '`' | '*' | '_' | '[' | ']' | '<' | '>' | '#' | '|' | '~' | '&') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn md_value(line: &Line) -> String {
    if line.link && is_web_url(&line.text) && !line.text.contains(['<', '>']) {
        format!("<{}>", line.text)
    } else {
        md_escape(&line.text).replace('\n', "  \n    ")
    }
}

fn plainmark(fs: &Factsheet) -> String {
    let c = &fs.context;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# {}\n",
        md_escape(c.title.as_deref().unwrap_or("Untitled evaluation"))
    );
    if let Some(sub) = &c.subtitle {
        let _ = writeln!(out, "*{}*\n", md_escape(sub).replace('\n', " "));
    }
    let mut meta = Vec::new();
    if let Some(a) = &c.authors {
        meta.push(md_escape(a));
    }
    if let Some(d) = &c.release_date {
        meta.push(md_escape(d));
    }
    for (label, url) in [("Paper", &c.paper_link), ("Code", &c.code_link)] {
        if let Some(url) = url {
            let line = Line {
                text: url.clone(),
                link: true,
            };
            meta.push(format!("{label}: {}", md_value(&line)));
        }
    }
    if !meta.is_empty() {
        let _ = writeln!(out, "{}\n", meta.join(" · ").replace('\n', " "));
    }
    for dim in Dimension::ALL {
        let _ = writeln!(out, "## {}\n", dim.section_title());
        for q in catalog().section(dim).filter(|q| fs.is_applicable(q.id)) {
            let _ = writeln!(out, "**{} · {}**", q.id, field_title(q.id));
            match lines(fs, q.id) {
                None => {
                    let _ = writeln!(out, ": _{NOT_DOCUMENTED}_");
                }
                Some(ls) => {
                    for l in &ls {
                        let _ = writeln!(out, ": {}", md_value(l));
                    }
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Renders `fs` for `target`. Total over valid factsheets.
pub fn render(fs: &Factsheet, target: RenderTarget) -> String {
    match target {
        RenderTarget::Hypertext => hypertext(fs),
        RenderTarget::Plainmark => plainmark(fs),
        RenderTarget::Card => export_card(fs),
        RenderTarget::Canonical => serialize_canonical(fs),
    }
}

/// A findings report. Rows follow validator order (severity, code,
/// question id).
pub fn render_diagnostics(diags: &[Diagnostic], target: RenderTarget) -> Result<String, RenderError> {
    let mut diags = diags.to_vec();
    sort_diagnostics(&mut diags);
    let summary = match diags.len() {
        0 => "No findings: zero diagnostics.".to_string(),
        1 => "1 finding.".to_string(),
        n => format!("{n} findings."),
    };
    match target {
        RenderTarget::Hypertext => {
            let mut body = format!("<h1>Validation report</h1>\n<p>{summary}</p>\n");
            if !diags.is_empty() {
                body.push_str("<table>\n<tr><th>Code</th><th>Severity</th><th>Question</th><th>Message</th></tr>\n");
                for d in &diags {
                    let _ = writeln!(
                        body,
                        "<tr><td>{}</td><td class=\"sev-{sev}\">{sev}</td><td>{}</td><td>{}</td></tr>",
                        d.code,
                        d.question_id.map_or(String::new(), |q| q.to_string()),
                        html_escape(&d.message),
                        sev = d.severity
                    );
                }
                body.push_str("</table>\n");
            }
            Ok(html_document("Validation report", &body))
        }
        RenderTarget::Plainmark => {
            let mut out = format!("# Validation report\n\n{summary}\n");
            if !diags.is_empty() {
                out.push_str("\n| Code | Severity | Question | Message |\n|---|---|---|---|\n");
                for d in &diags {
                    let _ = writeln!(
                        out,
                        "| {} | {} | {} | {} |",
                        d.code,
                        d.severity,
                        d.question_id.map_or(String::new(), |q| q.to_string()),
                        md_escape(&d.message).replace('\n', " ")
                    );
                }
            }
            Ok(out)
        }
        other => Err(RenderError::UnsupportedTarget(other)),
    }
}
