//! The `efs` command.
//!
//! Exit codes: 0 success, 1 validation errors present, 2 a document failed
//! to parse, 3 I/O or usage failure.

pub mod skeleton;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use efs_core::render::{render, RenderTarget};
use efs_core::text::ParseError;
use efs_core::{
    completeness, corpus_stats, diff, export_card, from_interchange, import_card, parse_canonical,
    serialize_canonical, to_interchange, validate, Diagnostic, DiffStatus, Factsheet, Severity,
};
use serde::Serialize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

/// Write, check and publish evaluation factsheets.
#[derive(Debug, Parser)]
#[command(name = "efs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a commented skeleton factsheet to `<id>.efs`.
    New {
        id: String,
        /// Destination path; never overwritten.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check factsheets and report diagnostics.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Render a factsheet as hypertext, plainmark, card or canonical text.
    Render {
        file: PathBuf,
        #[arg(short, long, default_value = "hypertext")]
        target: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert an evaluation card (LaTeX) into a factsheet.
    ImportCard {
        file: PathBuf,
        /// Destination; a `.json` name writes the interchange form.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Convert a factsheet into an evaluation card.
    ExportCard {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two factsheets question by question.
    Diff {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Also list questions that are equal.
        #[arg(long)]
        all: bool,
    },
    /// Coverage statistics over every factsheet in a directory.
    Stats {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Serve the HTTP API over a factsheet store.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        #[arg(long, env = "EFS_STORE_DIR")]
        store: PathBuf,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{} failed to parse", path.display())]
    Parse { path: PathBuf, errors: Vec<ParseError> },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Serve(#[from] efs_service::ServeError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => EXIT_PARSE,
            _ => EXIT_FAILURE,
        }
    }

    fn report(&self, err: &mut dyn Write) {
        match self {
            CliError::Parse { path, errors } => {
                for e in errors {
                    let _ = writeln!(err, "{}:{}: error {}: {}", path.display(), e.span, e.code, e.message);
                }
            }
            other => {
                let _ = writeln!(err, "efs: {other}");
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// Reads a factsheet, choosing the reader by extension: `.json` is
/// interchange, `.tex` is a card, anything else canonical text.
fn load(path: &Path) -> Result<Factsheet, CliError> {
    let text = read(path)?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let parsed = match ext {
        "json" => from_interchange(&text),
        "tex" => import_card(&text).map(|r| r.factsheet),
        _ if ext != "efs" && text.trim_start().starts_with('{') => from_interchange(&text),
        _ => parse_canonical(&text),
    };
    parsed.map_err(|errors| CliError::Parse {
        path: path.to_path_buf(),
        errors,
    })
}

fn emit(output: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(io_err(path)),
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

fn json_line<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    emit(None, &text, out)
}

/// Runs `efs` with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let _ = writeln!(err, "{}", e.render());
            if !matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = writeln!(err, "{}", Cli::command().render_help());
            }
            return EXIT_FAILURE;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            e.report(err);
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::New { id, output } => new(&id, output, err),
        Command::Validate { files, format } => Ok(validate_files(&files, format, out, err)),
        Command::Render { file, target, output } => {
            let target: RenderTarget = target.parse().map_err(|e: efs_core::RenderError| CliError::Usage(e.to_string()))?;
            let fs = load(&file)?;
            emit(output.as_deref(), &render(&fs, target), out)?;
            Ok(EXIT_OK)
        }
        Command::ImportCard { file, output } => import(&file, output.as_deref(), out, err),
        Command::ExportCard { file, output } => {
            let fs = load(&file)?;
            emit(output.as_deref(), &export_card(&fs), out)?;
            Ok(EXIT_OK)
        }
        Command::Diff { left, right, format, all } => {
            let d = diff(&load(&left)?, &load(&right)?);
            match format {
                Format::Json => json_line(&d, out)?,
                Format::Human => {
                    let mut text = String::new();
                    for e in d.entries.iter().filter(|e| all || e.status != DiffStatus::Equal) {
                        text.push_str(&format!("{} {}\n", e.question_id, e.status.as_str()));
                        if let Some(l) = &e.left {
                            text.push_str(&format!("  - {}\n", l.replace('\n', "\n    ")));
                        }
                        if let Some(r) = &e.right {
                            text.push_str(&format!("  + {}\n", r.replace('\n', "\n    ")));
                        }
                    }
                    if d.changed().next().is_none() {
                        text.push_str("no differences\n");
                    }
                    emit(None, &text, out)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Stats { dir, format } => stats(&dir, format, out),
        Command::Serve { addr, store } => {
            let runtime = tokio::runtime::Runtime::new().map_err(io_err(Path::new("<runtime>")))?;
            let _ = writeln!(err, "serving {} on http://{addr}/api/v1", store.display());
            runtime.block_on(efs_service::serve(&addr, store))?;
            Ok(EXIT_OK)
        }
    }
}

fn new(id: &str, output: Option<PathBuf>, err: &mut dyn Write) -> Result<i32, CliError> {
    if !efs_service::is_valid_id(id) {
        return Err(CliError::Usage(format!(
            "`{id}` is not a valid id: use 1 to 64 of a-z, 0-9 and -"
        )));
    }
    let path = output.unwrap_or_else(|| PathBuf::from(format!("{id}.efs")));
    let mut file = fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&path)
        .map_err(io_err(&path))?;
    file.write_all(skeleton::skeleton(id).as_bytes())
        .map_err(io_err(&path))?;
    let _ = writeln!(err, "wrote {}", path.display());
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FileReport {
    path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    publishable: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<Vec<Diagnostic>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    completeness: Option<efs_core::CompletenessReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    parse_errors: Vec<ParseError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    io_error: Option<String>,
}

fn validate_files(files: &[PathBuf], format: Format, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut code = EXIT_OK;
    let mut reports = Vec::new();
    let mut human = String::new();
    for path in files {
        let shown = path.display().to_string();
        let mut report = FileReport {
            path: shown.clone(),
            publishable: None,
            diagnostics: None,
            completeness: None,
            parse_errors: Vec::new(),
            io_error: None,
        };
        match load(path) {
            Ok(fs) => {
                let diags = validate(&fs);
                let count = |s: Severity| diags.iter().filter(|d| d.severity == s).count();
                let errors = count(Severity::Error);
                if errors > 0 {
                    code = code.max(EXIT_INVALID);
                }
                let ratio = completeness(&fs);
                for d in &diags {
                    let at = d.span.map(|s| format!(":{s}")).unwrap_or_default();
                    let q = d.question_id.map(|q| format!(" [{q}]")).unwrap_or_default();
                    human.push_str(&format!(
                        "{shown}{at}: {} {}{q}: {}\n",
                        d.severity.as_str(),
                        d.code.as_string(),
                        d.message
                    ));
                }
                human.push_str(&format!(
                    "{shown}: {errors} error(s), {} warning(s), {} note(s); {:.0}% complete\n",
                    count(Severity::Warning),
                    count(Severity::Note),
                    ratio.overall * 100.0
                ));
                report.publishable = Some(errors == 0);
                report.diagnostics = Some(diags);
                report.completeness = Some(ratio);
            }
            Err(e) => {
                code = code.max(e.exit_code());
                match format {
                    Format::Human => e.report(err),
                    Format::Json => {}
                }
                match e {
                    CliError::Parse { errors, .. } => report.parse_errors = errors,
                    other => report.io_error = Some(other.to_string()),
                }
            }
        }
        reports.push(report);
    }
    let written = match format {
        Format::Human => emit(None, &human, out),
        Format::Json => json_line(&serde_json::json!({ "files": reports }), out),
    };
    if let Err(e) = written {
        e.report(err);
        return EXIT_FAILURE;
    }
    code
}

fn import(file: &Path, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let text = read(file)?;
    let report = import_card(&text).map_err(|errors| CliError::Parse {
        path: file.to_path_buf(),
        errors,
    })?;
    for n in &report.notes {
        let at = n.span.map(|s| format!(":{s}")).unwrap_or_default();
        let _ = writeln!(err, "{}{at}: {} {}: {}", file.display(), n.severity.as_str(), n.code.as_string(), n.message);
    }
    let json = output.is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let body = if json {
        to_interchange(&report.factsheet)
    } else {
        serialize_canonical(&report.factsheet)
    };
    emit(output, &body, out)?;
    Ok(EXIT_OK)
}

fn stats(dir: &Path, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("efs" | "json"))
        })
        .collect();
    paths.sort();
    let sheets = paths.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let stats = corpus_stats(&sheets);
    match format {
        Format::Json => json_line(&stats, out)?,
        Format::Human => {
            let mut text = format!("{} factsheet(s) in {}\n\nfill rate\n", stats.sheet_count, dir.display());
            for (q, rate) in &stats.fill_rate {
                text.push_str(&format!("  {q:<3} {:>5.1}%\n", rate * 100.0));
            }
            if !stats.vocab_hist.is_empty() {
                text.push_str("\nvocabulary use\n");
                for (q, hist) in &stats.vocab_hist {
                    let parts: Vec<String> = hist.iter().map(|(t, n)| format!("{t} {n}")).collect();
                    text.push_str(&format!("  {q:<3} {}\n", parts.join(", ")));
                }
            }
            emit(None, &text, out)?;
        }
    }
    Ok(EXIT_OK)
}
