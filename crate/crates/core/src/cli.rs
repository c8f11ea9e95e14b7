//! The `guidance` command line.
//!
//! Exit codes: 0 success, 1 validation failure, 2 resolution failure,
//! 3 I/O or parse failure, 4 usage error. Diagnostics go to stderr; primary
//! output to stdout or the `-o` file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::diff::diff;
use crate::graph::build_graph;
use crate::model::{Catalog, DocumentEnvelope, Profile};
use crate::propagate::{propagate_with, PropagateOptions};
use crate::render::{render_markdown, RenderOptions};
use crate::resolver::{ChainResolver, ResolveError, ResolveOptions, SourceStore, StoreError};
use crate::serialization::{
    parse_document, parse_document_unchecked, serialize_catalog, validate_document, Format, ParseError,
};
use crate::validate::{validate_profile_with, Finding, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Ok = 0,
    Validation = 1,
    Resolution = 2,
    Io = 3,
    Usage = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "guidance",
    version,
    about = "Resolve, compare and publish layered guidance catalogs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolve a profile and everything it imports into a catalog.
    Resolve {
        /// Profile uri, relative to the store.
        profile: String,
        #[arg(long, env = "GUIDANCE_STORE")]
        store: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DocFormat::Yaml)]
        format: DocFormat,
        /// Treat removals that match nothing as warnings.
        #[arg(long)]
        lenient: bool,
    },
    /// Check documents; profiles are also checked against their imports
    /// when a store is given.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, env = "GUIDANCE_STORE")]
        store: Option<PathBuf>,
    },
    /// Compare two catalogs.
    Diff {
        before: PathBuf,
        after: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Render a catalog, or a resolved profile, as Markdown.
    Render {
        /// A catalog or profile file; a store-relative uri with `--store`.
        file: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Footnote each part with the layer that contributed it.
        #[arg(long)]
        provenance: bool,
        #[arg(long)]
        store: Option<PathBuf>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=6))]
        heading_depth: u8,
    },
    /// Show which documents import which.
    Graph {
        #[arg(long, env = "GUIDANCE_STORE")]
        store: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Re-resolve every profile downstream of a changed document.
    Propagate {
        #[arg(long, env = "GUIDANCE_STORE")]
        store: PathBuf,
        #[arg(long)]
        changed: String,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        lenient: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DocFormat {
    Yaml,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Json,
}

struct Failure {
    status: ExitStatus,
    message: String,
}

impl Failure {
    fn new(status: ExitStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn resolve(uri: &str, err: &ResolveError) -> Self {
        let status = resolve_status(err);
        match err {
            ResolveError::Store(e) => Failure::new(status, e.to_string()),
            e => Failure::new(status, format!("{uri}: {e}")),
        }
    }

    fn store(err: &StoreError) -> Self {
        Failure::new(store_status(err), err.to_string())
    }
}

fn store_status(err: &StoreError) -> ExitStatus {
    match err {
        StoreError::Parse {
            error: ParseError::Validation(_),
            ..
        } => ExitStatus::Validation,
        _ => ExitStatus::Io,
    }
}

fn resolve_status(err: &ResolveError) -> ExitStatus {
    match err {
        ResolveError::Store(e) => store_status(e),
        ResolveError::InvalidProfile { .. } => ExitStatus::Validation,
        _ => ExitStatus::Resolution,
    }
}

type Outcome = Result<ExitStatus, Failure>;

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                ExitStatus::Usage.code()
            } else {
                let _ = write!(stdout, "{text}");
                ExitStatus::Ok.code()
            };
        }
    };
    let mut ctx = Context { stdout, stderr };
    let outcome = match cli.command {
        Command::Resolve {
            profile,
            store,
            output,
            format,
            lenient,
        } => ctx.resolve(&profile, store, output.as_deref(), format, lenient),
        Command::Validate { files, store } => ctx.validate(&files, store.as_deref()),
        Command::Diff { before, after, format } => ctx.diff(&before, &after, format),
        Command::Render {
            file,
            output,
            provenance,
            store,
            heading_depth,
        } => {
            let options = RenderOptions::default()
                .with_provenance(provenance)
                .with_heading_depth(heading_depth.into());
            ctx.render(&file, store, output.as_deref(), &options)
        }
        Command::Graph { store, format } => ctx.graph(&store, format),
        Command::Propagate {
            store,
            changed,
            format,
            lenient,
        } => ctx.propagate(&store, &changed, format, lenient),
    };
    match outcome {
        Ok(status) => status.code(),
        Err(failure) => {
            let _ = writeln!(ctx.stderr, "error: {}", failure.message);
            failure.status.code()
        }
    }
}

/// Entry point for the binary: real arguments and standard streams.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

struct Context<'a> {
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

/// Splits a document reference into (store, uri). Without an explicit store
/// the file's directory serves as one.
fn locate(reference: &str, store: Option<PathBuf>) -> Result<(SourceStore, String), Failure> {
    match store {
        Some(root) => Ok((SourceStore::new(root), reference.to_owned())),
        None => {
            let path = Path::new(reference);
            let name = path
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Failure::new(ExitStatus::Usage, format!("{reference}: not a file name")))?;
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
                _ => PathBuf::from("."),
            };
            Ok((SourceStore::new(dir), name.to_owned()))
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::new(ExitStatus::Io, format!("{}: {e}", path.display())))
}

fn parse_failure(path: &Path, err: ParseError) -> Failure {
    let status = match err {
        ParseError::Validation(_) => ExitStatus::Validation,
        _ => ExitStatus::Io,
    };
    Failure::new(status, format!("{}: {err}", path.display()))
}

fn load_catalog(path: &Path) -> Result<Catalog, Failure> {
    let bytes = read_file(path)?;
    let doc = parse_document(&bytes, Format::from_path(path)).map_err(|e| parse_failure(path, e))?;
    let kind = doc.kind();
    let mut catalog = doc.into_catalog().ok_or_else(|| {
        Failure::new(
            ExitStatus::Io,
            format!("{}: expected a catalog, found a {}", path.display(), kind.key()),
        )
    })?;
    catalog.uri = path.display().to_string();
    Ok(catalog)
}

impl Context<'_> {
    fn emit(&mut self, output: Option<&Path>, text: &str) -> Result<(), Failure> {
        match output {
            Some(path) => {
                std::fs::write(path, text).map_err(|e| Failure::new(ExitStatus::Io, format!("{}: {e}", path.display())))
            }
            None => self
                .stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::new(ExitStatus::Io, format!("<stdout>: {e}"))),
        }
    }

    fn warn(&mut self, findings: &[Finding]) {
        for finding in findings {
            let _ = writeln!(self.stderr, "{finding}");
        }
    }

    fn resolve(
        &mut self,
        profile: &str,
        store: Option<PathBuf>,
        output: Option<&Path>,
        format: DocFormat,
        lenient: bool,
    ) -> Outcome {
        let (store, uri) = locate(profile, store)?;
        let options = ResolveOptions { lenient };
        let resolved = ChainResolver::new(&store, options)
            .resolve(&uri)
            .map_err(|e| Failure::resolve(&uri, &e))?;
        self.warn(&resolved.warnings);
        let format = match format {
            DocFormat::Yaml => Format::Yaml,
            DocFormat::Json => Format::Json,
        };
        self.emit(output, &serialize_catalog(&resolved.catalog, format))?;
        Ok(ExitStatus::Ok)
    }

    fn validate(&mut self, files: &[PathBuf], store: Option<&Path>) -> Outcome {
        let store = store.map(SourceStore::new);
        let mut resolver = store.as_ref().map(|s| ChainResolver::new(s, ResolveOptions::default()));
        let mut worst = ExitStatus::Ok;
        let (mut errors, mut warnings) = (0, 0);
        for file in files {
            let result = read_file(file).and_then(|bytes| {
                parse_document_unchecked(&bytes, Format::from_path(file)).map_err(|e| parse_failure(file, e))
            });
            let doc = match result {
                Ok(doc) => doc,
                Err(failure) => {
                    let _ = writeln!(self.stderr, "error: {}", failure.message);
                    worst = worst.max(failure.status);
                    continue;
                }
            };
            let mut report = validate_document(&doc);
            if let (DocumentEnvelope::Profile(profile), Some(resolver)) = (&doc, resolver.as_mut()) {
                if !report.has_errors() {
                    match self.resolved_sources(resolver, profile) {
                        Ok(sources) => report = validate_profile_with(profile, &sources, &ResolveOptions::default()),
                        Err(failure) => {
                            let _ = writeln!(self.stderr, "error: {}: {}", file.display(), failure.message);
                            worst = worst.max(failure.status);
                            continue;
                        }
                    }
                }
            }
            errors += report.error_count();
            warnings += report.warning_count();
            self.print_findings(file, &report);
            if report.has_errors() {
                worst = worst.max(ExitStatus::Validation);
            }
        }
        let _ = writeln!(self.stdout, "{errors} errors, {warnings} warnings");
        Ok(worst)
    }

    fn print_findings(&mut self, file: &Path, report: &ValidationReport) {
        for finding in &report.findings {
            let _ = writeln!(self.stdout, "{}: {finding}", file.display());
        }
    }

    fn resolved_sources(
        &mut self,
        resolver: &mut ChainResolver<'_>,
        profile: &Profile,
    ) -> Result<Vec<Catalog>, Failure> {
        profile
            .imports
            .iter()
            .map(|import| {
                resolver
                    .resolve(&import.source)
                    .map(|r| r.catalog.clone())
                    .map_err(|e| Failure::resolve(&import.source, &e))
            })
            .collect()
    }

    fn diff(&mut self, before: &Path, after: &Path, format: ReportFormat) -> Outcome {
        let before = load_catalog(before)?;
        let after = load_catalog(after)?;
        let changes = diff(&before, &after);
        let text = match format {
            ReportFormat::Text => changes.to_text(),
            ReportFormat::Json => changes.to_json(),
        };
        self.emit(None, &text)?;
        Ok(ExitStatus::Ok)
    }

    fn render(
        &mut self,
        file: &str,
        store: Option<PathBuf>,
        output: Option<&Path>,
        options: &RenderOptions,
    ) -> Outcome {
        let (store, uri) = locate(file, store)?;
        let resolved = ChainResolver::new(&store, ResolveOptions::default())
            .resolve(&uri)
            .map_err(|e| Failure::resolve(&uri, &e))?;
        self.warn(&resolved.warnings);
        self.emit(output, &render_markdown(&resolved, options))?;
        Ok(ExitStatus::Ok)
    }

    fn graph(&mut self, store: &Path, format: ReportFormat) -> Outcome {
        let store = SourceStore::new(store);
        let graph = build_graph(&store).map_err(|e| Failure::store(&e))?;
        let text = match format {
            ReportFormat::Text => graph.to_text(),
            ReportFormat::Json => graph.to_json(),
        };
        self.emit(None, &text)?;
        if let Err(e) = graph.topological_order() {
            return Err(Failure::new(
                resolve_status(&e),
                format!("{}: {e}", store.root().display()),
            ));
        }
        Ok(if graph.findings.is_empty() {
            ExitStatus::Ok
        } else {
            ExitStatus::Validation
        })
    }

    fn propagate(&mut self, store: &Path, changed: &str, format: ReportFormat, lenient: bool) -> Outcome {
        let store = SourceStore::new(store);
        let options = PropagateOptions {
            resolve: ResolveOptions { lenient },
            ..PropagateOptions::default()
        };
        let outcomes = propagate_with(&store, changed, &options).map_err(|e| Failure::resolve(changed, &e))?;
        let mut worst = ExitStatus::Ok;
        let mut json = Vec::new();
        let mut text = String::new();
        for outcome in &outcomes {
            match &outcome.result {
                Ok(done) => {
                    self.warn(&done.resolved.warnings);
                    json.push(serde_json::json!({
                        "profile": outcome.profile_uri,
                        "resolution": done.persisted_uri,
                        "initial": done.initial,
                        "changes": done.changes.entries,
                    }));
                    let state = if done.initial {
                        "initial".to_owned()
                    } else {
                        format!("{} changes", done.changes.len())
                    };
                    text.push_str(&format!(
                        "{} -> {} ({state})\n",
                        outcome.profile_uri, done.persisted_uri
                    ));
                    let report = done.changes.to_text();
                    // The last line is the change count, already in the header.
                    let body = report.lines().count().saturating_sub(1);
                    for line in report.lines().take(body) {
                        text.push_str("  ");
                        text.push_str(line);
                        text.push('\n');
                    }
                }
                Err(e) => {
                    let failure = Failure::resolve(&outcome.profile_uri, e);
                    let _ = writeln!(self.stderr, "error: {}", failure.message);
                    worst = worst.max(failure.status);
                    json.push(serde_json::json!({
                        "profile": outcome.profile_uri,
                        "error": failure.message,
                    }));
                    text.push_str(&format!("{} failed\n", outcome.profile_uri));
                }
            }
        }
        let out = match format {
            ReportFormat::Text if outcomes.is_empty() => "no dependent profiles\n".to_owned(),
            ReportFormat::Text => text,
            ReportFormat::Json => {
                let value = serde_json::json!({"changed": changed, "outcomes": json});
                format!("{}\n", serde_json::to_string_pretty(&value).expect("report serializes"))
            }
        };
        self.emit(None, &out)?;
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("guidance").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_and_help() {
        assert_eq!(call(&[]).0, 4);
        assert_eq!(call(&["frobnicate"]).0, 4);
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("resolve"));
    }

    #[test]
    fn missing_file_is_io() {
        let (code, _, err) = call(&["validate", "/nonexistent/x.yaml"]);
        assert_eq!(code, 3);
        assert!(err.contains("/nonexistent/x.yaml"), "{err}");
        assert_eq!(err.lines().count(), 1);
    }

    #[test]
    fn statuses_are_ordered() {
        assert!(ExitStatus::Io > ExitStatus::Resolution);
        assert_eq!(ExitStatus::Usage.code(), 4);
    }
}
