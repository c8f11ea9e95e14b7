//! Parsing and canonical emission of catalog and profile documents.
//!
//! Both YAML and JSON map onto the same schema: a single top-level
//! `catalog:` or `profile:` key whose body uses the hyphenated key names
//! (`control-id`, `by-name`, ...). Unknown keys are rejected.
//!
//! [`serialize_document`] produces the canonical form, so that
//! `serialize(parse(text)) == text` for any document already in canonical
//! form and output is stable for diffing and version control.

mod decode;
mod encode;
mod node;
mod yaml;

use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::model::{Catalog, DocumentEnvelope, Profile};
use crate::validate::{validate_catalog, validate_profile_document, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Yaml,
    Json,
    /// Sniff: a leading `{` means JSON, anything else YAML.
    Auto,
}

impl Format {
    /// Picks a format from a file extension, falling back to [`Format::Auto`].
    pub fn from_path(path: impl AsRef<Path>) -> Format {
        match path.as_ref().extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("yaml" | "yml") => Format::Yaml,
            _ => Format::Auto,
        }
    }

    fn sniff(text: &str) -> Format {
        match text.trim_start_matches('\u{feff}').trim_start().as_bytes().first() {
            Some(b'{') => Format::Json,
            _ => Format::Yaml,
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Yaml => "yaml",
            Format::Json => "json",
            Format::Auto => "auto",
        })
    }
}

/// A structural mismatch between a document and the schema.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: {message}", if path.is_empty() { "<document>" } else { path.as_str() })]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {0}")]
    Schema(#[from] SchemaError),
    #[error("document is invalid: {}", summarize(.0))]
    Validation(ValidationReport),
}

fn summarize(report: &ValidationReport) -> String {
    let mut errors = report.errors();
    match (errors.next(), report.error_count()) {
        (Some(first), 1) => first.to_string(),
        (Some(first), n) => format!("{first} (and {} more)", n - 1),
        (None, _) => "no errors".to_owned(),
    }
}

fn syntax_from_yaml(err: serde_yaml::Error) -> ParseError {
    let (line, column) = err.location().map(|l| (l.line(), l.column())).unwrap_or((0, 0));
    let message = err.to_string();
    // serde_yaml appends " at line L column C"; the location is reported separately.
    let message = match message.find(" at line ") {
        Some(idx) => message[..idx].to_owned(),
        None => message,
    };
    ParseError::Syntax { line, column, message }
}

fn syntax_from_json(err: serde_json::Error) -> ParseError {
    let message = err.to_string();
    let message = match message.find(" at line ") {
        Some(idx) => message[..idx].to_owned(),
        None => message,
    };
    ParseError::Syntax {
        line: err.line(),
        column: err.column(),
        message,
    }
}

fn to_node(text: &[u8], format: Format) -> Result<node::Node, ParseError> {
    let text = std::str::from_utf8(text).map_err(|e| {
        let before = &text[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        ParseError::Syntax {
            line,
            column,
            message: "invalid UTF-8".to_owned(),
        }
    })?;
    let format = match format {
        Format::Auto => Format::sniff(text),
        f => f,
    };
    match format {
        Format::Json => serde_json::from_str(text).map_err(syntax_from_json),
        _ => serde_yaml::from_str(text).map_err(syntax_from_yaml),
    }
}

/// Parses a document and checks it against the schema, without running the
/// model invariants.
pub fn parse_document_unchecked(text: &[u8], format: Format) -> Result<DocumentEnvelope, ParseError> {
    let node = to_node(text, format)?;
    Ok(decode::document(&node)?)
}

/// Parses, schema-checks and validates a document.
pub fn parse_document(text: &[u8], format: Format) -> Result<DocumentEnvelope, ParseError> {
    let doc = parse_document_unchecked(text, format)?;
    let report = validate_document(&doc);
    if report.has_errors() {
        return Err(ParseError::Validation(report));
    }
    Ok(doc)
}

pub fn validate_document(doc: &DocumentEnvelope) -> ValidationReport {
    match doc {
        DocumentEnvelope::Catalog(c) => validate_catalog(c),
        DocumentEnvelope::Profile(p) => validate_profile_document(p),
    }
}

/// Emits the canonical form of `doc`. [`Format::Auto`] is treated as YAML.
pub fn serialize_document(doc: &DocumentEnvelope, format: Format) -> String {
    let node = encode::document(doc);
    match format {
        Format::Json => {
            let mut out = serde_json::to_string_pretty(&node).expect("node always serializes");
            out.push('\n');
            out
        }
        Format::Yaml | Format::Auto => yaml::emit(&node),
    }
}

pub fn serialize_catalog(catalog: &Catalog, format: Format) -> String {
    serialize_document(&DocumentEnvelope::Catalog(catalog.clone()), format)
}

pub fn serialize_profile(profile: &Profile, format: Format) -> String {
    serialize_document(&DocumentEnvelope::Profile(profile.clone()), format)
}
