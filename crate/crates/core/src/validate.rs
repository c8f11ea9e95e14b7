//! Invariant checks over catalogs and profiles.
//!
//! Findings are data: every check runs to completion and reports each
//! violation with a slash-separated path into the document, e.g.
//! `controls/id.am/children/id.am-3/parts/1`. Controls are addressed by id,
//! parts and list items by index.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::model::{is_identifier, Catalog, Control, Include, Metadata, Part, Profile, STATEMENT};
use crate::resolver::{self, ResolveOptions, ResolvedCatalog};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Finding {
    pub fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}: {}", self.severity, self.message)
        } else {
            write!(f, "{}: {}: {}", self.severity, self.path, self.message)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn error_count(&self) -> usize {
        self.errors().count()
    }

    pub fn warning_count(&self) -> usize {
        self.warnings().count()
    }

    pub(crate) fn push(&mut self, finding: Finding) {
        self.findings.push(finding);
    }

    pub(crate) fn extend(&mut self, other: ValidationReport) {
        self.findings.extend(other.findings);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        write!(f, "{} errors, {} warnings", self.error_count(), self.warning_count())
    }
}

fn join(base: &str, segment: impl fmt::Display) -> String {
    if base.is_empty() {
        segment.to_string()
    } else {
        format!("{base}/{segment}")
    }
}

fn check_metadata(metadata: &Metadata, report: &mut ValidationReport) {
    if metadata.title.trim().is_empty() {
        report.push(Finding::error("metadata/title", "title is empty"));
    }
    if metadata.version.trim().is_empty() {
        report.push(Finding::error("metadata/version", "version is empty"));
    }
}

fn check_class(class: Option<&str>, path: &str, report: &mut ValidationReport) {
    if let Some(class) = class {
        if !is_identifier(class) {
            report.push(Finding::error(join(path, "class"), format!("invalid class {class:?}")));
        }
    }
}

fn check_part(part: &Part, path: &str, report: &mut ValidationReport) {
    if !is_identifier(&part.name) {
        report.push(Finding::error(
            join(path, "name"),
            format!("invalid part name {:?}", part.name),
        ));
    }
    check_class(part.class.as_deref(), path, report);
    if part.prose.trim().is_empty() {
        report.push(Finding::error(join(path, "prose"), "prose is empty"));
    }
}

/// Checks name uniqueness and statement placement over an ordered part list.
fn check_part_list(parts: &[Part], path: &str, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for (i, part) in parts.iter().enumerate() {
        let part_path = join(path, format_args!("parts/{i}"));
        check_part(part, &part_path, report);
        if !seen.insert(part.name.as_str()) {
            report.push(Finding::error(
                part_path.clone(),
                format!("duplicate part name {:?}", part.name),
            ));
        }
        if part.name == STATEMENT && i != 0 {
            report.push(Finding::error(part_path, "statement must be first"));
        }
    }
}

fn check_control<'a>(
    control: &'a Control,
    path: &str,
    seen: &mut HashMap<&'a str, String>,
    report: &mut ValidationReport,
) {
    let path = join(path, &control.id);
    if !is_identifier(&control.id) {
        report.push(Finding::error(
            path.clone(),
            format!("invalid control id {:?}", control.id),
        ));
    }
    if let Some(first) = seen.get(control.id.as_str()) {
        report.push(Finding::error(
            path.clone(),
            format!("duplicate control id {:?} (first at {first})", control.id),
        ));
    } else {
        seen.insert(&control.id, path.clone());
    }
    check_class(control.class.as_deref(), &path, report);
    check_part_list(&control.parts, &path, report);
    let children_path = join(&path, "children");
    for child in &control.children {
        check_control(child, &children_path, seen, report);
    }
}

/// Checks every catalog, control and part invariant.
pub fn validate_catalog(catalog: &Catalog) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_metadata(&catalog.metadata, &mut report);
    let mut seen = HashMap::new();
    for control in &catalog.controls {
        check_control(control, "controls", &mut seen, &mut report);
    }
    report
}

/// Checks one control in isolation (used on alteration output).
pub fn validate_control(control: &Control) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = HashMap::new();
    check_control(control, "", &mut seen, &mut report);
    report
}

fn check_ids(ids: &[String], path: &str, what: &str, report: &mut ValidationReport) {
    for (i, id) in ids.iter().enumerate() {
        if !is_identifier(id) {
            report.push(Finding::error(
                format!("{path}/{i}"),
                format!("invalid {what} control id {id:?}"),
            ));
        }
    }
}

/// Checks the invariants a profile must satisfy independent of its sources.
pub fn validate_profile_document(profile: &Profile) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_metadata(&profile.metadata, &mut report);

    if profile.imports.is_empty() {
        report.push(Finding::error("imports", "profile imports nothing"));
    }
    for (i, import) in profile.imports.iter().enumerate() {
        let path = format!("imports/{i}");
        if import.source.trim().is_empty() {
            report.push(Finding::error(format!("{path}/source"), "source is empty"));
        }
        check_ids(&import.exclude, &format!("{path}/exclude"), "excluded", &mut report);
        if let Include::Ids(ids) = &import.include {
            if ids.is_empty() {
                report.push(Finding::error(
                    format!("{path}/include"),
                    "include list is empty; use \"all\" or name controls",
                ));
            }
            check_ids(ids, &format!("{path}/include"), "included", &mut report);
            for (j, id) in import.exclude.iter().enumerate() {
                if ids.contains(id) {
                    report.push(Finding::error(
                        format!("{path}/exclude/{j}"),
                        format!("control {id:?} is both included and excluded"),
                    ));
                }
            }
        }
    }

    let mut targets = HashSet::new();
    for alteration in &profile.alterations {
        let path = format!("alterations/{}", alteration.control_id);
        if !is_identifier(&alteration.control_id) {
            report.push(Finding::error(
                format!("{path}/control-id"),
                format!("invalid control id {:?}", alteration.control_id),
            ));
        }
        if !targets.insert(alteration.control_id.as_str()) {
            report.push(Finding::error(
                path.clone(),
                format!("more than one alteration targets {:?}", alteration.control_id),
            ));
        }
        if alteration.removes.is_empty() && alteration.adds.is_empty() {
            report.push(Finding::error(path.clone(), "alteration has neither removes nor adds"));
        }
        for (j, remove) in alteration.removes.iter().enumerate() {
            let value = remove.value();
            if !is_identifier(value) {
                report.push(Finding::error(
                    format!("{path}/removes/{j}/{}", remove.key()),
                    format!("invalid selector {value:?}"),
                ));
            }
        }
        let mut added = HashSet::new();
        for (j, add) in alteration.adds.iter().enumerate() {
            let add_path = format!("{path}/adds/{j}");
            if add.parts.is_empty() {
                report.push(Finding::error(add_path.clone(), "add directive has no parts"));
            }
            for (k, part) in add.parts.iter().enumerate() {
                let part_path = format!("{add_path}/parts/{k}");
                check_part(part, &part_path, &mut report);
                if !added.insert(part.name.as_str()) {
                    report.push(Finding::error(
                        part_path,
                        format!("part {:?} is added more than once", part.name),
                    ));
                }
            }
        }
    }
    report
}

/// Checks that `profile` will resolve against `resolved_sources`.
///
/// Runs the same selection and alteration logic as
/// [`resolver::resolve`] but collects every finding instead of stopping at
/// the first error. No error findings means resolution succeeds.
pub fn validate_profile(profile: &Profile, resolved_sources: &[Catalog]) -> ValidationReport {
    validate_profile_with(profile, resolved_sources, &ResolveOptions::default())
}

pub fn validate_profile_with(
    profile: &Profile,
    resolved_sources: &[Catalog],
    options: &ResolveOptions,
) -> ValidationReport {
    let sources: Vec<ResolvedCatalog> = resolved_sources
        .iter()
        .cloned()
        .map(ResolvedCatalog::from_source)
        .collect();
    resolver::check(&sources, profile, options)
}
