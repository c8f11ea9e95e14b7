//! Profile resolution.
//!
//! [`resolve`] maps source catalogs plus a profile to a new catalog: imports
//! select controls, then each alteration rewrites its target control
//! (removes first, then adds appended at the end). [`resolve_chain`] applies
//! this recursively over a [`SourceStore`], so a profile may import the
//! output of another profile and layers compose.
//!
//! Every part of a [`ResolvedCatalog`] carries a [`ProvenanceEntry`] naming
//! the document that contributed it and the layer depth at which it entered.

mod chain;
mod store;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use chain::{detect_cycles, resolve_chain, resolve_chain_with, ChainResolver};
pub use store::{SourceStore, StoreError, RESOLVED_DIR};

use crate::model::{find_control_mut, Alteration, Catalog, Control, Include, Profile, RemoveDirective, STATEMENT};
use crate::validate::{validate_profile_document, Finding, Severity, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ResolveOptions {
    /// Downgrade removals that match nothing from errors to warnings.
    pub lenient: bool,
}

impl ResolveOptions {
    pub fn lenient() -> Self {
        Self { lenient: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("unknown control id {control_id:?} ({context})")]
    UnknownControlId { control_id: String, context: String },
    #[error("duplicate control id {control_id:?} supplied by {first} and {second}")]
    DuplicateControlId {
        control_id: String,
        first: String,
        second: String,
    },
    #[error("removal matched nothing: control {control_id}, selector {selector}")]
    RemovalMatchedNothing {
        control_id: String,
        selector: RemoveDirective,
    },
    #[error("duplicate part name {name:?} in control {control_id}")]
    DuplicatePartName { control_id: String, name: String },
    #[error("statement part added to control {control_id} would not be first")]
    MisplacedStatement { control_id: String },
    #[error("alteration for {alteration} applied to control {control_id}")]
    AlterationMismatch { control_id: String, alteration: String },
    #[error("no source supplied for import {source_uri:?}")]
    MissingSource { source_uri: String },
    #[error("profile {uri} is invalid: {}", first_error(.report))]
    InvalidProfile { uri: String, report: ValidationReport },
    #[error("import cycle detected: {}", .path.join(" -> "))]
    CycleDetected { path: Vec<String> },
    #[error(transparent)]
    Store(#[from] StoreError),
}

fn first_error(report: &ValidationReport) -> String {
    report.errors().next().map(ToString::to_string).unwrap_or_default()
}

/// Where a part of a resolved catalog came from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProvenanceEntry {
    pub origin_uri: String,
    /// 0 for parts from a source catalog; k for parts added by the k-th
    /// profile layer.
    pub layer_depth: usize,
}

/// Key of a provenance entry: (control id, part name).
pub type PartKey = (String, String);

/// The output of resolution, with per-part provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedCatalog {
    pub catalog: Catalog,
    pub provenance: BTreeMap<PartKey, ProvenanceEntry>,
    /// Source catalogs first, then each profile applied; outermost last.
    pub lineage: Vec<String>,
    /// Number of profile layers applied on top of the source catalogs.
    pub depth: usize,
    /// Non-blocking findings raised while resolving this and upstream layers.
    pub warnings: Vec<Finding>,
}

impl ResolvedCatalog {
    /// Wraps a source catalog: every part originates at depth 0.
    pub fn from_source(catalog: Catalog) -> Self {
        let mut provenance = BTreeMap::new();
        for control in catalog.walk() {
            for part in &control.parts {
                provenance.insert(
                    (control.id.clone(), part.name.clone()),
                    ProvenanceEntry {
                        origin_uri: catalog.uri.clone(),
                        layer_depth: 0,
                    },
                );
            }
        }
        let lineage = vec![catalog.uri.clone()];
        Self {
            catalog,
            provenance,
            lineage,
            depth: 0,
            warnings: Vec::new(),
        }
    }

    pub fn provenance_of(&self, control_id: &str, part_name: &str) -> Option<&ProvenanceEntry> {
        self.provenance.get(&(control_id.to_owned(), part_name.to_owned()))
    }
}

impl From<Catalog> for ResolvedCatalog {
    fn from(catalog: Catalog) -> Self {
        ResolvedCatalog::from_source(catalog)
    }
}

/// Applies one alteration to a control with strict removal semantics.
pub fn apply_alteration(control: &Control, alteration: &Alteration) -> Result<Control, ResolveError> {
    apply_alteration_with(control, alteration, &ResolveOptions::default()).map(|(c, _)| c)
}

/// Applies one alteration, returning the new control and any warnings.
pub fn apply_alteration_with(
    control: &Control,
    alteration: &Alteration,
    options: &ResolveOptions,
) -> Result<(Control, Vec<Finding>), ResolveError> {
    if alteration.control_id != control.id {
        return Err(ResolveError::AlterationMismatch {
            control_id: control.id.clone(),
            alteration: alteration.control_id.clone(),
        });
    }
    let mut out = control.clone();
    let mut issues = Vec::new();
    alter(&mut out, alteration, options, "", &mut issues);
    split_issues(issues).map(|warnings| (out, warnings))
}

/// One problem found during a resolution session.
struct Issue {
    severity: Severity,
    path: String,
    error: ResolveError,
}

impl Issue {
    fn finding(&self) -> Finding {
        Finding {
            severity: self.severity,
            path: self.path.clone(),
            message: self.error.to_string(),
        }
    }
}

fn split_issues(issues: Vec<Issue>) -> Result<Vec<Finding>, ResolveError> {
    let mut warnings = Vec::new();
    for issue in issues {
        match issue.severity {
            Severity::Error => return Err(issue.error),
            Severity::Warning => warnings.push(issue.finding()),
        }
    }
    Ok(warnings)
}

/// Result of applying an alteration in place: which parts were dropped and
/// which were appended.
#[derive(Default)]
struct AlterEffect {
    removed: Vec<String>,
    added: Vec<String>,
}

/// Applies `alteration` to `control` in place. Each failing directive is
/// recorded as an issue and skipped so checking can continue.
fn alter(
    control: &mut Control,
    alteration: &Alteration,
    options: &ResolveOptions,
    path: &str,
    issues: &mut Vec<Issue>,
) -> AlterEffect {
    let mut effect = AlterEffect::default();
    for (i, selector) in alteration.removes.iter().enumerate() {
        let before = control.parts.len();
        control.parts.retain(|part| {
            let hit = selector.matches(part);
            if hit {
                effect.removed.push(part.name.clone());
            }
            !hit
        });
        if control.parts.len() == before {
            issues.push(Issue {
                severity: if options.lenient {
                    Severity::Warning
                } else {
                    Severity::Error
                },
                path: format!("{path}removes/{i}"),
                error: ResolveError::RemovalMatchedNothing {
                    control_id: control.id.clone(),
                    selector: selector.clone(),
                },
            });
        }
    }
    for (i, add) in alteration.adds.iter().enumerate() {
        for (j, part) in add.parts.iter().enumerate() {
            let part_path = format!("{path}adds/{i}/parts/{j}");
            if control.part(&part.name).is_some() {
                issues.push(Issue {
                    severity: Severity::Error,
                    path: part_path,
                    error: ResolveError::DuplicatePartName {
                        control_id: control.id.clone(),
                        name: part.name.clone(),
                    },
                });
                continue;
            }
            if part.name == STATEMENT && !control.parts.is_empty() {
                issues.push(Issue {
                    severity: Severity::Error,
                    path: part_path,
                    error: ResolveError::MisplacedStatement {
                        control_id: control.id.clone(),
                    },
                });
                continue;
            }
            control.parts.push(part.clone());
            effect.added.push(part.name.clone());
        }
    }
    effect
}

/// Locates the source for import `index`: by uri first, then by position.
fn pick_source<'a>(
    sources: &'a [ResolvedCatalog],
    source_uri: &str,
    index: usize,
    import_count: usize,
) -> Option<&'a ResolvedCatalog> {
    sources
        .iter()
        .find(|s| s.catalog.uri == source_uri)
        .or_else(|| (sources.len() == import_count).then(|| sources.get(index)).flatten())
}

/// Filters a control forest down to `selected` ids. Unselected controls
/// disappear but their selected descendants move up into their place.
fn filter_controls(controls: &[Control], selected: &HashSet<&str>) -> Vec<Control> {
    let mut out = Vec::new();
    for control in controls {
        let children = filter_controls(&control.children, selected);
        if selected.contains(control.id.as_str()) {
            out.push(Control {
                id: control.id.clone(),
                class: control.class.clone(),
                parts: control.parts.clone(),
                children,
            });
        } else {
            out.extend(children);
        }
    }
    out
}

fn collect_selected<'a>(
    controls: &'a [Control],
    include: &Include,
    exclude: &HashSet<&str>,
    ancestor_included: bool,
    out: &mut HashSet<&'a str>,
) {
    for control in controls {
        let included = ancestor_included
            || match include {
                Include::All => true,
                Include::Ids(ids) => ids.contains(&control.id),
            };
        if included && !exclude.contains(control.id.as_str()) {
            out.insert(&control.id);
        }
        collect_selected(&control.children, include, exclude, included, out);
    }
}

/// Shared engine behind [`resolve`] and [`crate::validate::validate_profile`].
/// Runs to completion, recording every issue.
fn run(
    sources: &[ResolvedCatalog],
    profile: &Profile,
    options: &ResolveOptions,
    issues: &mut Vec<Issue>,
) -> ResolvedCatalog {
    let intrinsic = validate_profile_document(profile);
    if intrinsic.has_errors() {
        issues.push(Issue {
            severity: Severity::Error,
            path: String::new(),
            error: ResolveError::InvalidProfile {
                uri: profile.uri.clone(),
                report: intrinsic.clone(),
            },
        });
    }

    let mut controls: Vec<Control> = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut lineage: Vec<String> = Vec::new();
    let mut warnings = Vec::new();
    let mut depth = 0;
    // control id -> uri of the import that supplied it
    let mut supplied_by: HashMap<String, String> = HashMap::new();

    for (i, import) in profile.imports.iter().enumerate() {
        let path = format!("imports/{i}");
        let Some(source) = pick_source(sources, &import.source, i, profile.imports.len()) else {
            issues.push(Issue {
                severity: Severity::Error,
                path: format!("{path}/source"),
                error: ResolveError::MissingSource {
                    source_uri: import.source.clone(),
                },
            });
            continue;
        };
        depth = depth.max(source.depth);
        for uri in &source.lineage {
            if !lineage.contains(uri) {
                lineage.push(uri.clone());
            }
        }
        for warning in &source.warnings {
            if !warnings.contains(warning) {
                warnings.push(warning.clone());
            }
        }

        let known: HashSet<&str> = source.catalog.walk().map(|c| c.id.as_str()).collect();
        if let Include::Ids(ids) = &import.include {
            for (j, id) in ids.iter().enumerate() {
                if !known.contains(id.as_str()) {
                    issues.push(Issue {
                        severity: Severity::Error,
                        path: format!("{path}/include/{j}"),
                        error: ResolveError::UnknownControlId {
                            control_id: id.clone(),
                            context: format!("not in {}", import.source),
                        },
                    });
                }
            }
        }
        for (j, id) in import.exclude.iter().enumerate() {
            if !known.contains(id.as_str()) {
                issues.push(Issue {
                    severity: Severity::Warning,
                    path: format!("{path}/exclude/{j}"),
                    error: ResolveError::UnknownControlId {
                        control_id: id.clone(),
                        context: format!("excluded but not in {}", import.source),
                    },
                });
            }
        }

        let exclude: HashSet<&str> = import.exclude.iter().map(String::as_str).collect();
        let mut selected = HashSet::new();
        collect_selected(
            &source.catalog.controls,
            &import.include,
            &exclude,
            false,
            &mut selected,
        );
        let picked = filter_controls(&source.catalog.controls, &selected);

        let mut fresh = Vec::new();
        for control in picked.iter().flat_map(Control::walk) {
            if let Some(first) = supplied_by.get(&control.id) {
                issues.push(Issue {
                    severity: Severity::Error,
                    path: path.clone(),
                    error: ResolveError::DuplicateControlId {
                        control_id: control.id.clone(),
                        first: first.clone(),
                        second: import.source.clone(),
                    },
                });
            } else {
                fresh.push(control.id.clone());
            }
            for part in &control.parts {
                let key = (control.id.clone(), part.name.clone());
                let entry = source.provenance.get(&key).cloned().unwrap_or(ProvenanceEntry {
                    origin_uri: source.catalog.uri.clone(),
                    layer_depth: 0,
                });
                provenance.entry(key).or_insert(entry);
            }
        }
        for id in fresh {
            supplied_by.insert(id, import.source.clone());
        }
        controls.extend(picked);
    }

    let layer = depth + 1;
    for alteration in &profile.alterations {
        let path = format!("alterations/{}/", alteration.control_id);
        let Some(control) = find_control_mut(&mut controls, &alteration.control_id) else {
            issues.push(Issue {
                severity: Severity::Error,
                path: path.trim_end_matches('/').to_owned(),
                error: ResolveError::UnknownControlId {
                    control_id: alteration.control_id.clone(),
                    context: "alteration target is not among the imported controls".to_owned(),
                },
            });
            continue;
        };
        let effect = alter(control, alteration, options, &path, issues);
        for name in effect.removed {
            provenance.remove(&(control.id.clone(), name));
        }
        for name in effect.added {
            provenance.insert(
                (control.id.clone(), name),
                ProvenanceEntry {
                    origin_uri: profile.uri.clone(),
                    layer_depth: layer,
                },
            );
        }
    }

    for issue in issues.iter().filter(|i| i.severity == Severity::Warning) {
        let mut finding = issue.finding();
        finding.path = format!("{}{}", uri_prefix(&profile.uri), finding.path);
        warnings.push(finding);
    }

    lineage.push(profile.uri.clone());
    let mut catalog = Catalog::new(profile.metadata.clone(), controls);
    catalog.uri = profile.uri.clone();
    ResolvedCatalog {
        catalog,
        provenance,
        lineage,
        depth: layer,
        warnings,
    }
}

fn uri_prefix(uri: &str) -> String {
    if uri.is_empty() {
        String::new()
    } else {
        format!("{uri}#")
    }
}

/// Resolves `profile` against its sources.
///
/// Each import is matched to a source by uri, or by position when no
/// source carries that uri and the counts agree. Plain catalogs convert
/// into sources with [`ResolvedCatalog::from_source`].
pub fn resolve(
    sources: &[ResolvedCatalog],
    profile: &Profile,
    options: &ResolveOptions,
) -> Result<ResolvedCatalog, ResolveError> {
    let mut issues = Vec::new();
    let resolved = run(sources, profile, options, &mut issues);
    if let Some(idx) = issues.iter().position(|i| i.severity == Severity::Error) {
        return Err(issues.swap_remove(idx).error);
    }
    Ok(resolved)
}

/// Convenience wrapper over [`resolve`] for plain source catalogs.
pub fn resolve_catalogs(sources: &[Catalog], profile: &Profile) -> Result<ResolvedCatalog, ResolveError> {
    let sources: Vec<_> = sources.iter().cloned().map(ResolvedCatalog::from_source).collect();
    resolve(&sources, profile, &ResolveOptions::default())
}

pub(crate) fn check(sources: &[ResolvedCatalog], profile: &Profile, options: &ResolveOptions) -> ValidationReport {
    let mut issues = Vec::new();
    run(sources, profile, options, &mut issues);
    let mut report = ValidationReport::default();
    for issue in issues {
        match issue.error {
            // Expand into the individual intrinsic findings.
            ResolveError::InvalidProfile { report: inner, .. } => report.extend(inner),
            _ => report.push(issue.finding()),
        }
    }
    report
}

impl fmt::Display for ProvenanceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (layer {})", self.origin_uri, self.layer_depth)
    }
}
