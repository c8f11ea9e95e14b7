//! Re-resolution of downstream profiles after an upstream edit.
//!
//! Each profile's last resolution is persisted in canonical YAML under
//! `<store>/resolved/<profile-stem>.yaml`. [`propagate`] re-resolves every
//! profile that transitively depends on the changed document, diffs each
//! fresh result against its persisted predecessor and writes the new one.

use std::io::Write as _;
use std::path::PathBuf;

use crate::diff::{diff, ChangeSet};
use crate::graph::build_graph;
use crate::model::{Catalog, DocumentKind};
use crate::resolver::{ChainResolver, ResolveError, ResolveOptions, ResolvedCatalog, SourceStore, StoreError};
use crate::serialization::{parse_document, serialize_catalog, Format};
use crate::validate::Finding;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Propagated {
    pub resolved: ResolvedCatalog,
    /// Against the previously persisted resolution; empty when `initial`.
    pub changes: ChangeSet,
    /// No prior resolution existed (or it could not be read).
    pub initial: bool,
    /// Store-relative uri the fresh resolution was written to.
    pub persisted_uri: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationOutcome {
    pub profile_uri: String,
    pub result: Result<Propagated, ResolveError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropagateOptions {
    pub resolve: ResolveOptions,
    /// Write fresh resolutions back to `resolved/`.
    pub persist: bool,
}

impl Default for PropagateOptions {
    fn default() -> Self {
        Self {
            resolve: ResolveOptions::default(),
            persist: true,
        }
    }
}

/// Re-resolves the changed document (when it is a profile) and every
/// profile that transitively imports it, in topological order.
///
/// A failing profile is reported in its outcome; profiles that do not
/// depend on it are still processed.
pub fn propagate(store: &SourceStore, changed_uri: &str) -> Result<Vec<PropagationOutcome>, ResolveError> {
    propagate_with(store, changed_uri, &PropagateOptions::default())
}

pub fn propagate_with(
    store: &SourceStore,
    changed_uri: &str,
    options: &PropagateOptions,
) -> Result<Vec<PropagationOutcome>, ResolveError> {
    let changed = SourceStore::normalize(changed_uri)?;
    store.load(&changed)?;
    let graph = build_graph(store)?;
    let order = graph.topological_order()?;
    let mut affected = graph.dependents(&changed);
    affected.insert(changed);

    let mut resolver = ChainResolver::new(store, options.resolve);
    let mut outcomes = Vec::new();
    for uri in order.into_iter().filter(|u| affected.contains(u)) {
        if store.load(&uri)?.kind() != DocumentKind::Profile {
            continue;
        }
        let result = resolver
            .resolve(&uri)
            .and_then(|fresh| refresh(store, &uri, fresh.as_ref().clone(), options.persist));
        outcomes.push(PropagationOutcome {
            profile_uri: uri,
            result,
        });
    }
    Ok(outcomes)
}

fn refresh(
    store: &SourceStore,
    profile_uri: &str,
    mut resolved: ResolvedCatalog,
    persist: bool,
) -> Result<Propagated, ResolveError> {
    let persisted_uri = SourceStore::resolved_uri(profile_uri);
    let (changes, initial) = match load_persisted(store, profile_uri) {
        Ok(Some(previous)) => (diff(&previous, &resolved.catalog), false),
        Ok(None) => (ChangeSet::default(), true),
        Err(e) => {
            resolved.warnings.push(Finding::warning(
                persisted_uri.clone(),
                format!("previous resolution unreadable, treating as initial: {e}"),
            ));
            (ChangeSet::default(), true)
        }
    };
    if persist {
        persist_resolution(store, profile_uri, &resolved.catalog)?;
    }
    Ok(Propagated {
        resolved,
        changes,
        initial,
        persisted_uri,
    })
}

/// The persisted resolution of `profile_uri`, if one exists.
pub fn load_persisted(store: &SourceStore, profile_uri: &str) -> Result<Option<Catalog>, StoreError> {
    let uri = SourceStore::resolved_uri(profile_uri);
    let path = store.path_of(&uri)?;
    let bytes = match std::fs::read(&path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => {
            return Err(StoreError::Io {
                uri,
                message: e.to_string(),
            })
        }
    };
    let doc = parse_document(&bytes, Format::Yaml).map_err(|error| StoreError::Parse {
        uri: uri.clone(),
        error,
    })?;
    let kind = doc.kind();
    let mut catalog = doc
        .into_catalog()
        .ok_or_else(|| StoreError::wrong_kind(&uri, DocumentKind::Catalog, kind))?;
    catalog.uri = uri;
    Ok(Some(catalog))
}

/// Writes `catalog` as the persisted resolution of `profile_uri`, replacing
/// any previous file atomically.
pub fn persist_resolution(store: &SourceStore, profile_uri: &str, catalog: &Catalog) -> Result<PathBuf, StoreError> {
    let uri = SourceStore::resolved_uri(profile_uri);
    let path = store.path_of(&uri)?;
    let io_err = |e: std::io::Error| StoreError::Io {
        uri: uri.clone(),
        message: e.to_string(),
    };
    let dir = path.parent().expect("resolved uri has a directory");
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(serialize_catalog(catalog, Format::Yaml).as_bytes())
        .map_err(io_err)?;
    tmp.persist(&path).map_err(|e| io_err(e.error))?;
    Ok(path)
}
