//! Recursive resolution over a store: profiles importing profiles.

use std::collections::HashMap;
use std::sync::Arc;

use super::{resolve, ResolveError, ResolveOptions, ResolvedCatalog, SourceStore};
use crate::model::DocumentEnvelope;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Visiting,
    Done,
}

/// Import sources of a document, normalized, in directive order.
pub(crate) fn import_sources(doc: &DocumentEnvelope) -> Result<Vec<String>, ResolveError> {
    match doc {
        DocumentEnvelope::Catalog(_) => Ok(Vec::new()),
        DocumentEnvelope::Profile(p) => p
            .imports
            .iter()
            .map(|i| SourceStore::normalize(&i.source).map_err(ResolveError::from))
            .collect(),
    }
}

/// Topological order of the import closure of `root_uri`, sources first.
///
/// Fails with [`ResolveError::CycleDetected`] carrying one witnessing cycle,
/// e.g. `[a.yaml, b.yaml, a.yaml]`.
pub fn detect_cycles(store: &SourceStore, root_uri: &str) -> Result<Vec<String>, ResolveError> {
    let root = SourceStore::normalize(root_uri)?;
    let mut marks: HashMap<String, Mark> = HashMap::new();
    let mut order = Vec::new();
    // (uri, its sources, next source index)
    let mut stack: Vec<(String, Vec<String>, usize)> = Vec::new();

    let doc = store.load(&root)?;
    stack.push((root.clone(), import_sources(&doc)?, 0));
    marks.insert(root, Mark::Visiting);

    while let Some((uri, sources, next)) = stack.last_mut() {
        let Some(source) = sources.get(*next).cloned() else {
            marks.insert(uri.clone(), Mark::Done);
            order.push(uri.clone());
            stack.pop();
            continue;
        };
        *next += 1;
        match marks.get(&source) {
            Some(Mark::Done) => {}
            Some(Mark::Visiting) => {
                let start = stack
                    .iter()
                    .position(|(u, _, _)| *u == source)
                    .expect("visiting node is on the stack");
                let mut path: Vec<String> = stack[start..].iter().map(|(u, _, _)| u.clone()).collect();
                path.push(source);
                return Err(ResolveError::CycleDetected { path });
            }
            None => {
                let doc = store.load(&source)?;
                let next_sources = import_sources(&doc)?;
                marks.insert(source.clone(), Mark::Visiting);
                stack.push((source, next_sources, 0));
            }
        }
    }
    Ok(order)
}

/// Memoizing resolver over a store. Each uri resolves at most once per
/// resolver, so shared upstream layers are computed once.
pub struct ChainResolver<'s> {
    store: &'s SourceStore,
    options: ResolveOptions,
    memo: HashMap<String, Result<Arc<ResolvedCatalog>, ResolveError>>,
}

impl<'s> ChainResolver<'s> {
    pub fn new(store: &'s SourceStore, options: ResolveOptions) -> Self {
        Self {
            store,
            options,
            memo: HashMap::new(),
        }
    }

    pub fn store(&self) -> &'s SourceStore {
        self.store
    }

    /// Resolves `uri`: catalogs load as-is, profiles resolve against their
    /// (recursively resolved) imports.
    pub fn resolve(&mut self, uri: &str) -> Result<Arc<ResolvedCatalog>, ResolveError> {
        let uri = SourceStore::normalize(uri)?;
        if let Some(done) = self.memo.get(&uri) {
            return done.clone();
        }
        let order = detect_cycles(self.store, &uri)?;
        for node in order {
            if self.memo.contains_key(&node) {
                continue;
            }
            let result = self.resolve_one(&node);
            self.memo.insert(node, result);
        }
        self.memo[&uri].clone()
    }

    fn resolve_one(&self, uri: &str) -> Result<Arc<ResolvedCatalog>, ResolveError> {
        let doc = self.store.load(uri)?;
        match doc.as_ref() {
            DocumentEnvelope::Catalog(catalog) => Ok(Arc::new(ResolvedCatalog::from_source(catalog.clone()))),
            DocumentEnvelope::Profile(profile) => {
                let mut sources = Vec::with_capacity(profile.imports.len());
                for source in import_sources(&doc)? {
                    let resolved = self
                        .memo
                        .get(&source)
                        .expect("sources resolve before importers")
                        .clone()?;
                    sources.push(resolved.as_ref().clone());
                }
                resolve(&sources, profile, &self.options).map(Arc::new)
            }
        }
    }
}

/// Resolves the profile at `profile_uri` and everything it imports.
pub fn resolve_chain(store: &SourceStore, profile_uri: &str) -> Result<ResolvedCatalog, ResolveError> {
    resolve_chain_with(store, profile_uri, &ResolveOptions::default())
}

pub fn resolve_chain_with(
    store: &SourceStore,
    profile_uri: &str,
    options: &ResolveOptions,
) -> Result<ResolvedCatalog, ResolveError> {
    ChainResolver::new(store, *options)
        .resolve(profile_uri)
        .map(|r| r.as_ref().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &std::path::Path, name: &str, text: &str) {
        std::fs::write(dir.join(name), text).unwrap();
    }

    fn profile(imports: &[&str]) -> String {
        let mut s = "profile:\n  metadata:\n    title: p\n    version: \"1\"\n  imports:\n".to_owned();
        for i in imports {
            s.push_str(&format!("    - source: {i}\n"));
        }
        s
    }

    const CATALOG: &str = "catalog:\n  metadata:\n    title: c\n    version: \"1\"\n  controls:\n    - id: x\n      parts:\n        - name: statement\n          prose: hi\n";

    #[test]
    fn cycle_path_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.yaml", &profile(&["b.yaml"]));
        write(dir.path(), "b.yaml", &profile(&["a.yaml"]));
        let store = SourceStore::new(dir.path());
        let err = detect_cycles(&store, "a.yaml").unwrap_err();
        assert_eq!(
            err,
            ResolveError::CycleDetected {
                path: vec!["a.yaml".into(), "b.yaml".into(), "a.yaml".into()]
            }
        );
        assert_eq!(err.to_string(), "import cycle detected: a.yaml -> b.yaml -> a.yaml");
        assert!(matches!(
            resolve_chain(&store, "b.yaml"),
            Err(ResolveError::CycleDetected { .. })
        ));
    }

    #[test]
    fn self_import_is_a_cycle() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "a.yaml", &profile(&["a.yaml"]));
        let store = SourceStore::new(dir.path());
        assert_eq!(
            detect_cycles(&store, "a.yaml").unwrap_err(),
            ResolveError::CycleDetected {
                path: vec!["a.yaml".into(), "a.yaml".into()]
            }
        );
    }

    #[test]
    fn diamond_orders_sources_first() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.yaml", CATALOG);
        write(dir.path(), "l.yaml", &profile(&["c.yaml"]));
        write(dir.path(), "r.yaml", &profile(&["c.yaml"]));
        write(dir.path(), "top.yaml", &profile(&["l.yaml", "r.yaml"]));
        let store = SourceStore::new(dir.path());
        assert_eq!(
            detect_cycles(&store, "top.yaml").unwrap(),
            ["c.yaml", "l.yaml", "r.yaml", "top.yaml"]
        );
        assert_eq!(detect_cycles(&store, "c.yaml").unwrap(), ["c.yaml"]);
        // Both branches supply control x.
        assert!(matches!(
            resolve_chain(&store, "top.yaml"),
            Err(ResolveError::DuplicateControlId { .. })
        ));
    }

    #[test]
    fn missing_import_is_not_found() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "p.yaml", &profile(&["nope.yaml"]));
        let store = SourceStore::new(dir.path());
        assert!(matches!(
            resolve_chain(&store, "p.yaml"),
            Err(ResolveError::Store(super::super::StoreError::NotFound { .. }))
        ));
    }

    #[test]
    fn chain_lineage_and_depth() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "c.yaml", CATALOG);
        write(dir.path(), "p1.yaml", &profile(&["c.yaml"]));
        write(dir.path(), "p2.yaml", &profile(&["./p1.yaml"]));
        let store = SourceStore::new(dir.path());
        let out = resolve_chain(&store, "p2.yaml").unwrap();
        assert_eq!(out.lineage, ["c.yaml", "p1.yaml", "p2.yaml"]);
        assert_eq!(out.depth, 2);
        assert_eq!(out.provenance_of("x", "statement").unwrap().origin_uri, "c.yaml");
    }
}
