//! Import graph over every document in a store.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::resolver::{ResolveError, SourceStore, StoreError};
use crate::validate::Finding;

/// Nodes are document uris; an edge `(importer, source)` mirrors one import
/// directive.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct DependencyGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeSet<(String, String)>,
    /// Imports whose source is not in the store.
    pub findings: Vec<Finding>,
}

impl DependencyGraph {
    pub fn sources_of<'a>(&'a self, uri: &'a str) -> impl Iterator<Item = &'a str> {
        self.edges
            .iter()
            .filter(move |(importer, _)| importer == uri)
            .map(|(_, source)| source.as_str())
    }

    pub fn importers_of<'a>(&'a self, uri: &'a str) -> impl Iterator<Item = &'a str> {
        self.edges
            .iter()
            .filter(move |(_, source)| source == uri)
            .map(|(importer, _)| importer.as_str())
    }

    /// Every node that transitively imports `uri` (excluding `uri` itself).
    pub fn dependents(&self, uri: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([uri.to_owned()]);
        while let Some(next) = queue.pop_front() {
            for importer in self.importers_of(&next) {
                if seen.insert(importer.to_owned()) {
                    queue.push_back(importer.to_owned());
                }
            }
        }
        seen.remove(uri);
        seen
    }

    /// Kahn's algorithm with lexicographic tie-breaking: sources before
    /// importers. Fails with one witnessing cycle.
    pub fn topological_order(&self) -> Result<Vec<String>, ResolveError> {
        let mut indegree: BTreeMap<&str, usize> = self.nodes.iter().map(|n| (n.as_str(), 0)).collect();
        for (importer, source) in &self.edges {
            if self.nodes.contains(source) {
                *indegree.get_mut(importer.as_str()).expect("importer is a node") += 1;
            }
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(node) = ready.pop_first() {
            order.push(node.to_owned());
            for importer in self.importers_of(node) {
                let d = indegree.get_mut(importer).expect("importer is a node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(importer);
                }
            }
        }
        if order.len() == self.nodes.len() {
            Ok(order)
        } else {
            Err(ResolveError::CycleDetected {
                path: self.find_cycle(),
            })
        }
    }

    /// Topological layers: every node's sources sit in earlier waves.
    pub fn waves(&self) -> Result<Vec<Vec<String>>, ResolveError> {
        let order = self.topological_order()?;
        let mut level: BTreeMap<&str, usize> = BTreeMap::new();
        let mut waves: Vec<Vec<String>> = Vec::new();
        for node in &order {
            let l = self
                .sources_of(node)
                .filter_map(|s| level.get(s))
                .map(|l| l + 1)
                .max()
                .unwrap_or(0);
            level.insert(node, l);
            if waves.len() <= l {
                waves.resize_with(l + 1, Vec::new);
            }
            waves[l].push(node.clone());
        }
        Ok(waves)
    }

    fn find_cycle(&self) -> Vec<String> {
        // Depth-first search for a back edge.
        fn visit<'a>(
            graph: &'a DependencyGraph,
            node: &'a str,
            stack: &mut Vec<&'a str>,
            done: &mut BTreeSet<&'a str>,
        ) -> Option<Vec<String>> {
            if let Some(pos) = stack.iter().position(|n| *n == node) {
                let mut path: Vec<String> = stack[pos..].iter().map(|s| s.to_string()).collect();
                path.push(node.to_owned());
                return Some(path);
            }
            if !done.insert(node) {
                return None;
            }
            stack.push(node);
            for source in graph.sources_of(node) {
                if let Some(cycle) = visit(graph, source, stack, done) {
                    return Some(cycle);
                }
            }
            stack.pop();
            None
        }
        let mut done = BTreeSet::new();
        for node in &self.nodes {
            if let Some(cycle) = visit(self, node, &mut Vec::new(), &mut done) {
                return cycle;
            }
        }
        Vec::new()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for node in &self.nodes {
            out.push_str(node);
            out.push('\n');
            for source in self.sources_of(node) {
                out.push_str("  <- ");
                out.push_str(source);
                out.push('\n');
            }
        }
        for finding in &self.findings {
            out.push_str(&finding.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|(importer, source)| serde_json::json!({"importer": importer, "source": source}))
            .collect();
        let value = serde_json::json!({
            "nodes": self.nodes,
            "edges": edges,
            "findings": self.findings,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("graph serializes");
        out.push('\n');
        out
    }
}

/// One node per store document, one edge per import directive. Imports of
/// missing documents become findings rather than edges.
pub fn build_graph(store: &SourceStore) -> Result<DependencyGraph, StoreError> {
    let mut graph = DependencyGraph::default();
    let uris = store.list()?;
    graph.nodes.extend(uris.iter().cloned());
    for uri in &uris {
        let doc = store.load(uri)?;
        let Some(profile) = doc.as_profile() else {
            continue;
        };
        for (i, import) in profile.imports.iter().enumerate() {
            let path = format!("{uri}#imports/{i}/source");
            match SourceStore::normalize(&import.source) {
                Ok(source) if graph.nodes.contains(&source) => {
                    graph.edges.insert((uri.clone(), source));
                }
                Ok(source) => graph.findings.push(Finding::error(
                    path,
                    format!("dangling source {source:?}: not in the store"),
                )),
                Err(e) => graph.findings.push(Finding::error(path, e.to_string())),
            }
        }
    }
    Ok(graph)
}
