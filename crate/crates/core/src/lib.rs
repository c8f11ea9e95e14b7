//! Layered security guidance.
//!
//! A [`Catalog`] is a tree of controls, each carrying named prose parts.
//! A [`Profile`] imports controls from catalogs (or from other resolved
//! profiles) and alters them by removing and adding parts. Resolving a stack
//! of profiles yields a new catalog in which every part remembers the layer
//! that contributed it.
//!
//! ```
//! use guidance::{fixtures::FixtureCorpus, resolve_chain, SourceStore};
//!
//! let dir = tempfile::tempdir().unwrap();
//! FixtureCorpus.write_to(dir.path()).unwrap();
//! let store = SourceStore::new(dir.path());
//! let resolved = resolve_chain(&store, "am-profile.yaml").unwrap();
//! let am3 = guidance::find_control(&resolved.catalog, "id.am-3").unwrap();
//! assert_eq!(am3.part_names(), ["statement", "guidance", "am-specific"]);
//! ```

pub mod cli;
pub mod diff;
pub mod fixtures;
pub mod graph;
pub mod model;
pub mod propagate;
pub mod render;
pub mod resolver;
pub mod serialization;
pub mod validate;

pub use diff::{diff, ChangeEntry, ChangeKind, ChangeSet};
pub use fixtures::{load_fixture, FixtureCorpus, FixtureError};
pub use graph::{build_graph, DependencyGraph};
pub use model::{
    find_control, AddDirective, Alteration, Catalog, Control, DocumentEnvelope, DocumentKind, ImportDirective, Include,
    Metadata, Part, Position, Profile, RemoveDirective,
};
pub use propagate::{propagate, propagate_with, PropagateOptions, Propagated, PropagationOutcome};
pub use render::{render_markdown, RenderOptions};
pub use resolver::{
    apply_alteration, detect_cycles, resolve, resolve_catalogs, resolve_chain, resolve_chain_with, ChainResolver,
    ProvenanceEntry, ResolveError, ResolveOptions, ResolvedCatalog, SourceStore, StoreError,
};
pub use serialization::{parse_document, serialize_document, Format, ParseError, SchemaError};
pub use validate::{validate_catalog, validate_profile, Finding, Severity, ValidationReport};
