//! Directory-backed document store with a per-uri load cache.

use std::collections::HashMap;
use std::io;
use std::path::{Component, Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;
use walkdir::WalkDir;

use crate::model::{DocumentEnvelope, DocumentKind};
use crate::serialization::{parse_document, Format, ParseError};

/// Subdirectory holding persisted resolutions; never scanned as sources.
pub const RESOLVED_DIR: &str = "resolved";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StoreError {
    #[error("{uri}: not found")]
    NotFound { uri: String },
    #[error("{uri}: path escapes the store root")]
    PathEscape { uri: String },
    #[error("{uri}: {message}")]
    Io { uri: String, message: String },
    #[error("{uri}: {error}")]
    Parse { uri: String, error: ParseError },
    #[error("{uri}: expected a {expected}, found a {found}")]
    WrongKind {
        uri: String,
        expected: &'static str,
        found: &'static str,
    },
}

impl StoreError {
    pub fn uri(&self) -> &str {
        match self {
            StoreError::NotFound { uri }
            | StoreError::PathEscape { uri }
            | StoreError::Io { uri, .. }
            | StoreError::Parse { uri, .. }
            | StoreError::WrongKind { uri, .. } => uri,
        }
    }

    pub(crate) fn wrong_kind(uri: &str, expected: DocumentKind, found: DocumentKind) -> Self {
        StoreError::WrongKind {
            uri: uri.to_owned(),
            expected: expected.key(),
            found: found.key(),
        }
    }
}

type Slot = Arc<OnceLock<Result<Arc<DocumentEnvelope>, StoreError>>>;

/// Documents addressed by store-relative path.
///
/// Loads are cached; concurrent readers of the same uri share one load.
#[derive(Debug)]
pub struct SourceStore {
    root: PathBuf,
    cache: Mutex<HashMap<String, Slot>>,
}

impl SourceStore {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: root.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Normalizes a store-relative uri: forward slashes, no `.` segments.
    /// Absolute paths and `..` are rejected.
    pub fn normalize(uri: &str) -> Result<String, StoreError> {
        let escape = || StoreError::PathEscape { uri: uri.to_owned() };
        let mut segments = Vec::new();
        for component in Path::new(&uri.replace('\\', "/")).components() {
            match component {
                Component::Normal(s) => segments.push(s.to_str().ok_or_else(escape)?.to_owned()),
                Component::CurDir => {}
                Component::ParentDir | Component::RootDir | Component::Prefix(_) => return Err(escape()),
            }
        }
        if segments.is_empty() {
            return Err(StoreError::NotFound { uri: uri.to_owned() });
        }
        Ok(segments.join("/"))
    }

    pub fn path_of(&self, uri: &str) -> Result<PathBuf, StoreError> {
        Ok(self.root.join(Self::normalize(uri)?))
    }

    pub fn contains(&self, uri: &str) -> bool {
        self.path_of(uri).map(|p| p.is_file()).unwrap_or(false)
    }

    /// Loads and caches the document at `uri`; its `uri` field is set to the
    /// normalized form.
    pub fn load(&self, uri: &str) -> Result<Arc<DocumentEnvelope>, StoreError> {
        let uri = Self::normalize(uri)?;
        let slot = {
            let mut cache = self.cache.lock().expect("store cache poisoned");
            cache.entry(uri.clone()).or_default().clone()
        };
        slot.get_or_init(|| self.read(&uri)).clone()
    }

    fn read(&self, uri: &str) -> Result<Arc<DocumentEnvelope>, StoreError> {
        let path = self.root.join(uri);
        let bytes = std::fs::read(&path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => StoreError::NotFound { uri: uri.to_owned() },
            _ => StoreError::Io {
                uri: uri.to_owned(),
                message: e.to_string(),
            },
        })?;
        let mut doc = parse_document(&bytes, Format::from_path(&path)).map_err(|error| StoreError::Parse {
            uri: uri.to_owned(),
            error,
        })?;
        doc.set_uri(uri);
        Ok(Arc::new(doc))
    }

    /// Drops every cached document so the next load rereads disk.
    pub fn invalidate(&self) {
        self.cache.lock().expect("store cache poisoned").clear();
    }

    /// Every `.yaml`, `.yml` and `.json` document under the root, sorted,
    /// excluding the persisted-resolution directory.
    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut uris = Vec::new();
        let walker = WalkDir::new(&self.root)
            .follow_links(false)
            .into_iter()
            .filter_entry(|e| !(e.depth() == 1 && e.file_type().is_dir() && e.file_name() == RESOLVED_DIR));
        for entry in walker {
            let entry = entry.map_err(|e| StoreError::Io {
                uri: e.path().map(|p| p.display().to_string()).unwrap_or_default(),
                message: e.to_string(),
            })?;
            if !entry.file_type().is_file() {
                continue;
            }
            let is_doc = matches!(
                entry.path().extension().and_then(|e| e.to_str()),
                Some("yaml" | "yml" | "json")
            );
            if !is_doc {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(&self.root)
                .expect("walkdir yields paths under root");
            let rel = rel
                .components()
                .filter_map(|c| c.as_os_str().to_str())
                .collect::<Vec<_>>()
                .join("/");
            uris.push(rel);
        }
        uris.sort();
        Ok(uris)
    }

    /// Store-relative uri of the persisted resolution for `profile_uri`.
    pub fn resolved_uri(profile_uri: &str) -> String {
        let stem = Path::new(profile_uri)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(profile_uri);
        format!("{RESOLVED_DIR}/{stem}.yaml")
    }
}
