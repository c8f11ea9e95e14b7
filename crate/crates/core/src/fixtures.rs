//! The bundled three-layer example: the Asset Management category of the
//! Cybersecurity Framework, an OT profile importing it, and an additive
//! manufacturing profile importing the OT profile.
//!
//! Guidance prose is condensed in its source; each condensed passage keeps
//! the printed portion and ends with `[condensed in source paper]`.

use std::path::{Path, PathBuf};

use crate::model::DocumentEnvelope;
use crate::serialization::{parse_document, Format};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}; known fixtures: csf-id-am, ot-profile, am-profile")]
    UnknownFixture(String),
}

const ENTRIES: [(&str, &str); 3] = [
    ("csf-id-am", include_str!("../fixtures/csf-id-am.yaml")),
    ("ot-profile", include_str!("../fixtures/ot-profile.yaml")),
    ("am-profile", include_str!("../fixtures/am-profile.yaml")),
];

/// Canonical YAML bytes of every fixture, in import order.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixtureCorpus;

impl FixtureCorpus {
    pub fn names(&self) -> impl Iterator<Item = &'static str> {
        ENTRIES.iter().map(|(name, _)| *name)
    }

    pub fn bytes(&self, name: &str) -> Result<&'static str, FixtureError> {
        ENTRIES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| *text)
            .ok_or_else(|| FixtureError::UnknownFixture(name.to_owned()))
    }

    /// Store uri of a fixture: `<name>.yaml`.
    pub fn uri(name: &str) -> String {
        format!("{name}.yaml")
    }

    /// Writes every fixture into `dir` under its store uri.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        ENTRIES
            .iter()
            .map(|(name, text)| {
                let path = dir.join(Self::uri(name));
                std::fs::write(&path, text)?;
                Ok(path)
            })
            .collect()
    }
}

/// Parses and validates a bundled fixture. Its uri is `<name>.yaml`.
pub fn load_fixture(name: &str) -> Result<DocumentEnvelope, FixtureError> {
    let text = FixtureCorpus.bytes(name)?;
    let mut doc = parse_document(text.as_bytes(), Format::Yaml)
        .unwrap_or_else(|e| panic!("bundled fixture {name} is invalid: {e}"));
    doc.set_uri(FixtureCorpus::uri(name));
    Ok(doc)
}
