//! Document object model for control catalogs and profiles.
//!
//! A [`Catalog`] is a tree of [`Control`]s, each carrying an ordered list of
//! prose [`Part`]s. A [`Profile`] selects controls from one or more source
//! documents and rewrites them through [`Alteration`]s. Both kinds are plain
//! immutable data; validation lives in [`crate::validate`].

use std::fmt;

/// Part name reserved for a control's outcome statement.
pub const STATEMENT: &str = "statement";

/// A named, optionally classified prose block inside a control.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Part {
    pub name: String,
    /// Serialized under the `class` key.
    pub class: Option<String>,
    pub prose: String,
}

impl Part {
    pub fn new(name: impl Into<String>, class: Option<&str>, prose: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            class: class.map(str::to_owned),
            prose: prose.into(),
        }
    }

    pub fn is_statement(&self) -> bool {
        self.name == STATEMENT
    }
}

/// One outcome, e.g. a framework category or subcategory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Control {
    pub id: String,
    pub class: Option<String>,
    pub parts: Vec<Part>,
    pub children: Vec<Control>,
}

impl Control {
    pub fn new(id: impl Into<String>, class: Option<&str>) -> Self {
        Self {
            id: id.into(),
            class: class.map(str::to_owned),
            parts: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn with_part(mut self, part: Part) -> Self {
        self.parts.push(part);
        self
    }

    pub fn with_child(mut self, child: Control) -> Self {
        self.children.push(child);
        self
    }

    pub fn part(&self, name: &str) -> Option<&Part> {
        self.parts.iter().find(|p| p.name == name)
    }

    /// The outcome statement, when present.
    pub fn statement(&self) -> Option<&Part> {
        self.parts.first().filter(|p| p.is_statement())
    }

    pub fn part_names(&self) -> Vec<&str> {
        self.parts.iter().map(|p| p.name.as_str()).collect()
    }

    /// Pre-order walk over this control and all of its descendants.
    pub fn walk(&self) -> ControlIter<'_> {
        ControlIter { stack: vec![self] }
    }
}

/// Pre-order iterator over a control forest.
pub struct ControlIter<'a> {
    stack: Vec<&'a Control>,
}

impl<'a> Iterator for ControlIter<'a> {
    type Item = &'a Control;

    fn next(&mut self) -> Option<&'a Control> {
        let next = self.stack.pop()?;
        self.stack.extend(next.children.iter().rev());
        Some(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Metadata {
    pub title: String,
    pub version: String,
}

impl Metadata {
    pub fn new(title: impl Into<String>, version: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            version: version.into(),
        }
    }
}

/// A source or resolved collection of controls.
///
/// `uri` records where the document was loaded from and is never serialized;
/// use [`Catalog::content_eq`] to compare two catalogs structurally.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Catalog {
    pub uri: String,
    pub metadata: Metadata,
    pub controls: Vec<Control>,
}

impl Catalog {
    pub fn new(metadata: Metadata, controls: Vec<Control>) -> Self {
        Self {
            uri: String::new(),
            metadata,
            controls,
        }
    }

    /// Pre-order walk over every control in the tree.
    pub fn walk(&self) -> ControlIter<'_> {
        ControlIter {
            stack: self.controls.iter().rev().collect(),
        }
    }

    /// Structural equality, ignoring `uri`.
    pub fn content_eq(&self, other: &Catalog) -> bool {
        self.metadata == other.metadata && self.controls == other.controls
    }

    pub fn control_count(&self) -> usize {
        self.walk().count()
    }
}

/// Returns the control with `id` anywhere in the catalog tree.
///
/// Ids are matched case-insensitively, mirroring how they are stored.
pub fn find_control<'a>(catalog: &'a Catalog, id: &str) -> Option<&'a Control> {
    catalog.walk().find(|c| c.id.eq_ignore_ascii_case(id))
}

pub(crate) fn find_control_mut<'a>(controls: &'a mut [Control], id: &str) -> Option<&'a mut Control> {
    for control in controls {
        if control.id == id {
            return Some(control);
        }
        if let Some(found) = find_control_mut(&mut control.children, id) {
            return Some(found);
        }
    }
    None
}

/// Which parts a remove directive deletes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RemoveDirective {
    ByName(String),
    ByClass(String),
}

impl RemoveDirective {
    pub fn matches(&self, part: &Part) -> bool {
        match self {
            RemoveDirective::ByName(name) => part.name == *name,
            RemoveDirective::ByClass(class) => part.class.as_deref().is_some_and(|c| c.eq_ignore_ascii_case(class)),
        }
    }

    /// Serialized key of the selector.
    pub fn key(&self) -> &'static str {
        match self {
            RemoveDirective::ByName(_) => "by-name",
            RemoveDirective::ByClass(_) => "by-class",
        }
    }

    pub fn value(&self) -> &str {
        match self {
            RemoveDirective::ByName(v) | RemoveDirective::ByClass(v) => v,
        }
    }
}

impl fmt::Display for RemoveDirective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.key(), self.value())
    }
}

/// Where added parts land. Only appending is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Position {
    #[default]
    Ending,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddDirective {
    pub position: Position,
    pub parts: Vec<Part>,
}

impl AddDirective {
    pub fn parts(parts: Vec<Part>) -> Self {
        Self {
            position: Position::Ending,
            parts,
        }
    }
}

/// Edits applied to a single control during resolution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alteration {
    pub control_id: String,
    pub removes: Vec<RemoveDirective>,
    pub adds: Vec<AddDirective>,
}

impl Alteration {
    pub fn new(control_id: impl Into<String>) -> Self {
        Self {
            control_id: control_id.into(),
            removes: Vec::new(),
            adds: Vec::new(),
        }
    }

    pub fn remove(mut self, directive: RemoveDirective) -> Self {
        self.removes.push(directive);
        self
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(mut self, parts: Vec<Part>) -> Self {
        self.adds.push(AddDirective::parts(parts));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Include {
    All,
    Ids(Vec<String>),
}

/// Selects controls from one source document.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ImportDirective {
    pub source: String,
    pub include: Include,
    pub exclude: Vec<String>,
}

impl ImportDirective {
    pub fn all(source: impl Into<String>) -> Self {
        Self {
            source: source.into(),
            include: Include::All,
            exclude: Vec::new(),
        }
    }

    pub fn ids<I, S>(source: impl Into<String>, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            source: source.into(),
            include: Include::Ids(ids.into_iter().map(Into::into).collect()),
            exclude: Vec::new(),
        }
    }
}

/// Imports plus alterations: a transformation over catalogs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Profile {
    pub uri: String,
    pub metadata: Metadata,
    pub imports: Vec<ImportDirective>,
    pub alterations: Vec<Alteration>,
}

impl Profile {
    pub fn new(metadata: Metadata, imports: Vec<ImportDirective>) -> Self {
        Self {
            uri: String::new(),
            metadata,
            imports,
            alterations: Vec::new(),
        }
    }

    /// Profile that imports everything from `source` and changes nothing.
    pub fn identity(source: impl Into<String>) -> Self {
        Self::new(Metadata::new("identity", "0"), vec![ImportDirective::all(source)])
    }

    pub fn alteration(&self, control_id: &str) -> Option<&Alteration> {
        self.alterations.iter().find(|a| a.control_id == control_id)
    }

    /// Structural equality, ignoring `uri`.
    pub fn content_eq(&self, other: &Profile) -> bool {
        self.metadata == other.metadata && self.imports == other.imports && self.alterations == other.alterations
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DocumentKind {
    Catalog,
    Profile,
}

impl DocumentKind {
    pub fn key(self) -> &'static str {
        match self {
            DocumentKind::Catalog => "catalog",
            DocumentKind::Profile => "profile",
        }
    }
}

/// A parsed document of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocumentEnvelope {
    Catalog(Catalog),
    Profile(Profile),
}

impl DocumentEnvelope {
    pub fn kind(&self) -> DocumentKind {
        match self {
            DocumentEnvelope::Catalog(_) => DocumentKind::Catalog,
            DocumentEnvelope::Profile(_) => DocumentKind::Profile,
        }
    }

    pub fn uri(&self) -> &str {
        match self {
            DocumentEnvelope::Catalog(c) => &c.uri,
            DocumentEnvelope::Profile(p) => &p.uri,
        }
    }

    pub fn set_uri(&mut self, uri: impl Into<String>) {
        match self {
            DocumentEnvelope::Catalog(c) => c.uri = uri.into(),
            DocumentEnvelope::Profile(p) => p.uri = uri.into(),
        }
    }

    pub fn as_catalog(&self) -> Option<&Catalog> {
        match self {
            DocumentEnvelope::Catalog(c) => Some(c),
            DocumentEnvelope::Profile(_) => None,
        }
    }

    pub fn as_profile(&self) -> Option<&Profile> {
        match self {
            DocumentEnvelope::Profile(p) => Some(p),
            DocumentEnvelope::Catalog(_) => None,
        }
    }

    pub fn into_catalog(self) -> Option<Catalog> {
        match self {
            DocumentEnvelope::Catalog(c) => Some(c),
            DocumentEnvelope::Profile(_) => None,
        }
    }

    pub fn into_profile(self) -> Option<Profile> {
        match self {
            DocumentEnvelope::Profile(p) => Some(p),
            DocumentEnvelope::Catalog(_) => None,
        }
    }

    /// Structural equality, ignoring `uri`.
    pub fn content_eq(&self, other: &DocumentEnvelope) -> bool {
        match (self, other) {
            (DocumentEnvelope::Catalog(a), DocumentEnvelope::Catalog(b)) => a.content_eq(b),
            (DocumentEnvelope::Profile(a), DocumentEnvelope::Profile(b)) => a.content_eq(b),
            _ => false,
        }
    }
}

impl From<Catalog> for DocumentEnvelope {
    fn from(c: Catalog) -> Self {
        DocumentEnvelope::Catalog(c)
    }
}

impl From<Profile> for DocumentEnvelope {
    fn from(p: Profile) -> Self {
        DocumentEnvelope::Profile(p)
    }
}

/// `[a-z][a-z0-9._-]*`, matched case-insensitively.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
}
