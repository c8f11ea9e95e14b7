//! Document model to generic tree, with the canonical key order per type.
//!
//! Empty lists and absent classes are omitted so the block-style emitter
//! never needs a flow collection.

use crate::model::{
    AddDirective, Alteration, Catalog, Control, DocumentEnvelope, ImportDirective, Include, Metadata, Part, Profile,
    RemoveDirective,
};

use super::node::Node;

struct MapBuilder(Vec<(String, Node)>);

impl MapBuilder {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn str(mut self, key: &str, value: &str) -> Self {
        self.0.push((key.to_owned(), Node::str(value)));
        self
    }

    fn opt_str(self, key: &str, value: Option<&str>) -> Self {
        match value {
            Some(v) => self.str(key, v),
            None => self,
        }
    }

    fn node(mut self, key: &str, value: Node) -> Self {
        self.0.push((key.to_owned(), value));
        self
    }

    fn list<T>(mut self, key: &str, items: &[T], f: impl Fn(&T) -> Node) -> Self {
        if !items.is_empty() {
            self.0.push((key.to_owned(), Node::Seq(items.iter().map(f).collect())));
        }
        self
    }

    fn build(self) -> Node {
        Node::Map(self.0)
    }
}

pub(crate) fn document(doc: &DocumentEnvelope) -> Node {
    let body = match doc {
        DocumentEnvelope::Catalog(c) => catalog(c),
        DocumentEnvelope::Profile(p) => profile(p),
    };
    Node::Map(vec![(doc.kind().key().to_owned(), body)])
}

fn metadata(m: &Metadata) -> Node {
    MapBuilder::new()
        .str("title", &m.title)
        .str("version", &m.version)
        .build()
}

pub(crate) fn catalog(c: &Catalog) -> Node {
    MapBuilder::new()
        .node("metadata", metadata(&c.metadata))
        .list("controls", &c.controls, control)
        .build()
}

fn control(c: &Control) -> Node {
    MapBuilder::new()
        .str("id", &c.id)
        .opt_str("class", c.class.as_deref())
        .list("parts", &c.parts, part)
        .list("children", &c.children, control)
        .build()
}

fn part(p: &Part) -> Node {
    MapBuilder::new()
        .str("name", &p.name)
        .opt_str("class", p.class.as_deref())
        .str("prose", &p.prose)
        .build()
}

fn profile(p: &Profile) -> Node {
    MapBuilder::new()
        .node("metadata", metadata(&p.metadata))
        .list("imports", &p.imports, import)
        .list("alterations", &p.alterations, alteration)
        .build()
}

fn import(i: &ImportDirective) -> Node {
    let include = match &i.include {
        Include::All => Node::str("all"),
        Include::Ids(ids) => Node::Seq(ids.iter().map(Node::str).collect()),
    };
    MapBuilder::new()
        .str("source", &i.source)
        .node("include", include)
        .list("exclude", &i.exclude, |id| Node::str(id))
        .build()
}

fn alteration(a: &Alteration) -> Node {
    MapBuilder::new()
        .str("control-id", &a.control_id)
        .list("removes", &a.removes, remove)
        .list("adds", &a.adds, add)
        .build()
}

fn remove(r: &RemoveDirective) -> Node {
    MapBuilder::new().str(r.key(), r.value()).build()
}

fn add(a: &AddDirective) -> Node {
    MapBuilder::new().list("parts", &a.parts, part).build()
}
