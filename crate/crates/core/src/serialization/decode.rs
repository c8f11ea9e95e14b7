//! Strict mapping from the generic tree onto the document model.
//!
//! Every mapping is checked against the exact key set of its type: unknown
//! keys, duplicate keys, missing required keys and wrong value types are all
//! reported as [`SchemaError`]s carrying the document path of the offender.

use crate::model::{
    AddDirective, Alteration, Catalog, Control, DocumentEnvelope, ImportDirective, Include, Metadata, Part, Position,
    Profile, RemoveDirective,
};

use super::node::Node;
use super::SchemaError;

type Result<T> = std::result::Result<T, SchemaError>;

fn child(path: &str, segment: impl std::fmt::Display) -> String {
    if path.is_empty() {
        segment.to_string()
    } else {
        format!("{path}/{segment}")
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> SchemaError {
    SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

/// A mapping whose keys have been checked against an allow-list.
struct Fields<'a> {
    path: String,
    entries: &'a [(String, Node)],
}

impl<'a> Fields<'a> {
    fn new(node: &'a Node, path: &str, allowed: &[&str]) -> Result<Self> {
        let Node::Map(entries) = node else {
            return Err(schema(path, format!("expected a mapping, found {}", node.type_name())));
        };
        for (i, (key, _)) in entries.iter().enumerate() {
            if !allowed.contains(&key.as_str()) {
                return Err(schema(child(path, key), format!("unknown key {key:?}")));
            }
            if entries[..i].iter().any(|(k, _)| k == key) {
                return Err(schema(child(path, key), format!("duplicate key {key:?}")));
            }
        }
        Ok(Self {
            path: path.to_owned(),
            entries,
        })
    }

    fn get(&self, key: &str) -> Option<&'a Node> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    fn required(&self, key: &str) -> Result<&'a Node> {
        self.get(key)
            .ok_or_else(|| schema(self.path.clone(), format!("missing required key {key:?}")))
    }

    fn path(&self, key: &str) -> String {
        child(&self.path, key)
    }

    fn string(&self, key: &str) -> Result<String> {
        expect_str(self.required(key)?, &self.path(key))
    }

    fn opt_string(&self, key: &str) -> Result<Option<String>> {
        self.get(key).map(|n| expect_str(n, &self.path(key))).transpose()
    }

    fn identifier(&self, key: &str) -> Result<String> {
        Ok(self.string(key)?.to_ascii_lowercase())
    }

    /// Absent lists decode as empty.
    fn list(&self, key: &str) -> Result<&'a [Node]> {
        match self.get(key) {
            None => Ok(&[]),
            Some(node) => expect_seq(node, &self.path(key)),
        }
    }
}

fn expect_str(node: &Node, path: &str) -> Result<String> {
    match node {
        Node::Str(s) => Ok(s.clone()),
        Node::Number(_) | Node::Bool(_) => Err(schema(
            path,
            format!("expected a string, found {} (quote the value)", node.type_name()),
        )),
        other => Err(schema(path, format!("expected a string, found {}", other.type_name()))),
    }
}

fn expect_seq<'a>(node: &'a Node, path: &str) -> Result<&'a [Node]> {
    match node {
        Node::Seq(items) => Ok(items),
        other => Err(schema(path, format!("expected a list, found {}", other.type_name()))),
    }
}

fn id_list(items: &[Node], path: &str) -> Result<Vec<String>> {
    items
        .iter()
        .enumerate()
        .map(|(i, n)| expect_str(n, &child(path, i)).map(|s| s.to_ascii_lowercase()))
        .collect()
}

pub(crate) fn document(node: &Node) -> Result<DocumentEnvelope> {
    let Node::Map(entries) = node else {
        return Err(schema(
            "",
            format!(
                "expected a mapping with a single \"catalog\" or \"profile\" key, found {}",
                node.type_name()
            ),
        ));
    };
    match entries.as_slice() {
        [(key, body)] if key == "catalog" => Ok(DocumentEnvelope::Catalog(catalog(body, key)?)),
        [(key, body)] if key == "profile" => Ok(DocumentEnvelope::Profile(profile(body, key)?)),
        [(key, _)] => Err(schema(key.as_str(), format!("unknown document kind {key:?}"))),
        [] => Err(schema("", "empty document")),
        _ => {
            let keys: Vec<_> = entries.iter().map(|(k, _)| k.as_str()).collect();
            Err(schema(
                "",
                format!("expected exactly one top-level key, found {}", keys.join(", ")),
            ))
        }
    }
}

fn metadata(node: &Node, path: &str) -> Result<Metadata> {
    let f = Fields::new(node, path, &["title", "version"])?;
    Ok(Metadata {
        title: f.string("title")?,
        version: f.string("version")?,
    })
}

fn catalog(node: &Node, path: &str) -> Result<Catalog> {
    let f = Fields::new(node, path, &["metadata", "controls"])?;
    let controls_path = f.path("controls");
    Ok(Catalog {
        uri: String::new(),
        metadata: metadata(f.required("metadata")?, &f.path("metadata"))?,
        controls: f
            .list("controls")?
            .iter()
            .enumerate()
            .map(|(i, n)| control(n, &child(&controls_path, i)))
            .collect::<Result<_>>()?,
    })
}

fn control(node: &Node, path: &str) -> Result<Control> {
    let f = Fields::new(node, path, &["id", "class", "parts", "children"])?;
    let parts_path = f.path("parts");
    let children_path = f.path("children");
    Ok(Control {
        id: f.identifier("id")?,
        class: f.opt_string("class")?,
        parts: f
            .list("parts")?
            .iter()
            .enumerate()
            .map(|(i, n)| part(n, &child(&parts_path, i)))
            .collect::<Result<_>>()?,
        children: f
            .list("children")?
            .iter()
            .enumerate()
            .map(|(i, n)| control(n, &child(&children_path, i)))
            .collect::<Result<_>>()?,
    })
}

fn part(node: &Node, path: &str) -> Result<Part> {
    let f = Fields::new(node, path, &["name", "class", "prose"])?;
    Ok(Part {
        name: f.identifier("name")?,
        class: f.opt_string("class")?,
        prose: f.string("prose")?,
    })
}

fn profile(node: &Node, path: &str) -> Result<Profile> {
    let f = Fields::new(node, path, &["metadata", "imports", "alterations"])?;
    let imports_path = f.path("imports");
    let alterations_path = f.path("alterations");
    Ok(Profile {
        uri: String::new(),
        metadata: metadata(f.required("metadata")?, &f.path("metadata"))?,
        imports: expect_seq(f.required("imports")?, &imports_path)?
            .iter()
            .enumerate()
            .map(|(i, n)| import(n, &child(&imports_path, i)))
            .collect::<Result<_>>()?,
        alterations: f
            .list("alterations")?
            .iter()
            .enumerate()
            .map(|(i, n)| alteration(n, &child(&alterations_path, i)))
            .collect::<Result<_>>()?,
    })
}

fn import(node: &Node, path: &str) -> Result<ImportDirective> {
    let f = Fields::new(node, path, &["source", "include", "exclude"])?;
    let include = match f.get("include") {
        None => Include::All,
        Some(Node::Str(s)) if s == "all" => Include::All,
        Some(Node::Seq(items)) => Include::Ids(id_list(items, &f.path("include"))?),
        Some(other) => {
            return Err(schema(
                f.path("include"),
                format!(
                    "expected \"all\" or a list of control ids, found {}",
                    match other {
                        Node::Str(s) => format!("{s:?}"),
                        n => n.type_name().to_owned(),
                    }
                ),
            ))
        }
    };
    Ok(ImportDirective {
        source: f.string("source")?,
        include,
        exclude: id_list(f.list("exclude")?, &f.path("exclude"))?,
    })
}

fn alteration(node: &Node, path: &str) -> Result<Alteration> {
    let f = Fields::new(node, path, &["control-id", "removes", "adds"])?;
    let removes_path = f.path("removes");
    let adds_path = f.path("adds");
    Ok(Alteration {
        control_id: f.identifier("control-id")?,
        removes: f
            .list("removes")?
            .iter()
            .enumerate()
            .map(|(i, n)| remove(n, &child(&removes_path, i)))
            .collect::<Result<_>>()?,
        adds: f
            .list("adds")?
            .iter()
            .enumerate()
            .map(|(i, n)| add(n, &child(&adds_path, i)))
            .collect::<Result<_>>()?,
    })
}

fn remove(node: &Node, path: &str) -> Result<RemoveDirective> {
    let f = Fields::new(node, path, &["by-name", "by-class"])?;
    match (f.get("by-name"), f.get("by-class")) {
        (Some(_), None) => Ok(RemoveDirective::ByName(f.identifier("by-name")?)),
        (None, Some(_)) => Ok(RemoveDirective::ByClass(f.string("by-class")?)),
        _ => Err(schema(path, "expected exactly one of \"by-name\" or \"by-class\"")),
    }
}

fn add(node: &Node, path: &str) -> Result<AddDirective> {
    let f = Fields::new(node, path, &["parts", "position"])?;
    let position = match f.opt_string("position")?.as_deref() {
        None | Some("ending") => Position::Ending,
        Some(other) => {
            return Err(schema(
                f.path("position"),
                format!("unsupported position {other:?} (only \"ending\")"),
            ))
        }
    };
    let parts_path = f.path("parts");
    Ok(AddDirective {
        position,
        parts: expect_seq(f.required("parts")?, &parts_path)?
            .iter()
            .enumerate()
            .map(|(i, n)| part(n, &child(&parts_path, i)))
            .collect::<Result<_>>()?,
    })
}
