//! Structural differences between two catalogs.
//!
//! Granularity is the control and the part: parts are compared by name
//! within a control, prose as an exact string. A part whose content is
//! unchanged but whose position relative to the other surviving parts moved
//! is still reported as modified, since order is visible to readers.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::model::{Catalog, Control, Part};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeKind {
    ControlAdded,
    ControlRemoved,
    /// Class, parent or relative position of a surviving control changed.
    ControlModified,
    PartAdded,
    PartRemoved,
    PartModified,
    MetadataModified,
}

impl ChangeKind {
    pub fn is_part_level(self) -> bool {
        matches!(
            self,
            ChangeKind::PartAdded | ChangeKind::PartRemoved | ChangeKind::PartModified
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct ChangeEntry {
    pub kind: ChangeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub part_name: Option<String>,
    /// Which aspect changed, for metadata and control-level entries
    /// (`title`, `version`, `class`, `parent`, `position`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    /// Old text: part prose, or the old metadata/control field value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before_prose: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after_prose: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before_class: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after_class: Option<String>,
}

impl ChangeEntry {
    fn new(kind: ChangeKind) -> Self {
        Self {
            kind,
            control_id: None,
            part_name: None,
            field: None,
            before_prose: None,
            after_prose: None,
            before_class: None,
            after_class: None,
        }
    }

    fn control(kind: ChangeKind, id: &str) -> Self {
        Self {
            control_id: Some(id.to_owned()),
            ..Self::new(kind)
        }
    }

    fn part(kind: ChangeKind, control_id: &str, before: Option<&Part>, after: Option<&Part>) -> Self {
        let name = after.or(before).map(|p| p.name.clone());
        Self {
            part_name: name,
            before_prose: before.map(|p| p.prose.clone()),
            after_prose: after.map(|p| p.prose.clone()),
            before_class: before.and_then(|p| p.class.clone()),
            after_class: after.and_then(|p| p.class.clone()),
            ..Self::control(kind, control_id)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ChangeSet {
    pub entries: Vec<ChangeEntry>,
}

impl ChangeSet {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ChangeEntry> {
        self.entries.iter()
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("change set serializes");
        out.push('\n');
        out
    }

    /// Human-readable report grouped by control.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut current: Option<Option<&str>> = None;
        for entry in &self.entries {
            let group = entry.control_id.as_deref();
            if current != Some(group) {
                out.push_str(group.unwrap_or("metadata"));
                out.push('\n');
                current = Some(group);
            }
            let name = entry.part_name.as_deref().unwrap_or_default();
            let field = entry.field.as_deref().unwrap_or_default();
            match entry.kind {
                ChangeKind::ControlAdded => out.push_str("  + control\n"),
                ChangeKind::ControlRemoved => out.push_str("  - control\n"),
                ChangeKind::PartAdded => {
                    let _ = writeln!(out, "  + part {name}");
                }
                ChangeKind::PartRemoved => {
                    let _ = writeln!(out, "  - part {name}");
                }
                ChangeKind::ControlModified | ChangeKind::MetadataModified => {
                    let _ = writeln!(
                        out,
                        "  ~ {field}: {} -> {}",
                        quote(entry.before_prose.as_deref()),
                        quote(entry.after_prose.as_deref())
                    );
                }
                ChangeKind::PartModified => {
                    let _ = writeln!(out, "  ~ part {name}");
                    if entry.before_class != entry.after_class {
                        let _ = writeln!(
                            out,
                            "      class:  {} -> {}",
                            quote(entry.before_class.as_deref()),
                            quote(entry.after_class.as_deref())
                        );
                    }
                    if entry.before_prose != entry.after_prose {
                        let _ = writeln!(
                            out,
                            "      before: {}",
                            entry.before_prose.as_deref().unwrap_or_default()
                        );
                        let _ = writeln!(
                            out,
                            "      after:  {}",
                            entry.after_prose.as_deref().unwrap_or_default()
                        );
                    } else if entry.before_class == entry.after_class {
                        out.push_str("      moved\n");
                    }
                }
            }
        }
        match self.entries.len() {
            0 => out.push_str("no changes\n"),
            1 => out.push_str("1 change\n"),
            n => {
                let _ = writeln!(out, "{n} changes");
            }
        }
        out
    }
}

fn quote(v: Option<&str>) -> String {
    match v {
        Some(v) => format!("{v:?}"),
        None => "(none)".to_owned(),
    }
}

impl fmt::Display for ChangeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl<'a> IntoIterator for &'a ChangeSet {
    type Item = &'a ChangeEntry;
    type IntoIter = std::slice::Iter<'a, ChangeEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

/// Indices (into `a`) of one longest common subsequence of `a` and `b`.
fn lcs_members<T: PartialEq>(a: &[T], b: &[T]) -> HashSet<usize> {
    let (n, m) = (a.len(), b.len());
    let mut table = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            table[i][j] = if a[i] == b[j] {
                table[i + 1][j + 1] + 1
            } else {
                table[i + 1][j].max(table[i][j + 1])
            };
        }
    }
    let mut members = HashSet::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            members.insert(i);
            i += 1;
            j += 1;
        } else if table[i + 1][j] >= table[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    members
}

/// Names (or ids) present in both lists whose relative order changed.
fn moved<'a>(before: &[&'a str], after: &[&'a str]) -> HashSet<&'a str> {
    let after_set: HashSet<&str> = after.iter().copied().collect();
    let before_set: HashSet<&str> = before.iter().copied().collect();
    let common_before: Vec<&str> = before.iter().copied().filter(|x| after_set.contains(x)).collect();
    let common_after: Vec<&str> = after.iter().copied().filter(|x| before_set.contains(x)).collect();
    let keep = lcs_members(&common_before, &common_after);
    common_before
        .iter()
        .enumerate()
        .filter(|(i, _)| !keep.contains(i))
        .map(|(_, x)| *x)
        .collect()
}

/// Interleaves removed items of `before` into the walk over `after`: each
/// removed item is emitted just before the next surviving item that
/// followed it in `before`, or at the end.
fn merge_order<'a, T>(
    before: &'a [T],
    after: &'a [T],
    key: impl Fn(&T) -> &str,
) -> Vec<(Option<&'a T>, Option<&'a T>)> {
    let after_keys: HashMap<&str, &T> = after.iter().map(|x| (key(x), x)).collect();
    let before_keys: HashMap<&str, &T> = before.iter().map(|x| (key(x), x)).collect();
    let mut pending: HashMap<&str, Vec<&T>> = HashMap::new();
    let mut buffer = Vec::new();
    for item in before {
        if after_keys.contains_key(key(item)) {
            pending.insert(key(item), std::mem::take(&mut buffer));
        } else {
            buffer.push(item);
        }
    }
    // Removals after the last survivor precede whatever was appended after it.
    let last_survivor = after.iter().rposition(|x| before_keys.contains_key(key(x)));
    let mut out = Vec::new();
    if last_survivor.is_none() {
        out.extend(buffer.drain(..).map(|r| (Some(r), None)));
    }
    for (i, item) in after.iter().enumerate() {
        let k = key(item);
        if let Some(removed) = pending.remove(k) {
            out.extend(removed.into_iter().map(|r| (Some(r), None)));
        }
        out.push((before_keys.get(k).copied(), Some(item)));
        if Some(i) == last_survivor {
            out.extend(buffer.drain(..).map(|r| (Some(r), None)));
        }
    }
    out
}

struct Flat<'a> {
    control: &'a Control,
    parent: Option<&'a str>,
}

fn flatten<'a>(controls: &'a [Control], parent: Option<&'a str>, out: &mut Vec<Flat<'a>>) {
    for control in controls {
        out.push(Flat { control, parent });
        flatten(&control.children, Some(&control.id), out);
    }
}

fn diff_parts(before: &Control, after: &Control, out: &mut Vec<ChangeEntry>) {
    let before_names: Vec<&str> = before.parts.iter().map(|p| p.name.as_str()).collect();
    let after_names: Vec<&str> = after.parts.iter().map(|p| p.name.as_str()).collect();
    let moved = moved(&before_names, &after_names);
    for pair in merge_order(&before.parts, &after.parts, |p| p.name.as_str()) {
        match pair {
            (Some(b), None) => out.push(ChangeEntry::part(ChangeKind::PartRemoved, &after.id, Some(b), None)),
            (None, Some(a)) => out.push(ChangeEntry::part(ChangeKind::PartAdded, &after.id, None, Some(a))),
            (Some(b), Some(a)) => {
                if b != a || moved.contains(a.name.as_str()) {
                    out.push(ChangeEntry::part(ChangeKind::PartModified, &after.id, Some(b), Some(a)));
                }
            }
            (None, None) => unreachable!(),
        }
    }
}

fn control_field(id: &str, field: &str, before: Option<&str>, after: Option<&str>) -> ChangeEntry {
    ChangeEntry {
        field: Some(field.to_owned()),
        before_prose: before.map(str::to_owned),
        after_prose: after.map(str::to_owned),
        ..ChangeEntry::control(ChangeKind::ControlModified, id)
    }
}

fn whole_control(kind: ChangeKind, control: &Control, out: &mut Vec<ChangeEntry>) {
    let mut entry = ChangeEntry::control(kind, &control.id);
    match kind {
        ChangeKind::ControlAdded => entry.after_class = control.class.clone(),
        _ => entry.before_class = control.class.clone(),
    }
    out.push(entry);
    let part_kind = match kind {
        ChangeKind::ControlAdded => ChangeKind::PartAdded,
        _ => ChangeKind::PartRemoved,
    };
    for part in &control.parts {
        let (b, a) = match part_kind {
            ChangeKind::PartAdded => (None, Some(part)),
            _ => (Some(part), None),
        };
        out.push(ChangeEntry::part(part_kind, &control.id, b, a));
    }
}

/// Structural difference from `before` to `after`. Empty exactly when the
/// catalogs are equal ignoring `uri`.
pub fn diff(before: &Catalog, after: &Catalog) -> ChangeSet {
    let mut entries = Vec::new();
    for (field, b, a) in [
        ("title", &before.metadata.title, &after.metadata.title),
        ("version", &before.metadata.version, &after.metadata.version),
    ] {
        if b != a {
            entries.push(ChangeEntry {
                field: Some(field.to_owned()),
                before_prose: Some(b.clone()),
                after_prose: Some(a.clone()),
                ..ChangeEntry::new(ChangeKind::MetadataModified)
            });
        }
    }

    let mut before_flat = Vec::new();
    flatten(&before.controls, None, &mut before_flat);
    let mut after_flat = Vec::new();
    flatten(&after.controls, None, &mut after_flat);
    let before_ids: Vec<&str> = before_flat.iter().map(|f| f.control.id.as_str()).collect();
    let after_ids: Vec<&str> = after_flat.iter().map(|f| f.control.id.as_str()).collect();
    let moved = moved(&before_ids, &after_ids);

    for pair in merge_order(&before_flat, &after_flat, |f| f.control.id.as_str()) {
        match pair {
            (Some(b), None) => whole_control(ChangeKind::ControlRemoved, b.control, &mut entries),
            (None, Some(a)) => whole_control(ChangeKind::ControlAdded, a.control, &mut entries),
            (Some(b), Some(a)) => {
                let id = a.control.id.as_str();
                if b.control.class != a.control.class {
                    entries.push(control_field(
                        id,
                        "class",
                        b.control.class.as_deref(),
                        a.control.class.as_deref(),
                    ));
                }
                if b.parent != a.parent {
                    entries.push(control_field(id, "parent", b.parent, a.parent));
                } else if moved.contains(id) {
                    entries.push(control_field(id, "position", None, None));
                }
                diff_parts(b.control, a.control, &mut entries);
            }
            (None, None) => unreachable!(),
        }
    }
    ChangeSet { entries }
}
