//! Reader-facing Markdown for resolved catalogs.

use std::fmt::Write as _;

use crate::model::{Control, Part};
use crate::resolver::ResolvedCatalog;

/// Deepest Markdown heading level.
pub const MAX_HEADING: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Annotate each part with the layer that contributed it.
    pub include_provenance: bool,
    /// Heading level of top-level controls.
    pub heading_depth: usize,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            include_provenance: false,
            heading_depth: 2,
        }
    }
}

impl RenderOptions {
    pub fn with_provenance(mut self, on: bool) -> Self {
        self.include_provenance = on;
        self
    }

    pub fn with_heading_depth(mut self, depth: usize) -> Self {
        self.heading_depth = depth.clamp(1, MAX_HEADING);
        self
    }
}

/// Heading text for a part: `supplemental-guidance` becomes
/// `Supplemental Guidance`, `OT-specific-guidance` becomes
/// `OT-specific Guidance`. Only the last hyphen separates words; camelCase
/// is split as well. Parts without a class use their name.
pub fn part_heading(part: &Part) -> String {
    heading_from(part.class.as_deref().unwrap_or(&part.name))
}

fn heading_from(label: &str) -> String {
    let mut words = String::with_capacity(label.len() + 4);
    let mut prev: Option<char> = None;
    for c in label.chars() {
        if c.is_uppercase() && prev.is_some_and(|p| p.is_lowercase()) {
            words.push(' ');
        }
        words.push(c);
        prev = Some(c);
    }
    let words = match words.rfind('-') {
        Some(idx) => format!("{} {}", &words[..idx], &words[idx + 1..]),
        None => words,
    };
    words
        .split(' ')
        .filter(|w| !w.is_empty())
        .map(capitalize)
        .collect::<Vec<_>>()
        .join(" ")
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

struct Renderer<'a> {
    resolved: &'a ResolvedCatalog,
    options: RenderOptions,
    out: String,
    notes: Vec<String>,
}

impl Renderer<'_> {
    fn heading(&mut self, level: usize, text: &str) {
        let level = level.min(MAX_HEADING);
        let _ = writeln!(self.out, "{} {text}\n", "#".repeat(level));
    }

    fn note(&mut self, control: &Control, part: &Part) {
        if !self.options.include_provenance {
            return;
        }
        let n = self.notes.len() + 1;
        let origin = match self.resolved.provenance_of(&control.id, &part.name) {
            Some(entry) => format!("{} (layer {})", entry.origin_uri, entry.layer_depth),
            None => "unknown origin".to_owned(),
        };
        self.notes.push(format!(
            "[^{n}]: {}/{} from {origin}",
            control.id.to_uppercase(),
            part.name
        ));
        let _ = writeln!(self.out, "[^{n}]\n");
    }

    fn control(&mut self, control: &Control, level: usize) {
        self.heading(level, &control.id.to_uppercase());
        for part in &control.parts {
            if part.is_statement() {
                for line in part.prose.lines() {
                    if line.is_empty() {
                        self.out.push_str(">\n");
                    } else {
                        let _ = writeln!(self.out, "> {line}");
                    }
                }
                self.out.push('\n');
            } else {
                self.heading(level + 1, &part_heading(part));
                let _ = writeln!(self.out, "{}\n", part.prose);
            }
            self.note(control, part);
        }
        for child in &control.children {
            self.control(child, level + 1);
        }
    }
}

/// Renders `resolved` as CommonMark: a title header, then one heading per
/// control (uppercase id) with its statement as a blockquote and each other
/// part under its own sub-heading, in catalog order.
pub fn render_markdown(resolved: &ResolvedCatalog, options: &RenderOptions) -> String {
    let options = options.with_heading_depth(options.heading_depth);
    let mut r = Renderer {
        resolved,
        options,
        out: String::new(),
        notes: Vec::new(),
    };
    let metadata = &resolved.catalog.metadata;
    let _ = writeln!(r.out, "# {}\n", metadata.title);
    let _ = writeln!(r.out, "Version {}", metadata.version);
    if options.include_provenance && !resolved.lineage.is_empty() {
        let _ = writeln!(r.out, "\nLayers: {}", resolved.lineage.join(" > "));
    }
    for control in &resolved.catalog.controls {
        r.out.push('\n');
        let len = r.out.len();
        r.control(control, options.heading_depth);
        // Trim the blank line left by the last block of each section.
        if r.out.len() > len && r.out.ends_with("\n\n") {
            r.out.pop();
        }
    }
    if !r.notes.is_empty() {
        r.out.push('\n');
        for note in &r.notes {
            r.out.push_str(note);
            r.out.push('\n');
        }
    }
    r.out
}
