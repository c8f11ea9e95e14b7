//! Canonical block-style YAML emitter.
//!
//! Output rules: UTF-8, LF endings, two-space indentation, block collections
//! only, no anchors or tags. A scalar is written plain when that is
//! unambiguous, folded (`>-`) when its line would run past [`WIDTH`] columns
//! and the text survives folding, and double-quoted otherwise.

use super::node::Node;

/// Target line width for folded scalars.
pub(crate) const WIDTH: usize = 80;

pub(crate) fn emit(node: &Node) -> String {
    let mut out = String::new();
    match node {
        Node::Map(entries) => emit_entries(entries, 0, false, &mut out),
        other => {
            out.push_str(&inline_scalar(other));
            out.push('\n');
        }
    }
    out
}

/// Writes mapping entries at `indent`. When `after_marker` is set the first
/// key follows a `- ` list marker already written on the current line.
fn emit_entries(entries: &[(String, Node)], indent: usize, after_marker: bool, out: &mut String) {
    for (i, (key, value)) in entries.iter().enumerate() {
        if i > 0 || !after_marker {
            push_indent(out, indent);
        }
        emit_key(key, out);
        match value {
            Node::Map(inner) if inner.is_empty() => out.push_str(" {}\n"),
            Node::Map(inner) => {
                out.push_str(":\n");
                emit_entries(inner, indent + 2, false, out);
            }
            Node::Seq(items) if items.is_empty() => out.push_str(": []\n"),
            Node::Seq(items) => {
                out.push_str(":\n");
                emit_seq(items, indent + 2, out);
            }
            scalar => {
                out.push(':');
                emit_scalar_value(scalar, indent + key_width(key) + 1, indent + 2, out);
            }
        }
    }
}

fn emit_seq(items: &[Node], indent: usize, out: &mut String) {
    for item in items {
        push_indent(out, indent);
        out.push_str("- ");
        match item {
            Node::Map(entries) if !entries.is_empty() => emit_entries(entries, indent + 2, true, out),
            Node::Seq(inner) if !inner.is_empty() => {
                out.push('\n');
                emit_seq(inner, indent + 2, out);
            }
            Node::Map(_) => out.push_str("{}\n"),
            Node::Seq(_) => out.push_str("[]\n"),
            scalar => {
                // `- ` already written; drop the separator space added below.
                out.pop();
                emit_scalar_value(scalar, indent + 1, indent + 2, out);
            }
        }
    }
}

fn push_indent(out: &mut String, n: usize) {
    out.extend(std::iter::repeat_n(' ', n));
}

fn emit_key(key: &str, out: &mut String) {
    if is_plain_safe(key) {
        out.push_str(key);
    } else {
        out.push_str(&double_quoted(key));
    }
}

fn key_width(key: &str) -> usize {
    if is_plain_safe(key) {
        key.chars().count()
    } else {
        double_quoted(key).chars().count()
    }
}

/// Writes ` value\n` (or a folded block) after a `key:` ending at column
/// `column`. Folded continuation lines are indented by `block_indent`.
fn emit_scalar_value(node: &Node, column: usize, block_indent: usize, out: &mut String) {
    let Node::Str(s) = node else {
        out.push(' ');
        out.push_str(&inline_scalar(node));
        out.push('\n');
        return;
    };
    let fits = column + 1 + s.chars().count() <= WIDTH;
    if is_plain_safe(s) && fits {
        out.push(' ');
        out.push_str(s);
        out.push('\n');
    } else if !fits && is_foldable(s) {
        out.push_str(" >-\n");
        for line in wrap(s, WIDTH.saturating_sub(block_indent)) {
            push_indent(out, block_indent);
            out.push_str(&line);
            out.push('\n');
        }
    } else {
        out.push(' ');
        out.push_str(&double_quoted(s));
        out.push('\n');
    }
}

fn inline_scalar(node: &Node) -> String {
    match node {
        Node::Null => "null".to_owned(),
        Node::Bool(b) => b.to_string(),
        Node::Number(n) => n.clone(),
        Node::Str(s) if is_plain_safe(s) => s.clone(),
        Node::Str(s) => double_quoted(s),
        Node::Seq(_) => "[]".to_owned(),
        Node::Map(_) => "{}".to_owned(),
    }
}

/// Greedy word wrap on single spaces. Words longer than `width` get a line
/// of their own.
fn wrap(s: &str, width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut line = String::new();
    let mut line_len = 0;
    for word in s.split(' ') {
        let word_len = word.chars().count();
        if line_len > 0 && line_len + 1 + word_len > width {
            lines.push(std::mem::take(&mut line));
            line_len = 0;
        }
        if line_len > 0 {
            line.push(' ');
            line_len += 1;
        }
        line.push_str(word);
        line_len += word_len;
    }
    lines.push(line);
    lines
}

/// Printable in the YAML sense and not one of the characters some parsers
/// treat as a line break.
fn is_safe_char(c: char) -> bool {
    matches!(c, '\u{20}'..='\u{7e}' | '\u{a0}'..='\u{d7ff}' | '\u{e000}'..='\u{fffd}' | '\u{10000}'..)
        && !matches!(c, '\u{feff}' | '\u{2028}' | '\u{2029}')
}

/// Text that reads back identically from a folded block scalar.
fn is_foldable(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_safe_char) && !s.starts_with(' ') && !s.ends_with(' ') && !s.contains("  ")
}

/// Text that reads back as the same string from a plain scalar.
///
/// Deliberately conservative: anything that could resolve to a non-string
/// type or collide with YAML syntax is quoted instead.
pub(crate) fn is_plain_safe(s: &str) -> bool {
    let Some(first) = s.chars().next() else {
        return false;
    };
    if !(first.is_ascii_alphabetic() || (!first.is_ascii() && is_safe_char(first))) {
        return false;
    }
    if !s.chars().all(is_safe_char) || s.ends_with(' ') || s.ends_with(':') {
        return false;
    }
    if s.contains(": ") || s.contains(" #") {
        return false;
    }
    let lower = s.to_ascii_lowercase();
    !matches!(
        lower.as_str(),
        "true" | "false" | "yes" | "no" | "on" | "off" | "y" | "n" | "null" | "inf" | "infinity" | "nan"
    )
}

/// A YAML double-quoted scalar; escapes everything outside the safe set.
pub(crate) fn double_quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if is_safe_char(c) => out.push(c),
            c if (c as u32) <= 0xffff => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push_str(&format!("\\U{:08X}", c as u32)),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reparse(s: &str) -> String {
        let node: Node = serde_yaml::from_str(&emit(&Node::Map(vec![("prose".into(), Node::str(s))]))).unwrap();
        match node {
            Node::Map(mut e) => match e.remove(0).1 {
                Node::Str(s) => s,
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn plain_safety() {
        assert!(is_plain_safe("id.am-3"));
        assert!(is_plain_safe("Organizational communication and data flows are mapped"));
        assert!(is_plain_safe("Resources (e.g., hardware) are prioritized"));
        for bad in [
            "1.1", "true", "No", "", "-x", "a: b", "a #b", "x:", " a", "[x]", "'q'", "~",
        ] {
            assert!(!is_plain_safe(bad), "{bad}");
        }
    }

    #[test]
    fn long_prose_is_folded_within_width() {
        let prose = "word ".repeat(40).trim_end().to_owned();
        let text = emit(&Node::Map(vec![("prose".into(), Node::str(prose.clone()))]));
        assert!(text.starts_with("prose: >-\n  word"));
        assert!(text.lines().all(|l| l.chars().count() <= WIDTH), "{text}");
        assert_eq!(reparse(&prose), prose);
    }

    #[test]
    fn wrap_handles_overlong_words() {
        let long = "x".repeat(100);
        let s = format!("a {long} b");
        assert_eq!(wrap(&s, 10), vec!["a".to_owned(), long, "b".to_owned()]);
        assert_eq!(wrap("aa bb cc", 5), vec!["aa bb", "cc"]);
        assert_eq!(wrap("aa", 5), vec!["aa"]);
    }

    #[test]
    fn quoting_round_trips_awkward_text() {
        for s in [
            "1.0",
            "a\nb",
            "tab\there",
            "\"q\" and \\",
            "  lead",
            "yes",
            "\u{85}x\u{2028}",
            "é ü",
        ] {
            assert_eq!(reparse(s), s);
        }
    }

    #[test]
    fn nested_layout() {
        let node = Node::Map(vec![(
            "catalog".into(),
            Node::Map(vec![(
                "controls".into(),
                Node::Seq(vec![Node::Map(vec![
                    ("id".into(), Node::str("a")),
                    (
                        "parts".into(),
                        Node::Seq(vec![Node::Map(vec![("name".into(), Node::str("s"))])]),
                    ),
                ])]),
            )]),
        )]);
        assert_eq!(
            emit(&node),
            "catalog:\n  controls:\n    - id: a\n      parts:\n        - name: s\n"
        );
        let scalars = Node::Map(vec![(
            "include".into(),
            Node::Seq(vec![Node::str("id.am-3"), Node::str("1")]),
        )]);
        assert_eq!(emit(&scalars), "include:\n  - id.am-3\n  - \"1\"\n");
    }

    proptest! {
        #[test]
        fn any_string_survives(s in "\\PC{0,200}|[ a-z]{0,300}|[\\x00-\\x7f]{0,40}") {
            prop_assert_eq!(reparse(&s), s);
        }
    }
}
