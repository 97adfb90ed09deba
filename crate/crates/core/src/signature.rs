//! Canonical text form of a grouping tree.
//!
//! ```text
//! AB - Dr          root split, both sides terminal
//! A - (B)(CDr)     root split, right side split again
//! ⊥A - BDr         some node fell back to the tie split
//! ```
//!
//! Terminal groups print their labels sorted and concatenated. Splits below
//! the root print as `(x)(y)` with the two sides ordered by their rendered
//! text. At the root the sides are joined by `" - "`; the side holding the
//! drifter goes last, otherwise the smaller text goes first.

use std::fmt;

use crate::error::{Error, Result};
use crate::ia::GroupingTree;

pub const DEGENERATE_MARK: char = '⊥';
const ROOT_SEPARATOR: &str = " - ";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature(String);

impl Signature {
    /// Wraps an existing string without checking it.
    pub fn from_raw(s: impl Into<String>) -> Self {
        Signature(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_degenerate(&self) -> bool {
        self.0.starts_with(DEGENERATE_MARK)
    }

    /// Text of the two root-level sides, without the degenerate mark.
    pub fn root_sides(&self) -> Option<(&str, &str)> {
        let body = self.0.strip_prefix(DEGENERATE_MARK).unwrap_or(&self.0);
        body.split_once(ROOT_SEPARATOR)
    }

    /// True when `label` stands alone on one side of the root split.
    pub fn isolates(&self, label: &str) -> bool {
        self.root_sides().is_some_and(|(a, b)| a == label || b == label)
    }

    /// Parses the text back into a tree shape. Labels are recovered by
    /// splitting concatenated groups against `labels`; an ambiguous split is
    /// an error.
    pub fn parse(&self, labels: &[String]) -> Result<ParsedSignature> {
        let (degenerate, body) = match self.0.strip_prefix(DEGENERATE_MARK) {
            Some(rest) => (true, rest),
            None => (false, self.0.as_str()),
        };
        let root = match body.split_once(ROOT_SEPARATOR) {
            Some((a, b)) => Shape::Split(Box::new(parse_part(a, labels)?), Box::new(parse_part(b, labels)?)),
            None => Shape::Group(tokenize(body, labels)?),
        };
        Ok(ParsedSignature { degenerate, root })
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Signature {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Tree shape of a signature, without split statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Group(Vec<String>),
    Split(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn from_tree(t: &GroupingTree) -> Shape {
        match t {
            GroupingTree::Leaf(l) => Shape::Group(l.clone()),
            GroupingTree::Split { low, high, .. } => Shape::Split(Box::new(Shape::from_tree(low)), Box::new(Shape::from_tree(high))),
        }
    }

    fn contains(&self, label: &str) -> bool {
        match self {
            Shape::Group(l) => l.iter().any(|x| x == label),
            Shape::Split(a, b) => a.contains(label) || b.contains(label),
        }
    }

    fn map_labels(&self, f: &impl Fn(&str) -> String) -> Shape {
        match self {
            Shape::Group(l) => Shape::Group(l.iter().map(|x| f(x)).collect()),
            Shape::Split(a, b) => Shape::Split(Box::new(a.map_labels(f)), Box::new(b.map_labels(f))),
        }
    }

    fn render_inner(&self) -> String {
        match self {
            Shape::Group(l) => {
                let mut l = l.clone();
                l.sort();
                l.concat()
            }
            Shape::Split(a, b) => {
                let (mut x, mut y) = (a.render_inner(), b.render_inner());
                if y < x {
                    std::mem::swap(&mut x, &mut y);
                }
                format!("({x})({y})")
            }
        }
    }

    fn render_root(&self, degenerate: bool, drifter: Option<&str>) -> Signature {
        let mut out = String::new();
        if degenerate {
            out.push(DEGENERATE_MARK);
        }
        match self {
            Shape::Group(_) => out.push_str(&self.render_inner()),
            Shape::Split(a, b) => {
                let (ra, rb) = (a.render_inner(), b.render_inner());
                let drifter_in = |s: &Shape| drifter.is_some_and(|d| s.contains(d));
                let a_first = match (drifter_in(a), drifter_in(b)) {
                    (true, false) => false,
                    (false, true) => true,
                    _ => ra <= rb,
                };
                let (x, y) = if a_first { (ra, rb) } else { (rb, ra) };
                out.push_str(&x);
                out.push_str(ROOT_SEPARATOR);
                out.push_str(&y);
            }
        }
        Signature(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedSignature {
    pub degenerate: bool,
    pub root: Shape,
}

impl ParsedSignature {
    /// Renames every label through `f` and renders the canonical text again.
    pub fn relabel(&self, f: impl Fn(&str) -> String, drifter: Option<&str>) -> Signature {
        self.root.map_labels(&f).render_root(self.degenerate, drifter)
    }

    pub fn render(&self, drifter: Option<&str>) -> Signature {
        self.root.render_root(self.degenerate, drifter)
    }
}

/// Canonical signature of a grouping tree. `drifter` names the label whose
/// side is written last at the root.
pub fn canonical_signature(tree: &GroupingTree, drifter: Option<&str>) -> Signature {
    Shape::from_tree(tree).render_root(tree.any_degenerate(), drifter)
}

fn parse_part(s: &str, labels: &[String]) -> Result<Shape> {
    if !s.starts_with('(') {
        return Ok(Shape::Group(tokenize(s, labels)?));
    }
    let bad = || Error::Config(format!("malformed signature part {s:?}"));
    let close = matching_paren(s, 0).ok_or_else(bad)?;
    let rest = &s[close + 1..];
    if !rest.starts_with('(') {
        return Err(bad());
    }
    let close2 = matching_paren(rest, 0).ok_or_else(bad)?;
    if close2 != rest.len() - 1 {
        return Err(bad());
    }
    Ok(Shape::Split(
        Box::new(parse_part(&s[1..close], labels)?),
        Box::new(parse_part(&rest[1..close2], labels)?),
    ))
}

fn matching_paren(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (i, c) in s.char_indices().skip_while(|(i, _)| *i < open) {
        match c {
            '(' => depth += 1,
            ')' => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits a concatenation of labels; exactly one split must exist.
fn tokenize(s: &str, labels: &[String]) -> Result<Vec<String>> {
    fn walk<'a>(s: &str, labels: &'a [String], acc: &mut Vec<&'a str>, found: &mut Vec<Vec<String>>) {
        if found.len() > 1 {
            return;
        }
        if s.is_empty() {
            found.push(acc.iter().map(|x| x.to_string()).collect());
            return;
        }
        for l in labels {
            if let Some(rest) = s.strip_prefix(l.as_str()) {
                acc.push(l);
                walk(rest, labels, acc, found);
                acc.pop();
            }
        }
    }
    let mut found = Vec::new();
    walk(s, labels, &mut Vec::new(), &mut found);
    match found.len() {
        1 => Ok(found.pop().unwrap()),
        0 => Err(Error::Config(format!("cannot split {s:?} into known labels"))),
        _ => Err(Error::Config(format!("{s:?} splits into known labels in more than one way"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ia::Bipartition;

    fn split(low: &[&str], high: &[&str]) -> Bipartition {
        Bipartition {
            group_low: low.iter().map(|s| s.to_string()).collect(),
            group_high: high.iter().map(|s| s.to_string()).collect(),
            cycles: 1,
            omega: 0.5,
            degenerate: false,
            inverted_contrast: false,
        }
    }

    fn leaf(l: &[&str]) -> Box<GroupingTree> {
        Box::new(GroupingTree::Leaf(l.iter().map(|s| s.to_string()).collect()))
    }

    fn node(low: &[&str], high: &[&str], a: Box<GroupingTree>, b: Box<GroupingTree>) -> GroupingTree {
        GroupingTree::Split { split: split(low, high), low: a, high: b }
    }

    #[test]
    fn two_object_variants() {
        let t = node(&["A", "B"], &["Dr"], leaf(&["A", "B"]), leaf(&["Dr"]));
        assert_eq!(canonical_signature(&t, Some("Dr")).as_str(), "AB - Dr");
        let t = node(&["A"], &["B", "Dr"], leaf(&["A"]), leaf(&["B", "Dr"]));
        assert_eq!(canonical_signature(&t, Some("Dr")).as_str(), "A - BDr");
        let t = node(&["A", "Dr"], &["B"], leaf(&["A", "Dr"]), leaf(&["B"]));
        assert_eq!(canonical_signature(&t, Some("Dr")).as_str(), "B - ADr");
        // Without a drifter the sides are ordered by text.
        assert_eq!(canonical_signature(&t, None).as_str(), "ADr - B");
    }

    #[test]
    fn nested_split() {
        let inner = node(&["B"], &["C", "Dr"], leaf(&["B"]), leaf(&["C", "Dr"]));
        let t = node(&["A"], &["B", "C", "Dr"], leaf(&["A"]), Box::new(inner));
        let sig = canonical_signature(&t, Some("Dr"));
        assert_eq!(sig.as_str(), "A - (B)(CDr)");
        assert!(!sig.is_degenerate());
        assert_eq!(sig.root_sides(), Some(("A", "(B)(CDr)")));
    }

    #[test]
    fn degenerate_mark() {
        let mut t = node(&["A"], &["B", "Dr"], leaf(&["A"]), leaf(&["B", "Dr"]));
        if let GroupingTree::Split { split, .. } = &mut t {
            split.degenerate = true;
        }
        let sig = canonical_signature(&t, Some("Dr"));
        assert_eq!(sig.as_str(), "⊥A - BDr");
        assert!(sig.is_degenerate());
        assert!(!sig.isolates("Dr"));
    }

    #[test]
    fn parse_and_relabel() {
        let labels: Vec<String> = ["A", "B", "C", "Dr"].iter().map(|s| s.to_string()).collect();
        let sig = Signature::from_raw("A - (B)(CDr)");
        let parsed = sig.parse(&labels).unwrap();
        assert_eq!(parsed.render(Some("Dr")), sig);
        let swapped = parsed.relabel(|l| match l {
            "A" => "C".into(),
            "C" => "A".into(),
            o => o.into(),
        }, Some("Dr"));
        assert_eq!(swapped.as_str(), "C - (ADr)(B)");
        assert!(Signature::from_raw("AB - Dr").isolates("Dr"));
    }

    #[test]
    fn ambiguous_labels_are_rejected() {
        let labels: Vec<String> = ["A", "AB", "B", "Dr"].iter().map(|s| s.to_string()).collect();
        assert!(Signature::from_raw("AB - Dr").parse(&labels).is_err());
        assert!(Signature::from_raw("X - Dr").parse(&labels).is_err());
        assert!(Signature::from_raw("A - (B)Dr").parse(&labels).is_err());
    }
}
