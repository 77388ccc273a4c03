//! Lowering of a tree to anchored regular expressions over space-joined tokens.
//!
//! Order concatenates with single spaces, pick-one and fixed content become
//! alternations, exchangeable nodes alternate over every child permutation and
//! entity content becomes a named group over the slot's lexicon forms. A node
//! with dropout becomes optional together with its separating space. Weights
//! have no counterpart.
//!
//! Capture names must be unique within a pattern, so the first group for a
//! label is named after the label and later ones get a `__2`, `__3`, ...
//! suffix. Labels themselves therefore may not end in `__<digits>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use regex::{Regex, RegexBuilder};
use thiserror::Error;

use crate::dataset::{span_tags, EntityLexicon, Tag, INTENT_HEADER};
use crate::east::{permutations, phrase_tokens, East, EastNode, NodeKind};

/// First line of every bundle file.
pub const DIALECT_HEADER: &str =
    "# dialect: anchored; literals, (?:...) groups, (?<name>...) groups, alternation, ? only";

const SIZE_LIMIT: usize = 1 << 28;

#[derive(Debug, Error, PartialEq)]
pub enum RegexExportError {
    #[error("slot {0:?} has no lexicon entries")]
    EmptySlot(String),
    #[error("slot label {0:?} cannot be used as a capture name")]
    UnsupportedSlotLabel(String),
    #[error("pattern does not compile: {0}")]
    Compile(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegexBundle {
    pub intent: String,
    pub patterns: Vec<String>,
}

#[derive(Debug, Clone)]
enum Re {
    /// Already escaped text.
    Lit(String),
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    /// ` X` made optional.
    OptSpaced(Box<Re>),
    Group(String, Box<Re>),
}

/// Regex for the non-empty part of a node's language, plus whether the node
/// can also produce nothing.
struct Lowered {
    re: Re,
    nullable: bool,
}

fn alt(mut options: Vec<Re>) -> Re {
    if options.len() == 1 {
        options.pop().unwrap()
    } else {
        Re::Alt(options)
    }
}

fn escape_phrase<'a>(tokens: impl Iterator<Item = &'a str>) -> String {
    tokens.map(regex::escape).collect::<Vec<_>>().join(" ")
}

fn valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let tail_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.');
    let reserved = label
        .rsplit_once("__")
        .is_some_and(|(_, n)| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()));
    head_ok && tail_ok && !reserved
}

fn label_of(name: &str) -> &str {
    match name.rsplit_once("__") {
        Some((label, n)) if !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()) => label,
        _ => name,
    }
}

struct Lowerer<'a> {
    lexicon: &'a EntityLexicon,
}

impl Lowerer<'_> {
    fn node(&self, node: &EastNode) -> Result<Lowered, RegexExportError> {
        let mut out = match node.kind {
            NodeKind::FixedContent => Lowered {
                re: alt(node
                    .dictionary
                    .keys()
                    .map(|p| Re::Lit(escape_phrase(phrase_tokens(p))))
                    .collect()),
                nullable: false,
            },
            NodeKind::EntityContent => {
                let slot = node.slot.clone().unwrap_or_default();
                if !valid_label(&slot) {
                    return Err(RegexExportError::UnsupportedSlotLabel(slot));
                }
                let forms = self
                    .lexicon
                    .forms(&slot)
                    .filter(|f| !f.is_empty())
                    .ok_or_else(|| RegexExportError::EmptySlot(slot.clone()))?;
                let body = alt(forms
                    .keys()
                    .map(|f| Re::Lit(escape_phrase(f.iter().map(String::as_str))))
                    .collect());
                Lowered {
                    re: Re::Group(slot, Box::new(body)),
                    nullable: false,
                }
            }
            NodeKind::Order => self.sequence(node.children.iter())?,
            NodeKind::PickOne => {
                let children = node
                    .children
                    .iter()
                    .map(|c| self.node(c))
                    .collect::<Result<Vec<_>, _>>()?;
                Lowered {
                    nullable: children.iter().any(|c| c.nullable),
                    re: alt(children.into_iter().map(|c| c.re).collect()),
                }
            }
            NodeKind::Exchangeable => {
                let mut options = Vec::new();
                let mut nullable = false;
                for perm in permutations(node.children.len()) {
                    let seq = self.sequence(perm.iter().map(|&i| &node.children[i]))?;
                    nullable = seq.nullable;
                    options.push(seq.re);
                }
                Lowered {
                    re: alt(options),
                    nullable,
                }
            }
        };
        if node.kind != NodeKind::EntityContent && node.dropout_probability() > 0.0 {
            out.nullable = true;
        }
        Ok(out)
    }

    /// Children in sequence, each possibly absent. Alternates over which child
    /// is the first one present; every later nullable child is an optional
    /// spaced group.
    fn sequence<'n>(&self, children: impl Iterator<Item = &'n EastNode>) -> Result<Lowered, RegexExportError> {
        let parts = children.map(|c| self.node(c)).collect::<Result<Vec<_>, _>>()?;
        let first_required = parts.iter().position(|p| !p.nullable);
        let last_start = first_required.unwrap_or(parts.len().saturating_sub(1));
        let mut options = Vec::new();
        for start in 0..=last_start.min(parts.len().saturating_sub(1)) {
            let mut items = vec![parts[start].re.clone()];
            for part in &parts[start + 1..] {
                if part.nullable {
                    items.push(Re::OptSpaced(Box::new(part.re.clone())));
                } else {
                    items.push(Re::Lit(" ".into()));
                    items.push(part.re.clone());
                }
            }
            options.push(if items.len() == 1 {
                items.pop().unwrap()
            } else {
                Re::Cat(items)
            });
        }
        Ok(Lowered {
            re: alt(options),
            nullable: first_required.is_none(),
        })
    }
}

#[derive(Default)]
struct Printer {
    seen: BTreeMap<String, usize>,
    out: String,
}

impl Printer {
    fn atom(&mut self, re: &Re) {
        if matches!(re, Re::Alt(_)) {
            self.out.push_str("(?:");
            self.print(re);
            self.out.push(')');
        } else {
            self.print(re);
        }
    }

    fn print(&mut self, re: &Re) {
        match re {
            Re::Lit(s) => self.out.push_str(s),
            Re::Cat(items) => items.iter().for_each(|i| self.atom(i)),
            Re::Alt(options) => {
                for (i, o) in options.iter().enumerate() {
                    if i > 0 {
                        self.out.push('|');
                    }
                    self.print(o);
                }
            }
            Re::OptSpaced(inner) => {
                self.out.push_str("(?: ");
                self.atom(inner);
                self.out.push_str(")?");
            }
            Re::Group(label, inner) => {
                let n = self.seen.entry(label.clone()).or_insert(0);
                *n += 1;
                let _ = if *n == 1 {
                    write!(self.out, "(?<{label}>")
                } else {
                    write!(self.out, "(?<{label}__{n}>")
                };
                self.print(inner);
                self.out.push(')');
            }
        }
    }
}

fn pattern(lowered: &Lowered) -> String {
    let mut printer = Printer::default();
    printer.out.push('^');
    if lowered.nullable {
        printer.out.push_str("(?:");
        printer.print(&lowered.re);
        printer.out.push_str(")?");
    } else {
        printer.atom(&lowered.re);
    }
    printer.out.push('$');
    printer.out
}

fn compile(pattern: &str) -> Result<Regex, RegexExportError> {
    RegexBuilder::new(pattern)
        .size_limit(SIZE_LIMIT)
        .build()
        .map_err(|e| RegexExportError::Compile(e.to_string()))
}

/// Lowers a tree to one pattern per root pick-one branch (a single pattern
/// for any other root).
pub fn export_regex(tree: &East, lexicon: &EntityLexicon) -> Result<RegexBundle, RegexExportError> {
    let lowerer = Lowerer { lexicon };
    let root_nullable = tree.root.dropout_probability() > 0.0;
    let mut patterns = Vec::new();
    if tree.root.kind == NodeKind::PickOne {
        for branch in &tree.root.children {
            let mut lowered = lowerer.node(branch)?;
            lowered.nullable |= root_nullable;
            patterns.push(pattern(&lowered));
        }
    } else {
        patterns.push(pattern(&lowerer.node(&tree.root)?));
    }
    for p in &patterns {
        compile(p)?;
    }
    Ok(RegexBundle {
        intent: tree.intent.clone(),
        patterns,
    })
}

/// Writes bundles in file form: the dialect header, then per bundle an intent
/// header followed by one pattern per line.
pub fn write_bundles<'a>(bundles: impl IntoIterator<Item = &'a RegexBundle>) -> String {
    let mut out = String::new();
    out.push_str(DIALECT_HEADER);
    out.push('\n');
    for bundle in bundles {
        let _ = writeln!(out, "{INTENT_HEADER} {}", bundle.intent);
        for p in &bundle.patterns {
            out.push_str(p);
            out.push('\n');
        }
    }
    out
}

pub fn parse_bundles(text: &str) -> Result<Vec<RegexBundle>, RegexExportError> {
    let mut bundles: Vec<RegexBundle> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if let Some(intent) = line.strip_prefix(INTENT_HEADER) {
            let intent = intent.trim();
            if intent.is_empty() {
                return Err(RegexExportError::Parse {
                    line: line_no,
                    message: "empty intent".into(),
                });
            }
            bundles.push(RegexBundle {
                intent: intent.to_string(),
                patterns: Vec::new(),
            });
        } else if line.starts_with('#') || line.trim().is_empty() {
            continue;
        } else {
            let Some(bundle) = bundles.last_mut() else {
                return Err(RegexExportError::Parse {
                    line: line_no,
                    message: "pattern before any intent header".into(),
                });
            };
            compile(line).map_err(|e| RegexExportError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            bundle.patterns.push(line.to_string());
        }
    }
    Ok(bundles)
}

/// Bundles compiled for matching. Matching tries bundles, then patterns, in
/// order and reports the first full match.
#[derive(Debug, Clone)]
pub struct CompiledBundles {
    entries: Vec<(String, Regex)>,
}

impl CompiledBundles {
    pub fn new<'a>(bundles: impl IntoIterator<Item = &'a RegexBundle>) -> Result<Self, RegexExportError> {
        let mut entries = Vec::new();
        for bundle in bundles {
            for p in &bundle.patterns {
                entries.push((bundle.intent.clone(), compile(p)?));
            }
        }
        Ok(CompiledBundles { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Intent and IOB tags of the first matching pattern. Tokens are joined
    /// with single spaces; a capture that does not fall on token boundaries
    /// (possible only for tokens containing spaces) makes that pattern fail.
    pub fn match_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Option<(String, Vec<Tag>)> {
        let mut text = String::new();
        let mut starts = Vec::with_capacity(tokens.len());
        let mut ends = Vec::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                text.push(' ');
            }
            starts.push(text.len());
            text.push_str(t.as_ref());
            ends.push(text.len());
        }
        'patterns: for (intent, re) in &self.entries {
            let Some(caps) = re.captures(&text) else {
                continue;
            };
            let mut tags = vec![Tag::Outside; tokens.len()];
            for (i, name) in re.capture_names().enumerate() {
                let (Some(name), Some(m)) = (name, caps.get(i)) else {
                    continue;
                };
                let (Ok(first), Ok(last)) = (starts.binary_search(&m.start()), ends.binary_search(&m.end())) else {
                    continue 'patterns;
                };
                if last < first {
                    continue 'patterns;
                }
                for (slot, tag) in tags[first..=last]
                    .iter_mut()
                    .zip(span_tags(label_of(name), last + 1 - first))
                {
                    *slot = tag;
                }
            }
            return Some((intent.clone(), tags));
        }
        None
    }
}
