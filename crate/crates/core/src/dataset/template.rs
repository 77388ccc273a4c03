use std::fmt;

use super::sentence::{AnnotatedSentence, Tag};

/// One position of an entity-abstracted sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    Literal(String),
    Placeholder(String),
}

impl Segment {
    pub fn placeholder_label(&self) -> Option<&str> {
        match self {
            Segment::Placeholder(label) => Some(label),
            Segment::Literal(_) => None,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Literal(token) => f.write_str(token),
            Segment::Placeholder(label) => write!(f, "<{label}>"),
        }
    }
}

/// Renders segments space-joined, placeholders as `<label>`.
pub fn render_segments(segments: &[Segment]) -> String {
    let mut out = String::new();
    for (i, segment) in segments.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&segment.to_string());
    }
    out
}

/// A sentence with its entity spans replaced by slot placeholders.
///
/// `source_count` is the number of identical templates merged into this one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SentenceTemplate {
    pub segments: Vec<Segment>,
    pub source_count: u64,
}

impl SentenceTemplate {
    pub fn new(segments: Vec<Segment>) -> Self {
        SentenceTemplate {
            segments,
            source_count: 1,
        }
    }

    pub fn placeholders(&self) -> impl Iterator<Item = &str> {
        self.segments.iter().filter_map(Segment::placeholder_label)
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.placeholders().any(|p| p == label)
    }
}

impl fmt::Display for SentenceTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_segments(&self.segments))
    }
}

/// An entity extracted during abstraction: slot label and its surface tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EntityMention {
    pub label: String,
    pub surface: Vec<String>,
}

impl EntityMention {
    pub fn surface_text(&self) -> String {
        self.surface.join(" ")
    }
}

/// Replaces every maximal B-/I- span with a placeholder for its label.
///
/// Expects a sentence that already passed IOB validation.
pub fn abstract_entities(sentence: &AnnotatedSentence) -> (SentenceTemplate, Vec<EntityMention>) {
    let mut segments = Vec::with_capacity(sentence.tokens.len());
    let mut mentions: Vec<EntityMention> = Vec::new();

    for (token, tag) in sentence.tokens.iter().zip(&sentence.slots) {
        match tag {
            Tag::Outside => segments.push(Segment::Literal(token.clone())),
            Tag::Begin(label) => {
                segments.push(Segment::Placeholder(label.clone()));
                mentions.push(EntityMention {
                    label: label.clone(),
                    surface: vec![token.clone()],
                });
            }
            Tag::Inside(_) => {
                // validated input: an I- always extends the last mention
                if let Some(mention) = mentions.last_mut() {
                    mention.surface.push(token.clone());
                }
            }
        }
    }
    (SentenceTemplate::new(segments), mentions)
}

/// Re-inserts mentions into a template's placeholders, in order.
pub fn fill_template(segments: &[Segment], mentions: &[EntityMention]) -> (Vec<String>, Vec<Tag>) {
    let mut tokens = Vec::new();
    let mut slots = Vec::new();
    let mut mentions = mentions.iter();
    for segment in segments {
        match segment {
            Segment::Literal(token) => {
                tokens.push(token.clone());
                slots.push(Tag::Outside);
            }
            Segment::Placeholder(label) => {
                let Some(mention) = mentions.next() else {
                    break;
                };
                tokens.extend(mention.surface.iter().cloned());
                slots.extend(super::sentence::span_tags(label, mention.surface.len()));
            }
        }
    }
    (tokens, slots)
}
