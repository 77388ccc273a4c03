use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::DatasetError;

/// A single IOB slot tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Outside,
    Begin(String),
    Inside(String),
}

impl Tag {
    /// Slot label carried by a `B-`/`I-` tag.
    pub fn label(&self) -> Option<&str> {
        match self {
            Tag::Outside => None,
            Tag::Begin(label) | Tag::Inside(label) => Some(label),
        }
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Tag::Outside)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Outside => f.write_str("O"),
            Tag::Begin(label) => write!(f, "B-{label}"),
            Tag::Inside(label) => write!(f, "I-{label}"),
        }
    }
}

impl FromStr for Tag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "O" {
            return Ok(Tag::Outside);
        }
        let (prefix, label) = s.split_once('-').ok_or_else(|| format!("malformed tag {s:?}"))?;
        if label.is_empty() || label.chars().any(char::is_whitespace) {
            return Err(format!("malformed tag {s:?}"));
        }
        match prefix {
            "B" => Ok(Tag::Begin(label.to_string())),
            "I" => Ok(Tag::Inside(label.to_string())),
            _ => Err(format!("malformed tag {s:?}")),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A tokenized utterance with aligned IOB slot tags and an optional intent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotatedSentence {
    pub tokens: Vec<String>,
    pub slots: Vec<Tag>,
    pub intent: Option<String>,
}

impl AnnotatedSentence {
    /// Builds a sentence, checking alignment and IOB transitions.
    ///
    /// `index` only feeds error messages.
    pub fn new(
        tokens: Vec<String>,
        slots: Vec<Tag>,
        intent: Option<String>,
        index: usize,
    ) -> Result<Self, DatasetError> {
        let sentence = AnnotatedSentence { tokens, slots, intent };
        sentence.validate(index)?;
        Ok(sentence)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn validate(&self, index: usize) -> Result<(), DatasetError> {
        if self.tokens.len() != self.slots.len() {
            return Err(DatasetError::LengthMismatch {
                sentence: index,
                tokens: self.tokens.len(),
                slots: self.slots.len(),
            });
        }
        check_iob(&self.slots).map_err(|(position, message)| DatasetError::Iob {
            sentence: index,
            position,
            message,
        })
    }
}

/// Checks that every `I-x` continues a `B-x`/`I-x` run.
pub(crate) fn check_iob(slots: &[Tag]) -> Result<(), (usize, String)> {
    let mut previous: Option<&str> = None;
    for (position, tag) in slots.iter().enumerate() {
        match tag {
            Tag::Outside => previous = None,
            Tag::Begin(label) => previous = Some(label),
            Tag::Inside(label) => {
                if previous != Some(label.as_str()) {
                    return Err((
                        position,
                        match previous {
                            Some(other) => format!("I-{label} follows a {other} span"),
                            None => format!("I-{label} does not continue a span"),
                        },
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Tags a span of `len` tokens with `B-label I-label ...`.
pub fn span_tags(label: &str, len: usize) -> impl Iterator<Item = Tag> + '_ {
    (0..len).map(move |i| {
        if i == 0 {
            Tag::Begin(label.to_string())
        } else {
            Tag::Inside(label.to_string())
        }
    })
}
