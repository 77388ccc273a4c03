//! Entity aware syntax trees.
//!
//! One ordered tree per intent. Control nodes (`Order`, `PickOne`,
//! `Exchangeable`) shape traversal; content leaves emit tokens, either phrases
//! from a dictionary (`FixedContent`) or slot-tagged entities
//! (`EntityContent`). Every node carries a weight, meaningful under a
//! `PickOne` parent, and an optional dropout probability.

mod document;
mod language;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

pub use document::{DocumentError, EAST_DOCUMENT_KINDS};
pub use language::{enumerate_language, LanguageTooLarge, TemplateLanguage};
pub use validate::{validate, validate_forest, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Order,
    PickOne,
    Exchangeable,
    FixedContent,
    EntityContent,
}

impl NodeKind {
    pub fn is_control(self) -> bool {
        matches!(self, NodeKind::Order | NodeKind::PickOne | NodeKind::Exchangeable)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Order => "order",
            NodeKind::PickOne => "pickone",
            NodeKind::Exchangeable => "exchangeable",
            NodeKind::FixedContent => "fixed",
            NodeKind::EntityContent => "entity",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EastNode {
    pub kind: NodeKind,
    pub weight: f64,
    pub dropout: Option<f64>,
    pub children: Vec<EastNode>,
    /// Space-joined phrase -> observed count. `FixedContent` only.
    pub dictionary: BTreeMap<String, u64>,
    /// `EntityContent` only.
    pub slot: Option<String>,
}

impl EastNode {
    fn bare(kind: NodeKind) -> Self {
        EastNode {
            kind,
            weight: 1.0,
            dropout: None,
            children: Vec::new(),
            dictionary: BTreeMap::new(),
            slot: None,
        }
    }

    pub fn order(children: Vec<EastNode>) -> Self {
        EastNode {
            children,
            ..Self::bare(NodeKind::Order)
        }
    }

    /// A pick-one node; child weights are taken as given.
    pub fn pick_one(children: Vec<EastNode>) -> Self {
        EastNode {
            children,
            ..Self::bare(NodeKind::PickOne)
        }
    }

    /// A pick-one node whose child weights are set uniformly.
    pub fn pick_one_uniform(mut children: Vec<EastNode>) -> Self {
        let w = 1.0 / children.len().max(1) as f64;
        for child in &mut children {
            child.weight = w;
        }
        Self::pick_one(children)
    }

    pub fn exchangeable(children: Vec<EastNode>) -> Self {
        EastNode {
            children,
            ..Self::bare(NodeKind::Exchangeable)
        }
    }

    pub fn fixed<I, S>(phrases: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: Into<String>,
    {
        let mut dictionary = BTreeMap::new();
        for (phrase, count) in phrases {
            *dictionary.entry(phrase.into()).or_insert(0) += count;
        }
        EastNode {
            dictionary,
            ..Self::bare(NodeKind::FixedContent)
        }
    }

    pub fn entity(slot: impl Into<String>) -> Self {
        EastNode {
            slot: Some(slot.into()),
            ..Self::bare(NodeKind::EntityContent)
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_dropout(mut self, dropout: f64) -> Self {
        self.dropout = Some(dropout);
        self
    }

    /// Dropout probability, zero when unset.
    pub fn dropout_probability(&self) -> f64 {
        self.dropout.unwrap_or(0.0)
    }

    pub fn is_leaf(&self) -> bool {
        !self.kind.is_control()
    }

    /// Depth-first pre-order walk.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a EastNode)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }

    /// Slot labels of all entity leaves, deduplicated and sorted.
    pub fn entity_slots(&self) -> Vec<&str> {
        let mut slots = Vec::new();
        self.walk(&mut |n| {
            if let Some(slot) = &n.slot {
                slots.push(slot.as_str());
            }
        });
        slots.sort_unstable();
        slots.dedup();
        slots
    }
}

/// The tree for one intent.
#[derive(Debug, Clone, PartialEq)]
pub struct East {
    pub intent: String,
    pub root: EastNode,
}

impl East {
    pub fn new(intent: impl Into<String>, root: EastNode) -> Self {
        East {
            intent: intent.into(),
            root,
        }
    }
}

/// Tokens of a dictionary phrase.
pub fn phrase_tokens(phrase: &str) -> impl Iterator<Item = &str> {
    phrase.split(' ')
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(current.clone());
    }
}
