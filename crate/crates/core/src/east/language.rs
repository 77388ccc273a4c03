use std::collections::BTreeSet;

use thiserror::Error;

use super::{permutations, phrase_tokens, East, EastNode, NodeKind};
use crate::dataset::{render_segments, Segment};

/// Every template a tree can produce, entities left as placeholders.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateLanguage {
    pub templates: BTreeSet<Vec<Segment>>,
}

impl TemplateLanguage {
    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn contains(&self, segments: &[Segment]) -> bool {
        self.templates.contains(segments)
    }

    /// Templates rendered as `show me <city_name>` strings.
    pub fn rendered(&self) -> BTreeSet<String> {
        self.templates.iter().map(|t| render_segments(t)).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("language exceeds the limit of {limit} templates (reached {reached})")]
pub struct LanguageTooLarge {
    pub limit: usize,
    pub reached: usize,
}

/// Exhaustively enumerates the templates reachable by any traversal.
///
/// With `include_dropout_variants`, every node with a positive dropout also
/// contributes its absence. Fails as soon as any intermediate set exceeds
/// `limit`.
pub fn enumerate_language(
    tree: &East,
    include_dropout_variants: bool,
    limit: usize,
) -> Result<TemplateLanguage, LanguageTooLarge> {
    let templates = Enumerator {
        dropout: include_dropout_variants,
        limit,
    }
    .node(&tree.root)?;
    Ok(TemplateLanguage { templates })
}

struct Enumerator {
    dropout: bool,
    limit: usize,
}

type Language = BTreeSet<Vec<Segment>>;

impl Enumerator {
    fn check(&self, set: Language) -> Result<Language, LanguageTooLarge> {
        if set.len() > self.limit {
            Err(LanguageTooLarge {
                limit: self.limit,
                reached: set.len(),
            })
        } else {
            Ok(set)
        }
    }

    fn node(&self, node: &EastNode) -> Result<Language, LanguageTooLarge> {
        let mut set = match node.kind {
            NodeKind::FixedContent => node
                .dictionary
                .keys()
                .map(|p| phrase_tokens(p).map(|t| Segment::Literal(t.to_string())).collect())
                .collect(),
            NodeKind::EntityContent => {
                let slot = node.slot.clone().unwrap_or_default();
                Language::from([vec![Segment::Placeholder(slot)]])
            }
            NodeKind::Order => {
                let parts = node
                    .children
                    .iter()
                    .map(|c| self.node(c))
                    .collect::<Result<Vec<_>, _>>()?;
                self.concat(&parts.iter().collect::<Vec<_>>())?
            }
            NodeKind::PickOne => {
                let mut union = Language::new();
                for child in &node.children {
                    union.extend(self.node(child)?);
                    union = self.check(union)?;
                }
                union
            }
            NodeKind::Exchangeable => {
                let parts = node
                    .children
                    .iter()
                    .map(|c| self.node(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut union = Language::new();
                for order in permutations(parts.len()) {
                    let ordered: Vec<&Language> = order.iter().map(|&i| &parts[i]).collect();
                    union.extend(self.concat(&ordered)?);
                    union = self.check(union)?;
                }
                union
            }
        };
        if self.dropout && node.kind != NodeKind::EntityContent && node.dropout_probability() > 0.0 {
            set.insert(Vec::new());
        }
        self.check(set)
    }

    fn concat(&self, parts: &[&Language]) -> Result<Language, LanguageTooLarge> {
        let mut acc = Language::from([Vec::new()]);
        for part in parts {
            let mut next = Language::new();
            for prefix in &acc {
                for suffix in part.iter() {
                    let mut joined = prefix.clone();
                    joined.extend(suffix.iter().cloned());
                    next.insert(joined);
                }
                if next.len() > self.limit {
                    return Err(LanguageTooLarge {
                        limit: self.limit,
                        reached: next.len(),
                    });
                }
            }
            acc = next;
        }
        Ok(acc)
    }
}
