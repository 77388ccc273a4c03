//! Mock sentence generation by weighted traversal of a tree.
//!
//! Order nodes expand every child in turn, pick-one nodes one child drawn by
//! weight, exchangeable nodes all children in a uniformly random order. A node
//! with dropout `d` is skipped with probability `d` before it expands (entity
//! leaves never are). Fixed content draws a phrase in proportion to its
//! dictionary count. Entity content draws a candidate from the lexicon and,
//! when embeddings are enabled and the candidate is a single known token,
//! replaces it by a draw from the candidate and its nearest neighbors weighted
//! by cosine similarity (the candidate itself weighs 1).

mod emit;
mod rng;

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::dataset::{span_tags, EntityLexicon, Tag};
use crate::east::{phrase_tokens, East, EastNode, NodeKind};
use crate::embeddings::EmbeddingTable;

pub use emit::{emit, OutputFormat};
pub use rng::Sampler;

pub const DEFAULT_K: usize = 5;
pub const DEFAULT_FACTOR: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("no lexicon entries for slot {0:?}")]
    MissingSlot(String),
    #[error("invalid generation config: {0}")]
    Config(String),
    #[error("node has nothing to choose from")]
    EmptyChoice,
}

/// How many sentences to emit per intent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Amount {
    /// Multiple of the intent's training size.
    Factor(usize),
    /// Fixed number per intent.
    Count(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntitySampling {
    /// Every distinct surface form equally likely.
    #[default]
    Uniform,
    /// Forms drawn in proportion to their training counts.
    Frequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NeighborScope {
    /// Neighbors come from the whole embedding vocabulary.
    #[default]
    Vocabulary,
    /// Neighbors come from the single-token forms of the same slot.
    Lexicon,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationConfig {
    pub k: usize,
    pub seed: u64,
    pub amount: Amount,
    pub use_embeddings: bool,
    pub apply_dropout: bool,
    pub entity_sampling: EntitySampling,
    pub neighbor_scope: NeighborScope,
}

impl GenerationConfig {
    pub fn new(seed: u64) -> Self {
        GenerationConfig {
            k: DEFAULT_K,
            seed,
            amount: Amount::Factor(DEFAULT_FACTOR),
            use_embeddings: true,
            apply_dropout: true,
            entity_sampling: EntitySampling::Uniform,
            neighbor_scope: NeighborScope::Vocabulary,
        }
    }

    pub fn check(&self) -> Result<(), GenerateError> {
        if self.k == 0 {
            return Err(GenerateError::Config("k must be at least 1".into()));
        }
        match self.amount {
            Amount::Factor(0) => Err(GenerateError::Config("factor must be at least 1".into())),
            Amount::Count(0) => Err(GenerateError::Config("count must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// One decision taken during traversal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choice {
    Dropout {
        dropped: bool,
    },
    Branch(usize),
    /// Child order chosen at an exchangeable node.
    Permutation(Vec<usize>),
    /// Index of the phrase in the dictionary's sorted order.
    Phrase(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSentence {
    pub tokens: Vec<String>,
    pub slots: Vec<Tag>,
    pub intent: String,
    /// Structural choices in traversal order; entity fills are not included.
    pub provenance: Vec<Choice>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GenerationStats {
    pub per_intent: BTreeMap<String, usize>,
    pub total: usize,
    pub entity_fills: usize,
    /// Fills that replaced the lexicon candidate with a neighbor.
    pub neighbor_substitutions: usize,
    /// Single-token candidates missing from the embedding table.
    pub oov_candidates: usize,
    /// Multi-token candidates, always used verbatim.
    pub multi_token_candidates: usize,
    pub duplicates: usize,
    pub duplicate_rate: f64,
}

#[derive(Debug, Clone)]
pub struct Batch {
    pub sentences: Vec<GeneratedSentence>,
    pub stats: GenerationStats,
}

#[derive(Debug)]
struct SlotPool {
    forms: Vec<Vec<String>>,
    counts: Vec<f64>,
    // per form: candidate plus neighbors with similarity weights, when the form
    // is a single in-vocabulary token
    neighbors: Vec<Option<Vec<(String, f64)>>>,
}

/// Shared read-only inputs for traversal.
#[derive(Debug)]
pub struct Generator<'a> {
    config: &'a GenerationConfig,
    pools: BTreeMap<&'a str, SlotPool>,
}

impl<'a> Generator<'a> {
    pub fn new(
        lexicon: &'a EntityLexicon,
        table: Option<&'a EmbeddingTable>,
        config: &'a GenerationConfig,
    ) -> Result<Self, GenerateError> {
        config.check()?;
        let table = table.filter(|_| config.use_embeddings);
        let mut pools = BTreeMap::new();
        for (slot, forms) in lexicon.iter() {
            let single: Vec<&str> = forms.keys().filter(|f| f.len() == 1).map(|f| f[0].as_str()).collect();
            let neighbors = forms
                .keys()
                .map(|form| {
                    let table = table?;
                    let [token] = form.as_slice() else {
                        return None;
                    };
                    let near = match config.neighbor_scope {
                        NeighborScope::Vocabulary => table.k_nearest(token, config.k),
                        NeighborScope::Lexicon => table.k_nearest_among(token, config.k, single.iter().copied()),
                    }?;
                    let mut pool = Vec::with_capacity(near.len() + 1);
                    pool.push((token.clone(), 1.0));
                    pool.extend(near);
                    Some(pool)
                })
                .collect();
            pools.insert(
                slot,
                SlotPool {
                    forms: forms.keys().cloned().collect(),
                    counts: forms.values().map(|&c| c as f64).collect(),
                    neighbors,
                },
            );
        }
        Ok(Generator { config, pools })
    }

    /// Checks that every entity slot of `tree` has lexicon entries.
    pub fn check_tree(&self, tree: &East) -> Result<(), GenerateError> {
        for slot in tree.root.entity_slots() {
            if !self.pools.get(slot).is_some_and(|p| !p.forms.is_empty()) {
                return Err(GenerateError::MissingSlot(slot.to_string()));
            }
        }
        Ok(())
    }

    pub fn generate_one(&self, tree: &East, sampler: &mut Sampler) -> Result<GeneratedSentence, GenerateError> {
        self.generate_counted(tree, sampler, &mut GenerationStats::default())
    }

    fn generate_counted(
        &self,
        tree: &East,
        sampler: &mut Sampler,
        stats: &mut GenerationStats,
    ) -> Result<GeneratedSentence, GenerateError> {
        let mut walk = Walk {
            generator: self,
            sampler,
            stats,
            sentence: GeneratedSentence {
                tokens: Vec::new(),
                slots: Vec::new(),
                intent: tree.intent.clone(),
                provenance: Vec::new(),
            },
        };
        walk.node(&tree.root)?;
        Ok(walk.sentence)
    }

    /// Generates every intent's quota. Intents draw from independent streams
    /// keyed by the intent label, so each intent's output depends only on the
    /// seed, its tree, and the shared lexicon and embeddings.
    pub fn generate_batch(
        &self,
        trees: &BTreeMap<String, East>,
        training_sizes: &BTreeMap<String, usize>,
    ) -> Result<Batch, GenerateError> {
        let mut stats = GenerationStats::default();
        let mut sentences = Vec::new();
        for (intent, tree) in trees {
            self.check_tree(tree)?;
            let n = match self.config.amount {
                Amount::Factor(f) => f * training_sizes.get(intent).copied().unwrap_or(0),
                Amount::Count(c) => c,
            };
            let mut sampler = Sampler::new(self.config.seed, stream_id(intent));
            for _ in 0..n {
                sentences.push(self.generate_counted(tree, &mut sampler, &mut stats)?);
            }
            stats.per_intent.insert(intent.clone(), n);
        }

        let mut seen = HashSet::with_capacity(sentences.len());
        for s in &sentences {
            if !seen.insert((&s.intent, &s.tokens, &s.slots)) {
                stats.duplicates += 1;
            }
        }
        stats.total = sentences.len();
        stats.duplicate_rate = if sentences.is_empty() {
            0.0
        } else {
            stats.duplicates as f64 / sentences.len() as f64
        };
        Ok(Batch { sentences, stats })
    }
}

/// FNV-1a over the intent label.
pub fn stream_id(intent: &str) -> u64 {
    intent.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

struct Walk<'g, 'a, 's> {
    generator: &'g Generator<'a>,
    sampler: &'s mut Sampler,
    stats: &'s mut GenerationStats,
    sentence: GeneratedSentence,
}

impl Walk<'_, '_, '_> {
    fn node(&mut self, node: &EastNode) -> Result<(), GenerateError> {
        let d = node.dropout_probability();
        if self.generator.config.apply_dropout && node.kind != NodeKind::EntityContent && d > 0.0 {
            let dropped = self.sampler.bernoulli(d);
            self.sentence.provenance.push(Choice::Dropout { dropped });
            if dropped {
                return Ok(());
            }
        }
        match node.kind {
            NodeKind::Order => {
                for child in &node.children {
                    self.node(child)?;
                }
            }
            NodeKind::PickOne => {
                let i = self
                    .sampler
                    .weighted(node.children.iter().map(|c| c.weight))
                    .ok_or(GenerateError::EmptyChoice)?;
                self.sentence.provenance.push(Choice::Branch(i));
                self.node(&node.children[i])?;
            }
            NodeKind::Exchangeable => {
                let mut order: Vec<usize> = (0..node.children.len()).collect();
                self.sampler.shuffle(&mut order);
                self.sentence.provenance.push(Choice::Permutation(order.clone()));
                for i in order {
                    self.node(&node.children[i])?;
                }
            }
            NodeKind::FixedContent => {
                let i = self
                    .sampler
                    .weighted(node.dictionary.values().map(|&c| c as f64))
                    .ok_or(GenerateError::EmptyChoice)?;
                self.sentence.provenance.push(Choice::Phrase(i));
                let phrase = node.dictionary.keys().nth(i).expect("index within dictionary");
                for token in phrase_tokens(phrase) {
                    self.sentence.tokens.push(token.to_string());
                    self.sentence.slots.push(Tag::Outside);
                }
            }
            NodeKind::EntityContent => {
                let slot = node.slot.as_deref().unwrap_or_default();
                self.entity(slot)?;
            }
        }
        Ok(())
    }

    fn entity(&mut self, slot: &str) -> Result<(), GenerateError> {
        let pool = self
            .generator
            .pools
            .get(slot)
            .filter(|p| !p.forms.is_empty())
            .ok_or_else(|| GenerateError::MissingSlot(slot.to_string()))?;
        let i = match self.generator.config.entity_sampling {
            EntitySampling::Uniform => self.sampler.below(pool.forms.len()),
            EntitySampling::Frequency => self
                .sampler
                .weighted(pool.counts.iter().copied())
                .ok_or(GenerateError::EmptyChoice)?,
        };
        let candidate = &pool.forms[i];
        self.stats.entity_fills += 1;

        let config = self.generator.config;
        let fill: Vec<String> = match &pool.neighbors[i] {
            Some(near) => {
                let j = self.sampler.weighted(near.iter().map(|(_, s)| *s)).unwrap_or(0);
                if j != 0 {
                    self.stats.neighbor_substitutions += 1;
                }
                vec![near[j].0.clone()]
            }
            None => {
                if config.use_embeddings {
                    if candidate.len() > 1 {
                        self.stats.multi_token_candidates += 1;
                    } else {
                        self.stats.oov_candidates += 1;
                    }
                }
                candidate.clone()
            }
        };
        self.sentence.slots.extend(span_tags(slot, fill.len()));
        self.sentence.tokens.extend(fill);
        Ok(())
    }
}
