//! Seeded fixtures: random valid trees, ground-truth intents with lexicons,
//! corpora sampled from them, and word-vector tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::dataset::{write_conll_block, AnnotatedSentence, EntityLexicon};
use crate::east::{East, EastNode};
use crate::embeddings::EmbeddingTable;
use crate::generator::{GenerateError, GenerationConfig, Generator, Sampler};

const WORDS: &[&str] = &[
    "show",
    "me",
    "list",
    "all",
    "the",
    "flights",
    "fares",
    "from",
    "to",
    "on",
    "please",
    "which",
    "airlines",
    "fly",
    "what",
    "is",
    "cheapest",
    "ticket",
    "i",
    "want",
    "need",
    "a",
    "book",
    "find",
    "leaving",
    "arriving",
    "before",
    "after",
    "with",
    "stop",
    "in",
    "at",
    "morning",
    "evening",
    "nonstop",
    "round",
    "trip",
    "one",
    "way",
    "are",
    "there",
    "any",
    "how",
    "much",
    "does",
    "cost",
    "can",
    "you",
    "tell",
    "about",
    "ground",
    "transportation",
    "airport",
    "meal",
    "served",
];

const SLOTS: &[(&str, &[&str])] = &[
    (
        "city_name",
        &[
            "boston",
            "denver",
            "atlanta",
            "dallas",
            "pittsburgh",
            "san francisco",
            "new york",
            "st. louis",
        ],
    ),
    (
        "airline_name",
        &["delta", "united", "american", "us air", "continental"],
    ),
    ("day_name", &["monday", "tuesday", "wednesday", "friday", "sunday"]),
    ("month_name", &["may", "june", "july", "august", "december"]),
    ("day_number", &["1st", "2nd", "fifth", "twelfth", "23rd"]),
    ("period_of_day", &["morning", "afternoon", "evening", "late night"]),
    ("flight_number", &["1291", "nw 838", "296"]),
    ("class_type", &["first class", "coach", "business"]),
];

/// Shape bounds for [`random_tree`].
#[derive(Debug, Clone)]
pub struct TreeShape {
    pub max_depth: usize,
    pub max_children: usize,
    pub max_phrases: usize,
    /// Probability that a non-entity, non-root node carries a dropout.
    pub dropout_rate: f64,
    pub slots: Vec<String>,
}

impl Default for TreeShape {
    fn default() -> Self {
        TreeShape {
            max_depth: 3,
            max_children: 3,
            max_phrases: 3,
            dropout_rate: 0.3,
            slots: SLOTS.iter().take(4).map(|(s, _)| s.to_string()).collect(),
        }
    }
}

fn phrase(sampler: &mut Sampler) -> String {
    let len = 1 + sampler.below(3);
    (0..len)
        .map(|_| WORDS[sampler.below(WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

fn fixed(sampler: &mut Sampler, max_phrases: usize) -> EastNode {
    let n = 1 + sampler.below(max_phrases.max(1));
    EastNode::fixed((0..n).map(|_| (phrase(sampler), 1 + sampler.below(5) as u64)))
}

/// Weights in (0, 1] summing to one.
fn split_weights(sampler: &mut Sampler, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| 0.1 + sampler.unit()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// A random tree that passes validation. Weights and dropouts are arbitrary
/// floats, so the tree also exercises exact number round trips.
pub fn random_tree(sampler: &mut Sampler, intent: &str, shape: &TreeShape) -> East {
    let kind = sampler.below(2);
    East::new(intent, random_control(sampler, shape, 0, true, kind))
}

fn random_node(sampler: &mut Sampler, shape: &TreeShape, depth: usize) -> EastNode {
    let leaf = depth >= shape.max_depth || sampler.bernoulli(0.5);
    let node = if leaf {
        if !shape.slots.is_empty() && sampler.bernoulli(0.4) {
            return EastNode::entity(shape.slots[sampler.below(shape.slots.len())].clone());
        }
        fixed(sampler, shape.max_phrases)
    } else {
        let kind = sampler.below(3);
        random_control(sampler, shape, depth, false, kind)
    };
    if sampler.bernoulli(shape.dropout_rate) {
        node.with_dropout(0.05 + 0.85 * sampler.unit())
    } else {
        node
    }
}

// kind: 0 order, 1 pick-one, 2 exchangeable
fn random_control(sampler: &mut Sampler, shape: &TreeShape, depth: usize, root: bool, kind: usize) -> EastNode {
    let n = 1 + sampler.below(shape.max_children.max(1));
    let children: Vec<EastNode> = (0..n).map(|_| random_node(sampler, shape, depth + 1)).collect();
    match kind {
        1 => {
            let weights = split_weights(sampler, n);
            EastNode::pick_one(
                children
                    .into_iter()
                    .zip(weights)
                    .map(|(c, w)| c.with_weight(w))
                    .collect(),
            )
        }
        2 if !root => EastNode::exchangeable(children),
        _ => {
            let children = children
                .into_iter()
                .map(|c| {
                    if sampler.bernoulli(0.3) {
                        c.with_weight(0.05 + 0.95 * sampler.unit())
                    } else {
                        c
                    }
                })
                .collect();
            EastNode::order(children)
        }
    }
}

/// A lexicon holding every slot of [`TreeShape::default`] (and more).
pub fn fixture_lexicon() -> EntityLexicon {
    let mut lexicon = EntityLexicon::new();
    for (slot, forms) in SLOTS {
        for form in *forms {
            lexicon.add(slot, form.split(' ').map(String::from).collect(), 1);
        }
    }
    lexicon
}

/// Known trees and the lexicon used to sample a corpus from them.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub trees: BTreeMap<String, East>,
    pub lexicon: EntityLexicon,
}

/// `intents` hand-shaped intents in the style of flight-booking requests:
/// a pick-one over one to three sequences of carrier phrases and entities,
/// some phrases optional, some entity pairs exchangeable.
pub fn ground_truth(seed: u64, intents: usize) -> GroundTruth {
    let mut sampler = Sampler::new(seed, 0);
    let mut trees = BTreeMap::new();
    for i in 0..intents {
        let intent = format!("intent_{i:02}");
        let branches = 1 + sampler.below(3);
        let mut children: Vec<EastNode> = (0..branches).map(|_| ground_truth_branch(&mut sampler)).collect();
        let root = if branches == 1 {
            children.pop().unwrap()
        } else {
            let weights = split_weights(&mut sampler, branches);
            EastNode::pick_one(
                children
                    .into_iter()
                    .zip(weights)
                    .map(|(c, w)| c.with_weight(w))
                    .collect(),
            )
        };
        trees.insert(intent.clone(), East::new(intent, root));
    }
    GroundTruth {
        trees,
        lexicon: fixture_lexicon(),
    }
}

fn ground_truth_branch(sampler: &mut Sampler) -> EastNode {
    let entities = 1 + sampler.below(3);
    let mut children = vec![fixed(sampler, 3)];
    for _ in 0..entities {
        let slot = SLOTS[sampler.below(SLOTS.len())].0;
        if sampler.bernoulli(0.25) {
            let other = SLOTS[sampler.below(SLOTS.len())].0;
            children.push(EastNode::exchangeable(vec![
                EastNode::entity(slot),
                EastNode::entity(other),
            ]));
        } else {
            children.push(EastNode::entity(slot));
        }
        let mut carrier = fixed(sampler, 3);
        if sampler.bernoulli(0.4) {
            carrier = carrier.with_dropout(0.2 + 0.5 * sampler.unit());
        }
        children.push(carrier);
    }
    EastNode::order(children)
}

/// Samples `sizes[intent]` sentences per intent from the ground truth, with
/// dropout on and no embeddings.
pub fn sample_corpus(
    truth: &GroundTruth,
    sizes: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<Vec<AnnotatedSentence>, GenerateError> {
    let mut config = GenerationConfig::new(seed);
    config.use_embeddings = false;
    config.amount = crate::generator::Amount::Factor(1);
    let generator = Generator::new(&truth.lexicon, None, &config)?;
    let batch = generator.generate_batch(&truth.trees, sizes)?;
    Ok(batch
        .sentences
        .into_iter()
        .map(|s| AnnotatedSentence {
            tokens: s.tokens,
            slots: s.slots,
            intent: Some(s.intent),
        })
        .collect())
}

/// Splits `total` sentences over the ground truth's intents as evenly as
/// possible, earlier intents taking the remainder.
pub fn even_sizes(truth: &GroundTruth, total: usize) -> BTreeMap<String, usize> {
    let n = truth.trees.len().max(1);
    truth
        .trees
        .keys()
        .enumerate()
        .map(|(i, intent)| (intent.clone(), total / n + usize::from(i < total % n)))
        .collect()
}

pub fn to_conll(sentences: &[AnnotatedSentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        write_conll_block(&mut out, &s.tokens, &s.slots, s.intent.as_deref());
    }
    out
}

/// Text-format word vectors: `n` rows named `tok0000`, ... followed by one
/// row per extra token, components uniform in [-1, 1) printed with six
/// decimals.
pub fn embedding_text(seed: u64, n: usize, dimension: usize, extra: &[&str]) -> String {
    let mut sampler = Sampler::new(seed, 0);
    let mut out = String::new();
    let names = (0..n)
        .map(|i| format!("tok{i:04}"))
        .chain(extra.iter().map(|s| s.to_string()));
    for name in names {
        out.push_str(&name);
        for _ in 0..dimension {
            let _ = write!(out, " {:.6}", sampler.unit() * 2.0 - 1.0);
        }
        out.push('\n');
    }
    out
}

/// Single-token lexicon forms of [`fixture_lexicon`].
pub fn lexicon_tokens() -> Vec<&'static str> {
    SLOTS
        .iter()
        .flat_map(|(_, forms)| forms.iter().copied())
        .filter(|f| !f.contains(' '))
        .collect()
}

pub fn embedding_table(seed: u64, n: usize, dimension: usize) -> EmbeddingTable {
    EmbeddingTable::parse(&embedding_text(seed, n, dimension, &[]))
        .expect("fixture table parses")
        .0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::east::validate;

    #[test]
    fn random_trees_are_valid() {
        let mut sampler = Sampler::new(1, 0);
        for i in 0..200 {
            let tree = random_tree(&mut sampler, &format!("i{i}"), &TreeShape::default());
            assert!(validate(&tree).is_empty(), "{:?}", validate(&tree));
        }
    }

    #[test]
    fn ground_truth_is_valid_and_sampled_exactly() {
        let truth = ground_truth(4, 5);
        for tree in truth.trees.values() {
            assert!(validate(tree).is_empty());
        }
        let sizes = even_sizes(&truth, 500);
        assert_eq!(sizes.values().sum::<usize>(), 500);
        let corpus = sample_corpus(&truth, &sizes, 9).unwrap();
        assert_eq!(corpus.len(), 500);
        for (i, s) in corpus.iter().enumerate() {
            s.validate(i).unwrap();
        }
    }

    #[test]
    fn uneven_split() {
        let truth = ground_truth(0, 3);
        let sizes = even_sizes(&truth, 10);
        assert_eq!(sizes.values().copied().collect::<Vec<_>>(), [4, 3, 3]);
    }

    #[test]
    fn embedding_fixture_shape() {
        let table = embedding_table(2, 1000, 16);
        assert_eq!(table.len(), 1000);
        assert_eq!(table.dimension(), 16);
        let text = embedding_text(2, 3, 4, &["boston"]);
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().last().unwrap().starts_with("boston "));
    }
}
