//! Automatic tree induction from an annotated dataset.
//!
//! Per intent: measure how often each slot label occurs, take the frequent
//! labels as main entities, lay the most common main-entity sequence down as a
//! spine, grow every template into it (or into a separate pick-one branch when
//! its main entities differ), compute weights and dropouts, and finally wrap
//! entity pairs that occur in both orders in exchangeable nodes.

mod draft;
mod exchange;
mod occurrence;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::dataset::{Dataset, SentenceTemplate};
use crate::east::{validate, East, Violation};

pub use draft::{skeleton, TreeDraft};
pub use exchange::{detect_exchangeable, exchangeable_pairs};
pub use occurrence::{determine_main_entities, entity_occurrence, EntityOccurrence};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("main entity threshold must lie in (0, 1), got {0}")]
    Threshold(f64),
    #[error("tree for intent {intent:?} failed validation: {violations:?}")]
    Invalid { intent: String, violations: Vec<Violation> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuilderConfig {
    threshold: f64,
    /// Keep only the most frequent main entity instead of every label above
    /// the threshold.
    pub single_main_entity: bool,
}

impl BuilderConfig {
    pub fn new(threshold: f64) -> Result<Self, BuildError> {
        if threshold > 0.0 && threshold < 1.0 {
            Ok(BuilderConfig {
                threshold,
                single_main_entity: false,
            })
        } else {
            Err(BuildError::Threshold(threshold))
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

impl Default for BuilderConfig {
    fn default() -> Self {
        BuilderConfig::new(DEFAULT_THRESHOLD).unwrap()
    }
}

/// Builds one tree per intent.
pub fn build(dataset: &Dataset, config: &BuilderConfig) -> Result<BTreeMap<String, East>, BuildError> {
    let mut trees = BTreeMap::new();
    for (intent, templates) in &dataset.by_intent {
        match build_intent(intent, templates, config)? {
            Some(tree) => {
                trees.insert(intent.clone(), tree);
            }
            None => log::warn!("intent {intent:?} has no templates, skipped"),
        }
    }
    Ok(trees)
}

/// Runs the whole pipeline for one intent's templates.
pub fn build_intent(
    intent: &str,
    templates: &[SentenceTemplate],
    config: &BuilderConfig,
) -> Result<Option<East>, BuildError> {
    if templates.is_empty() {
        return Ok(None);
    }
    let occurrence = entity_occurrence(templates);
    let mut main = determine_main_entities(&occurrence, config.threshold);
    if config.single_main_entity {
        main.truncate(1);
    }
    let mut draft = skeleton(intent, &main, templates);
    for template in templates {
        draft.grow(template);
    }
    let tree = detect_exchangeable(draft.finalize(), templates);

    let violations = validate(&tree);
    if !violations.is_empty() {
        return Err(BuildError::Invalid {
            intent: intent.to_string(),
            violations,
        });
    }
    Ok(Some(tree))
}
