use std::collections::BTreeMap;

use crate::dataset::SentenceTemplate;

/// Per-label sentence counts for one intent, kept as exact ratios.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityOccurrence {
    /// Sentences in the group (source counts included).
    pub total: u64,
    /// Sentences containing at least one placeholder of each label.
    pub counts: BTreeMap<String, u64>,
}

impl EntityOccurrence {
    pub fn ratio(&self, label: &str) -> Option<(u64, u64)> {
        self.counts.get(label).map(|&c| (c, self.total))
    }

    pub fn fraction(&self, label: &str) -> Option<f64> {
        self.counts.get(label).map(|&c| c as f64 / self.total as f64)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Labels by descending count, ties by label.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut ranked: Vec<(&str, u64)> = self.counts.iter().map(|(l, &c)| (l.as_str(), c)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked
    }
}

pub fn entity_occurrence(templates: &[SentenceTemplate]) -> EntityOccurrence {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut total = 0;
    for template in templates {
        total += template.source_count;
        let mut labels: Vec<&str> = template.placeholders().collect();
        labels.sort_unstable();
        labels.dedup();
        for label in labels {
            *counts.entry(label.to_string()).or_default() += template.source_count;
        }
    }
    EntityOccurrence { total, counts }
}

/// Labels occurring in more than `threshold` of the sentences, most frequent
/// first; when none qualifies, the single most frequent label.
///
/// Returns an empty list only for an intent without entities.
pub fn determine_main_entities(occurrence: &EntityOccurrence, threshold: f64) -> Vec<String> {
    let ranked = occurrence.ranked();
    let above: Vec<String> = ranked
        .iter()
        .filter(|(_, c)| *c as f64 / occurrence.total as f64 > threshold)
        .map(|(l, _)| l.to_string())
        .collect();
    if !above.is_empty() {
        return above;
    }
    ranked.first().map(|(l, _)| vec![l.to_string()]).unwrap_or_default()
}
