//! Corpus ingestion: IOB parsing, validation, entity abstraction, and grouping
//! of templates per intent.

mod conll;
mod records;
mod sentence;
mod template;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use conll::{parse_conll, write_conll_block, INTENT_HEADER};
pub use records::{parse_records, record_line, Record};
pub use sentence::{span_tags, AnnotatedSentence, Tag};
pub use template::{abstract_entities, fill_template, render_segments, EntityMention, Segment, SentenceTemplate};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sentence}: {tokens} tokens but {slots} slots")]
    LengthMismatch {
        sentence: usize,
        tokens: usize,
        slots: usize,
    },
    #[error("sentence {sentence}, token {position}: {message}")]
    Iob {
        sentence: usize,
        position: usize,
        message: String,
    },
    #[error("sentence {sentence} has no intent and no default intent was given")]
    MissingIntent { sentence: usize },
    #[error("empty dataset")]
    Empty,
    #[error("invalid lexicon document: {0}")]
    Lexicon(String),
}

/// Input corpus encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Conll,
    Records,
}

impl CorpusFormat {
    pub fn parse(self, text: &str) -> Result<Vec<AnnotatedSentence>, DatasetError> {
        match self {
            CorpusFormat::Conll => parse_conll(text),
            CorpusFormat::Records => parse_records(text),
        }
    }

    /// Every problem in `text`: all sentence-level IOB and alignment
    /// failures, then the first syntax error if one stops the parse.
    pub fn check(self, text: &str) -> Vec<DatasetError> {
        let mut issues = Vec::new();
        let result = match self {
            CorpusFormat::Conll => conll::parse_conll_collecting(text, Some(&mut issues)),
            CorpusFormat::Records => records::parse_records_collecting(text, Some(&mut issues)),
        };
        if let Err(e) = result {
            issues.push(e);
        }
        issues
    }
}

/// Surface forms seen for each slot label, with occurrence counts.
///
/// Forms are token sequences, stored verbatim (case-sensitive).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EntityLexicon {
    entries: BTreeMap<String, BTreeMap<Vec<String>, u64>>,
}

impl EntityLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: &str, surface: Vec<String>, count: u64) {
        if count == 0 || surface.is_empty() {
            return;
        }
        *self
            .entries
            .entry(label.to_string())
            .or_default()
            .entry(surface)
            .or_default() += count;
    }

    pub fn forms(&self, label: &str) -> Option<&BTreeMap<Vec<String>, u64>> {
        self.entries.get(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.entries.get(label).is_some_and(|f| !f.is_empty())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeMap<Vec<String>, u64>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// JSON document `{label: {"surface form": count}}`.
    pub fn to_json(&self) -> String {
        let doc: BTreeMap<&str, BTreeMap<String, u64>> = self
            .entries
            .iter()
            .map(|(label, forms)| (label.as_str(), forms.iter().map(|(f, c)| (f.join(" "), *c)).collect()))
            .collect();
        let mut out = serde_json::to_string_pretty(&doc).expect("lexicon serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, DatasetError> {
        let doc: BTreeMap<String, BTreeMap<String, u64>> =
            serde_json::from_str(text).map_err(|e| DatasetError::Lexicon(e.to_string()))?;
        let mut lexicon = EntityLexicon::new();
        for (label, forms) in doc {
            for (form, count) in forms {
                let surface: Vec<String> = form.split_whitespace().map(str::to_string).collect();
                if surface.is_empty() || count == 0 {
                    return Err(DatasetError::Lexicon(format!(
                        "slot {label:?}: empty form or zero count"
                    )));
                }
                lexicon.add(&label, surface, count);
            }
        }
        Ok(lexicon)
    }
}

/// Sentences plus their per-intent templates and the aggregated lexicon.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub sentences: Vec<AnnotatedSentence>,
    /// Templates per intent in first-occurrence order, identical ones merged.
    pub by_intent: BTreeMap<String, Vec<SentenceTemplate>>,
    pub lexicon: EntityLexicon,
}

impl Dataset {
    /// Number of training sentences per intent.
    pub fn intent_sizes(&self) -> BTreeMap<String, usize> {
        self.by_intent
            .iter()
            .map(|(intent, templates)| {
                let n: u64 = templates.iter().map(|t| t.source_count).sum();
                (intent.clone(), n as usize)
            })
            .collect()
    }
}

/// Groups sentences by intent; every sentence must carry one.
pub fn build_dataset(sentences: Vec<AnnotatedSentence>) -> Result<Dataset, DatasetError> {
    build_dataset_with_default(sentences, None)
}

/// Like [`build_dataset`], but sentences without an intent fall under
/// `default_intent` (for NER-only corpora).
pub fn build_dataset_with_default(
    sentences: Vec<AnnotatedSentence>,
    default_intent: Option<&str>,
) -> Result<Dataset, DatasetError> {
    if sentences.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut by_intent: BTreeMap<String, Vec<SentenceTemplate>> = BTreeMap::new();
    let mut index: HashMap<(String, Vec<Segment>), usize> = HashMap::new();
    let mut lexicon = EntityLexicon::new();

    for (i, sentence) in sentences.iter().enumerate() {
        let intent = sentence
            .intent
            .as_deref()
            .or(default_intent)
            .ok_or(DatasetError::MissingIntent { sentence: i })?;
        let (template, mentions) = abstract_entities(sentence);
        for mention in mentions {
            lexicon.add(&mention.label, mention.surface, 1);
        }
        let group = by_intent.entry(intent.to_string()).or_default();
        match index.entry((intent.to_string(), template.segments.clone())) {
            std::collections::hash_map::Entry::Occupied(slot) => {
                group[*slot.get()].source_count += 1;
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(group.len());
                group.push(template);
            }
        }
    }

    Ok(Dataset {
        sentences,
        by_intent,
        lexicon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const AIRLINE_CONLL: &str = "\
# intent: airline
which O
airlines O
have O
daily B-flight_days
flights O
from O
denver B-city_name
to O
san B-city_name
francisco I-city_name
on O
April B-month_name
1st B-day_number

# intent: airline
are O
there O
any O
monthly B-flight_days
airplanes O
from O
boston B-city_name
to O
dallas B-city_name
on O
4th B-day_number
May B-month_name

# intent: airline
show O
me O
the O
airlines O
that O
fly O
from O
Beijing B-city_name
to O
Shanghai B-city_name
please O
";

    #[test]
    fn groups_the_three_atis_sentences() {
        let dataset = build_dataset(parse_conll(AIRLINE_CONLL).unwrap()).unwrap();
        assert_eq!(dataset.by_intent.len(), 1);
        let templates = &dataset.by_intent["airline"];
        assert_eq!(templates.len(), 3);
        let cities: Vec<String> = dataset
            .lexicon
            .forms("city_name")
            .unwrap()
            .keys()
            .map(|f| f.join(" "))
            .collect();
        assert_eq!(
            cities,
            ["Beijing", "Shanghai", "boston", "dallas", "denver", "san francisco"]
        );
        assert_eq!(dataset.lexicon.len(), 4);
    }

    #[test]
    fn identical_sentences_merge() {
        let text = "# intent: a\nhi O\n\n# intent: a\nhi O\n";
        let dataset = build_dataset(parse_conll(text).unwrap()).unwrap();
        assert_eq!(dataset.by_intent["a"].len(), 1);
        assert_eq!(dataset.by_intent["a"][0].source_count, 2);
        assert_eq!(dataset.intent_sizes()["a"], 2);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert!(matches!(build_dataset(vec![]), Err(DatasetError::Empty)));
    }

    #[test]
    fn missing_intent_requires_default() {
        let sentences = parse_conll("EU B-ORG\nrejects O\n").unwrap();
        assert!(matches!(
            build_dataset(sentences.clone()),
            Err(DatasetError::MissingIntent { sentence: 0 })
        ));
        let dataset = build_dataset_with_default(sentences, Some("ALL")).unwrap();
        assert_eq!(dataset.by_intent.keys().collect::<Vec<_>>(), ["ALL"]);
    }

    #[test]
    fn lexicon_json_round_trips() {
        let dataset = build_dataset(parse_conll(AIRLINE_CONLL).unwrap()).unwrap();
        let back = EntityLexicon::from_json(&dataset.lexicon.to_json()).unwrap();
        assert_eq!(back, dataset.lexicon);
    }

    #[test]
    fn check_reports_every_bad_sentence() {
        let text = "a I-x\n\nb O\n\nc O\nd I-y\n\n";
        let issues = CorpusFormat::Conll.check(text);
        assert_eq!(issues.len(), 2);
        assert!(matches!(
            issues[0],
            DatasetError::Iob {
                sentence: 0,
                position: 0,
                ..
            }
        ));
        assert!(matches!(
            issues[1],
            DatasetError::Iob {
                sentence: 2,
                position: 1,
                ..
            }
        ));
        assert!(CorpusFormat::Conll.check("a O\n").is_empty());

        let records = "{\"tokens\":[\"a\"],\"slots\":[\"I-x\"]}\nnot json\n";
        let issues = CorpusFormat::Records.check(records);
        assert_eq!(issues.len(), 2);
        assert!(matches!(issues[1], DatasetError::Parse { line: 2, .. }));
    }
}
