//! One JSON object per line: `{"tokens": [...], "slots": [...], "intent": "..."}`.

use serde::{Deserialize, Serialize};

use super::sentence::{AnnotatedSentence, Tag};
use super::DatasetError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record<T = Tag> {
    pub tokens: Vec<String>,
    pub slots: Vec<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<String>,
}

pub fn parse_records(text: &str) -> Result<Vec<AnnotatedSentence>, DatasetError> {
    parse_records_collecting(text, None)
}

/// See `parse_conll_collecting`.
pub(crate) fn parse_records_collecting(
    text: &str,
    mut issues: Option<&mut Vec<DatasetError>>,
) -> Result<Vec<AnnotatedSentence>, DatasetError> {
    let mut sentences = Vec::new();
    let mut seen = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let record: Record<String> = serde_json::from_str(raw).map_err(|e| DatasetError::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.tokens.len() != record.slots.len() {
            return Err(DatasetError::Parse {
                line,
                message: format!("{} tokens but {} slots", record.tokens.len(), record.slots.len()),
            });
        }
        if let Some(token) = record
            .tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(DatasetError::Parse {
                line,
                message: format!("token {token:?} is empty or contains whitespace"),
            });
        }
        let slots = record
            .slots
            .iter()
            .map(|s| s.parse::<Tag>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|message| DatasetError::Parse { line, message })?;
        let index = seen;
        seen += 1;
        match AnnotatedSentence::new(record.tokens, slots, record.intent, index) {
            Ok(sentence) => sentences.push(sentence),
            Err(e) => match issues.as_deref_mut() {
                Some(issues) => issues.push(e),
                None => return Err(e),
            },
        }
    }
    Ok(sentences)
}

/// Serializes one sentence as a single record line (no trailing newline).
pub fn record_line(tokens: &[String], slots: &[Tag], intent: Option<&str>) -> String {
    #[derive(Serialize)]
    struct Borrowed<'a> {
        tokens: &'a [String],
        slots: &'a [Tag],
        #[serde(skip_serializing_if = "Option::is_none")]
        intent: Option<&'a str>,
    }
    serde_json::to_string(&Borrowed { tokens, slots, intent }).expect("string-only record always serializes")
}
