//! Token-per-line corpora: `token<whitespace>tag`, blank-line separated, with an
//! optional `# intent: <label>` header opening each sentence.

use std::fmt::Write as _;

use super::sentence::{AnnotatedSentence, Tag};
use super::DatasetError;

pub const INTENT_HEADER: &str = "# intent:";

#[derive(Default)]
struct Block {
    intent: Option<String>,
    tokens: Vec<String>,
    slots: Vec<Tag>,
    header_line: usize,
}

impl Block {
    fn is_empty(&self) -> bool {
        self.intent.is_none() && self.tokens.is_empty()
    }
}

pub fn parse_conll(text: &str) -> Result<Vec<AnnotatedSentence>, DatasetError> {
    parse_conll_collecting(text, None)
}

/// With `issues`, sentences failing IOB or alignment checks are recorded
/// there and skipped instead of aborting the parse.
pub(crate) fn parse_conll_collecting(
    text: &str,
    mut issues: Option<&mut Vec<DatasetError>>,
) -> Result<Vec<AnnotatedSentence>, DatasetError> {
    let mut sentences = Vec::new();
    let mut block = Block::default();
    let mut seen = 0;

    let mut flush = |block: &mut Block, sentences: &mut Vec<AnnotatedSentence>| {
        let block = std::mem::take(block);
        if block.tokens.is_empty() {
            if block.intent.is_some() {
                return Err(DatasetError::Parse {
                    line: block.header_line,
                    message: "intent header without tokens".into(),
                });
            }
            return Ok(());
        }
        let index = seen;
        seen += 1;
        match AnnotatedSentence::new(block.tokens, block.slots, block.intent, index) {
            Ok(sentence) => sentences.push(sentence),
            Err(e) => match issues.as_deref_mut() {
                Some(issues) => issues.push(e),
                None => return Err(e),
            },
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut block, &mut sentences)?;
            continue;
        }
        if let Some(rest) = line.strip_prefix(INTENT_HEADER) {
            if !block.is_empty() {
                return Err(DatasetError::Parse {
                    line: line_no,
                    message: "intent header inside a sentence".into(),
                });
            }
            let intent = rest.trim();
            if intent.is_empty() {
                return Err(DatasetError::Parse {
                    line: line_no,
                    message: "empty intent label".into(),
                });
            }
            block.intent = Some(intent.to_string());
            block.header_line = line_no;
            continue;
        }

        let mut fields = line.split_whitespace();
        let (Some(token), Some(tag), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(DatasetError::Parse {
                line: line_no,
                message: format!("expected `token tag`, got {line:?}"),
            });
        };
        let tag: Tag = tag
            .parse()
            .map_err(|message| DatasetError::Parse { line: line_no, message })?;
        block.tokens.push(token.to_string());
        block.slots.push(tag);
    }
    flush(&mut block, &mut sentences)?;
    Ok(sentences)
}

/// Writes one sentence as a block; the trailing blank line is included.
pub fn write_conll_block(out: &mut String, tokens: &[String], slots: &[Tag], intent: Option<&str>) {
    if let Some(intent) = intent {
        let _ = writeln!(out, "{INTENT_HEADER} {intent}");
    }
    for (token, tag) in tokens.iter().zip(slots) {
        let _ = writeln!(out, "{token}\t{tag}");
    }
    out.push('\n');
}
