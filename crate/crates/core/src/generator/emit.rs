use std::io::{self, Write};

use super::GeneratedSentence;
use crate::dataset::{record_line, write_conll_block};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    /// `token<TAB>tag` blocks under `# intent:` headers.
    #[default]
    Conll,
    /// One JSON object per line.
    Records,
}

pub fn emit<W: Write>(sentences: &[GeneratedSentence], out: &mut W, format: OutputFormat) -> io::Result<()> {
    let mut buf = String::new();
    for s in sentences {
        buf.clear();
        match format {
            OutputFormat::Conll => write_conll_block(&mut buf, &s.tokens, &s.slots, Some(&s.intent)),
            OutputFormat::Records => {
                buf.push_str(&record_line(&s.tokens, &s.slots, Some(&s.intent)));
                buf.push('\n');
            }
        }
        out.write_all(buf.as_bytes())?;
    }
    out.flush()
}
