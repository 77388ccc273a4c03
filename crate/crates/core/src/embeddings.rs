//! Word-vector tables and exact cosine-similarity neighbor search.

use std::cmp::Ordering;
use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} components, found {found}")]
    Dimension { line: usize, expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("embedding table is empty")]
    Empty,
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("zero-norm vector")]
    ZeroNorm,
}

/// Load-time diagnostics that do not fail the load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub zero_vectors: usize,
    pub duplicates: usize,
}

/// Token vectors of one fixed dimension, immutable after load.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    tokens: Vec<String>,
    // row-major, one row per token
    data: Vec<f64>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
}

impl EmbeddingTable {
    /// Builds a table from `(token, vector)` rows with the same load rules as
    /// [`EmbeddingTable::parse`].
    pub fn from_rows<I>(rows: I) -> Result<(Self, LoadReport), EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut builder = Builder::default();
        for (i, (token, vector)) in rows.into_iter().enumerate() {
            builder.push(i + 1, token, &vector)?;
        }
        builder.finish()
    }

    /// Parses `token v1 v2 ... vD` lines. Zero vectors are dropped and counted,
    /// repeated tokens keep their first row. A leading word2vec style
    /// `count dimension` line is skipped.
    pub fn parse(text: &str) -> Result<(Self, LoadReport), EmbeddingError> {
        let mut builder = Builder::default();
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if i == 0 && is_count_header(line) {
                continue;
            }
            let mut fields = line.split(' ').filter(|f| !f.is_empty());
            let Some(token) = fields.next() else {
                continue;
            };
            values.clear();
            for field in fields {
                let v: f64 = field.parse().map_err(|_| EmbeddingError::Parse {
                    line: line_no,
                    message: format!("not a number: {field:?}"),
                })?;
                if !v.is_finite() {
                    return Err(EmbeddingError::Parse {
                        line: line_no,
                        message: format!("non-finite component {field:?}"),
                    });
                }
                values.push(v);
            }
            builder.push(line_no, token.to_string(), &values)?;
        }
        builder.finish()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.index.get(token).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    fn similarity_at(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self.row(a).iter().zip(self.row(b)).map(|(x, y)| x * y).sum();
        (dot / (self.norms[a] * self.norms[b])).clamp(-1.0, 1.0)
    }

    /// Up to `k` nearest tokens to `query` by cosine similarity, excluding the
    /// query. Sorted by descending similarity, ties by token. `None` when the
    /// query is out of vocabulary.
    pub fn k_nearest(&self, query: &str, k: usize) -> Option<Vec<(String, f64)>> {
        let q = *self.index.get(query)?;
        Some(self.top_k(q, k, (0..self.tokens.len()).filter(|&i| i != q)))
    }

    /// Like [`EmbeddingTable::k_nearest`] but only tokens in `allowed` are
    /// candidates (tokens absent from the table are ignored).
    pub fn k_nearest_among<'a, I>(&self, query: &str, k: usize, allowed: I) -> Option<Vec<(String, f64)>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let q = *self.index.get(query)?;
        let mut rows: Vec<usize> = allowed
            .into_iter()
            .filter_map(|t| self.index.get(t).copied())
            .filter(|&i| i != q)
            .collect();
        rows.sort_unstable();
        rows.dedup();
        Some(self.top_k(q, k, rows.into_iter()))
    }

    fn top_k(&self, q: usize, k: usize, candidates: impl Iterator<Item = usize>) -> Vec<(String, f64)> {
        if k == 0 {
            return Vec::new();
        }
        // bounded selection keeps memory at O(k) for large vocabularies
        let mut best: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
        for i in candidates {
            let sim = self.similarity_at(q, i);
            if best.len() == k && rank(&self.tokens, (i, sim), best[k - 1]) != Ordering::Less {
                continue;
            }
            let at = best.partition_point(|&b| rank(&self.tokens, b, (i, sim)) == Ordering::Less);
            best.insert(at, (i, sim));
            best.truncate(k);
        }
        best.into_iter().map(|(i, sim)| (self.tokens[i].clone(), sim)).collect()
    }
}

fn rank(tokens: &[String], a: (usize, f64), b: (usize, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| tokens[a.0].cmp(&tokens[b.0]))
}

#[derive(Default)]
struct Builder {
    dimension: Option<usize>,
    tokens: Vec<String>,
    data: Vec<f64>,
    norms: Vec<f64>,
    index: HashMap<String, usize>,
    report: LoadReport,
}

impl Builder {
    fn push(&mut self, line: usize, token: String, vector: &[f64]) -> Result<(), EmbeddingError> {
        let expected = *self.dimension.get_or_insert(vector.len());
        if vector.len() != expected || expected == 0 {
            return Err(EmbeddingError::Dimension {
                line,
                expected,
                found: vector.len(),
            });
        }
        if self.index.contains_key(&token) {
            self.report.duplicates += 1;
            return Ok(());
        }
        let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            self.report.zero_vectors += 1;
            return Ok(());
        }
        self.index.insert(token.clone(), self.tokens.len());
        self.tokens.push(token);
        self.data.extend_from_slice(vector);
        self.norms.push(norm);
        Ok(())
    }

    fn finish(self) -> Result<(EmbeddingTable, LoadReport), EmbeddingError> {
        if self.tokens.is_empty() {
            return Err(EmbeddingError::Empty);
        }
        Ok((
            EmbeddingTable {
                dimension: self.dimension.unwrap_or(0),
                tokens: self.tokens,
                data: self.data,
                norms: self.norms,
                index: self.index,
            },
            self.report,
        ))
    }
}

/// `dot(a, b) / (|a| |b|)`.
fn is_count_header(line: &str) -> bool {
    let fields: Vec<&str> = line.split_whitespace().collect();
    fields.len() == 2 && fields.iter().all(|f| f.parse::<u64>().is_ok())
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::LengthMismatch(a.len(), b.len()));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroNorm);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let s = cosine_similarity(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((s - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert_eq!(
            cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]),
            Err(EmbeddingError::ZeroNorm)
        );
        assert!(cosine_similarity(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn count_header_skipped() {
        let (table, _) = EmbeddingTable::parse("2 3\na 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dimension(), 3);
        let (table, _) = EmbeddingTable::parse("a 1\n2 3\n").unwrap();
        assert!(table.contains("2"));
    }

    #[test]
    fn loads_minimal_table() {
        let (table, report) = EmbeddingTable::parse("a 1 0 0\nb 0 1 0\n").unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table.dimension(), 3);
        assert_eq!(report, LoadReport::default());
    }

    #[test]
    fn dimension_change_names_the_line() {
        let err = EmbeddingTable::parse("a 1 0 0\nb 0 1\n").unwrap_err();
        assert_eq!(
            err,
            EmbeddingError::Dimension {
                line: 2,
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn zero_rows_and_duplicates_are_counted() {
        let (table, report) = EmbeddingTable::parse("a 1 0\nz 0 0\na 0 1\nb 1 1\n").unwrap();
        assert_eq!(table.len(), 2);
        assert!(!table.contains("z"));
        assert_eq!(table.vector("a").unwrap(), &[1.0, 0.0]);
        assert_eq!(report.zero_vectors, 1);
        assert_eq!(report.duplicates, 1);
    }

    #[test]
    fn non_numeric_component_is_an_error() {
        assert!(matches!(
            EmbeddingTable::parse("a 1 x\n"),
            Err(EmbeddingError::Parse { line: 1, .. })
        ));
        assert_eq!(EmbeddingTable::parse("").unwrap_err(), EmbeddingError::Empty);
    }

    #[test]
    fn fewer_candidates_than_k() {
        let (table, _) = EmbeddingTable::parse("q 1 0\na 1 1\n").unwrap();
        let got = table.k_nearest("q", 5).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, "a");
        assert!((got[0].1 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(table.k_nearest("missing", 5).is_none());
    }

    #[test]
    fn ties_break_by_token() {
        let (table, _) = EmbeddingTable::parse("q 1 0\nc 2 0\nb 3 0\na 0 1\n").unwrap();
        let got: Vec<String> = table.k_nearest("q", 2).unwrap().into_iter().map(|p| p.0).collect();
        assert_eq!(got, ["b", "c"]);
    }

    #[test]
    fn restricted_search_only_returns_allowed() {
        let (table, _) = EmbeddingTable::parse("q 1 0\nc 2 0\nb 3 0\na 0 1\n").unwrap();
        let got = table.k_nearest_among("q", 5, ["a", "q", "zz"]).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].0, "a");
    }
}
