use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eastgen_core::dataset::{build_dataset_with_default, CorpusFormat, DatasetError};
use eastgen_core::{validate_forest, AnnotatedSentence, Dataset, East, EmbeddingError, EmbeddingTable, EntityLexicon};
use sha2::{Digest, Sha256};

use crate::manifest::FileDigest;

pub const TREE_SUFFIX: &str = ".east.json";

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes).as_slice())
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<FileDigest> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("cannot write in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(FileDigest::new(path, bytes))
}

fn dataset_error(path: &Path, err: DatasetError) -> anyhow::Error {
    match err {
        DatasetError::Parse { line, message } => anyhow::anyhow!("{}:{line}: {message}", path.display()),
        other => anyhow::anyhow!("{}: {other}", path.display()),
    }
}

pub fn read_sentences(path: &Path, format: CorpusFormat) -> Result<(Vec<AnnotatedSentence>, FileDigest)> {
    let text = read_text(path)?;
    let sentences = format.parse(&text).map_err(|e| dataset_error(path, e))?;
    Ok((sentences, FileDigest::new(path, text.as_bytes())))
}

pub fn read_dataset(path: &Path, format: CorpusFormat, default_intent: Option<&str>) -> Result<(Dataset, FileDigest)> {
    let (sentences, digest) = read_sentences(path, format)?;
    let dataset = build_dataset_with_default(sentences, default_intent).map_err(|e| dataset_error(path, e))?;
    Ok((dataset, digest))
}

pub fn read_lexicon(path: &Path) -> Result<(EntityLexicon, FileDigest)> {
    let text = read_text(path)?;
    let lexicon = EntityLexicon::from_json(&text).map_err(|e| dataset_error(path, e))?;
    Ok((lexicon, FileDigest::new(path, text.as_bytes())))
}

pub fn read_embeddings(path: &Path) -> Result<(EmbeddingTable, FileDigest)> {
    let text = read_text(path)?;
    let (table, report) = EmbeddingTable::parse(&text).map_err(|e| match e {
        EmbeddingError::Dimension { line, .. } | EmbeddingError::Parse { line, .. } => {
            anyhow::anyhow!("{}:{line}: {e}", path.display())
        }
        other => anyhow::anyhow!("{}: {other}", path.display()),
    })?;
    if report.zero_vectors > 0 || report.duplicates > 0 {
        log::warn!(
            "{}: skipped {} zero vectors and {} repeated tokens",
            path.display(),
            report.zero_vectors,
            report.duplicates
        );
    }
    Ok((table, FileDigest::new(path, text.as_bytes())))
}

/// Tree documents at `path`: the file itself, or every `*.east.json` in the
/// directory, in name order.
pub fn tree_files(path: &Path) -> Result<Vec<PathBuf>> {
    if !path.is_dir() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(path).with_context(|| format!("cannot list {}", path.display()))? {
        let entry = entry?;
        if entry.file_name().to_string_lossy().ends_with(TREE_SUFFIX) {
            files.push(entry.path());
        }
    }
    files.sort();
    if files.is_empty() {
        bail!("{}: no *{TREE_SUFFIX} files", path.display());
    }
    Ok(files)
}

/// Loads trees without validating them.
pub fn read_trees_unchecked(path: &Path) -> Result<Vec<(PathBuf, East, FileDigest)>> {
    tree_files(path)?
        .into_iter()
        .map(|file| {
            let text = read_text(&file)?;
            let tree = East::from_json_unchecked(&text).map_err(|e| anyhow::anyhow!("{}: {e}", file.display()))?;
            let digest = FileDigest::new(&file, text.as_bytes());
            Ok((file, tree, digest))
        })
        .collect()
}

/// Loads trees keyed by intent, failing on any violation.
pub fn read_trees(path: &Path) -> Result<(BTreeMap<String, East>, Vec<FileDigest>)> {
    let loaded = read_trees_unchecked(path)?;
    let violations = validate_forest(loaded.iter().map(|(_, t, _)| t));
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| format!("  {v}")).collect();
        bail!("{}: invalid trees\n{}", path.display(), lines.join("\n"));
    }
    let mut trees = BTreeMap::new();
    let mut digests = Vec::new();
    for (_, tree, digest) in loaded {
        digests.push(digest);
        trees.insert(tree.intent.clone(), tree);
    }
    Ok((trees, digests))
}

/// File name for an intent's tree: characters outside `[A-Za-z0-9._-]`
/// become `_`.
pub fn tree_file_name(intent: &str) -> String {
    let stem: String = intent
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{stem}{TREE_SUFFIX}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitized_names() {
        assert_eq!(tree_file_name("Ask weather"), "Ask_weather.east.json");
        assert_eq!(tree_file_name("a/b"), "a_b.east.json");
        assert_eq!(tree_file_name("atis_flight"), "atis_flight.east.json");
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"one").unwrap();
        let digest = write_atomic(&path, b"two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(digest.sha256, sha256_hex(b"two"));
    }
}
