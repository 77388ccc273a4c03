use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use eastgen_core::builder::entity_occurrence;
use eastgen_core::dataset::CorpusFormat;
use eastgen_core::east::enumerate_language;
use eastgen_core::generator::{emit, EntitySampling, NeighborScope};
use eastgen_core::regex_export::write_bundles;
use eastgen_core::{
    build, export_regex, validate, Amount, BuilderConfig, Dataset, East, EntityLexicon, GenerationConfig, Generator,
};
use serde::Serialize;
use serde_json::json;

use crate::files::{
    read_dataset, read_embeddings, read_lexicon, read_sentences, read_text, read_trees, read_trees_unchecked,
    tree_file_name, write_atomic, TREE_SUFFIX,
};
use crate::manifest::RunManifest;
use crate::{BuildArgs, ExportRegexArgs, GenerateArgs, SourceArgs, StatsArgs, ValidateArgs};

/// Manifest path beside a single output file.
fn manifest_beside(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    write_atomic(path, manifest.to_json().as_bytes())?;
    Ok(())
}

pub fn build_cmd(args: &BuildArgs) -> Result<()> {
    let mut config = BuilderConfig::new(args.threshold)?;
    config.single_main_entity = args.single_main_entity;
    let format: CorpusFormat = args.format.into();
    let (dataset, input) = read_dataset(&args.corpus, format, args.default_intent.as_deref())?;
    let trees = build(&dataset, &config)?;

    let mut manifest = RunManifest::new(
        "build",
        json!({
            "threshold": args.threshold,
            "format": format,
            "default_intent": args.default_intent,
            "single_main_entity": args.single_main_entity,
        }),
    );
    manifest.inputs.push(input);

    let mut names = BTreeSet::new();
    for (intent, tree) in &trees {
        let mut name = tree_file_name(intent);
        let mut n = 2;
        while !names.insert(name.clone()) {
            name = format!(
                "{}-{n}{TREE_SUFFIX}",
                tree_file_name(intent).trim_end_matches(TREE_SUFFIX)
            );
            n += 1;
        }
        manifest
            .outputs
            .push(write_atomic(&args.out.join(&name), tree.to_json().as_bytes())?);
    }
    warn_stale(&args.out, &names);
    manifest.outputs.push(write_atomic(
        &args.out.join("lexicon.json"),
        dataset.lexicon.to_json().as_bytes(),
    )?);
    write_manifest(&args.out.join("manifest.json"), &manifest)?;
    log::info!("built {} trees from {} sentences", trees.len(), dataset.sentences.len());
    Ok(())
}

fn warn_stale(dir: &Path, written: &BTreeSet<String>) {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return;
    };
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.ends_with(TREE_SUFFIX) && !written.contains(&name) {
            log::warn!("{} was not written by this run", entry.path().display());
        }
    }
}

/// Lexicon from `--lexicon`, else from `--corpus`; the dataset is returned
/// whenever a corpus was given.
fn lexicon_source(source: &SourceArgs, manifest: &mut RunManifest) -> Result<(EntityLexicon, Option<Dataset>)> {
    let dataset = match &source.corpus {
        Some(path) => {
            let (dataset, digest) = read_dataset(path, source.corpus_format.into(), source.default_intent.as_deref())?;
            manifest.inputs.push(digest);
            Some(dataset)
        }
        None => None,
    };
    let lexicon = match (&source.lexicon, &dataset) {
        (Some(path), _) => {
            let (lexicon, digest) = read_lexicon(path)?;
            manifest.inputs.push(digest);
            lexicon
        }
        (None, Some(dataset)) => dataset.lexicon.clone(),
        (None, None) => bail!("one of --lexicon or --corpus is required"),
    };
    Ok((lexicon, dataset))
}

pub fn generate_cmd(args: &GenerateArgs) -> Result<()> {
    let amount = match (args.factor, args.count) {
        (_, Some(c)) => Amount::Count(c),
        (f, None) => Amount::Factor(f.unwrap_or(eastgen_core::generator::DEFAULT_FACTOR)),
    };
    let config = GenerationConfig {
        k: args.k,
        seed: args.seed,
        amount,
        use_embeddings: !args.no_embeddings,
        apply_dropout: !args.no_dropout,
        entity_sampling: if args.frequency_weighted {
            EntitySampling::Frequency
        } else {
            EntitySampling::Uniform
        },
        neighbor_scope: if args.neighbors_from_lexicon {
            NeighborScope::Lexicon
        } else {
            NeighborScope::Vocabulary
        },
    };
    config.check()?;

    let mut manifest = RunManifest::new("generate", json!({ "generation": &config, "format": args.format }));
    let (trees, digests) = read_trees(&args.trees)?;
    manifest.inputs.extend(digests);
    let (lexicon, dataset) = lexicon_source(&args.source, &mut manifest)?;

    let sizes = match (amount, &dataset) {
        (Amount::Factor(_), Some(dataset)) => dataset.intent_sizes(),
        (Amount::Factor(_), None) => {
            bail!("--factor needs --corpus for training sizes; use --count with --lexicon alone")
        }
        (Amount::Count(_), _) => BTreeMap::new(),
    };
    if let Amount::Factor(_) = amount {
        for intent in trees.keys() {
            if !sizes.contains_key(intent) {
                log::warn!("intent {intent:?} has no training sentences; nothing generated for it");
            }
        }
    }

    let table = match (&args.embeddings, args.no_embeddings) {
        (_, true) => None,
        (Some(path), false) => {
            let (table, digest) = read_embeddings(path)?;
            manifest.inputs.push(digest);
            Some(table)
        }
        (None, false) => bail!("--embeddings is required unless --no-embeddings is given"),
    };

    let generator = Generator::new(&lexicon, table.as_ref(), &config)?;
    let batch = generator.generate_batch(&trees, &sizes)?;
    let mut out = Vec::new();
    emit(&batch.sentences, &mut out, args.format.into())?;
    manifest.outputs.push(write_atomic(&args.out, &out)?);

    let stats_path = {
        let mut name = args.out.file_name().unwrap_or_default().to_os_string();
        name.push(".stats.json");
        args.out.with_file_name(name)
    };
    let mut stats = serde_json::to_string_pretty(&batch.stats)?;
    stats.push('\n');
    manifest.outputs.push(write_atomic(&stats_path, stats.as_bytes())?);
    write_manifest(&manifest_beside(&args.out), &manifest)?;
    log::info!("generated {} sentences", batch.sentences.len());
    Ok(())
}

pub fn export_regex_cmd(args: &ExportRegexArgs) -> Result<()> {
    let mut manifest = RunManifest::new("export-regex", json!({}));
    let (trees, digests) = read_trees(&args.trees)?;
    manifest.inputs.extend(digests);
    let (lexicon, _) = lexicon_source(&args.source, &mut manifest)?;
    let bundles = trees
        .values()
        .map(|tree| export_regex(tree, &lexicon).with_context(|| format!("intent {:?}", tree.intent)))
        .collect::<Result<Vec<_>>>()?;
    manifest
        .outputs
        .push(write_atomic(&args.out, write_bundles(&bundles).as_bytes())?);
    write_manifest(&manifest_beside(&args.out), &manifest)?;
    Ok(())
}

/// Prints every problem found; returns whether the input is clean.
pub fn validate_cmd(args: &ValidateArgs) -> Result<bool> {
    let mut problems = Vec::new();
    if let Some(path) = &args.trees {
        let loaded = read_trees_unchecked(path)?;
        let mut intents = BTreeSet::new();
        for (file, tree, _) in &loaded {
            for v in validate(tree) {
                problems.push(format!("{}: {v}", file.display()));
            }
            if !intents.insert(tree.intent.clone()) {
                problems.push(format!("{}: duplicate intent {:?}", file.display(), tree.intent));
            }
        }
    }
    if let Some(path) = &args.corpus {
        let format: CorpusFormat = args.format.into();
        for issue in format.check(&read_text(path)?) {
            problems.push(match issue {
                eastgen_core::DatasetError::Parse { line, message } => format!("{}:{line}: {message}", path.display()),
                other => format!("{}: {other}", path.display()),
            });
        }
    }
    for p in &problems {
        println!("{p}");
    }
    if problems.is_empty() {
        println!("ok");
    }
    Ok(problems.is_empty())
}

#[derive(Serialize)]
struct OccurrenceRow {
    label: String,
    sentences: u64,
    total: u64,
    percent: u64,
}

#[derive(Serialize)]
struct IntentStats {
    intent: String,
    sentences: u64,
    templates: usize,
    occurrence: Vec<OccurrenceRow>,
}

#[derive(Serialize)]
struct CorpusStats {
    sentences: usize,
    vocabulary: usize,
    average_length: f64,
    intents: usize,
    slot_labels: usize,
    per_intent: Vec<IntentStats>,
}

fn corpus_stats(dataset: &Dataset) -> CorpusStats {
    let vocabulary: BTreeSet<&str> = dataset
        .sentences
        .iter()
        .flat_map(|s| s.tokens.iter().map(String::as_str))
        .collect();
    let tokens: usize = dataset.sentences.iter().map(|s| s.tokens.len()).sum();
    let per_intent = dataset
        .by_intent
        .iter()
        .map(|(intent, templates)| {
            let occ = entity_occurrence(templates);
            IntentStats {
                intent: intent.clone(),
                sentences: occ.total,
                templates: templates.len(),
                occurrence: occ
                    .ranked()
                    .into_iter()
                    .map(|(label, c)| OccurrenceRow {
                        label: label.to_string(),
                        sentences: c,
                        total: occ.total,
                        percent: c * 100 / occ.total,
                    })
                    .collect(),
            }
        })
        .collect();
    CorpusStats {
        sentences: dataset.sentences.len(),
        vocabulary: vocabulary.len(),
        average_length: tokens as f64 / dataset.sentences.len() as f64,
        intents: dataset.by_intent.len(),
        slot_labels: dataset.lexicon.len(),
        per_intent,
    }
}

#[derive(Serialize)]
struct TreeStats {
    intent: String,
    nodes: BTreeMap<&'static str, usize>,
    depth: usize,
    entity_slots: BTreeSet<String>,
    /// Templates with dropout variants, or `None` beyond the cap.
    language_size: Option<usize>,
}

const LANGUAGE_CAP: usize = 100_000;

fn tree_stats(tree: &East) -> TreeStats {
    fn depth(node: &eastgen_core::EastNode) -> usize {
        1 + node.children.iter().map(depth).max().unwrap_or(0)
    }
    let mut nodes = BTreeMap::new();
    tree.root.walk(&mut |n| *nodes.entry(n.kind.as_str()).or_insert(0) += 1);
    TreeStats {
        intent: tree.intent.clone(),
        nodes,
        depth: depth(&tree.root),
        entity_slots: tree.root.entity_slots().into_iter().map(String::from).collect(),
        language_size: enumerate_language(tree, true, LANGUAGE_CAP).ok().map(|l| l.len()),
    }
}

pub fn stats_cmd(args: &StatsArgs) -> Result<()> {
    let mut text = String::new();
    let mut json = serde_json::Map::new();
    if let Some(path) = &args.corpus {
        let (sentences, _) = read_sentences(path, args.format.into())?;
        if sentences.is_empty() {
            bail!("{}: empty dataset", path.display());
        }
        let dataset = eastgen_core::build_dataset_with_default(sentences, args.default_intent.as_deref())
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let stats = corpus_stats(&dataset);
        let _ = writeln!(text, "sentences       {}", stats.sentences);
        let _ = writeln!(text, "vocabulary      {}", stats.vocabulary);
        let _ = writeln!(text, "average length  {:.2}", stats.average_length);
        let _ = writeln!(text, "intents         {}", stats.intents);
        let _ = writeln!(text, "slot labels     {}", stats.slot_labels);
        for intent in &stats.per_intent {
            let _ = writeln!(
                text,
                "\nintent {} ({} sentences, {} templates)",
                intent.intent, intent.sentences, intent.templates
            );
            let width = intent.occurrence.iter().map(|r| r.label.len()).max().unwrap_or(0);
            for row in &intent.occurrence {
                let _ = writeln!(
                    text,
                    "  {:width$}  {}/{}  {}%",
                    row.label, row.sentences, row.total, row.percent
                );
            }
        }
        json.insert("corpus".into(), serde_json::to_value(&stats)?);
    }
    if let Some(path) = &args.trees {
        let (trees, _) = read_trees(path)?;
        let stats: Vec<TreeStats> = trees.values().map(tree_stats).collect();
        for s in &stats {
            if !text.is_empty() {
                text.push('\n');
            }
            let _ = writeln!(text, "tree {}", s.intent);
            let kinds: Vec<String> = s.nodes.iter().map(|(k, n)| format!("{k}={n}")).collect();
            let _ = writeln!(text, "  nodes     {}", kinds.join(" "));
            let _ = writeln!(text, "  depth     {}", s.depth);
            let slots: Vec<&str> = s.entity_slots.iter().map(String::as_str).collect();
            let _ = writeln!(text, "  slots     {}", slots.join(" "));
            match s.language_size {
                Some(n) => {
                    let _ = writeln!(text, "  templates {n}");
                }
                None => {
                    let _ = writeln!(text, "  templates >{LANGUAGE_CAP}");
                }
            }
        }
        json.insert("trees".into(), serde_json::to_value(&stats)?);
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&json)?);
    } else {
        print!("{text}");
    }
    Ok(())
}
