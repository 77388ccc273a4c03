mod common;

use std::collections::BTreeSet;

use common::{eastgen, ok, output_checksums, read, stderr, stdout, write, AIRLINE_CONLL};
use eastgen_core::dataset::{parse_conll, parse_records};
use eastgen_core::east::enumerate_language;
use eastgen_core::{abstract_entities, East, EmbeddingTable};
use tempfile::tempdir;

const SCHOLAR_TREE: &str = r#"{
  "intent": "Search Scholar",
  "root": {"kind": "order", "children": [
    {"kind": "pickone", "children": [
      {"kind": "fixed", "dictionary": {"find": 1, "search for": 1, "show me": 1}},
      {"kind": "fixed", "dictionary": {"who is": 1}}
    ]},
    {"kind": "entity", "slot": "person"},
    {"kind": "exchangeable", "dropout": 0.3, "children": [
      {"kind": "order", "children": [
        {"kind": "fixed", "dictionary": {"from": 1, "at": 1}},
        {"kind": "entity", "slot": "organization"}
      ]},
      {"kind": "order", "children": [
        {"kind": "fixed", "dictionary": {"working on": 1}},
        {"kind": "entity", "slot": "research_interest"}
      ]}
    ]}
  ]}
}
"#;

const SCHOLAR_LEXICON: &str = r#"{
  "organization": {"mit": 1, "tsinghua university": 1},
  "person": {"alice": 1, "bob": 1},
  "research_interest": {"parsing": 1, "machine translation": 1}
}
"#;

#[test]
fn build_writes_one_tree_per_intent() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    ok(
        dir.path(),
        &["build", "airline.conll", "--threshold", "0.5", "--out", "trees"],
    );
    let files: BTreeSet<String> = std::fs::read_dir(dir.path().join("trees"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        files,
        BTreeSet::from([
            "airline.east.json".into(),
            "lexicon.json".into(),
            "manifest.json".into()
        ])
    );
    let tree = East::from_json(&read(dir.path(), "trees/airline.east.json")).unwrap();
    assert_eq!(tree.intent, "airline");
    let manifest = read(dir.path(), "trees/manifest.json");
    assert_eq!(output_checksums(&manifest).len(), 2);
    assert!(manifest.contains("\"threshold\": 0.5"));
}

#[test]
fn build_argument_and_input_errors() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    let out = eastgen(
        dir.path(),
        &["build", "airline.conll", "--threshold", "1.5", "--out", "trees"],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("threshold"));
    assert!(!dir.path().join("trees").exists());

    write(dir.path(), "empty.conll", "");
    let out = eastgen(dir.path(), &["build", "empty.conll", "--out", "trees"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty dataset"));

    write(dir.path(), "bad.conll", "# intent: a\nfly O\nto O O\n");
    let out = eastgen(dir.path(), &["build", "bad.conll", "--out", "trees"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bad.conll:3:"), "{}", stderr(&out));

    let out = eastgen(dir.path(), &["build", "missing.conll", "--out", "trees"]);
    assert!(!out.status.success());
}

#[test]
fn records_corpus_and_default_intent() {
    let dir = tempdir().unwrap();
    write(
        dir.path(),
        "ner.jsonl",
        "{\"tokens\":[\"visit\",\"Paris\"],\"slots\":[\"O\",\"B-LOC\"]}\n{\"tokens\":[\"see\",\"Rome\"],\"slots\":[\"O\",\"B-LOC\"]}\n",
    );
    let out = eastgen(
        dir.path(),
        &["build", "ner.jsonl", "--format", "records", "--out", "trees"],
    );
    assert!(!out.status.success());
    ok(
        dir.path(),
        &[
            "build",
            "ner.jsonl",
            "--format",
            "records",
            "--default-intent",
            "ALL",
            "--out",
            "trees",
        ],
    );
    assert!(dir.path().join("trees/ALL.east.json").exists());
}

fn training_corpus(n: usize) -> String {
    let mut text = String::new();
    let cities = ["boston", "denver", "dallas", "atlanta"];
    for i in 0..n {
        text.push_str(&format!(
            "# intent: flight\nflights\tO\nto\tO\n{}\tB-city_name\n\n",
            cities[i % cities.len()]
        ));
    }
    text
}

#[test]
fn factor_scales_with_training_size() {
    let dir = tempdir().unwrap();
    write(dir.path(), "train.conll", &training_corpus(100));
    ok(dir.path(), &["build", "train.conll", "--out", "trees"]);
    ok(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "train.conll",
            "--factor",
            "10",
            "--seed",
            "1",
            "--no-embeddings",
            "--out",
            "aug.conll",
        ],
    );
    let sentences = parse_conll(&read(dir.path(), "aug.conll")).unwrap();
    assert_eq!(sentences.len(), 1000);
    let stats: serde_json::Value = serde_json::from_str(&read(dir.path(), "aug.conll.stats.json")).unwrap();
    assert_eq!(stats["per_intent"]["flight"], 1000);

    // default factor is 2
    ok(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "train.conll",
            "--seed",
            "1",
            "--no-embeddings",
            "--out",
            "two.conll",
        ],
    );
    assert_eq!(parse_conll(&read(dir.path(), "two.conll")).unwrap().len(), 200);
}

#[test]
fn same_seed_same_checksums() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);
    let run = |seed: &str| {
        ok(
            dir.path(),
            &[
                "generate",
                "--trees",
                "trees",
                "--lexicon",
                "trees/lexicon.json",
                "--count",
                "200",
                "--seed",
                seed,
                "--no-embeddings",
                "--format",
                "records",
                "--out",
                "aug.jsonl",
            ],
        );
        (
            read(dir.path(), "aug.jsonl.manifest.json"),
            read(dir.path(), "aug.jsonl"),
        )
    };
    let (m1, o1) = run("7");
    let (m2, o2) = run("7");
    assert_eq!(output_checksums(&m1), output_checksums(&m2));
    assert_eq!(m1, m2);
    assert_eq!(o1, o2);
    let (m3, _) = run("8");
    assert_ne!(output_checksums(&m1)[0], output_checksums(&m3)[0]);
    assert_eq!(parse_records(&o1).unwrap().len(), 200);
}

#[test]
fn plain_generation_stays_in_the_tree_language() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);
    ok(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "airline.conll",
            "--factor",
            "100",
            "--seed",
            "3",
            "--no-embeddings",
            "--no-dropout",
            "--out",
            "aug.conll",
        ],
    );
    let tree = East::from_json(&read(dir.path(), "trees/airline.east.json")).unwrap();
    let language = enumerate_language(&tree, true, 100_000).unwrap();
    let sentences = parse_conll(&read(dir.path(), "aug.conll")).unwrap();
    assert_eq!(sentences.len(), 300);
    for s in &sentences {
        assert!(language.contains(&abstract_entities(s).0.segments));
    }
}

#[test]
fn generated_corpus_builds_again() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);
    for format in ["conll", "records"] {
        let out = format!("aug.{format}");
        ok(
            dir.path(),
            &[
                "generate",
                "--trees",
                "trees",
                "--corpus",
                "airline.conll",
                "--seed",
                "5",
                "--no-embeddings",
                "--format",
                format,
                "--out",
                &out,
            ],
        );
        ok(
            dir.path(),
            &["build", &out, "--format", format, "--out", &format!("again-{format}")],
        );
        ok(dir.path(), &["validate", "--corpus", &out, "--format", format]);
    }
}

#[test]
fn embeddings_substitute_neighbors() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    // denver's neighbors point the same way; the rest are orthogonal
    let vectors = "denver 1 0 0\ndenverish 0.9 0.1 0\nmile-high 0.8 0.2 0\nboston 0 1 0\nother 0 0 1\n";
    write(dir.path(), "vec.txt", vectors);
    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);
    ok(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "airline.conll",
            "--embeddings",
            "vec.txt",
            "--k",
            "2",
            "--factor",
            "300",
            "--seed",
            "11",
            "--out",
            "aug.conll",
        ],
    );
    let table = EmbeddingTable::parse(vectors).unwrap().0;
    let pool: BTreeSet<String> = ["denver".to_string()]
        .into_iter()
        .chain(table.k_nearest("denver", 2).unwrap().into_iter().map(|(t, _)| t))
        .collect();
    assert_eq!(
        pool,
        BTreeSet::from(["denver".into(), "denverish".into(), "mile-high".into()])
    );
    let sentences = parse_conll(&read(dir.path(), "aug.conll")).unwrap();
    let lexicon_cities = ["denver", "san", "francisco", "boston", "dallas", "Beijing", "Shanghai"];
    let mut substituted = 0;
    for s in &sentences {
        for (token, tag) in s.tokens.iter().zip(&s.slots) {
            if tag.label() == Some("city_name") {
                assert!(
                    lexicon_cities.contains(&token.as_str()) || pool.contains(token),
                    "unexpected city {token}"
                );
                substituted += usize::from(!lexicon_cities.contains(&token.as_str()));
            }
        }
    }
    assert!(substituted > 0);
    let stats: serde_json::Value = serde_json::from_str(&read(dir.path(), "aug.conll.stats.json")).unwrap();
    assert_eq!(stats["neighbor_substitutions"], substituted);
    assert!(stats["oov_candidates"].as_u64().unwrap() > 0);
}

#[test]
fn generate_errors() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);

    // seed is mandatory
    let out = eastgen(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "airline.conll",
            "--no-embeddings",
            "--out",
            "a.conll",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--seed"));

    // embeddings required unless disabled
    let out = eastgen(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--corpus",
            "airline.conll",
            "--seed",
            "1",
            "--out",
            "a.conll",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--embeddings"));

    // lexicon missing a slot used by the tree
    write(dir.path(), "lex.json", "{\"city_name\": {\"boston\": 1}}\n");
    let out = eastgen(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--lexicon",
            "lex.json",
            "--count",
            "5",
            "--seed",
            "1",
            "--no-embeddings",
            "--out",
            "a.conll",
        ],
    );
    assert!(!out.status.success());
    assert!(
        stderr(&out).contains("flight_days") || stderr(&out).contains("day_number"),
        "{}",
        stderr(&out)
    );

    // factor needs training sizes
    let out = eastgen(
        dir.path(),
        &[
            "generate",
            "--trees",
            "trees",
            "--lexicon",
            "trees/lexicon.json",
            "--seed",
            "1",
            "--no-embeddings",
            "--out",
            "a.conll",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--corpus"));
    assert!(!dir.path().join("a.conll").exists());
}

#[test]
fn export_regex_bundles() {
    let dir = tempdir().unwrap();
    write(
        dir.path(),
        "show.east.json",
        r#"{"intent":"show","root":{"kind":"order","children":[
            {"kind":"fixed","dictionary":{"show me":1}},
            {"kind":"pickone","children":[
                {"kind":"fixed","dictionary":{"flights":1}},
                {"kind":"fixed","dictionary":{"airlines":1}}]}]}}"#,
    );
    write(dir.path(), "empty.json", "{}\n");
    ok(
        dir.path(),
        &[
            "export-regex",
            "--trees",
            "show.east.json",
            "--lexicon",
            "empty.json",
            "--out",
            "show.regex",
        ],
    );
    let text = read(dir.path(), "show.regex");
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# dialect:"));
    assert_eq!(&lines[1..], ["# intent: show", "^show me (?:flights|airlines)$"]);
    assert!(dir.path().join("show.regex.manifest.json").exists());

    write(
        dir.path(),
        "fly.east.json",
        r#"{"intent":"fly","root":{"kind":"order","children":[
            {"kind":"fixed","dictionary":{"fly to":1}},
            {"kind":"entity","slot":"city_name"},
            {"kind":"fixed","dropout":0.3333333333333333,"dictionary":{"please":1}}]}}"#,
    );
    write(dir.path(), "cities.json", r#"{"city_name":{"boston":1,"denver":1}}"#);
    ok(
        dir.path(),
        &[
            "export-regex",
            "--trees",
            "fly.east.json",
            "--lexicon",
            "cities.json",
            "--out",
            "fly.regex",
        ],
    );
    assert!(read(dir.path(), "fly.regex").contains("^fly to (?<city_name>boston|denver)(?: please)?$"));

    let out = eastgen(
        dir.path(),
        &[
            "export-regex",
            "--trees",
            "fly.east.json",
            "--lexicon",
            "empty.json",
            "--out",
            "x",
        ],
    );
    assert!(!out.status.success());
    assert!(stderr(&out).contains("city_name"));
}

#[test]
fn validate_reports_problems() {
    let dir = tempdir().unwrap();
    write(dir.path(), "scholar.east.json", SCHOLAR_TREE);
    let out = ok(dir.path(), &["validate", "--trees", "scholar.east.json"]);
    assert_eq!(stdout(&out).trim(), "ok");

    write(
        dir.path(),
        "bad.east.json",
        r#"{"intent":"x","root":{"kind":"order","children":[{"kind":"pickone","children":[
            {"kind":"fixed","weight":0.5,"dictionary":{"a":1}},
            {"kind":"fixed","weight":0.6,"dictionary":{"b":1}}]}]}}"#,
    );
    let out = eastgen(dir.path(), &["validate", "--trees", "bad.east.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("root/0"), "{}", stdout(&out));

    write(
        dir.path(),
        "iob.conll",
        "# intent: a\nfly O\n\n# intent: a\nto O\nnew I-city\n",
    );
    let out = eastgen(dir.path(), &["validate", "--corpus", "iob.conll"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("sentence 1"), "{}", stdout(&out));
}

#[test]
fn scholar_tree_generates_with_its_lexicon() {
    let dir = tempdir().unwrap();
    write(dir.path(), "scholar.east.json", SCHOLAR_TREE);
    write(dir.path(), "lex.json", SCHOLAR_LEXICON);
    ok(
        dir.path(),
        &[
            "generate",
            "--trees",
            "scholar.east.json",
            "--lexicon",
            "lex.json",
            "--count",
            "50",
            "--seed",
            "2",
            "--no-embeddings",
            "--out",
            "cold.conll",
        ],
    );
    let sentences = parse_conll(&read(dir.path(), "cold.conll")).unwrap();
    assert_eq!(sentences.len(), 50);
    assert!(sentences.iter().all(|s| s.intent.as_deref() == Some("Search Scholar")));
}

#[test]
fn stats_reports_occurrence() {
    let dir = tempdir().unwrap();
    write(dir.path(), "airline.conll", AIRLINE_CONLL);
    let text = stdout(&ok(dir.path(), &["stats", "--corpus", "airline.conll"]));
    for line in [
        "city_name    3/3  100%",
        "flight_days  2/3  66%",
        "month_name   2/3  66%",
        "day_number   2/3  66%",
    ] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
    assert!(text.contains("intents         1"));

    let json: serde_json::Value = serde_json::from_str(&stdout(&ok(
        dir.path(),
        &["stats", "--corpus", "airline.conll", "--json"],
    )))
    .unwrap();
    assert_eq!(json["corpus"]["sentences"], 3);
    assert_eq!(json["corpus"]["slot_labels"], 4);

    write(dir.path(), "empty.conll", "\n");
    let out = eastgen(dir.path(), &["stats", "--corpus", "empty.conll"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("empty dataset"));

    ok(dir.path(), &["build", "airline.conll", "--out", "trees"]);
    let text = stdout(&ok(dir.path(), &["stats", "--trees", "trees"]));
    assert!(text.contains("tree airline"));
    assert!(text.contains("exchangeable=1"));
}
