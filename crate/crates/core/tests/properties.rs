use std::collections::BTreeMap;

use eastgen_core::builder::{determine_main_entities, entity_occurrence};
use eastgen_core::dataset::{fill_template, parse_conll, parse_records, record_line};
use eastgen_core::east::enumerate_language;
use eastgen_core::synthetic::{even_sizes, ground_truth, random_tree, sample_corpus, to_conll, TreeShape};
use eastgen_core::{
    abstract_entities, build, build_dataset, cosine_similarity, AnnotatedSentence, BuilderConfig, Dataset, East,
    EastNode, Sampler, Tag, DEFAULT_THRESHOLD,
};
use proptest::prelude::*;

fn sentence() -> impl Strategy<Value = AnnotatedSentence> {
    let token = prop::sample::select(vec!["fly", "to", "boston", "new", "york", "on", "may", "1st", "?"]);
    let label = prop::sample::select(vec!["city", "date", "airline"]);
    // (tokens per element, Some(label) for an entity span)
    prop::collection::vec((prop::collection::vec(token, 1..3), prop::option::of(label)), 1..6).prop_map(|parts| {
        let mut tokens = Vec::new();
        let mut slots = Vec::new();
        for (words, label) in parts {
            match label {
                Some(label) => {
                    for (i, w) in words.iter().enumerate() {
                        tokens.push(w.to_string());
                        slots.push(if i == 0 {
                            Tag::Begin(label.to_string())
                        } else {
                            Tag::Inside(label.to_string())
                        });
                    }
                }
                None => {
                    for w in words {
                        tokens.push(w.to_string());
                        slots.push(Tag::Outside);
                    }
                }
            }
        }
        AnnotatedSentence {
            tokens,
            slots,
            intent: Some("x".into()),
        }
    })
}

proptest! {
    #[test]
    fn abstraction_round_trips(s in sentence()) {
        let (template, mentions) = abstract_entities(&s);
        let begins = s.slots.iter().filter(|t| matches!(t, Tag::Begin(_))).count();
        prop_assert_eq!(template.placeholders().count(), begins);
        prop_assert_eq!(mentions.len(), begins);
        let (tokens, slots) = fill_template(&template.segments, &mentions);
        prop_assert_eq!(tokens, s.tokens);
        prop_assert_eq!(slots, s.slots);
    }

    #[test]
    fn formats_round_trip(s in sentence()) {
        let conll = to_conll(std::slice::from_ref(&s));
        prop_assert_eq!(&parse_conll(&conll).unwrap()[0], &s);
        let line = record_line(&s.tokens, &s.slots, s.intent.as_deref());
        prop_assert_eq!(&parse_records(&line).unwrap()[0], &s);
    }

    #[test]
    fn dataset_ignores_sentence_order(sentences in prop::collection::vec(sentence(), 1..12), seed in any::<u64>()) {
        let mut shuffled = sentences.clone();
        Sampler::new(seed, 0).shuffle(&mut shuffled);
        let a = build_dataset(sentences).unwrap();
        let b = build_dataset(shuffled).unwrap();
        prop_assert_eq!(&a.lexicon, &b.lexicon);
        let counts = |d: &eastgen_core::Dataset| -> BTreeMap<(String, String), u64> {
            d.by_intent
                .iter()
                .flat_map(|(i, ts)| ts.iter().map(move |t| ((i.clone(), t.to_string()), t.source_count)))
                .collect()
        };
        prop_assert_eq!(counts(&a), counts(&b));
    }

    #[test]
    fn cosine_is_symmetric_and_scale_free(
        a in prop::collection::vec(-10.0f64..10.0, 4),
        b in prop::collection::vec(-10.0f64..10.0, 4),
        scale in 0.01f64..100.0,
    ) {
        prop_assume!(a.iter().any(|x| x.abs() > 1e-3) && b.iter().any(|x| x.abs() > 1e-3));
        let ab = cosine_similarity(&a, &b).unwrap();
        let ba = cosine_similarity(&b, &a).unwrap();
        let scaled: Vec<f64> = a.iter().map(|x| x * scale).collect();
        prop_assert!((ab - ba).abs() < 1e-12);
        prop_assert!((cosine_similarity(&scaled, &b).unwrap() - ab).abs() < 1e-9);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn tree_documents_round_trip(seed in any::<u64>()) {
        let tree = random_tree(&mut Sampler::new(seed, 0), "intent", &TreeShape::default());
        let back = East::from_json(&tree.to_json()).unwrap();
        prop_assert_eq!(back, tree);
    }

    #[test]
    fn sequence_language_size_is_the_product(sizes in prop::collection::vec(1usize..4, 1..5)) {
        let children = sizes
            .iter()
            .enumerate()
            .map(|(i, &n)| EastNode::fixed((0..n).map(|j| (format!("w{i}_{j}"), 1))))
            .collect();
        let tree = East::new("x", EastNode::order(children));
        let language = enumerate_language(&tree, false, 10_000).unwrap();
        prop_assert_eq!(language.len(), sizes.iter().product::<usize>());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_trees_cover_their_training_templates(seed in any::<u64>(), n in 20usize..200) {
        let truth = ground_truth(seed, 3);
        let corpus = sample_corpus(&truth, &even_sizes(&truth, n), seed).unwrap();
        let dataset = build_dataset(corpus).unwrap();
        let trees = build(&dataset, &BuilderConfig::default()).unwrap();
        for (intent, templates) in &dataset.by_intent {
            let language = enumerate_language(&trees[intent], true, 5_000_000).unwrap();
            for t in templates {
                prop_assert!(language.contains(&t.segments), "{} missing {}", intent, t);
            }
        }
    }

    /// Holds only while the added sentence leaves the main-entity set alone;
    /// otherwise the spine itself can change.
    #[test]
    fn language_grows_with_the_corpus(seed in any::<u64>(), n in 5usize..60) {
        let truth = ground_truth(seed, 1);
        let corpus = sample_corpus(&truth, &even_sizes(&truth, n + 1), seed).unwrap();
        let before = build_dataset(corpus[..n].to_vec()).unwrap();
        let after = build_dataset(corpus).unwrap();
        let intent = before.by_intent.keys().next().unwrap().clone();
        let main = |d: &Dataset| determine_main_entities(&entity_occurrence(&d.by_intent[&intent]), DEFAULT_THRESHOLD);
        prop_assume!(main(&before) == main(&after));
        let config = BuilderConfig::default();
        let old = enumerate_language(&build(&before, &config).unwrap()[&intent], true, 5_000_000).unwrap();
        let new = enumerate_language(&build(&after, &config).unwrap()[&intent], true, 5_000_000).unwrap();
        for t in &old.templates {
            prop_assert!(new.contains(t), "lost {:?}", t);
        }
    }
}
