//! Shared inputs for the pipeline benchmarks.

use std::collections::BTreeMap;

use eastgen_core::synthetic::{even_sizes, ground_truth, sample_corpus, to_conll};
use eastgen_core::{build, build_dataset, BuilderConfig, Dataset, East, EntityLexicon};

/// A synthetic corpus and the trees built from it.
pub struct Workload {
    pub conll: String,
    pub dataset: Dataset,
    pub trees: BTreeMap<String, East>,
    pub lexicon: EntityLexicon,
}

pub fn workload(sentences: usize, intents: usize) -> Workload {
    let truth = ground_truth(17, intents);
    let corpus = sample_corpus(&truth, &even_sizes(&truth, sentences), 17).expect("fixture lexicon covers every slot");
    let conll = to_conll(&corpus);
    let dataset = build_dataset(corpus).expect("sampled corpus is well formed");
    let trees = build(&dataset, &BuilderConfig::default()).expect("builder output validates");
    let lexicon = dataset.lexicon.clone();
    Workload {
        conll,
        dataset,
        trees,
        lexicon,
    }
}
