//! Entity aware syntax trees: induction from slot/intent-annotated corpora,
//! weighted generation of labeled mock sentences, and regex export.

pub mod builder;
pub mod dataset;
pub mod east;
pub mod embeddings;
pub mod generator;
pub mod regex_export;
pub mod synthetic;

pub use builder::{build, build_intent, BuildError, BuilderConfig, DEFAULT_THRESHOLD};
pub use dataset::{
    abstract_entities, build_dataset, build_dataset_with_default, AnnotatedSentence, CorpusFormat, Dataset,
    DatasetError, EntityLexicon, Segment, SentenceTemplate, Tag,
};
pub use east::{enumerate_language, validate, validate_forest, DocumentError, East, EastNode, NodeKind, Violation};
pub use embeddings::{cosine_similarity, EmbeddingError, EmbeddingTable};
pub use generator::{
    Amount, Batch, GenerateError, GeneratedSentence, GenerationConfig, GenerationStats, Generator, OutputFormat,
    Sampler,
};
pub use regex_export::{export_regex, CompiledBundles, RegexBundle, RegexExportError};
