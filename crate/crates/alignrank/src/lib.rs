//! `alignrank` benchmarks how well text-embedding models rank educational
//! resources by their alignment with an intended learning outcome.
//!
//! The workflow mirrors a common evaluation setup: a labeled corpus of
//! resources (each `accepted` or `rejected` by domain experts) is embedded
//! one document at a time, every accepted resource serves in turn as the
//! alignment reference for its topic, the remaining resources are ordered by
//! cosine similarity to that reference, and the resulting rankings are scored
//! with a pairwise accuracy metric and Precision@k. A statistics layer
//! compares models with the Friedman test (effect size via Kendall's W) and
//! Nemenyi post-hoc comparisons, and analyzes learner-score experiments with
//! the Kruskal-Wallis H test followed by Dunn's pairwise tests under
//! Bonferroni correction.
//!
//! # Modules
//!
//! * [`corpus`] — the labeled ground-truth data model and its line-delimited
//!   JSON file format, plus validation and learner-score tables.
//! * [`embed`] — transcript segmentation, per-segment embedding through a
//!   configurable provider (HTTP or a deterministic offline provider), mean
//!   pooling, and a content-addressed vector cache.
//! * [`rank`] — cosine similarity and reference-based ranking, including the
//!   source platform's baseline ordering.
//! * [`metrics`] — pairwise alignment accuracy, Precision@k, and per-topic /
//!   per-model / per-domain aggregation.
//! * [`stats`] — Friedman / Kendall's W / Nemenyi and Kruskal-Wallis / Dunn /
//!   Bonferroni, on top of hand-rolled chi-square and normal survival
//!   functions.
//! * [`cli`] — the command pipeline (`validate`, `embed`, `evaluate`,
//!   `stats`, `learner`) and its CSV / Markdown / JSON report emission.
//!
//! # Example
//!
//! Rank a two-topic corpus with the deterministic provider and score it:
//!
//! ```
//! use alignrank::corpus::{validate_corpus, Corpus};
//! use alignrank::embed::{embed_corpus, ProviderConfig, VectorCache};
//! use alignrank::metrics::{topic_metrics, DEFAULT_PRECISION_KS};
//! use alignrank::rank::{rank_topic, ReferencePolicy};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let jsonl = r#"{"topic_id":"t1","topic_title":"Lists","domain":"Python","resource_id":"r1","transcript":"lists hold ordered items","label":"accepted","baseline_rank":1,"origin":"collected"}
//! {"topic_id":"t1","topic_title":"Lists","domain":"Python","resource_id":"r2","transcript":"lists hold ordered items and grow","label":"accepted","baseline_rank":2,"origin":"collected"}
//! {"topic_id":"t1","topic_title":"Lists","domain":"Python","resource_id":"r3","transcript":"volcanoes erupt molten rock","label":"rejected","baseline_rank":3,"origin":"collected"}"#;
//! let corpus = Corpus::from_jsonl_reader(jsonl.as_bytes())?;
//! assert!(validate_corpus(&corpus).errors.is_empty());
//!
//! let dir = std::env::temp_dir().join("alignrank-doc-example");
//! let cache = VectorCache::open(&dir)?;
//! let provider = ProviderConfig::deterministic("demo", 64, 0);
//! let run = embed_corpus(&provider, &corpus, &cache, None)?;
//!
//! let topic = &corpus.topics[0];
//! let rankings = rank_topic(topic, &run.vectors, &ReferencePolicy::AllAccepted, "demo")?;
//! let row = topic_metrics(&rankings, &corpus.labels(), DEFAULT_PRECISION_KS)?;
//! assert!(row.accuracy >= 0.0 && row.accuracy <= 1.0);
//! # std::fs::remove_dir_all(&dir).ok();
//! # Ok(())
//! # }
//! ```

pub mod cli;
pub mod corpus;
pub mod embed;
pub mod metrics;
pub mod rank;
pub mod stats;

pub use corpus::{Corpus, Label, Origin, ResourceRecord, Topic, ValidationReport};
pub use embed::{EmbeddingVector, ProviderConfig, VectorCache};
pub use metrics::{MetricRow, ModelSummary, PairAccuracy};
pub use rank::{RankedList, ReferencePolicy, SimilarityScore};
pub use stats::{DunnResult, FriedmanResult, KruskalWallisResult, NemenyiResult};
