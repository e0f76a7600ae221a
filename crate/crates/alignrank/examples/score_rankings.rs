//! Score rankings with pairwise alignment accuracy and Precision@k, then
//! aggregate per topic, per model, and per educational domain.
//!
//! ```sh
//! cargo run --example score_rankings
//! ```

use alignrank::corpus::{filter_evaluable, load_corpus};
use alignrank::embed::{embed_corpus, ProviderConfig, VectorCache};
use alignrank::metrics::{
    aggregate_by_domain, pairwise_accuracy, precision_at_k, summarize_model, topic_metrics,
    DEFAULT_PRECISION_KS,
};
use alignrank::rank::{rank_topic, ReferencePolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = filter_evaluable(&load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/data/corpus.jsonl"
    ))?);
    let labels = corpus.labels();

    let dir = tempfile::tempdir()?;
    let cache = VectorCache::open(dir.path())?;
    let provider = ProviderConfig::deterministic("demo", 64, 0);
    let run = embed_corpus(&provider, &corpus, &cache, None)?;

    let mut rows = Vec::new();
    for topic in &corpus.topics {
        let rankings = rank_topic(topic, &run.vectors, &ReferencePolicy::AllAccepted, "demo")?;
        // Per-reference detail for the first topic.
        if topic.topic_id == corpus.topics[0].topic_id {
            for ranking in &rankings {
                let pairs = pairwise_accuracy(ranking, &labels)?;
                println!(
                    "{} ref {}: accuracy {}/{} = {:.3}, P@3 = {:.3}",
                    topic.topic_id,
                    ranking.reference_id,
                    pairs.correct_pairs,
                    pairs.pair_count,
                    pairs.value(),
                    precision_at_k(ranking, &labels, 3)?
                );
            }
        }
        rows.push(topic_metrics(&rankings, &labels, DEFAULT_PRECISION_KS)?);
    }

    println!("\nper-topic rows:");
    for row in &rows {
        println!(
            "  {}: accuracy {:.3}, P@3 {:.3}, P@5 {:.3} ({} refs, {} pairs each)",
            row.topic_id,
            row.accuracy,
            row.precision_at[&3],
            row.precision_at[&5],
            row.reference_count,
            row.pair_count
        );
    }

    let summary = summarize_model(&rows)?;
    println!(
        "\nmodel {}: accuracy {:.3} ± {:.3}, P@3 {:.3} ± {:.3} over {} topics",
        summary.model_id,
        summary.mean_accuracy,
        summary.sd_accuracy,
        summary.mean_precision_at[&3],
        summary.sd_precision_at[&3],
        summary.topic_count
    );

    println!("\nper-domain means:");
    for aggregate in aggregate_by_domain(&rows, &corpus)? {
        println!(
            "  {} / {}: {:.3} over {} topic(s)",
            aggregate.domain, aggregate.model_id, aggregate.mean_accuracy, aggregate.topic_count
        );
    }
    Ok(())
}
