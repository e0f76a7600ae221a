//! Rank a topic's resources by cosine similarity to each accepted reference,
//! and show the platform baseline order scored the same way.
//!
//! ```sh
//! cargo run --example rank_by_alignment
//! ```

use alignrank::corpus::load_corpus;
use alignrank::embed::{embed_corpus, ProviderConfig, VectorCache};
use alignrank::rank::{baseline_ranking, rank_topic, ReferencePolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/data/corpus.jsonl"
    ))?;
    let dir = tempfile::tempdir()?;
    let cache = VectorCache::open(dir.path())?;
    let provider = ProviderConfig::deterministic("demo", 64, 0);
    let run = embed_corpus(&provider, &corpus, &cache, None)?;

    let topic = &corpus.topics[0];
    println!("topic {} ({})\n", topic.topic_id, topic.title);

    let rankings = rank_topic(topic, &run.vectors, &ReferencePolicy::AllAccepted, "demo")?;
    for ranking in &rankings {
        println!("reference {}:", ranking.reference_id);
        for (position, entry) in ranking.entries.iter().enumerate() {
            println!(
                "  {}. {} (cosine {:+.4})",
                position + 1,
                entry.resource_id,
                entry.score.value()
            );
        }
    }

    // One seeded draw instead of the full sweep.
    let single = rank_topic(
        topic,
        &run.vectors,
        &ReferencePolicy::SingleRandom { seed: 7 },
        "demo",
    )?;
    println!("\nsingle_random(seed=7) chose reference {}", single[0].reference_id);

    let baseline = baseline_ranking(topic)?;
    let order: Vec<&str> = baseline.resource_ids().collect();
    println!("baseline order: {}", order.join(" > "));
    Ok(())
}
