//! Load a corpus file and run every validation check.
//!
//! ```sh
//! cargo run --example validate_corpus
//! ```

use alignrank::corpus::{filter_evaluable, load_corpus, validate_corpus};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/corpus.jsonl");
    let corpus = load_corpus(path)?;
    println!(
        "loaded {} topics / {} resources from {path}",
        corpus.topics.len(),
        corpus.resource_count()
    );

    let report = validate_corpus(&corpus);
    for issue in &report.errors {
        println!("error: {}: {}", issue.location, issue.message);
    }
    for issue in &report.warnings {
        println!("warning: {}: {}", issue.location, issue.message);
    }
    println!("evaluable topics: {}", report.evaluable_topic_count);

    let evaluable = filter_evaluable(&corpus);
    for topic in &evaluable.topics {
        println!(
            "  {} [{}]: {} accepted / {} rejected",
            topic.topic_id,
            topic.domain,
            topic.accepted().count(),
            topic.rejected().count()
        );
    }
    Ok(())
}
