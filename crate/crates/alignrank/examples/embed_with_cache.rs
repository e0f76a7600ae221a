//! Embed a whole corpus through the content-addressed cache: the first pass
//! computes, the second is served entirely from disk.
//!
//! ```sh
//! cargo run --example embed_with_cache
//! ```

use alignrank::corpus::load_corpus;
use alignrank::embed::{embed_corpus, ProviderConfig, VectorCache};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/data/corpus.jsonl"
    ))?;

    let dir = tempfile::tempdir()?;
    let cache = VectorCache::open(dir.path())?;
    let provider = ProviderConfig::deterministic("demo", 64, 0);

    let progress = |p: alignrank::embed::EmbedProgress| {
        println!(
            "  {}/{} {} {}",
            p.completed,
            p.total,
            p.resource_id,
            if p.cache_hit { "(cache)" } else { "(computed)" }
        );
    };

    println!("first pass:");
    let first = embed_corpus(&provider, &corpus, &cache, Some(&progress))?;
    println!("computed {} vectors, {} cache hits", first.computed, first.cache_hits);

    println!("\nsecond pass:");
    let second = embed_corpus(&provider, &corpus, &cache, Some(&progress))?;
    println!("computed {} vectors, {} cache hits", second.computed, second.cache_hits);

    assert_eq!(first.vectors, second.vectors);
    println!("\ncache dir held {} entries; results are byte-identical", cache.len()?);
    Ok(())
}
