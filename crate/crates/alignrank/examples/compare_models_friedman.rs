//! Compare several "models" over the same topics with the Friedman test,
//! Kendall's W, and Nemenyi post-hoc verdicts.
//!
//! The demo pits three deterministic providers (different seeds) and the
//! platform baseline against each other; with hash-based vectors none should
//! dominate, so the test usually reports no significant difference.
//!
//! ```sh
//! cargo run --example compare_models_friedman
//! ```

use alignrank::corpus::{filter_evaluable, load_corpus};
use alignrank::embed::{embed_corpus, ProviderConfig, VectorCache};
use alignrank::metrics::{pairwise_accuracy, topic_metrics};
use alignrank::rank::{baseline_ranking, rank_topic, ReferencePolicy};
use alignrank::stats::{friedman_test, nemenyi};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = filter_evaluable(&load_corpus(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/data/corpus.jsonl"
    ))?);
    let labels = corpus.labels();
    let dir = tempfile::tempdir()?;
    let cache = VectorCache::open(dir.path())?;

    // Accuracy matrix: one row per topic, one column per model.
    let mut model_ids = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();

    for seed in [0, 1, 2] {
        let model_id = format!("det-seed{seed}");
        let provider = ProviderConfig::deterministic(&model_id, 64, seed);
        let run = embed_corpus(&provider, &corpus, &cache, None)?;
        let mut column = Vec::new();
        for topic in &corpus.topics {
            let rankings = rank_topic(topic, &run.vectors, &ReferencePolicy::AllAccepted, &model_id)?;
            column.push(topic_metrics(&rankings, &labels, &[])?.accuracy);
        }
        model_ids.push(model_id);
        columns.push(column);
    }

    // Baseline as one more column.
    let mut baseline_column = Vec::new();
    for topic in &corpus.topics {
        let ranking = baseline_ranking(topic)?;
        baseline_column.push(pairwise_accuracy(&ranking, &labels)?.value());
    }
    model_ids.push("baseline".into());
    columns.push(baseline_column);

    let matrix: Vec<Vec<f64>> = (0..corpus.topics.len())
        .map(|row| columns.iter().map(|col| col[row]).collect())
        .collect();

    println!("accuracy matrix (rows = topics, columns = {model_ids:?}):");
    for (topic, row) in corpus.topics.iter().zip(&matrix) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.3}")).collect();
        println!("  {:<12} {}", topic.topic_id, cells.join("  "));
    }

    let friedman = friedman_test(&matrix, true)?;
    println!(
        "\nFriedman: chi2({}) = {:.4}, p = {:.4}, Kendall's W = {:.4}",
        friedman.df, friedman.chi_square, friedman.p_value, friedman.kendalls_w
    );

    let nemenyi_result = nemenyi(&matrix, 0.05, &model_ids)?;
    println!(
        "Nemenyi critical difference: {:.4} (q = {:.3})",
        nemenyi_result.critical_difference, nemenyi_result.q_value
    );
    for (model, mean_rank) in &nemenyi_result.mean_ranks {
        println!("  mean rank {mean_rank:.3}  {model}");
    }
    for comparison in &nemenyi_result.comparisons {
        println!(
            "  {} vs {}: diff {:+.3} -> {}",
            comparison.model_a,
            comparison.model_b,
            comparison.mean_rank_diff,
            if comparison.significant { "significant" } else { "not significant" }
        );
    }
    Ok(())
}
