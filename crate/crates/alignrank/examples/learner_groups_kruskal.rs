//! Analyze a learner experiment: Kruskal-Wallis across the three rank groups,
//! then Dunn's pairwise z-tests with Bonferroni-adjusted verdicts.
//!
//! ```sh
//! cargo run --example learner_groups_kruskal
//! ```

use alignrank::corpus::load_learner_scores;
use alignrank::stats::{dunn_test, kruskal_wallis};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table = load_learner_scores(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/data/learner_scores.jsonl"
    ))?;

    let group_scores = table.group_scores();
    let group_labels: Vec<u8> = group_scores.iter().map(|(g, _)| *g).collect();
    let groups: Vec<Vec<f64>> = group_scores.into_iter().map(|(_, v)| v).collect();

    let kw = kruskal_wallis(&groups, true)?;
    println!("group  n    mean rank");
    for ((label, size), mean_rank) in group_labels
        .iter()
        .zip(&kw.group_sizes)
        .zip(&kw.group_mean_ranks)
    {
        println!("{label:<6} {size:<4} {mean_rank:.2}");
    }
    println!(
        "\nKruskal-Wallis: H({}) = {:.4}, p = {:.4}{}",
        kw.df,
        kw.h_statistic,
        kw.p_value,
        if kw.tie_corrected { " (tie-corrected)" } else { "" }
    );

    let dunn = dunn_test(&groups, 0.05, true)?;
    println!(
        "\nDunn pairwise comparisons (verdicts at alpha/m = {:.4}):",
        dunn.adjusted_alpha
    );
    for comparison in &dunn.comparisons {
        println!(
            "  group {} vs {}: z = {:+.4}, p = {:.4} (bonferroni {:.4}) -> {}",
            group_labels[comparison.group_a],
            group_labels[comparison.group_b],
            comparison.z,
            comparison.p_unadjusted,
            comparison.p_bonferroni,
            if comparison.significant_at_adjusted_alpha {
                "Significant"
            } else {
                "Not Significant"
            }
        );
    }
    Ok(())
}
