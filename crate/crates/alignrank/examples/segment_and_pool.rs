//! Segment a long transcript within a budget, embed each piece with the
//! deterministic provider, and mean-pool into one document vector.
//!
//! ```sh
//! cargo run --example segment_and_pool
//! ```

use alignrank::embed::{deterministic_embed, mean_pool, segment_text, BudgetUnit};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let transcript = "Timeboxing assigns a fixed slot to each task. \
        You plan the calendar first, then work the plan. \
        Review at the end of the week closes the loop.";

    for (budget, unit) in [(60, BudgetUnit::Characters), (8, BudgetUnit::WhitespaceTokens)] {
        let segments = segment_text(transcript, budget, unit)?;
        println!("budget {budget} {unit:?} -> {} segments", segments.len());
        for segment in &segments {
            println!("  [{}] ({} units) {:?}", segment.index, segment.unit_count, segment.text);
        }
        // The segments always reassemble the exact input.
        let joined: String = segments.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(joined, transcript);

        let vectors: Vec<_> = segments
            .iter()
            .map(|s| deterministic_embed(&s.text, 16, 0))
            .collect();
        let pooled = mean_pool(&vectors)?;
        println!(
            "  pooled dim {} norm {:.4} first values {:?}\n",
            pooled.dim(),
            pooled.norm(),
            &pooled.values()[..4]
        );
    }
    Ok(())
}
