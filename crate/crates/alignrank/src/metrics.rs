//! Ranking quality metrics: pairwise alignment accuracy over
//! (accepted, rejected) pairs, Precision@k, and aggregation per topic,
//! per model, and per educational domain.
//!
//! Pairwise accuracy is kept as an exact integer ratio
//! (`correct_pairs / pair_count`) so complement and oracle checks can be
//! made without floating-point slack.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Label};
use crate::rank::RankedList;

/// Default Precision@k cutoffs reported by the harness.
pub const DEFAULT_PRECISION_KS: &[usize] = &[3, 5];

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("entry {resource_id} has no label")]
    UnlabeledEntry { resource_id: String },
    #[error("ranking for topic {topic_id} has no (accepted, rejected) pairs")]
    NoPairs { topic_id: String },
    #[error("k must be >= 1")]
    ZeroK,
    #[error("no rankings given")]
    EmptyRankings,
    #[error("rankings mix topics ({0} vs {1})")]
    MixedTopics(String, String),
    #[error("rankings mix models ({0} vs {1})")]
    MixedModels(String, String),
    #[error("no metric rows given")]
    EmptyRows,
    #[error("rows mix models ({0} vs {1})")]
    MixedModelRows(String, String),
    #[error("row references unknown topic {topic_id}")]
    UnknownTopic { topic_id: String },
}

/// Pairwise accuracy as an exact ratio of resolved pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairAccuracy {
    /// (accepted, rejected) pairs where the accepted entry sits strictly
    /// higher in the list.
    pub correct_pairs: u64,
    /// All (accepted, rejected) pairs among the entries.
    pub pair_count: u64,
}

impl PairAccuracy {
    pub fn value(self) -> f64 {
        self.correct_pairs as f64 / self.pair_count as f64
    }

    /// The exact complement: what a reversed list scores.
    pub fn complement(self) -> PairAccuracy {
        PairAccuracy {
            correct_pairs: self.pair_count - self.correct_pairs,
            pair_count: self.pair_count,
        }
    }
}

fn entry_labels(
    ranked: &RankedList,
    labels: &BTreeMap<String, Label>,
) -> Result<Vec<Label>, MetricsError> {
    ranked
        .entries
        .iter()
        .map(|e| {
            labels
                .get(&e.resource_id)
                .copied()
                .ok_or_else(|| MetricsError::UnlabeledEntry {
                    resource_id: e.resource_id.clone(),
                })
        })
        .collect()
}

/// Fraction of (accepted, rejected) entry pairs where the accepted entry is
/// ranked strictly higher. The list is a total order, so every pair is
/// decidable.
pub fn pairwise_accuracy(
    ranked: &RankedList,
    labels: &BTreeMap<String, Label>,
) -> Result<PairAccuracy, MetricsError> {
    let entry_labels = entry_labels(ranked, labels)?;
    let accepted_total = entry_labels.iter().filter(|&&l| l == Label::Accepted).count() as u64;
    let rejected_total = entry_labels.len() as u64 - accepted_total;
    let pair_count = accepted_total * rejected_total;
    if pair_count == 0 {
        return Err(MetricsError::NoPairs {
            topic_id: ranked.topic_id.clone(),
        });
    }

    // Walking top to bottom, every rejected entry is out-ranked by exactly
    // the accepted entries seen so far.
    let mut accepted_above = 0u64;
    let mut correct_pairs = 0u64;
    for label in entry_labels {
        match label {
            Label::Accepted => accepted_above += 1,
            Label::Rejected => correct_pairs += accepted_above,
        }
    }
    Ok(PairAccuracy {
        correct_pairs,
        pair_count,
    })
}

/// Alias of [`pairwise_accuracy`] for rankings of generated resources; the
/// contract is identical, grouping by use case and domain happens in the
/// report layer.
pub fn generated_resource_accuracy(
    ranked: &RankedList,
    labels: &BTreeMap<String, Label>,
) -> Result<PairAccuracy, MetricsError> {
    pairwise_accuracy(ranked, labels)
}

/// Accepted fraction of the top `k` entries. The denominator stays `k` even
/// when the list is shorter: unfilled slots count as misses.
pub fn precision_at_k(
    ranked: &RankedList,
    labels: &BTreeMap<String, Label>,
    k: usize,
) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::ZeroK);
    }
    let entry_labels = entry_labels(ranked, labels)?;
    let hits = entry_labels
        .iter()
        .take(k)
        .filter(|&&l| l == Label::Accepted)
        .count();
    Ok(hits as f64 / k as f64)
}

/// Per-topic, per-model metric values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub topic_id: String,
    pub model_id: String,
    /// Unweighted mean of the per-reference pairwise accuracies.
    pub accuracy: f64,
    /// Unweighted mean of the per-reference Precision@k, keyed by k.
    pub precision_at: BTreeMap<usize, f64>,
    /// Pairs per reference ranking (identical across references of a topic).
    pub pair_count: u64,
    pub reference_count: usize,
}

/// Averages one topic's per-reference rankings into a [`MetricRow`].
///
/// All rankings must share a topic and model and each must contain at least
/// one accepted and one rejected entry.
pub fn topic_metrics(
    rankings: &[RankedList],
    labels: &BTreeMap<String, Label>,
    ks: &[usize],
) -> Result<MetricRow, MetricsError> {
    let first = rankings.first().ok_or(MetricsError::EmptyRankings)?;
    for ranking in rankings {
        if ranking.topic_id != first.topic_id {
            return Err(MetricsError::MixedTopics(
                first.topic_id.clone(),
                ranking.topic_id.clone(),
            ));
        }
        if ranking.model_id != first.model_id {
            return Err(MetricsError::MixedModels(
                first.model_id.clone(),
                ranking.model_id.clone(),
            ));
        }
    }

    let n = rankings.len() as f64;
    let mut accuracy_sum = 0.0;
    let mut pair_count = 0;
    let mut precision_sums: BTreeMap<usize, f64> = ks.iter().map(|&k| (k, 0.0)).collect();
    for ranking in rankings {
        let pairs = pairwise_accuracy(ranking, labels)?;
        accuracy_sum += pairs.value();
        pair_count = pairs.pair_count;
        for &k in ks {
            *precision_sums.get_mut(&k).expect("k preinserted") +=
                precision_at_k(ranking, labels, k)?;
        }
    }

    Ok(MetricRow {
        topic_id: first.topic_id.clone(),
        model_id: first.model_id.clone(),
        accuracy: accuracy_sum / n,
        precision_at: precision_sums
            .into_iter()
            .map(|(k, sum)| (k, sum / n))
            .collect(),
        pair_count,
        reference_count: rankings.len(),
    })
}

/// Mean and sample standard deviation (n − 1) across topics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub model_id: String,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_precision_at: BTreeMap<usize, f64>,
    pub sd_precision_at: BTreeMap<usize, f64>,
    pub topic_count: usize,
}

fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates one model's per-topic rows into its summary line.
pub fn summarize_model(rows: &[MetricRow]) -> Result<ModelSummary, MetricsError> {
    let first = rows.first().ok_or(MetricsError::EmptyRows)?;
    for row in rows {
        if row.model_id != first.model_id {
            return Err(MetricsError::MixedModelRows(
                first.model_id.clone(),
                row.model_id.clone(),
            ));
        }
    }
    let accuracies: Vec<f64> = rows.iter().map(|r| r.accuracy).collect();
    let (mean_accuracy, sd_accuracy) = mean_and_sd(&accuracies);

    let mut mean_precision_at = BTreeMap::new();
    let mut sd_precision_at = BTreeMap::new();
    for &k in first.precision_at.keys() {
        let values: Vec<f64> = rows
            .iter()
            .filter_map(|r| r.precision_at.get(&k).copied())
            .collect();
        let (mean, sd) = mean_and_sd(&values);
        mean_precision_at.insert(k, mean);
        sd_precision_at.insert(k, sd);
    }

    Ok(ModelSummary {
        model_id: first.model_id.clone(),
        mean_accuracy,
        sd_accuracy,
        mean_precision_at,
        sd_precision_at,
        topic_count: rows.len(),
    })
}

/// Mean accuracy per (domain, model) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainAggregate {
    pub domain: String,
    pub model_id: String,
    pub mean_accuracy: f64,
    pub topic_count: usize,
}

/// Unweighted mean accuracy over each domain's topics, one aggregate per
/// (domain, model) pair, ordered by domain then model.
pub fn aggregate_by_domain(
    rows: &[MetricRow],
    corpus: &Corpus,
) -> Result<Vec<DomainAggregate>, MetricsError> {
    let mut sums: BTreeMap<(String, String), (f64, usize)> = BTreeMap::new();
    for row in rows {
        let topic = corpus
            .topic(&row.topic_id)
            .ok_or_else(|| MetricsError::UnknownTopic {
                topic_id: row.topic_id.clone(),
            })?;
        let entry = sums
            .entry((topic.domain.clone(), row.model_id.clone()))
            .or_insert((0.0, 0));
        entry.0 += row.accuracy;
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|((domain, model_id), (sum, count))| DomainAggregate {
            domain,
            model_id,
            mean_accuracy: sum / count as f64,
            topic_count: count,
        })
        .collect())
}
