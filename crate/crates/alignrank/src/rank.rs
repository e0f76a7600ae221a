//! Alignment rankings: order a topic's resources by descending cosine
//! similarity to an accepted reference resource, or by the source platform's
//! baseline order.
//!
//! Every ranking is a total order: equal similarity scores fall back to
//! ascending resource id, so downstream metrics never see positional ties.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Topic;
use crate::embed::EmbeddingVector;

/// Synthetic reference id carried by baseline rankings; never a real
/// resource id.
pub const BASELINE_REFERENCE_ID: &str = "__baseline__";

/// Model id under which baseline rankings are scored alongside embedding
/// models.
pub const BASELINE_MODEL_ID: &str = "baseline";

#[derive(Debug, Error)]
pub enum RankError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero-norm embedding for {resource_id}")]
    ZeroNorm { resource_id: String },
    #[error("similarity must be finite and within [-1, 1] (got {0})")]
    InvalidScore(f64),
    #[error("no candidates to rank for topic {topic_id}")]
    NoCandidates { topic_id: String },
    #[error("reference {reference_id} appears among candidates")]
    ReferenceAmongCandidates { reference_id: String },
    #[error("duplicate entry for resource {resource_id}")]
    DuplicateEntry { resource_id: String },
    #[error("topic {topic_id} has no accepted resources")]
    NoAcceptedResources { topic_id: String },
    #[error("missing embedding for resource {resource_id}")]
    MissingEmbedding { resource_id: String },
    #[error("topic {topic_id}: {message}")]
    BaselineOrder { topic_id: String, message: String },
    #[error("malformed ranking line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Cosine similarity value, clamped to [-1, 1] to absorb rounding.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub fn new(value: f64) -> Result<Self, RankError> {
        if !value.is_finite() || !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&value) {
            return Err(RankError::InvalidScore(value));
        }
        Ok(Self(value.clamp(-1.0, 1.0)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Whether a ranking came from an embedding model or from the source
/// platform's original order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingSource {
    EmbeddingModel,
    Baseline,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub resource_id: String,
    pub score: SimilarityScore,
}

/// A total order over a topic's resources for one reference.
///
/// Entries are sorted by descending score, breaking exact score ties by
/// ascending resource id; the reference itself never appears.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub topic_id: String,
    pub reference_id: String,
    pub ranking_source: RankingSource,
    pub model_id: String,
    pub entries: Vec<RankedEntry>,
}

impl RankedList {
    /// Builds a ranking from unordered scored entries, enforcing the total
    /// order and uniqueness invariants.
    pub fn new(
        topic_id: impl Into<String>,
        reference_id: impl Into<String>,
        ranking_source: RankingSource,
        model_id: impl Into<String>,
        mut entries: Vec<RankedEntry>,
    ) -> Result<Self, RankError> {
        let reference_id = reference_id.into();
        let mut seen = std::collections::BTreeSet::new();
        for entry in &entries {
            if entry.resource_id == reference_id {
                return Err(RankError::ReferenceAmongCandidates {
                    reference_id: reference_id.clone(),
                });
            }
            if !seen.insert(entry.resource_id.clone()) {
                return Err(RankError::DuplicateEntry {
                    resource_id: entry.resource_id.clone(),
                });
            }
        }
        entries.sort_by(|a, b| {
            b.score
                .value()
                .total_cmp(&a.score.value())
                .then_with(|| a.resource_id.cmp(&b.resource_id))
        });
        Ok(Self {
            topic_id: topic_id.into(),
            reference_id,
            ranking_source,
            model_id: model_id.into(),
            entries,
        })
    }

    pub fn resource_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.resource_id.as_str())
    }

    /// A copy with the entry order reversed (scores untouched; used for
    /// metric complement checks).
    pub fn reversed(&self) -> Self {
        let mut clone = self.clone();
        clone.entries.reverse();
        clone
    }
}

/// How the reference resource is chosen per topic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferencePolicy {
    /// Every accepted resource serves as the reference once.
    AllAccepted,
    /// One reference drawn uniformly from the accepted resources by a
    /// seeded generator; deterministic for a fixed seed.
    SingleRandom { seed: u64 },
}

/// Cosine similarity between two embedding vectors of equal dimension.
pub fn cosine_similarity(
    a: &EmbeddingVector,
    b: &EmbeddingVector,
) -> Result<SimilarityScore, RankError> {
    if a.dim() != b.dim() {
        return Err(RankError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let mut dot = 0.0;
    let mut norm_a = 0.0;
    let mut norm_b = 0.0;
    for (x, y) in a.values().iter().zip(b.values()) {
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0.0 || norm_b == 0.0 {
        return Err(RankError::ZeroNorm {
            resource_id: String::new(),
        });
    }
    SimilarityScore::new(dot / (norm_a.sqrt() * norm_b.sqrt()))
}

/// Ranks `candidates` by descending cosine similarity to the reference.
pub fn rank_by_reference(
    reference_id: &str,
    reference: &EmbeddingVector,
    candidates: &BTreeMap<String, EmbeddingVector>,
    topic_id: &str,
    model_id: &str,
) -> Result<RankedList, RankError> {
    if candidates.is_empty() {
        return Err(RankError::NoCandidates {
            topic_id: topic_id.to_string(),
        });
    }
    if candidates.contains_key(reference_id) {
        return Err(RankError::ReferenceAmongCandidates {
            reference_id: reference_id.to_string(),
        });
    }
    let mut entries = Vec::with_capacity(candidates.len());
    for (resource_id, vector) in candidates {
        let score = cosine_similarity(reference, vector).map_err(|e| match e {
            RankError::ZeroNorm { .. } => RankError::ZeroNorm {
                resource_id: resource_id.clone(),
            },
            other => other,
        })?;
        entries.push(RankedEntry {
            resource_id: resource_id.clone(),
            score,
        });
    }
    RankedList::new(
        topic_id,
        reference_id,
        RankingSource::EmbeddingModel,
        model_id,
        entries,
    )
}

/// Seed for a topic's reference draw, derived so that the choice does not
/// depend on which other topics are present in the run.
fn topic_seed(seed: u64, topic_id: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(topic_id.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}

/// Deterministic uniform draw in `0..count` for a topic's reference
/// selection; fixed (seed, topic_id) always yields the same index.
pub fn reference_draw(seed: u64, topic_id: &str, count: usize) -> usize {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(topic_seed(seed, topic_id));
    rng.random_range(0..count)
}

/// Produces the topic's rankings under the given reference policy.
///
/// `all_accepted` yields one ranking per accepted resource, each excluding
/// its own reference; `single_random` yields exactly one.
pub fn rank_topic(
    topic: &Topic,
    embeddings: &BTreeMap<String, EmbeddingVector>,
    policy: &ReferencePolicy,
    model_id: &str,
) -> Result<Vec<RankedList>, RankError> {
    for resource in &topic.resources {
        if !embeddings.contains_key(&resource.resource_id) {
            return Err(RankError::MissingEmbedding {
                resource_id: resource.resource_id.clone(),
            });
        }
    }
    let accepted: Vec<&str> = topic.accepted().map(|r| r.resource_id.as_str()).collect();
    if accepted.is_empty() {
        return Err(RankError::NoAcceptedResources {
            topic_id: topic.topic_id.clone(),
        });
    }

    let references: Vec<&str> = match policy {
        ReferencePolicy::AllAccepted => accepted,
        ReferencePolicy::SingleRandom { seed } => {
            vec![accepted[reference_draw(*seed, &topic.topic_id, accepted.len())]]
        }
    };

    references
        .into_iter()
        .map(|reference_id| {
            let candidates: BTreeMap<String, EmbeddingVector> = topic
                .resources
                .iter()
                .filter(|r| r.resource_id != reference_id)
                .map(|r| (r.resource_id.clone(), embeddings[&r.resource_id].clone()))
                .collect();
            rank_by_reference(
                reference_id,
                &embeddings[reference_id],
                &candidates,
                &topic.topic_id,
                model_id,
            )
        })
        .collect()
}

/// The source platform's original ordering of the topic's collected
/// resources, expressed as a ranking so the metric layer scores it like any
/// model. Scores are a monotone surrogate (−rank / (n + 1)), used only for
/// ordering.
pub fn baseline_ranking(topic: &Topic) -> Result<RankedList, RankError> {
    let collected: Vec<_> = topic
        .resources
        .iter()
        .filter(|r| r.origin == crate::corpus::Origin::Collected)
        .collect();
    if collected.is_empty() {
        return Err(RankError::BaselineOrder {
            topic_id: topic.topic_id.clone(),
            message: "no collected resources".into(),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for resource in &collected {
        if !seen.insert(resource.baseline_rank) {
            return Err(RankError::BaselineOrder {
                topic_id: topic.topic_id.clone(),
                message: format!("duplicate baseline_rank {}", resource.baseline_rank),
            });
        }
    }
    let n = collected.len() as f64;
    let entries = collected
        .iter()
        .map(|r| {
            Ok(RankedEntry {
                resource_id: r.resource_id.clone(),
                score: SimilarityScore::new(-(r.baseline_rank as f64) / (n + 1.0))?,
            })
        })
        .collect::<Result<Vec<_>, RankError>>()?;
    RankedList::new(
        &topic.topic_id,
        BASELINE_REFERENCE_ID,
        RankingSource::Baseline,
        BASELINE_MODEL_ID,
        entries,
    )
}

/// Writes rankings one JSON object per line.
pub fn rankings_to_jsonl<W: Write>(rankings: &[RankedList], mut writer: W) -> Result<(), RankError> {
    for ranking in rankings {
        let line = serde_json::to_string(ranking).map_err(|e| RankError::MalformedLine {
            line: 0,
            message: e.to_string(),
        })?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads rankings written by [`rankings_to_jsonl`].
pub fn rankings_from_jsonl<R: Read>(reader: R) -> Result<Vec<RankedList>, RankError> {
    let reader = BufReader::new(reader);
    let mut rankings = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let ranking: RankedList =
            serde_json::from_str(&line).map_err(|e| RankError::MalformedLine {
                line: lineno + 1,
                message: e.to_string(),
            })?;
        rankings.push(ranking);
    }
    Ok(rankings)
}
