//! Document embedding: segment a transcript within the provider's length
//! budget, embed each segment, and mean-pool into one vector per document.
//!
//! Providers are configured, not hard-coded: an HTTP endpoint speaking the
//! common embeddings JSON shape, or the literal `"deterministic"` endpoint —
//! an offline provider that derives unit vectors from cryptographic digests,
//! giving bit-identical results across runs and machines. Every computed
//! vector lands in a content-addressed file cache keyed by
//! (provider, model, document text).

mod cache;
mod http;

pub use cache::{cache_key, CacheLookup, VectorCache};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("text is empty")]
    EmptyText,
    #[error("budget must be >= 1")]
    ZeroBudget,
    #[error("cannot pool an empty vector list")]
    EmptyPool,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("provenance mismatch: {left} vs {right}")]
    ProvenanceMismatch { left: String, right: String },
    #[error("vector contains a non-finite value")]
    NonFinite,
    #[error("weights must be positive and finite")]
    BadWeights,
    #[error("provider {provider_id}: credential environment variable {var} is not set")]
    MissingCredential { provider_id: String, var: String },
    #[error("provider {provider_id}: transport error after {attempts} attempt(s): {message}")]
    Transport {
        provider_id: String,
        attempts: u32,
        message: String,
    },
    #[error("provider {provider_id}: HTTP status {status} after {attempts} attempt(s)")]
    HttpStatus {
        provider_id: String,
        status: u16,
        attempts: u32,
    },
    #[error("provider {provider_id}: malformed response: {message}")]
    BadResponse {
        provider_id: String,
        message: String,
    },
    #[error("provider {provider_id}: expected dimension {expected}, got {got}")]
    WrongDimension {
        provider_id: String,
        expected: usize,
        got: usize,
    },
    #[error("cache write failed for key {key}: {source}")]
    CacheWrite {
        key: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid provider config {provider_id}: {message}")]
    BadConfig {
        provider_id: String,
        message: String,
    },
    #[error("failed to read provider config: {0}")]
    ConfigIo(#[from] std::io::Error),
    #[error("failed to parse provider config: {0}")]
    ConfigParse(#[from] serde_json::Error),
    #[error("{} resource(s) failed to embed: {}", failures.len(), summarize_failures(failures))]
    Aggregate { failures: Vec<(String, String)> },
}

fn summarize_failures(failures: &[(String, String)]) -> String {
    failures
        .iter()
        .map(|(id, cause)| format!("{id} ({cause})"))
        .collect::<Vec<_>>()
        .join("; ")
}

/// A document embedding with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f64>,
    dim: usize,
    provider_id: String,
    model_id: String,
}

impl EmbeddingVector {
    pub fn new(
        values: Vec<f64>,
        provider_id: impl Into<String>,
        model_id: impl Into<String>,
    ) -> Result<Self, EmbedError> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(EmbedError::NonFinite);
        }
        Ok(Self {
            dim: values.len(),
            values,
            provider_id: provider_id.into(),
            model_id: model_id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provider_id(&self) -> &str {
        &self.provider_id
    }

    pub fn model_id(&self) -> &str {
        &self.model_id
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// How segment sizes are measured against the provider budget. Providers
/// count proprietary tokens; characters or whitespace tokens approximate
/// that without bundling a tokenizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetUnit {
    Characters,
    WhitespaceTokens,
}

/// Segment pooling weights; uniform matches plain averaging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolingWeight {
    #[default]
    Uniform,
    /// Weight each segment by its unit count.
    UnitCountWeighted,
}

/// One embedding provider: either an HTTP endpoint or the literal
/// `"deterministic"` offline provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub provider_id: String,
    pub model_id: String,
    /// URL of the embeddings endpoint, or `"deterministic"`.
    pub endpoint: String,
    /// Segment budget in `unit`s.
    pub max_units: usize,
    pub unit: BudgetUnit,
    pub max_parallel_requests: usize,
    pub max_retries: u32,
    /// Name of the environment variable holding the bearer token; empty for
    /// providers that need no credential.
    pub credential_env_var: String,
    /// Output dimension. Required for the deterministic provider; when set
    /// for an HTTP provider the response dimension is enforced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Seed for the deterministic provider.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pooling: PoolingWeight,
}

pub const DETERMINISTIC_ENDPOINT: &str = "deterministic";

impl ProviderConfig {
    /// An offline provider for tests and reproducible runs.
    pub fn deterministic(provider_id: impl Into<String>, dim: usize, seed: u64) -> Self {
        let provider_id = provider_id.into();
        Self {
            model_id: format!("{provider_id}-d{dim}"),
            provider_id,
            endpoint: DETERMINISTIC_ENDPOINT.into(),
            max_units: 2000,
            unit: BudgetUnit::Characters,
            max_parallel_requests: 4,
            max_retries: 0,
            credential_env_var: String::new(),
            dim: Some(dim),
            seed,
            pooling: PoolingWeight::Uniform,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        self.endpoint == DETERMINISTIC_ENDPOINT
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |message: &str| {
            Err(EmbedError::BadConfig {
                provider_id: self.provider_id.clone(),
                message: message.into(),
            })
        };
        if self.max_units < 1 {
            return bad("max_units must be >= 1");
        }
        if self.max_parallel_requests < 1 {
            return bad("max_parallel_requests must be >= 1");
        }
        if self.is_deterministic() {
            match self.dim {
                None => return bad("deterministic provider requires dim"),
                Some(d) if d < 2 => return bad("dim must be >= 2"),
                _ => {}
            }
        }
        Ok(())
    }

    /// Fails fast when a named credential variable is absent from the
    /// environment. The key value itself is never logged or stored.
    pub fn check_credential(&self) -> Result<(), EmbedError> {
        if self.is_deterministic() || self.credential_env_var.is_empty() {
            return Ok(());
        }
        if std::env::var(&self.credential_env_var).is_err() {
            return Err(EmbedError::MissingCredential {
                provider_id: self.provider_id.clone(),
                var: self.credential_env_var.clone(),
            });
        }
        Ok(())
    }
}

/// Reads a JSON array of provider configs and validates each.
pub fn load_provider_configs(path: impl AsRef<Path>) -> Result<Vec<ProviderConfig>, EmbedError> {
    let file = File::open(path.as_ref())?;
    let configs: Vec<ProviderConfig> = serde_json::from_reader(BufReader::new(file))?;
    for config in &configs {
        config.validate()?;
    }
    Ok(configs)
}

/// One piece of a segmented document.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub text: String,
    pub index: usize,
    /// Size in the provider's budget units; at least 1.
    pub unit_count: usize,
}

/// Splits `text` into segments of at most `max_units` each, preferring
/// whitespace boundaries and falling back to a hard cut when an unbroken run
/// exceeds the budget. Concatenating the segments in index order reproduces
/// the input exactly.
pub fn segment_text(
    text: &str,
    max_units: usize,
    unit: BudgetUnit,
) -> Result<Vec<Segment>, EmbedError> {
    if text.is_empty() {
        return Err(EmbedError::EmptyText);
    }
    if max_units < 1 {
        return Err(EmbedError::ZeroBudget);
    }
    let pieces = match unit {
        BudgetUnit::Characters => segment_chars(text, max_units),
        BudgetUnit::WhitespaceTokens => segment_tokens(text, max_units),
    };
    Ok(pieces
        .into_iter()
        .enumerate()
        .map(|(index, (text, unit_count))| Segment {
            text,
            index,
            // Whitespace-only segments measure zero tokens; clamp so the
            // count stays positive.
            unit_count: unit_count.max(1),
        })
        .collect())
}

fn segment_chars(text: &str, max_units: usize) -> Vec<(String, usize)> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |char_pos: usize| {
        chars
            .get(char_pos)
            .map_or(text.len(), |&(byte, _)| byte)
    };
    let mut segments = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let remaining = chars.len() - start;
        if remaining <= max_units {
            segments.push((text[byte_at(start)..].to_string(), remaining));
            break;
        }
        // Split after a whitespace run so the next segment starts a token;
        // take the largest such point within the window, else hard-cut.
        let mut cut = max_units;
        for p in (1..=max_units).rev() {
            let here = chars[start + p].1;
            let before = chars[start + p - 1].1;
            if !here.is_whitespace() && before.is_whitespace() {
                cut = p;
                break;
            }
        }
        segments.push((
            text[byte_at(start)..byte_at(start + cut)].to_string(),
            cut,
        ));
        start += cut;
    }
    segments
}

fn segment_tokens(text: &str, max_units: usize) -> Vec<(String, usize)> {
    // Byte offsets where a token (maximal non-whitespace run) starts.
    let mut token_starts = Vec::new();
    let mut prev_ws = true;
    for (byte, ch) in text.char_indices() {
        let ws = ch.is_whitespace();
        if !ws && prev_ws {
            token_starts.push(byte);
        }
        prev_ws = ws;
    }
    if token_starts.len() <= max_units {
        return vec![(text.to_string(), token_starts.len())];
    }
    let mut segments = Vec::new();
    let mut start_byte = 0;
    let mut taken = 0;
    while taken < token_starts.len() {
        let end_token = taken + max_units;
        if end_token >= token_starts.len() {
            segments.push((
                text[start_byte..].to_string(),
                token_starts.len() - taken,
            ));
            break;
        }
        let end_byte = token_starts[end_token];
        segments.push((text[start_byte..end_byte].to_string(), max_units));
        start_byte = end_byte;
        taken = end_token;
    }
    segments
}

/// Component-wise arithmetic mean; provenance fields are propagated.
pub fn mean_pool(vectors: &[EmbeddingVector]) -> Result<EmbeddingVector, EmbedError> {
    let weights = vec![1.0; vectors.len()];
    weighted_mean_pool(vectors, &weights)
}

/// Weighted component-wise mean with positive weights.
pub fn weighted_mean_pool(
    vectors: &[EmbeddingVector],
    weights: &[f64],
) -> Result<EmbeddingVector, EmbedError> {
    let first = vectors.first().ok_or(EmbedError::EmptyPool)?;
    if weights.len() != vectors.len() || weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        return Err(EmbedError::BadWeights);
    }
    for v in vectors {
        if v.dim() != first.dim() {
            return Err(EmbedError::DimensionMismatch {
                left: first.dim(),
                right: v.dim(),
            });
        }
        if v.provider_id != first.provider_id || v.model_id != first.model_id {
            return Err(EmbedError::ProvenanceMismatch {
                left: format!("{}/{}", first.provider_id, first.model_id),
                right: format!("{}/{}", v.provider_id, v.model_id),
            });
        }
    }
    let total: f64 = weights.iter().sum();
    let mut acc = vec![0.0; first.dim()];
    for (v, &w) in vectors.iter().zip(weights) {
        for (slot, value) in acc.iter_mut().zip(v.values()) {
            *slot += w * value;
        }
    }
    for slot in &mut acc {
        *slot /= total;
    }
    EmbeddingVector::new(acc, first.provider_id.clone(), first.model_id.clone())
}

/// Raw deterministic embedding values: unit vector expanded from SHA-256
/// digests of (seed, text), in counter mode.
fn deterministic_values(text: &str, dim: usize, seed: u64) -> Vec<f64> {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((text.len() as u64).to_le_bytes());
    hasher.update(text.as_bytes());
    let base = hasher.finalize();

    let mut values = Vec::with_capacity(dim);
    let mut block = 0u64;
    while values.len() < dim {
        let mut hasher = Sha256::new();
        hasher.update(base);
        hasher.update(block.to_le_bytes());
        let digest = hasher.finalize();
        for chunk in digest.chunks_exact(8) {
            if values.len() == dim {
                break;
            }
            let raw = u64::from_le_bytes(chunk.try_into().expect("chunk is 8 bytes"));
            // Top 53 bits -> uniform in [0, 1) -> [-1, 1).
            let unit = (raw >> 11) as f64 / (1u64 << 53) as f64;
            values.push(2.0 * unit - 1.0);
        }
        block += 1;
    }

    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        values[0] = 1.0;
    } else {
        for v in &mut values {
            *v /= norm;
        }
    }
    values
}

/// Offline test provider: a unit-norm vector derived from a cryptographic
/// digest of (text, seed). Identical inputs give identical vectors on every
/// machine; distinct texts give distinct vectors.
pub fn deterministic_embed(text: &str, dim: usize, seed: u64) -> EmbeddingVector {
    assert!(dim >= 2, "deterministic embeddings need dim >= 2");
    EmbeddingVector {
        values: deterministic_values(text, dim, seed),
        dim,
        provider_id: "deterministic".into(),
        model_id: format!("dim{dim}-seed{seed}"),
    }
}

/// How [`embed_document_with_status`] obtained its result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedStatus {
    CacheHit,
    Computed,
    /// The cache entry existed but was unreadable; recomputed and rewritten.
    CorruptRecomputed,
}

fn embed_segments(
    provider: &ProviderConfig,
    segments: &[Segment],
) -> Result<Vec<EmbeddingVector>, EmbedError> {
    if provider.is_deterministic() {
        let dim = provider.dim.expect("validated config");
        return segments
            .iter()
            .map(|s| {
                EmbeddingVector::new(
                    deterministic_values(&s.text, dim, provider.seed),
                    provider.provider_id.clone(),
                    provider.model_id.clone(),
                )
            })
            .collect();
    }
    let texts: Vec<String> = segments.iter().map(|s| s.text.clone()).collect();
    let raw = http::embed_segments(provider, &texts)?;
    let mut vectors = Vec::with_capacity(raw.len());
    for values in raw {
        if let Some(expected) = provider.dim {
            if values.len() != expected {
                return Err(EmbedError::WrongDimension {
                    provider_id: provider.provider_id.clone(),
                    expected,
                    got: values.len(),
                });
            }
        }
        if let Some(first) = vectors.first() {
            let first: &EmbeddingVector = first;
            if values.len() != first.dim() {
                return Err(EmbedError::WrongDimension {
                    provider_id: provider.provider_id.clone(),
                    expected: first.dim(),
                    got: values.len(),
                });
            }
        }
        vectors.push(EmbeddingVector::new(
            values,
            provider.provider_id.clone(),
            provider.model_id.clone(),
        )?);
    }
    Ok(vectors)
}

/// Embeds one document: cache lookup, else segment -> embed -> pool -> store.
/// The result is identical whether it came from the cache or was computed.
pub fn embed_document(
    provider: &ProviderConfig,
    text: &str,
    cache: &VectorCache,
) -> Result<EmbeddingVector, EmbedError> {
    embed_document_with_status(provider, text, cache).map(|(v, _)| v)
}

/// [`embed_document`] plus how the vector was obtained.
pub fn embed_document_with_status(
    provider: &ProviderConfig,
    text: &str,
    cache: &VectorCache,
) -> Result<(EmbeddingVector, EmbedStatus), EmbedError> {
    provider.validate()?;
    let key = cache_key(&provider.provider_id, &provider.model_id, text);
    let mut status = EmbedStatus::Computed;
    match cache.get(&key) {
        CacheLookup::Hit(vector) => return Ok((vector, EmbedStatus::CacheHit)),
        CacheLookup::Corrupt { .. } => status = EmbedStatus::CorruptRecomputed,
        CacheLookup::Miss => {}
    }

    let segments = segment_text(text, provider.max_units, provider.unit)?;
    let vectors = embed_segments(provider, &segments)?;
    let pooled = match provider.pooling {
        PoolingWeight::Uniform => mean_pool(&vectors)?,
        PoolingWeight::UnitCountWeighted => {
            let weights: Vec<f64> = segments.iter().map(|s| s.unit_count as f64).collect();
            weighted_mean_pool(&vectors, &weights)?
        }
    };
    cache.put(&key, &pooled).map_err(|source| EmbedError::CacheWrite {
        key: key.clone(),
        source,
    })?;
    Ok((pooled, status))
}

/// Progress event for corpus embedding.
#[derive(Debug, Clone)]
pub struct EmbedProgress {
    pub completed: usize,
    pub total: usize,
    pub resource_id: String,
    pub cache_hit: bool,
}

/// Result of embedding a full corpus.
#[derive(Debug, Clone)]
pub struct EmbedRun {
    pub vectors: BTreeMap<String, EmbeddingVector>,
    pub cache_hits: usize,
    pub computed: usize,
}

/// Embeds every resource of the corpus, at most
/// `max_parallel_requests` documents in flight at a time. Failures are
/// collected into one aggregate error; successful vectors stay in the cache.
pub fn embed_corpus(
    provider: &ProviderConfig,
    corpus: &Corpus,
    cache: &VectorCache,
    progress: Option<&(dyn Fn(EmbedProgress) + Sync)>,
) -> Result<EmbedRun, EmbedError> {
    provider.validate()?;
    provider.check_credential()?;

    let jobs: Vec<(String, String)> = corpus
        .topics
        .iter()
        .flat_map(|t| t.resources.iter())
        .map(|r| (r.resource_id.clone(), r.transcript.clone()))
        .collect();
    let total = jobs.len();

    type DocumentOutcome = Result<(EmbeddingVector, EmbedStatus), EmbedError>;
    struct Shared {
        queue: Mutex<std::collections::VecDeque<(String, String)>>,
        results: Mutex<Vec<(String, DocumentOutcome)>>,
        completed: Mutex<usize>,
    }
    let shared = Shared {
        queue: Mutex::new(jobs.into_iter().collect()),
        results: Mutex::new(Vec::with_capacity(total)),
        completed: Mutex::new(0),
    };

    let workers = provider.max_parallel_requests.min(total.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let job = shared.queue.lock().expect("queue lock").pop_front();
                let Some((resource_id, transcript)) = job else {
                    break;
                };
                let outcome = embed_document_with_status(provider, &transcript, cache);
                let cache_hit = matches!(outcome, Ok((_, EmbedStatus::CacheHit)));
                shared
                    .results
                    .lock()
                    .expect("results lock")
                    .push((resource_id.clone(), outcome));
                let completed = {
                    let mut done = shared.completed.lock().expect("counter lock");
                    *done += 1;
                    *done
                };
                if let Some(callback) = progress {
                    callback(EmbedProgress {
                        completed,
                        total,
                        resource_id,
                        cache_hit,
                    });
                }
            });
        }
    });

    let mut vectors = BTreeMap::new();
    let mut failures = Vec::new();
    let mut cache_hits = 0;
    let mut computed = 0;
    let mut results = shared.results.into_inner().expect("results lock");
    results.sort_by(|a, b| a.0.cmp(&b.0));
    for (resource_id, outcome) in results {
        match outcome {
            Ok((vector, status)) => {
                if status == EmbedStatus::CacheHit {
                    cache_hits += 1;
                } else {
                    computed += 1;
                }
                vectors.insert(resource_id, vector);
            }
            Err(error) => failures.push((resource_id, error.to_string())),
        }
    }
    if !failures.is_empty() {
        return Err(EmbedError::Aggregate { failures });
    }
    Ok(EmbedRun {
        vectors,
        cache_hits,
        computed,
    })
}
