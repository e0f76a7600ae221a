//! HTTP embeddings client for the common JSON shape
//! (`{"model", "input": [...]}` in, `data[i].embedding` out), with bearer
//! auth from the environment and exponential backoff on transient failures.

use std::time::Duration;

use rand::Rng;
use serde::{Deserialize, Serialize};
use ureq::Agent;

use super::{EmbedError, ProviderConfig};

#[derive(Serialize)]
struct EmbeddingRequest<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbeddingResponse {
    data: Vec<EmbeddingDatum>,
}

#[derive(Deserialize)]
struct EmbeddingDatum {
    embedding: Vec<f64>,
}

fn credential(config: &ProviderConfig) -> Result<Option<String>, EmbedError> {
    if config.credential_env_var.is_empty() {
        return Ok(None);
    }
    match std::env::var(&config.credential_env_var) {
        Ok(token) => Ok(Some(token)),
        Err(_) => Err(EmbedError::MissingCredential {
            provider_id: config.provider_id.clone(),
            var: config.credential_env_var.clone(),
        }),
    }
}

enum Attempt {
    Success(Vec<Vec<f64>>),
    /// Transport-level failure or a retryable status (429 / 5xx).
    Retry(EmbedError),
    Fatal(EmbedError),
}

fn try_once(
    agent: &Agent,
    config: &ProviderConfig,
    token: Option<&str>,
    inputs: &[String],
    attempts_so_far: u32,
) -> Attempt {
    let attempts = attempts_so_far + 1;
    let mut request = agent.post(&config.endpoint);
    if let Some(token) = token {
        request = request.header("Authorization", format!("Bearer {token}"));
    }
    let body = EmbeddingRequest {
        model: &config.model_id,
        input: inputs,
    };
    let mut response = match request.send_json(&body) {
        Ok(response) => response,
        Err(e) => {
            return Attempt::Retry(EmbedError::Transport {
                provider_id: config.provider_id.clone(),
                attempts,
                message: e.to_string(),
            })
        }
    };

    let status = response.status().as_u16();
    if status == 429 || status >= 500 {
        return Attempt::Retry(EmbedError::HttpStatus {
            provider_id: config.provider_id.clone(),
            status,
            attempts,
        });
    }
    if !(200..300).contains(&status) {
        return Attempt::Fatal(EmbedError::HttpStatus {
            provider_id: config.provider_id.clone(),
            status,
            attempts,
        });
    }

    let parsed: EmbeddingResponse = match response.body_mut().read_json() {
        Ok(parsed) => parsed,
        Err(e) => {
            return Attempt::Fatal(EmbedError::BadResponse {
                provider_id: config.provider_id.clone(),
                message: e.to_string(),
            })
        }
    };
    if parsed.data.len() != inputs.len() {
        return Attempt::Fatal(EmbedError::BadResponse {
            provider_id: config.provider_id.clone(),
            message: format!(
                "expected {} embeddings, got {}",
                inputs.len(),
                parsed.data.len()
            ),
        });
    }
    Attempt::Success(parsed.data.into_iter().map(|d| d.embedding).collect())
}

fn backoff(attempt: u32) -> Duration {
    let base_ms = 200u64.saturating_mul(1 << attempt.min(10));
    let jitter_ms = rand::rng().random_range(0..100);
    Duration::from_millis(base_ms.min(5_000) + jitter_ms)
}

/// Embeds a batch of segments in one request, retrying transport errors and
/// 429/5xx responses up to `max_retries` times with exponential backoff.
pub(super) fn embed_segments(
    config: &ProviderConfig,
    inputs: &[String],
) -> Result<Vec<Vec<f64>>, EmbedError> {
    let token = credential(config)?;
    let agent: Agent = Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(120)))
        .build()
        .into();

    let mut attempt = 0u32;
    loop {
        match try_once(&agent, config, token.as_deref(), inputs, attempt) {
            Attempt::Success(embeddings) => return Ok(embeddings),
            Attempt::Fatal(error) => return Err(error),
            Attempt::Retry(error) => {
                if attempt >= config.max_retries {
                    return Err(error);
                }
                std::thread::sleep(backoff(attempt));
                attempt += 1;
            }
        }
    }
}
