//! Labeled ground-truth corpus: topics, resources, expert labels, and the
//! learner-score table, with loading/validation for the portable
//! line-delimited JSON formats.
//!
//! A corpus file is UTF-8 with one JSON object per line. Topic metadata
//! (`topic_id`, `topic_title`, `domain`) is repeated on every record so the
//! format stays flat and diffable; records are grouped back into topics on
//! load, preserving input order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Expert label for a resource: constructively aligned with the intended
/// learning outcomes (`accepted`) or not (`rejected`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Accepted,
    Rejected,
}

/// How a resource entered the corpus: gathered from the source platform or
/// generated by a language model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Collected,
    Generated,
}

/// One educational resource and its transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceRecord {
    pub resource_id: String,
    pub topic_id: String,
    pub transcript: String,
    pub label: Label,
    /// Position in the source platform's own ranking, 1 = top. Meaningful
    /// for collected resources; generated resources carry a placeholder.
    pub baseline_rank: u32,
    pub origin: Origin,
    /// Use-case tag for generated resources (e.g. "brevity"); absent for
    /// collected ones.
    pub generation_tag: Option<String>,
}

/// A topic with its gathered resources, in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: String,
    pub title: String,
    pub domain: String,
    pub resources: Vec<ResourceRecord>,
}

impl Topic {
    pub fn accepted(&self) -> impl Iterator<Item = &ResourceRecord> {
        self.resources.iter().filter(|r| r.label == Label::Accepted)
    }

    pub fn rejected(&self) -> impl Iterator<Item = &ResourceRecord> {
        self.resources.iter().filter(|r| r.label == Label::Rejected)
    }

    fn is_evaluable(&self) -> bool {
        self.accepted().next().is_some() && self.rejected().next().is_some()
    }
}

/// The full labeled ground truth.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub topics: Vec<Topic>,
    /// Free-form provenance (source description, version). Not part of the
    /// line-delimited file format; empty after a load.
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl Corpus {
    /// Label lookup across all topics, keyed by resource id.
    pub fn labels(&self) -> BTreeMap<String, Label> {
        self.topics
            .iter()
            .flat_map(|t| t.resources.iter())
            .map(|r| (r.resource_id.clone(), r.label))
            .collect()
    }

    pub fn topic(&self, topic_id: &str) -> Option<&Topic> {
        self.topics.iter().find(|t| t.topic_id == topic_id)
    }

    pub fn resource_count(&self) -> usize {
        self.topics.iter().map(|t| t.resources.len()).sum()
    }

    /// Parses the line-delimited record format from any reader.
    pub fn from_jsonl_reader<R: Read>(reader: R) -> Result<Self, CorpusError> {
        parse_corpus(reader)
    }

    /// Serializes back to the line-delimited record format.
    pub fn to_jsonl_writer<W: Write>(&self, mut writer: W) -> Result<(), CorpusError> {
        for topic in &self.topics {
            for resource in &topic.resources {
                let line = RecordLine {
                    topic_id: topic.topic_id.clone(),
                    topic_title: topic.title.clone(),
                    domain: topic.domain.clone(),
                    resource_id: resource.resource_id.clone(),
                    transcript: resource.transcript.clone(),
                    label: resource.label,
                    baseline_rank: resource.baseline_rank,
                    origin: resource.origin,
                    generation_tag: resource.generation_tag.clone(),
                };
                serde_json::to_writer(&mut writer, &line).map_err(CorpusError::Encode)?;
                writer.write_all(b"\n").map_err(CorpusError::Io)?;
            }
        }
        Ok(())
    }
}

/// Learner-experiment scores: one row per participant, with the rank of the
/// resource their group received (1, 2, or 3).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerScoreRow {
    pub participant_id: String,
    pub topic_id: String,
    pub group: u8,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LearnerScoreTable {
    rows: Vec<LearnerScoreRow>,
}

impl LearnerScoreTable {
    pub fn rows(&self) -> &[LearnerScoreRow] {
        &self.rows
    }

    /// Number of participants per group, indexed by group 1..=3.
    pub fn group_sizes(&self) -> [usize; 3] {
        let mut sizes = [0usize; 3];
        for row in &self.rows {
            sizes[(row.group - 1) as usize] += 1;
        }
        sizes
    }

    /// Scores split by group, ascending group number. Empty groups are
    /// omitted.
    pub fn group_scores(&self) -> Vec<(u8, Vec<f64>)> {
        let mut by_group: BTreeMap<u8, Vec<f64>> = BTreeMap::new();
        for row in &self.rows {
            by_group.entry(row.group).or_default().push(row.score);
        }
        by_group.into_iter().collect()
    }
}

/// A validation finding: where it was seen and what is wrong.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub location: String,
    pub message: String,
}

/// Outcome of [`validate_corpus`]. Errors make the corpus unusable
/// downstream; warnings flag topics the accuracy metric cannot score.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
    /// Topics with at least one accepted and one rejected resource.
    pub evaluable_topic_count: usize,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ValidationIssue {
            location: location.into(),
            message: message.into(),
        });
    }

    fn warn(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.warnings.push(ValidationIssue {
            location: location.into(),
            message: message.into(),
        });
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: duplicate resource_id {resource_id:?} in topic {topic_id:?}")]
    DuplicateResource {
        line: usize,
        resource_id: String,
        topic_id: String,
    },
    #[error("line {line}: topic {topic_id:?} has conflicting {field} ({first:?} vs {second:?})")]
    InconsistentTopic {
        line: usize,
        topic_id: String,
        field: &'static str,
        first: String,
        second: String,
    },
    #[error("line {line}: group must be 1, 2, or 3 (got {group})")]
    GroupOutOfRange { line: usize, group: i64 },
    #[error("line {line}: duplicate participant_id {participant_id:?}")]
    DuplicateParticipant { line: usize, participant_id: String },
    #[error("line {line}: score must be finite")]
    NonFiniteScore { line: usize },
    #[error("file contains no rows")]
    Empty,
    #[error("failed to encode record: {0}")]
    Encode(#[source] serde_json::Error),
}

/// On-disk record shape. Keys are fixed; unknown keys are rejected so typos
/// surface at load time.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordLine {
    topic_id: String,
    topic_title: String,
    domain: String,
    resource_id: String,
    transcript: String,
    label: Label,
    baseline_rank: u32,
    origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generation_tag: Option<String>,
}

/// Loads a corpus from a line-delimited JSON file.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let file = File::open(path.as_ref())?;
    parse_corpus(BufReader::new(file))
}

/// Writes a corpus to the line-delimited JSON format at `path`.
pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>) -> Result<(), CorpusError> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    corpus.to_jsonl_writer(&mut writer)?;
    writer.flush()?;
    Ok(())
}

/// Deserializes one JSONL record, prefixing errors with the offending field
/// path (e.g. `label: unknown variant ...`).
fn parse_line<'de, T: Deserialize<'de>>(line: &'de str) -> Result<T, String> {
    let mut deserializer = serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(&mut deserializer).map_err(|e| {
        let path = e.path().to_string();
        if path == "." {
            e.inner().to_string()
        } else {
            format!("field {path}: {}", e.inner())
        }
    })
}

fn parse_corpus<R: Read>(reader: R) -> Result<Corpus, CorpusError> {
    let reader = BufReader::new(reader);
    let mut topics: Vec<Topic> = Vec::new();
    let mut topic_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen_ids: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RecordLine = parse_line(&line).map_err(|message| {
            CorpusError::MalformedLine {
                line: lineno,
                message,
            }
        })?;

        let ids = seen_ids.entry(record.topic_id.clone()).or_default();
        if !ids.insert(record.resource_id.clone()) {
            return Err(CorpusError::DuplicateResource {
                line: lineno,
                resource_id: record.resource_id,
                topic_id: record.topic_id,
            });
        }

        let idx = match topic_index.get(&record.topic_id) {
            Some(&idx) => {
                let topic = &topics[idx];
                if topic.title != record.topic_title {
                    return Err(CorpusError::InconsistentTopic {
                        line: lineno,
                        topic_id: record.topic_id,
                        field: "topic_title",
                        first: topic.title.clone(),
                        second: record.topic_title,
                    });
                }
                if topic.domain != record.domain {
                    return Err(CorpusError::InconsistentTopic {
                        line: lineno,
                        topic_id: record.topic_id,
                        field: "domain",
                        first: topic.domain.clone(),
                        second: record.domain,
                    });
                }
                idx
            }
            None => {
                topics.push(Topic {
                    topic_id: record.topic_id.clone(),
                    title: record.topic_title.clone(),
                    domain: record.domain.clone(),
                    resources: Vec::new(),
                });
                topic_index.insert(record.topic_id.clone(), topics.len() - 1);
                topics.len() - 1
            }
        };

        topics[idx].resources.push(ResourceRecord {
            resource_id: record.resource_id,
            topic_id: record.topic_id,
            transcript: record.transcript,
            label: record.label,
            baseline_rank: record.baseline_rank,
            origin: record.origin,
            generation_tag: record.generation_tag,
        });
    }

    Ok(Corpus {
        topics,
        metadata: BTreeMap::new(),
    })
}

/// Checks every type invariant and reports, never fails.
///
/// Topics with no accepted or no rejected resources get a warning rather
/// than an error: the pairwise accuracy denominator is zero there, so they
/// are excluded from scoring instead of being scored as 0 or 1.
pub fn validate_corpus(corpus: &Corpus) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut topic_ids = BTreeSet::new();
    let mut global_resource_ids = BTreeSet::new();

    for topic in &corpus.topics {
        let loc = format!("topic {}", topic.topic_id);
        if !topic_ids.insert(topic.topic_id.clone()) {
            report.error(&loc, "duplicate topic_id");
        }
        if topic.domain.trim().is_empty() {
            report.error(&loc, "domain is empty");
        }

        let mut ids = BTreeSet::new();
        let mut collected_ranks = BTreeSet::new();
        for resource in &topic.resources {
            let rloc = format!("topic {} resource {}", topic.topic_id, resource.resource_id);
            if !ids.insert(resource.resource_id.clone()) {
                report.error(&rloc, "duplicate resource_id within topic");
            }
            if !global_resource_ids.insert(resource.resource_id.clone()) {
                report.error(&rloc, "resource_id reused in another topic");
            }
            if resource.topic_id != topic.topic_id {
                report.error(&rloc, "record topic_id does not match its topic");
            }
            if resource.transcript.trim().is_empty() {
                report.error(&rloc, "transcript is empty");
            }
            if resource.baseline_rank < 1 {
                report.error(&rloc, "baseline_rank must be >= 1");
            }
            if resource.origin == Origin::Collected
                && !collected_ranks.insert(resource.baseline_rank)
            {
                report.error(&rloc, "duplicate baseline_rank among collected resources");
            }
            match (resource.origin, &resource.generation_tag) {
                (Origin::Generated, None) => {
                    report.error(&rloc, "generated resource is missing generation_tag")
                }
                (Origin::Collected, Some(_)) => {
                    report.error(&rloc, "collected resource must not carry generation_tag")
                }
                _ => {}
            }
        }

        let accepted = topic.accepted().count();
        let rejected = topic.rejected().count();
        if rejected == 0 {
            report.warn(&loc, "no rejected resources; excluded from accuracy");
        }
        if accepted == 0 {
            report.warn(&loc, "no accepted resources; excluded from accuracy");
        }
        if accepted == 1 && rejected > 0 {
            // With one accepted resource the all-references protocol leaves
            // no accepted candidates once the reference is withheld.
            report.warn(
                &loc,
                "single accepted resource; reference-excluded rankings have no pairs",
            );
        }
    }

    report.evaluable_topic_count = corpus.topics.iter().filter(|t| t.is_evaluable()).count();
    report
}

/// Drops topics the accuracy metric cannot score (fewer than one accepted or
/// one rejected resource). Order is preserved; idempotent.
pub fn filter_evaluable(corpus: &Corpus) -> Corpus {
    Corpus {
        topics: corpus
            .topics
            .iter()
            .filter(|t| t.is_evaluable())
            .cloned()
            .collect(),
        metadata: corpus.metadata.clone(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LearnerLine {
    participant_id: String,
    topic_id: String,
    group: i64,
    score: f64,
}

/// Loads the learner-score table (one JSON object per line).
pub fn load_learner_scores(path: impl AsRef<Path>) -> Result<LearnerScoreTable, CorpusError> {
    let file = File::open(path.as_ref())?;
    learner_scores_from_reader(BufReader::new(file))
}

pub fn learner_scores_from_reader<R: Read>(reader: R) -> Result<LearnerScoreTable, CorpusError> {
    let reader = BufReader::new(reader);
    let mut rows = Vec::new();
    let mut participants = BTreeSet::new();

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: LearnerLine = parse_line(&line).map_err(|message| {
            CorpusError::MalformedLine {
                line: lineno,
                message,
            }
        })?;
        if !(1..=3).contains(&record.group) {
            return Err(CorpusError::GroupOutOfRange {
                line: lineno,
                group: record.group,
            });
        }
        if !record.score.is_finite() {
            return Err(CorpusError::NonFiniteScore { line: lineno });
        }
        if !participants.insert(record.participant_id.clone()) {
            return Err(CorpusError::DuplicateParticipant {
                line: lineno,
                participant_id: record.participant_id,
            });
        }
        rows.push(LearnerScoreRow {
            participant_id: record.participant_id,
            topic_id: record.topic_id,
            group: record.group as u8,
            score: record.score,
        });
    }

    if rows.is_empty() {
        return Err(CorpusError::Empty);
    }
    Ok(LearnerScoreTable { rows })
}
