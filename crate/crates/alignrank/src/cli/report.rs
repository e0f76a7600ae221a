//! Report emission: the CSV tables (per-topic, model summary, per-domain,
//! generated-resource cells), their Markdown mirrors, and the JSON stats /
//! learner reports. Every emitted file is re-parseable by a loader in this
//! module or its source module.
//!
//! Emitted files carry no wall-clock timestamps: runs with equal manifests
//! and the deterministic provider are byte-identical.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::metrics::{DomainAggregate, MetricRow, ModelSummary};
use crate::stats::{DunnResult, FriedmanResult, KruskalWallisResult, NemenyiResult};

use super::CliError;

/// Hex SHA-256 of a file's bytes, for report provenance.
pub fn file_digest(path: impl AsRef<Path>) -> std::io::Result<String> {
    let bytes = std::fs::read(path.as_ref())?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// One per-topic CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerTopicRecord {
    pub model_id: String,
    pub topic_id: String,
    pub domain: String,
    pub accuracy: f64,
    pub precision_at_3: f64,
    pub precision_at_5: f64,
    pub pair_count: u64,
    pub reference_count: usize,
}

impl PerTopicRecord {
    pub fn from_metric_row(row: &MetricRow, domain: &str) -> Self {
        Self {
            model_id: row.model_id.clone(),
            topic_id: row.topic_id.clone(),
            domain: domain.to_string(),
            accuracy: row.accuracy,
            precision_at_3: row.precision_at.get(&3).copied().unwrap_or(f64::NAN),
            precision_at_5: row.precision_at.get(&5).copied().unwrap_or(f64::NAN),
            pair_count: row.pair_count,
            reference_count: row.reference_count,
        }
    }
}

pub fn write_per_topic_csv<W: Write>(
    records: &[PerTopicRecord],
    writer: W,
) -> Result<(), CliError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for record in records {
        csv_writer.serialize(record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn read_per_topic_csv<R: Read>(reader: R) -> Result<Vec<PerTopicRecord>, CliError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for record in csv_reader.deserialize() {
        records.push(record?);
    }
    Ok(records)
}

/// One model-summary CSV row (mean ± SD layout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub model_id: String,
    pub mean_accuracy: f64,
    pub sd_accuracy: f64,
    pub mean_p3: f64,
    pub sd_p3: f64,
    pub mean_p5: f64,
    pub sd_p5: f64,
    pub topic_count: usize,
}

impl SummaryRecord {
    pub fn from_summary(summary: &ModelSummary) -> Self {
        let at = |map: &BTreeMap<usize, f64>, k: usize| map.get(&k).copied().unwrap_or(f64::NAN);
        Self {
            model_id: summary.model_id.clone(),
            mean_accuracy: summary.mean_accuracy,
            sd_accuracy: summary.sd_accuracy,
            mean_p3: at(&summary.mean_precision_at, 3),
            sd_p3: at(&summary.sd_precision_at, 3),
            mean_p5: at(&summary.mean_precision_at, 5),
            sd_p5: at(&summary.sd_precision_at, 5),
            topic_count: summary.topic_count,
        }
    }
}

pub fn write_summary_csv<W: Write>(records: &[SummaryRecord], writer: W) -> Result<(), CliError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for record in records {
        csv_writer.serialize(record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<SummaryRecord>, CliError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for record in csv_reader.deserialize() {
        records.push(record?);
    }
    Ok(records)
}

/// One per-domain CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainRecord {
    pub model_id: String,
    pub domain: String,
    pub mean_accuracy: f64,
    pub topic_count: usize,
}

impl DomainRecord {
    pub fn from_aggregate(aggregate: &DomainAggregate) -> Self {
        Self {
            model_id: aggregate.model_id.clone(),
            domain: aggregate.domain.clone(),
            mean_accuracy: aggregate.mean_accuracy,
            topic_count: aggregate.topic_count,
        }
    }
}

pub fn write_domain_csv<W: Write>(records: &[DomainRecord], writer: W) -> Result<(), CliError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for record in records {
        csv_writer.serialize(record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn read_domain_csv<R: Read>(reader: R) -> Result<Vec<DomainRecord>, CliError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for record in csv_reader.deserialize() {
        records.push(record?);
    }
    Ok(records)
}

/// One generated-resource evaluation cell: a (use case, domain) pair with
/// pooled pairwise accuracy over its topics' rankings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedRecord {
    pub model_id: String,
    pub generation_tag: String,
    pub domain: String,
    pub generated_count: usize,
    pub accepted_count: usize,
    /// Empty when the cell has no (accepted, rejected) pairs to resolve.
    pub ranking_accuracy: Option<f64>,
}

pub fn write_generated_csv<W: Write>(
    records: &[GeneratedRecord],
    writer: W,
) -> Result<(), CliError> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    for record in records {
        csv_writer.serialize(record)?;
    }
    csv_writer.flush()?;
    Ok(())
}

pub fn read_generated_csv<R: Read>(reader: R) -> Result<Vec<GeneratedRecord>, CliError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let mut records = Vec::new();
    for record in csv_reader.deserialize() {
        records.push(record?);
    }
    Ok(records)
}

/// Renders rows as a Markdown pipe table mirroring a CSV's content.
pub fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str("| ");
    out.push_str(&header.join(" | "));
    out.push_str(" |\n|");
    for _ in header {
        out.push_str(" --- |");
    }
    out.push('\n');
    for row in rows {
        out.push_str("| ");
        out.push_str(&row.join(" | "));
        out.push_str(" |\n");
    }
    out
}

/// Shortest round-trip formatting, matching the CSV serializer's notation.
fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

pub fn per_topic_markdown(records: &[PerTopicRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                r.topic_id.clone(),
                r.domain.clone(),
                fmt_f64(r.accuracy),
                fmt_f64(r.precision_at_3),
                fmt_f64(r.precision_at_5),
                r.pair_count.to_string(),
                r.reference_count.to_string(),
            ]
        })
        .collect();
    markdown_table(
        &[
            "model_id",
            "topic_id",
            "domain",
            "accuracy",
            "precision_at_3",
            "precision_at_5",
            "pair_count",
            "reference_count",
        ],
        &rows,
    )
}

pub fn summary_markdown(records: &[SummaryRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                fmt_f64(r.mean_accuracy),
                fmt_f64(r.sd_accuracy),
                fmt_f64(r.mean_p3),
                fmt_f64(r.sd_p3),
                fmt_f64(r.mean_p5),
                fmt_f64(r.sd_p5),
                r.topic_count.to_string(),
            ]
        })
        .collect();
    markdown_table(
        &[
            "model_id",
            "mean_accuracy",
            "sd_accuracy",
            "mean_p3",
            "sd_p3",
            "mean_p5",
            "sd_p5",
            "topic_count",
        ],
        &rows,
    )
}

pub fn domain_markdown(records: &[DomainRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                r.domain.clone(),
                fmt_f64(r.mean_accuracy),
                r.topic_count.to_string(),
            ]
        })
        .collect();
    markdown_table(&["model_id", "domain", "mean_accuracy", "topic_count"], &rows)
}

pub fn generated_markdown(records: &[GeneratedRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                r.generation_tag.clone(),
                r.domain.clone(),
                r.generated_count.to_string(),
                r.accepted_count.to_string(),
                r.ranking_accuracy.map(fmt_f64).unwrap_or_default(),
            ]
        })
        .collect();
    markdown_table(
        &[
            "model_id",
            "generation_tag",
            "domain",
            "generated_count",
            "accepted_count",
            "ranking_accuracy",
        ],
        &rows,
    )
}

/// Provenance attached to JSON reports: input digests, flags, seed, tool
/// version. No timestamps, so equal inputs yield byte-equal reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportProvenance {
    pub input_digest: String,
    pub alpha: f64,
    pub tie_correction: bool,
    pub seed: Option<u64>,
    pub tool_version: String,
}

/// JSON report for the model-comparison battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub provenance: ReportProvenance,
    pub friedman: FriedmanResult,
    pub models: Vec<String>,
    pub topics: Vec<String>,
    pub nemenyi: Option<NemenyiResult>,
    /// Reason the post-hoc step was skipped, when it was.
    pub nemenyi_skipped: Option<String>,
}

/// One group line of the learner report (Table-style layout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupLine {
    pub group: u8,
    pub n: usize,
    pub mean_rank: f64,
}

/// One labeled Dunn comparison row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunnRow {
    pub group_a: u8,
    pub group_b: u8,
    pub z: f64,
    pub p_unadjusted: f64,
    pub p_bonferroni: f64,
    pub significant: bool,
}

impl DunnRow {
    pub fn from_result(result: &DunnResult, groups: &[u8]) -> Vec<DunnRow> {
        result
            .comparisons
            .iter()
            .map(|c| DunnRow {
                group_a: groups[c.group_a],
                group_b: groups[c.group_b],
                z: c.z,
                p_unadjusted: c.p_unadjusted,
                p_bonferroni: c.p_bonferroni,
                significant: c.significant_at_adjusted_alpha,
            })
            .collect()
    }
}

/// JSON report for the learner-score analysis. Dunn rows are reported both
/// with and without the tie correction, because published tables rarely say
/// which convention they used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerReport {
    pub provenance: ReportProvenance,
    pub groups: Vec<GroupLine>,
    pub kruskal_wallis: KruskalWallisResult,
    pub adjusted_alpha: f64,
    pub dunn_tie_corrected: Vec<DunnRow>,
    pub dunn_uncorrected: Vec<DunnRow>,
}
