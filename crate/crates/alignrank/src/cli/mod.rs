//! The command pipeline: `validate` -> `embed` -> `evaluate` -> `stats` /
//! `learner`. Each command is a plain function over paths and options,
//! writing human or JSON output to the given writer, so the binary stays a
//! thin argument parser and the whole pipeline is testable in-process.

pub mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    filter_evaluable, load_corpus, load_learner_scores, validate_corpus, Corpus, Label, Origin,
    Topic,
};
use crate::embed::{
    cache_key, embed_corpus, load_provider_configs, CacheLookup, EmbedProgress, EmbeddingVector,
    ProviderConfig, VectorCache,
};
use crate::metrics::{
    aggregate_by_domain, pairwise_accuracy, summarize_model, topic_metrics, MetricRow,
    MetricsError, DEFAULT_PRECISION_KS,
};
use crate::rank::{
    baseline_ranking, rank_by_reference, rank_topic, rankings_to_jsonl, reference_draw,
    RankedList, ReferencePolicy,
};
use crate::stats::{dunn_test, friedman_test, kruskal_wallis, nemenyi, StatsError};

use report::{
    file_digest, DomainRecord, DunnRow, GeneratedRecord, GroupLine, LearnerReport,
    PerTopicRecord, ReportProvenance, StatsReport, SummaryRecord,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Embed(#[from] crate::embed::EmbedError),
    #[error(transparent)]
    Rank(#[from] crate::rank::RankError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("corpus failed validation with {0} error(s); run `validate` for details")]
    ValidationFailed(usize),
    #[error("missing cached embeddings for provider {provider_id}: {}", resource_ids.join(", "))]
    MissingEmbeddings {
        provider_id: String,
        resource_ids: Vec<String>,
    },
    #[error("per-topic table is incomplete: {}", gaps.join(", "))]
    IncompleteMatrix { gaps: Vec<String> },
    #[error("need at least 2 models and 2 topics (got {models} model(s), {topics} topic(s))")]
    MatrixTooSmall { models: usize, topics: usize },
    #[error("learner table has {0} group(s); need at least 2")]
    TooFewGroups(usize),
}

/// Reference policy selection as it appears on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyChoice {
    All,
    Random,
}

impl PolicyChoice {
    fn to_policy(self, seed: u64) -> ReferencePolicy {
        match self {
            PolicyChoice::All => ReferencePolicy::AllAccepted,
            PolicyChoice::Random => ReferencePolicy::SingleRandom { seed },
        }
    }

    fn name(self) -> &'static str {
        match self {
            PolicyChoice::All => "all_accepted",
            PolicyChoice::Random => "single_random",
        }
    }
}

/// Audit header for an evaluate run; equal manifests with the deterministic
/// provider mean byte-identical reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub corpus_digest: String,
    pub providers: Vec<ManifestProvider>,
    pub policy: String,
    pub seed: u64,
    pub precision_ks: Vec<usize>,
    pub tool_version: String,
    /// Fixed methodology notes carried into every report.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestProvider {
    pub provider_id: String,
    pub model_id: String,
}

fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

const METHOD_NOTES: [&str; 3] = [
    "references are excluded from their own rankings",
    "per-topic accuracy and precision@k are unweighted means over references",
    "score ties are broken by ascending resource_id",
];

/// `validate`: load and validate a corpus, print the report, exit nonzero on
/// errors.
pub fn cmd_validate(
    corpus_path: &Path,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_path)?;
    let report = validate_corpus(&corpus);
    if json {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        writeln!(
            out,
            "{} topic(s), {} resource(s), {} evaluable topic(s)",
            corpus.topics.len(),
            corpus.resource_count(),
            report.evaluable_topic_count
        )?;
        for issue in &report.errors {
            writeln!(out, "error: {}: {}", issue.location, issue.message)?;
        }
        for issue in &report.warnings {
            writeln!(out, "warning: {}: {}", issue.location, issue.message)?;
        }
        if report.is_ok() {
            writeln!(out, "ok")?;
        }
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::ValidationFailed(report.errors.len()))
    }
}

/// `embed`: populate the vector cache for every provider in the config file,
/// one summary line per provider.
pub fn cmd_embed(
    corpus_path: &Path,
    providers_path: &Path,
    cache_dir: &Path,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let corpus = load_corpus(corpus_path)?;
    let report = validate_corpus(&corpus);
    if !report.is_ok() {
        return Err(CliError::ValidationFailed(report.errors.len()));
    }
    let providers = load_provider_configs(providers_path)?;
    let cache = VectorCache::open(cache_dir)?;

    for provider in &providers {
        provider.check_credential()?;
        let progress = |p: EmbedProgress| {
            eprint!("\r[{}] {}/{} embedded", p.resource_id, p.completed, p.total);
            if p.completed == p.total {
                eprintln!();
            }
        };
        let run = embed_corpus(provider, &corpus, &cache, Some(&progress))?;
        writeln!(
            out,
            "provider {}: {} resource(s) embedded, {} cache hit(s), 0 failure(s)",
            provider.provider_id, run.computed, run.cache_hits
        )?;
    }
    Ok(())
}

/// Loads cached vectors for every resource, or fails naming the gaps.
fn cached_vectors(
    provider: &ProviderConfig,
    corpus: &Corpus,
    cache: &VectorCache,
) -> Result<BTreeMap<String, EmbeddingVector>, CliError> {
    let mut vectors = BTreeMap::new();
    let mut missing = Vec::new();
    for topic in &corpus.topics {
        for resource in &topic.resources {
            let key = cache_key(&provider.provider_id, &provider.model_id, &resource.transcript);
            match cache.get(&key) {
                CacheLookup::Hit(vector) => {
                    vectors.insert(resource.resource_id.clone(), vector);
                }
                CacheLookup::Miss | CacheLookup::Corrupt { .. } => {
                    missing.push(resource.resource_id.clone());
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(vectors)
    } else {
        Err(CliError::MissingEmbeddings {
            provider_id: provider.provider_id.clone(),
            resource_ids: missing,
        })
    }
}

/// Per-topic rankings for one model, skipping references whose ranking has
/// no (accepted, rejected) pairs left once the reference is withheld.
fn evaluable_rankings(
    topic: &Topic,
    vectors: &BTreeMap<String, EmbeddingVector>,
    policy: &ReferencePolicy,
    model_id: &str,
    labels: &BTreeMap<String, Label>,
) -> Result<Vec<RankedList>, CliError> {
    let rankings = rank_topic(topic, vectors, policy, model_id)?;
    Ok(rankings
        .into_iter()
        .filter(|ranking| pairwise_accuracy(ranking, labels).is_ok())
        .collect())
}

/// The generated-resource protocol: rank one use case's generated resources
/// against a collected accepted reference drawn with the run seed.
fn rank_generated(
    topic: &Topic,
    tag: &str,
    vectors: &BTreeMap<String, EmbeddingVector>,
    seed: u64,
    model_id: &str,
) -> Result<Option<RankedList>, CliError> {
    let references: Vec<&str> = topic
        .resources
        .iter()
        .filter(|r| r.origin == Origin::Collected && r.label == Label::Accepted)
        .map(|r| r.resource_id.as_str())
        .collect();
    let candidates: BTreeMap<String, EmbeddingVector> = topic
        .resources
        .iter()
        .filter(|r| r.origin == Origin::Generated && r.generation_tag.as_deref() == Some(tag))
        .map(|r| (r.resource_id.clone(), vectors[&r.resource_id].clone()))
        .collect();
    if candidates.is_empty() || references.is_empty() {
        return Ok(None);
    }
    let reference_id = references[reference_draw(seed, &topic.topic_id, references.len())];
    let ranking = rank_by_reference(
        reference_id,
        &vectors[reference_id],
        &candidates,
        &topic.topic_id,
        model_id,
    )?;
    Ok(Some(ranking))
}

/// Table of generated-resource cells pooled over topics, per
/// (use case, domain).
fn generated_table(
    corpus: &Corpus,
    vectors: &BTreeMap<String, EmbeddingVector>,
    labels: &BTreeMap<String, Label>,
    seed: u64,
    model_id: &str,
) -> Result<Vec<GeneratedRecord>, CliError> {
    struct Cell {
        generated: usize,
        accepted: usize,
        correct: u64,
        pairs: u64,
    }
    let mut cells: BTreeMap<(String, String), Cell> = BTreeMap::new();
    let tags: BTreeSet<String> = corpus
        .topics
        .iter()
        .flat_map(|t| t.resources.iter())
        .filter_map(|r| r.generation_tag.clone())
        .collect();

    for topic in &corpus.topics {
        for tag in &tags {
            let generated: Vec<_> = topic
                .resources
                .iter()
                .filter(|r| {
                    r.origin == Origin::Generated && r.generation_tag.as_deref() == Some(tag)
                })
                .collect();
            if generated.is_empty() {
                continue;
            }
            let cell = cells
                .entry((tag.clone(), topic.domain.clone()))
                .or_insert(Cell {
                    generated: 0,
                    accepted: 0,
                    correct: 0,
                    pairs: 0,
                });
            cell.generated += generated.len();
            cell.accepted += generated.iter().filter(|r| r.label == Label::Accepted).count();
            if let Some(ranking) = rank_generated(topic, tag, vectors, seed, model_id)? {
                if let Ok(pairs) = pairwise_accuracy(&ranking, labels) {
                    cell.correct += pairs.correct_pairs;
                    cell.pairs += pairs.pair_count;
                }
            }
        }
    }

    Ok(cells
        .into_iter()
        .map(|((tag, domain), cell)| GeneratedRecord {
            model_id: model_id.to_string(),
            generation_tag: tag,
            domain,
            generated_count: cell.generated,
            accepted_count: cell.accepted,
            ranking_accuracy: (cell.pairs > 0)
                .then(|| cell.correct as f64 / cell.pairs as f64),
        })
        .collect())
}

/// Options for [`cmd_evaluate`].
#[derive(Debug, Clone)]
pub struct EvaluateOptions {
    pub corpus_path: PathBuf,
    pub providers_path: PathBuf,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    pub policy: PolicyChoice,
    pub seed: u64,
    pub json: bool,
}

/// Everything `evaluate` computes, before file emission.
struct Evaluation {
    per_topic: Vec<PerTopicRecord>,
    summaries: Vec<SummaryRecord>,
    domains: Vec<DomainRecord>,
    generated: Vec<GeneratedRecord>,
    rankings: Vec<RankedList>,
    manifest: RunManifest,
    skipped_topics: Vec<(String, String)>,
}

fn evaluate(options: &EvaluateOptions) -> Result<Evaluation, CliError> {
    let full_corpus = load_corpus(&options.corpus_path)?;
    let validation = validate_corpus(&full_corpus);
    if !validation.is_ok() {
        return Err(CliError::ValidationFailed(validation.errors.len()));
    }
    let corpus = filter_evaluable(&full_corpus);
    let labels = corpus.labels();
    let providers = load_provider_configs(&options.providers_path)?;
    let cache = VectorCache::open(&options.cache_dir)?;
    let policy = options.policy.to_policy(options.seed);

    let mut metric_rows: Vec<MetricRow> = Vec::new();
    let mut all_rankings: Vec<RankedList> = Vec::new();
    let mut generated: Vec<GeneratedRecord> = Vec::new();
    let mut skipped: Vec<(String, String)> = Vec::new();

    let mut sorted_providers = providers.clone();
    sorted_providers.sort_by(|a, b| a.model_id.cmp(&b.model_id));
    for provider in &sorted_providers {
        let vectors = cached_vectors(provider, &corpus, &cache)?;
        for topic in &corpus.topics {
            let rankings =
                evaluable_rankings(topic, &vectors, &policy, &provider.model_id, &labels)?;
            if rankings.is_empty() {
                skipped.push((
                    topic.topic_id.clone(),
                    format!(
                        "model {}: no reference ranking with scoreable pairs",
                        provider.model_id
                    ),
                ));
                continue;
            }
            metric_rows.push(topic_metrics(&rankings, &labels, DEFAULT_PRECISION_KS)?);
            all_rankings.extend(rankings);
        }
        let has_generated = corpus
            .topics
            .iter()
            .flat_map(|t| t.resources.iter())
            .any(|r| r.origin == Origin::Generated);
        if has_generated {
            generated.extend(generated_table(
                &corpus,
                &vectors,
                &labels,
                options.seed,
                &provider.model_id,
            )?);
        }
    }

    // The platform's own order competes as just another model.
    for topic in &corpus.topics {
        match baseline_ranking(topic) {
            Ok(ranking) => match pairwise_accuracy(&ranking, &labels) {
                Ok(_) => {
                    metric_rows.push(topic_metrics(
                        std::slice::from_ref(&ranking),
                        &labels,
                        DEFAULT_PRECISION_KS,
                    )?);
                    all_rankings.push(ranking);
                }
                Err(_) => skipped.push((
                    topic.topic_id.clone(),
                    "baseline: no scoreable pairs among collected resources".into(),
                )),
            },
            Err(e) => skipped.push((topic.topic_id.clone(), format!("baseline: {e}"))),
        }
    }

    // Per-topic rows sorted by (model, topic).
    let mut per_topic: Vec<PerTopicRecord> = metric_rows
        .iter()
        .map(|row| {
            let domain = corpus
                .topic(&row.topic_id)
                .map(|t| t.domain.as_str())
                .unwrap_or_default();
            PerTopicRecord::from_metric_row(row, domain)
        })
        .collect();
    per_topic.sort_by(|a, b| {
        a.model_id
            .cmp(&b.model_id)
            .then_with(|| a.topic_id.cmp(&b.topic_id))
    });

    // Summaries sorted by descending mean accuracy.
    let mut by_model: BTreeMap<String, Vec<MetricRow>> = BTreeMap::new();
    for row in &metric_rows {
        by_model.entry(row.model_id.clone()).or_default().push(row.clone());
    }
    let mut summaries: Vec<SummaryRecord> = by_model
        .values()
        .map(|rows| summarize_model(rows).map(|s| SummaryRecord::from_summary(&s)))
        .collect::<Result<_, _>>()?;
    summaries.sort_by(|a, b| {
        b.mean_accuracy
            .total_cmp(&a.mean_accuracy)
            .then_with(|| a.model_id.cmp(&b.model_id))
    });

    let domains: Vec<DomainRecord> = aggregate_by_domain(&metric_rows, &corpus)?
        .iter()
        .map(DomainRecord::from_aggregate)
        .collect();

    all_rankings.sort_by(|a, b| {
        a.model_id
            .cmp(&b.model_id)
            .then_with(|| a.topic_id.cmp(&b.topic_id))
            .then_with(|| a.reference_id.cmp(&b.reference_id))
    });

    let manifest = RunManifest {
        corpus_digest: file_digest(&options.corpus_path)?,
        providers: sorted_providers
            .iter()
            .map(|p| ManifestProvider {
                provider_id: p.provider_id.clone(),
                model_id: p.model_id.clone(),
            })
            .collect(),
        policy: options.policy.name().to_string(),
        seed: options.seed,
        precision_ks: DEFAULT_PRECISION_KS.to_vec(),
        tool_version: tool_version(),
        notes: METHOD_NOTES.iter().map(|s| s.to_string()).collect(),
    };

    Ok(Evaluation {
        per_topic,
        summaries,
        domains,
        generated,
        rankings: all_rankings,
        manifest,
        skipped_topics: skipped,
    })
}

/// `evaluate`: score every cached provider plus the baseline and emit the
/// CSV / Markdown / JSONL reports into `out_dir`.
pub fn cmd_evaluate(options: &EvaluateOptions, out: &mut dyn Write) -> Result<(), CliError> {
    let evaluation = evaluate(options)?;
    fs::create_dir_all(&options.out_dir)?;
    let path = |name: &str| options.out_dir.join(name);

    report::write_per_topic_csv(
        &evaluation.per_topic,
        fs::File::create(path("per_topic.csv"))?,
    )?;
    fs::write(
        path("per_topic.md"),
        report::per_topic_markdown(&evaluation.per_topic),
    )?;
    report::write_summary_csv(&evaluation.summaries, fs::File::create(path("summary.csv"))?)?;
    fs::write(
        path("summary.md"),
        report::summary_markdown(&evaluation.summaries),
    )?;
    report::write_domain_csv(&evaluation.domains, fs::File::create(path("domains.csv"))?)?;
    fs::write(
        path("domains.md"),
        report::domain_markdown(&evaluation.domains),
    )?;
    if !evaluation.generated.is_empty() {
        report::write_generated_csv(
            &evaluation.generated,
            fs::File::create(path("generated.csv"))?,
        )?;
        fs::write(
            path("generated.md"),
            report::generated_markdown(&evaluation.generated),
        )?;
    }
    let mut rankings_file = fs::File::create(path("rankings.jsonl"))?;
    rankings_to_jsonl(&evaluation.rankings, &mut rankings_file)?;
    let manifest_json = serde_json::to_vec_pretty(&evaluation.manifest)?;
    fs::write(path("manifest.json"), manifest_json)?;

    for (topic_id, reason) in &evaluation.skipped_topics {
        eprintln!("note: topic {topic_id} skipped: {reason}");
    }

    if options.json {
        #[derive(Serialize)]
        struct EvaluateOutput<'a> {
            manifest: &'a RunManifest,
            summary: &'a [SummaryRecord],
            out_dir: &'a Path,
        }
        serde_json::to_writer_pretty(
            &mut *out,
            &EvaluateOutput {
                manifest: &evaluation.manifest,
                summary: &evaluation.summaries,
                out_dir: &options.out_dir,
            },
        )?;
        writeln!(out)?;
    } else {
        writeln!(out, "{}", report::summary_markdown(&evaluation.summaries))?;
        writeln!(out, "reports written to {}", options.out_dir.display())?;
    }
    Ok(())
}

/// A complete topics x models accuracy matrix pivoted from per-topic rows.
struct AccuracyMatrix {
    topics: Vec<String>,
    models: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn pivot_accuracy(records: &[PerTopicRecord]) -> Result<AccuracyMatrix, CliError> {
    let mut cells: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut models = BTreeSet::new();
    let mut topics = BTreeSet::new();
    for record in records {
        models.insert(record.model_id.clone());
        topics.insert(record.topic_id.clone());
        cells.insert(
            (record.topic_id.clone(), record.model_id.clone()),
            record.accuracy,
        );
    }
    let models: Vec<String> = models.into_iter().collect();
    let topics: Vec<String> = topics.into_iter().collect();
    if models.len() < 2 || topics.len() < 2 {
        return Err(CliError::MatrixTooSmall {
            models: models.len(),
            topics: topics.len(),
        });
    }
    let mut gaps = Vec::new();
    let mut matrix = Vec::with_capacity(topics.len());
    for topic in &topics {
        let mut row = Vec::with_capacity(models.len());
        for model in &models {
            match cells.get(&(topic.clone(), model.clone())) {
                Some(&accuracy) => row.push(accuracy),
                None => gaps.push(format!("{model} x {topic}")),
            }
        }
        matrix.push(row);
    }
    if !gaps.is_empty() {
        return Err(CliError::IncompleteMatrix { gaps });
    }
    Ok(AccuracyMatrix {
        topics,
        models,
        values: matrix,
    })
}

/// `stats`: Friedman + Kendall's W + Nemenyi over a per-topic CSV.
pub fn cmd_stats(
    per_topic_csv: &Path,
    alpha: f64,
    tie_correction: bool,
    out_file: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let records = report::read_per_topic_csv(fs::File::open(per_topic_csv)?)?;
    let AccuracyMatrix {
        topics,
        models,
        values: matrix,
    } = pivot_accuracy(&records)?;

    let friedman = friedman_test(&matrix, tie_correction)?;
    let (nemenyi_result, nemenyi_skipped) = match nemenyi(&matrix, alpha, &models) {
        Ok(result) => (Some(result), None),
        Err(StatsError::OutsideNemenyiTable { alpha, k }) => (
            None,
            Some(format!(
                "no critical value for alpha = {alpha}, k = {k}; Nemenyi skipped"
            )),
        ),
        Err(e) => return Err(e.into()),
    };

    let stats_report = StatsReport {
        provenance: ReportProvenance {
            input_digest: file_digest(per_topic_csv)?,
            alpha,
            tie_correction,
            seed: None,
            tool_version: tool_version(),
        },
        friedman: friedman.clone(),
        models: models.clone(),
        topics,
        nemenyi: nemenyi_result.clone(),
        nemenyi_skipped: nemenyi_skipped.clone(),
    };

    if let Some(path) = out_file {
        fs::write(path, serde_json::to_vec_pretty(&stats_report)?)?;
    }

    if !json {
        let verdict = if friedman.p_value < alpha {
            "significant"
        } else {
            "not significant"
        };
        writeln!(
            out,
            "Friedman: chi2({}) = {:.4}, p = {:.4e} -> {} at alpha = {} (Kendall's W = {:.4}, n = {} topics, k = {} models)",
            friedman.df,
            friedman.chi_square,
            friedman.p_value,
            verdict,
            alpha,
            friedman.kendalls_w,
            friedman.n,
            friedman.k
        )?;
        if friedman.degenerate {
            writeln!(out, "note: all rows fully tied; no ranking information")?;
        }
        match (&nemenyi_result, &nemenyi_skipped) {
            (Some(result), _) => {
                writeln!(
                    out,
                    "Nemenyi: critical difference = {:.4} (q = {:.3}, alpha = {})",
                    result.critical_difference, result.q_value, result.alpha
                )?;
                let mut ranked = result.mean_ranks.clone();
                ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
                for (model, mean_rank) in &ranked {
                    writeln!(out, "  mean rank {mean_rank:.3}  {model}")?;
                }
                let significant: Vec<String> = result
                    .comparisons
                    .iter()
                    .filter(|c| c.significant)
                    .map(|c| {
                        let (hi, lo) = if c.mean_rank_diff > 0.0 {
                            (&c.model_a, &c.model_b)
                        } else {
                            (&c.model_b, &c.model_a)
                        };
                        format!("{hi} > {lo} (diff {:.3})", c.mean_rank_diff.abs())
                    })
                    .collect();
                if significant.is_empty() {
                    writeln!(out, "  no pair exceeds the critical difference")?;
                } else {
                    for line in significant {
                        writeln!(out, "  {line}")?;
                    }
                }
            }
            (None, Some(reason)) => writeln!(out, "Nemenyi skipped: {reason}")?,
            (None, None) => unreachable!("nemenyi yields a result or a skip reason"),
        }
    }
    if json || out_file.is_none() {
        serde_json::to_writer_pretty(&mut *out, &stats_report)?;
        writeln!(out)?;
    }
    Ok(())
}

/// `learner`: Kruskal-Wallis + Dunn (both tie conventions) over a learner
/// score table.
pub fn cmd_learner(
    scores_path: &Path,
    alpha: f64,
    tie_correction: bool,
    out_file: Option<&Path>,
    json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let table = load_learner_scores(scores_path)?;
    let group_scores = table.group_scores();
    if group_scores.len() < 2 {
        return Err(CliError::TooFewGroups(group_scores.len()));
    }
    let group_labels: Vec<u8> = group_scores.iter().map(|(g, _)| *g).collect();
    let groups: Vec<Vec<f64>> = group_scores.into_iter().map(|(_, v)| v).collect();

    let kw = kruskal_wallis(&groups, tie_correction)?;
    let dunn_corrected = dunn_test(&groups, alpha, true)?;
    let dunn_uncorrected = dunn_test(&groups, alpha, false)?;

    let report = LearnerReport {
        provenance: ReportProvenance {
            input_digest: file_digest(scores_path)?,
            alpha,
            tie_correction,
            seed: None,
            tool_version: tool_version(),
        },
        groups: group_labels
            .iter()
            .zip(kw.group_sizes.iter().zip(&kw.group_mean_ranks))
            .map(|(&group, (&n, &mean_rank))| GroupLine {
                group,
                n,
                mean_rank,
            })
            .collect(),
        kruskal_wallis: kw.clone(),
        adjusted_alpha: dunn_corrected.adjusted_alpha,
        dunn_tie_corrected: DunnRow::from_result(&dunn_corrected, &group_labels),
        dunn_uncorrected: DunnRow::from_result(&dunn_uncorrected, &group_labels),
    };

    if let Some(path) = out_file {
        fs::write(path, serde_json::to_vec_pretty(&report)?)?;
    }

    if !json {
        writeln!(out, "group  n      mean rank")?;
        for line in &report.groups {
            writeln!(out, "{:<6} {:<6} {:.4}", line.group, line.n, line.mean_rank)?;
        }
        let verdict = if kw.p_value < alpha {
            "significant"
        } else {
            "not significant"
        };
        writeln!(
            out,
            "Kruskal-Wallis: H({}) = {:.4}, p = {:.4e} -> {} at alpha = {}{}",
            kw.df,
            kw.h_statistic,
            kw.p_value,
            verdict,
            alpha,
            if kw.tie_corrected { " (tie-corrected)" } else { "" }
        )?;
        let primary = if tie_correction {
            &report.dunn_tie_corrected
        } else {
            &report.dunn_uncorrected
        };
        writeln!(
            out,
            "Dunn pairwise comparisons (verdicts at alpha/m = {:.4}):",
            report.adjusted_alpha
        )?;
        for row in primary {
            writeln!(
                out,
                "  group {} vs {}: z = {:+.4}, p = {:.4} (bonferroni {:.4}) -> {}",
                row.group_a,
                row.group_b,
                row.z,
                row.p_unadjusted,
                row.p_bonferroni,
                if row.significant {
                    "Significant"
                } else {
                    "Not Significant"
                }
            )?;
        }
    }
    if json || out_file.is_none() {
        serde_json::to_writer_pretty(&mut *out, &report)?;
        writeln!(out)?;
    }
    Ok(())
}
