//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with `--nocapture` to see them).

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use alignrank::corpus::{filter_evaluable, validate_corpus, Corpus, Label, Origin, ResourceRecord, Topic};
use alignrank::embed::{
    embed_corpus, segment_text, BudgetUnit, ProviderConfig, VectorCache,
};
use alignrank::metrics::{
    pairwise_accuracy, summarize_model, topic_metrics, PairAccuracy, DEFAULT_PRECISION_KS,
};
use alignrank::rank::{
    baseline_ranking, rank_topic, RankedEntry, RankedList, RankingSource, ReferencePolicy,
    SimilarityScore,
};
use alignrank::stats::{
    chi_square_sf, dunn_test, friedman_test, kendalls_w_from_chi_square, kruskal_wallis, nemenyi,
};
use alignrank::EmbeddingVector;

fn pass(criterion: u32, message: &str) {
    println!("[PASS] criterion {criterion}: {message}");
}

/// Builds a ranking whose order is the given label sequence.
fn ranking_of(labels_in_order: &[Label]) -> (RankedList, BTreeMap<String, Label>) {
    let n = labels_in_order.len();
    let mut labels = BTreeMap::new();
    let entries: Vec<RankedEntry> = labels_in_order
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            let id = format!("r{i:03}");
            labels.insert(id.clone(), label);
            RankedEntry {
                resource_id: id,
                score: SimilarityScore::new(1.0 - i as f64 / (n + 1) as f64).unwrap(),
            }
        })
        .collect();
    let ranked =
        RankedList::new("t", "ref", RankingSource::EmbeddingModel, "m", entries).unwrap();
    (ranked, labels)
}

/// Independent oracle: double loop over all (accepted, rejected) index pairs.
fn brute_force_pairs(labels_in_order: &[Label]) -> PairAccuracy {
    let mut correct = 0u64;
    let mut total = 0u64;
    for (i, &a) in labels_in_order.iter().enumerate() {
        if a != Label::Accepted {
            continue;
        }
        for (j, &b) in labels_in_order.iter().enumerate() {
            if b != Label::Rejected {
                continue;
            }
            total += 1;
            if i < j {
                correct += 1;
            }
        }
    }
    PairAccuracy {
        correct_pairs: correct,
        pair_count: total,
    }
}

fn random_label_instances(count: usize, seed: u64) -> Vec<Vec<Label>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| loop {
            let len = rng.random_range(2..=50);
            let labels: Vec<Label> = (0..len)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        Label::Accepted
                    } else {
                        Label::Rejected
                    }
                })
                .collect();
            if labels.contains(&Label::Accepted) && labels.contains(&Label::Rejected) {
                break labels;
            }
        })
        .collect()
}

#[test]
fn acceptance_01_pairwise_accuracy_matches_brute_force_oracle() {
    let started = Instant::now();
    let instances = random_label_instances(1000, 0xACC1);
    for labels_in_order in &instances {
        let (ranked, labels) = ranking_of(labels_in_order);
        let fast = pairwise_accuracy(&ranked, &labels).unwrap();
        let oracle = brute_force_pairs(labels_in_order);
        assert_eq!(fast, oracle, "sequence: {labels_in_order:?}");
        assert!((fast.value() - oracle.value()).abs() < 1e-12);
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(1, &format!("1000 rankings match the brute-force oracle exactly ({elapsed:?})"));
}

#[test]
fn acceptance_02_reversal_complement_is_exact() {
    let instances = random_label_instances(1000, 0xACC1);
    for labels_in_order in &instances {
        let (ranked, labels) = ranking_of(labels_in_order);
        let forward = pairwise_accuracy(&ranked, &labels).unwrap();
        let backward = pairwise_accuracy(&ranked.reversed(), &labels).unwrap();
        // Exact at the rational level: pair counts are integers.
        assert_eq!(backward, forward.complement());
        assert_eq!(
            backward.correct_pairs,
            forward.pair_count - forward.correct_pairs
        );
        // And within one ulp as floats.
        assert!((backward.value() - (1.0 - forward.value())).abs() < 1e-15);
    }
    pass(2, "accuracy(reversed) = 1 - accuracy(original) on all 1000 instances");
}

#[test]
fn acceptance_03_kendalls_w_linkage_to_reported_chi_square() {
    let w = kendalls_w_from_chi_square(142.65, 53, 9);
    assert!((w - 0.3364).abs() <= 0.0005, "W = {w}");
    assert_eq!(format!("{w:.2}"), "0.34");
    pass(3, &format!("chi2 = 142.65, n = 53, k = 9 implies W = {w:.4} (rounds to 0.34)"));
}

#[test]
fn acceptance_04_chi_square_survival_closed_form() {
    let sf = chi_square_sf(15.39, 2).unwrap();
    let expected = (-7.695_f64).exp();
    assert!((sf - expected).abs() < 1e-10, "sf = {sf}, expected = {expected}");
    assert!(sf < 0.001);
    for x in 0..=40 {
        let x = x as f64;
        let sf = chi_square_sf(x, 2).unwrap();
        assert!(
            (sf - (-x / 2.0).exp()).abs() < 1e-10,
            "x = {x}: sf = {sf}"
        );
    }
    pass(4, &format!("sf(15.39, 2) = {sf:.3e} and df=2 matches exp(-x/2) within 1e-10 on 0..=40"));
}

/// Three groups of 120 distinct values whose joint ranks are exactly 1..=360
/// with group mean ranks 203.0, 180.5, and 158.0.
fn learner_study_groups() -> Vec<Vec<f64>> {
    let ranges = |spans: &[(u32, u32)]| -> Vec<f64> {
        spans
            .iter()
            .flat_map(|&(lo, hi)| (lo..=hi).map(f64::from))
            .collect()
    };
    let g1 = ranges(&[(181, 240), (328, 360), (1, 27)]);
    let g2 = ranges(&[(61, 120), (241, 300)]);
    let g3 = ranges(&[(28, 60), (121, 180), (301, 327)]);
    assert_eq!(g1.iter().sum::<f64>(), 24360.0);
    assert_eq!(g2.iter().sum::<f64>(), 21660.0);
    assert_eq!(g3.iter().sum::<f64>(), 18960.0);
    vec![g1, g2, g3]
}

#[test]
fn acceptance_05_dunn_verdicts_from_reported_mean_ranks() {
    let groups = learner_study_groups();
    let result = dunn_test(&groups, 0.05, false).unwrap();
    assert!((result.adjusted_alpha - 0.05 / 3.0).abs() < 1e-12);

    let g1_g2 = &result.comparisons[0];
    let g1_g3 = &result.comparisons[1];
    let g2_g3 = &result.comparisons[2];

    assert!((g1_g3.z - 3.3495).abs() <= 0.001, "z13 = {}", g1_g3.z);
    assert!((g1_g3.p_unadjusted - 8.1e-4).abs() < 5e-5, "p13 = {}", g1_g3.p_unadjusted);
    assert!(g1_g3.significant_at_adjusted_alpha);

    assert!((g1_g2.z - 1.6747).abs() <= 0.001, "z12 = {}", g1_g2.z);
    assert!((g2_g3.z - 1.6747).abs() <= 0.001, "z23 = {}", g2_g3.z);
    assert!(!g1_g2.significant_at_adjusted_alpha);
    assert!(!g2_g3.significant_at_adjusted_alpha);
    pass(5, &format!(
        "z(G1,G3) = {:.4} significant at alpha/3; z(G1,G2) = z(G2,G3) = {:.4} not significant",
        g1_g3.z, g1_g2.z
    ));
}

#[test]
fn acceptance_06_friedman_hand_fixtures() {
    let perfect = vec![vec![0.1, 0.5, 0.9]; 5];
    let result = friedman_test(&perfect, true).unwrap();
    assert_eq!(result.chi_square, 10.0);
    assert_eq!(result.kendalls_w, 1.0);

    let all_equal = vec![vec![0.4, 0.4, 0.4]; 5];
    let result = friedman_test(&all_equal, true).unwrap();
    assert_eq!(result.chi_square, 0.0);
    assert_eq!(result.kendalls_w, 0.0);
    assert_eq!(result.p_value, 1.0);
    pass(6, "perfect agreement gives chi2 = 10, W = 1; all-equal gives chi2 = 0, W = 0, p = 1");
}

#[test]
fn acceptance_07_kruskal_wallis_hand_fixture() {
    let groups = vec![
        vec![1.0, 2.0, 3.0],
        vec![4.0, 5.0, 6.0],
        vec![7.0, 8.0, 9.0],
    ];
    let result = kruskal_wallis(&groups, true).unwrap();
    assert!((result.h_statistic - 7.2).abs() <= 1e-12, "H = {}", result.h_statistic);
    let expected_p = (-3.6_f64).exp();
    assert!((result.p_value - expected_p).abs() < 1e-6, "p = {}", result.p_value);
    assert!((expected_p - 0.02732).abs() < 1e-5);
    pass(7, &format!("H = {:.12} with p = {:.5}", result.h_statistic, result.p_value));
}

#[test]
fn acceptance_08_nemenyi_critical_differences() {
    let row9: Vec<f64> = (0..9).map(|i| i as f64).collect();
    let matrix9 = vec![row9; 53];
    let labels9: Vec<String> = (0..9).map(|i| format!("m{i}")).collect();
    let result9 = nemenyi(&matrix9, 0.05, &labels9).unwrap();
    assert!((result9.critical_difference - 1.650).abs() <= 0.01, "CD = {}", result9.critical_difference);
    assert!((result9.q_value - 3.102).abs() < 0.001);

    let matrix2 = vec![vec![0.0, 1.0]; 25];
    let labels2 = vec!["a".to_string(), "b".to_string()];
    let result2 = nemenyi(&matrix2, 0.05, &labels2).unwrap();
    assert!((result2.critical_difference - 0.392).abs() <= 0.001, "CD = {}", result2.critical_difference);
    pass(8, &format!(
        "CD(k=9, n=53) = {:.4}; CD(k=2, n=25) = {:.4}",
        result9.critical_difference, result2.critical_difference
    ));
}

/// Synthetic corpus with a planted signal: per topic, accepted transcripts
/// are shuffles/subsets of a shared sentence pool while rejected transcripts
/// draw from a disjoint vocabulary. Sentences are 6 tokens so a 6-token
/// segment budget maps one sentence to one segment.
fn planted_corpus(seed: u64) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut topics = Vec::new();
    for t in 0..20 {
        let signal_vocab: Vec<String> = (0..24).map(|w| format!("sig{t:02}w{w:02}")).collect();
        let noise_vocab: Vec<String> = (0..24).map(|w| format!("noi{t:02}w{w:02}")).collect();
        let sentence = |vocab: &[String], rng: &mut ChaCha8Rng| -> String {
            (0..6)
                .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                .collect::<Vec<_>>()
                .join(" ")
        };
        // A pool of 12 signal sentences shared by the accepted documents.
        let pool: Vec<String> = (0..12).map(|_| sentence(&signal_vocab, &mut rng)).collect();
        let mut resources = Vec::new();
        for d in 0..4 {
            let mut picks: Vec<usize> = (0..pool.len()).collect();
            picks.shuffle(&mut rng);
            let doc: Vec<String> = picks[..8].iter().map(|&i| pool[i].clone()).collect();
            resources.push(ResourceRecord {
                resource_id: format!("t{t:02}a{d}"),
                topic_id: format!("t{t:02}"),
                transcript: doc.join(" "),
                label: Label::Accepted,
                baseline_rank: d as u32 + 1,
                origin: Origin::Collected,
                generation_tag: None,
            });
        }
        for d in 0..4 {
            let doc: Vec<String> = (0..8).map(|_| sentence(&noise_vocab, &mut rng)).collect();
            resources.push(ResourceRecord {
                resource_id: format!("t{t:02}r{d}"),
                topic_id: format!("t{t:02}"),
                transcript: doc.join(" "),
                label: Label::Rejected,
                baseline_rank: d as u32 + 5,
                origin: Origin::Collected,
                generation_tag: None,
            });
        }
        topics.push(Topic {
            topic_id: format!("t{t:02}"),
            title: format!("Planted topic {t}"),
            domain: if t % 2 == 0 { "Python Programming" } else { "Machine Learning" }.into(),
            resources,
        });
    }
    Corpus {
        topics,
        metadata: BTreeMap::new(),
    }
}

fn planted_provider() -> ProviderConfig {
    let mut provider = ProviderConfig::deterministic("det", 128, 0);
    provider.max_units = 6;
    provider.unit = BudgetUnit::WhitespaceTokens;
    provider
}

struct PipelineRun {
    mean_accuracy: f64,
    rankings_by_topic: Vec<Vec<RankedList>>,
    embeddings: BTreeMap<String, EmbeddingVector>,
    corpus: Corpus,
}

fn run_planted_pipeline() -> PipelineRun {
    let corpus = planted_corpus(99);
    let report = validate_corpus(&corpus);
    assert!(report.is_ok(), "planted corpus must validate: {:?}", report.errors);
    let corpus = filter_evaluable(&corpus);
    assert_eq!(corpus.topics.len(), 20);

    let dir = tempfile::tempdir().unwrap();
    let cache = VectorCache::open(dir.path()).unwrap();
    let provider = planted_provider();
    let run = embed_corpus(&provider, &corpus, &cache, None).unwrap();
    let labels = corpus.labels();

    let mut rows = Vec::new();
    let mut rankings_by_topic = Vec::new();
    for topic in &corpus.topics {
        let rankings = rank_topic(
            topic,
            &run.vectors,
            &ReferencePolicy::AllAccepted,
            &provider.model_id,
        )
        .unwrap();
        rows.push(topic_metrics(&rankings, &labels, DEFAULT_PRECISION_KS).unwrap());
        rankings_by_topic.push(rankings);
    }
    let summary = summarize_model(&rows).unwrap();
    PipelineRun {
        mean_accuracy: summary.mean_accuracy,
        rankings_by_topic,
        embeddings: run.vectors,
        corpus,
    }
}

#[test]
fn acceptance_09_planted_signal_beats_shuffled_baseline() {
    let started = Instant::now();
    let pipeline = run_planted_pipeline();
    assert!(
        pipeline.mean_accuracy >= 0.95,
        "pipeline accuracy {}",
        pipeline.mean_accuracy
    );

    // 100 random shuffles of the baseline order.
    let labels = pipeline.corpus.labels();
    let mut shuffle_accuracies = Vec::with_capacity(100);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    for _ in 0..100 {
        let mut topic_values = Vec::new();
        for topic in &pipeline.corpus.topics {
            let mut shuffled = topic.clone();
            let mut ranks: Vec<u32> = (1..=topic.resources.len() as u32).collect();
            ranks.shuffle(&mut rng);
            for (resource, rank) in shuffled.resources.iter_mut().zip(&ranks) {
                resource.baseline_rank = *rank;
            }
            let ranking = baseline_ranking(&shuffled).unwrap();
            topic_values.push(pairwise_accuracy(&ranking, &labels).unwrap().value());
        }
        shuffle_accuracies.push(topic_values.iter().sum::<f64>() / topic_values.len() as f64);
    }
    let shuffle_mean = shuffle_accuracies.iter().sum::<f64>() / shuffle_accuracies.len() as f64;
    let shuffle_max = shuffle_accuracies.iter().copied().fold(f64::MIN, f64::max);
    assert!(
        (0.35..=0.65).contains(&shuffle_mean),
        "shuffled baseline mean {shuffle_mean}"
    );
    assert!(
        pipeline.mean_accuracy > shuffle_max,
        "pipeline {} vs best shuffle {shuffle_max}",
        pipeline.mean_accuracy
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(9, &format!(
        "pipeline accuracy {:.4} >= 0.95 and beats all 100 shuffled baselines (mean {:.4}) in {elapsed:?}",
        pipeline.mean_accuracy, shuffle_mean
    ));
}

#[test]
fn acceptance_10_end_to_end_determinism() {
    let work = tempfile::tempdir().unwrap();
    let corpus_path = work.path().join("corpus.jsonl");
    alignrank::corpus::save_corpus(&planted_corpus(99), &corpus_path).unwrap();
    let providers_path = work.path().join("providers.json");
    std::fs::write(
        &providers_path,
        serde_json::to_vec_pretty(&vec![planted_provider()]).unwrap(),
    )
    .unwrap();

    let run_once = |tag: &str| -> std::path::PathBuf {
        let cache = work.path().join(format!("cache-{tag}"));
        let out = work.path().join(format!("out-{tag}"));
        let bin = env!("CARGO_BIN_EXE_alignrank");
        let embed = std::process::Command::new(bin)
            .args(["embed"])
            .arg(&corpus_path)
            .arg("--providers")
            .arg(&providers_path)
            .arg("--cache-dir")
            .arg(&cache)
            .output()
            .unwrap();
        assert!(embed.status.success(), "{}", String::from_utf8_lossy(&embed.stderr));
        let evaluate = std::process::Command::new(bin)
            .args(["evaluate"])
            .arg(&corpus_path)
            .arg("--providers")
            .arg(&providers_path)
            .arg("--cache-dir")
            .arg(&cache)
            .arg("--out-dir")
            .arg(&out)
            .args(["--seed", "42"])
            .output()
            .unwrap();
        assert!(evaluate.status.success(), "{}", String::from_utf8_lossy(&evaluate.stderr));
        let stats = std::process::Command::new(bin)
            .args(["stats"])
            .arg(out.join("per_topic.csv"))
            .arg("--out")
            .arg(out.join("stats.json"))
            .output()
            .unwrap();
        assert!(stats.status.success(), "{}", String::from_utf8_lossy(&stats.stderr));
        out
    };

    let out_a = run_once("a");
    let out_b = run_once("b");

    let files = [
        "per_topic.csv",
        "per_topic.md",
        "summary.csv",
        "summary.md",
        "domains.csv",
        "domains.md",
        "rankings.jsonl",
        "manifest.json",
        "stats.json",
    ];
    for name in files {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    pass(10, "two embed -> evaluate -> stats runs are byte-identical across all 9 report files");
}

#[test]
fn acceptance_11_segmentation_partition_property() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5E6);
    let alphabet: Vec<char> = "ab cd \n\tefgθωü ".chars().collect();
    for case in 0..1000 {
        let len = rng.random_range(1..=200);
        let text: String = (0..len)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        let budget = rng.random_range(1..=30);
        let unit = if case % 2 == 0 {
            BudgetUnit::Characters
        } else {
            BudgetUnit::WhitespaceTokens
        };
        let segments = segment_text(&text, budget, unit).unwrap();
        let joined: String = segments.iter().map(|s| s.text.as_str()).collect();
        assert_eq!(joined, text, "partition failed (case {case})");
        for segment in &segments {
            assert!(segment.unit_count <= budget, "budget exceeded (case {case})");
            if unit == BudgetUnit::Characters {
                assert!(segment.text.chars().count() <= budget);
            } else {
                assert!(segment.text.split_whitespace().count() <= budget);
            }
        }
    }
    pass(11, "1000 random strings partition exactly and respect the budget in both units");
}

#[test]
fn acceptance_12_rank_order_invariant_under_scaling() {
    let pipeline = run_planted_pipeline();
    let scaled: BTreeMap<String, EmbeddingVector> = pipeline
        .embeddings
        .iter()
        .map(|(id, v)| {
            let values: Vec<f64> = v.values().iter().map(|x| x * 7.3).collect();
            (
                id.clone(),
                EmbeddingVector::new(values, v.provider_id(), v.model_id()).unwrap(),
            )
        })
        .collect();

    let mut compared = 0;
    for (topic, original_rankings) in pipeline
        .corpus
        .topics
        .iter()
        .zip(&pipeline.rankings_by_topic)
    {
        let scaled_rankings = rank_topic(
            topic,
            &scaled,
            &ReferencePolicy::AllAccepted,
            "det-d128",
        )
        .unwrap();
        for (a, b) in original_rankings.iter().zip(&scaled_rankings) {
            let ids_a: Vec<&str> = a.resource_ids().collect();
            let ids_b: Vec<&str> = b.resource_ids().collect();
            assert_eq!(ids_a, ids_b, "order changed for reference {}", a.reference_id);
            compared += 1;
        }
    }
    assert_eq!(compared, 80); // 20 topics x 4 references
    pass(12, "scaling all embeddings by 7.3 left all 80 ranking orders unchanged");
}
