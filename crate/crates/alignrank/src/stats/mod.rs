//! Nonparametric statistics over model-comparison matrices and learner-score
//! groups: Friedman test with Kendall's W and Nemenyi post-hoc comparisons,
//! Kruskal-Wallis H with Dunn's pairwise z-tests under Bonferroni correction.
//!
//! Tie correction is available everywhere and defaults to on in the CLI
//! (accuracy matrices and multiple-choice scores tie heavily); it can be
//! disabled to reproduce textbook examples. Fully tied inputs return a
//! null-effect result with `degenerate` set instead of dividing by zero.

mod special;

pub use special::{chi_square_sf, erfc, ln_gamma, normal_sf, reg_gamma};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error("matrix must be at least 2x2 (got {n} rows x {k} columns)")]
    MatrixTooSmall { n: usize, k: usize },
    #[error("row {row} has {got} columns, expected {expected}")]
    RaggedMatrix {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("need at least 2 groups (got {0})")]
    TooFewGroups(usize),
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("need at least 3 observations in total (got {0})")]
    TooFewObservations(usize),
    #[error("no critical value for alpha = {alpha}, k = {k} (table covers k = 2..=20, alpha in {{0.05, 0.10}})")]
    OutsideNemenyiTable { alpha: f64, k: usize },
    #[error("expected {expected} column labels, got {got}")]
    LabelMismatch { expected: usize, got: usize },
}

/// Ranking convention for [`rank_within_rows`]: the best (largest) value in a
/// row receives the largest rank `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankDirection {
    HigherIsBetter,
}

/// Within-row ranks of an n x k matrix; ties share the average of the ranks
/// they span, so every row sums to k(k+1)/2.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    ranks: Vec<Vec<f64>>,
    n: usize,
    k: usize,
}

impl RankMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.ranks
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k];
        for row in &self.ranks {
            for (sum, rank) in sums.iter_mut().zip(row) {
                *sum += rank;
            }
        }
        sums
    }

    pub fn column_mean_ranks(&self) -> Vec<f64> {
        self.column_sums()
            .into_iter()
            .map(|s| s / self.n as f64)
            .collect()
    }
}

fn check_matrix(values: &[Vec<f64>]) -> Result<(usize, usize), StatsError> {
    let n = values.len();
    let k = values.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(StatsError::MatrixTooSmall { n, k });
    }
    for (i, row) in values.iter().enumerate() {
        if row.len() != k {
            return Err(StatsError::RaggedMatrix {
                row: i,
                got: row.len(),
                expected: k,
            });
        }
        for (j, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(StatsError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok((n, k))
}

/// Average ranks (1-based) of a slice; exact ties receive the mean of the
/// positions they occupy.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && values[order[end + 1]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end+1 share their average.
        let avg = (start + end) as f64 / 2.0 + 1.0;
        for &idx in &order[start..=end] {
            ranks[idx] = avg;
        }
        start = end + 1;
    }
    ranks
}

/// Σ (t³ − t) over groups of exactly equal values.
fn tie_term(values: &[f64]) -> f64 {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut total = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start;
        while end + 1 < sorted.len() && sorted[end + 1] == sorted[start] {
            end += 1;
        }
        let t = (end - start + 1) as f64;
        total += t * t * t - t;
        start = end + 1;
    }
    total
}

/// Ranks each row of an n x k matrix so that larger values receive larger
/// ranks; exact ties get average ranks.
pub fn rank_within_rows(
    values: &[Vec<f64>],
    _direction: RankDirection,
) -> Result<RankMatrix, StatsError> {
    let (n, k) = check_matrix(values)?;
    let ranks = values.iter().map(|row| average_ranks(row)).collect();
    Ok(RankMatrix { ranks, n, k })
}

/// Friedman test outcome over an n-topic x k-model matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FriedmanResult {
    pub chi_square: f64,
    pub df: usize,
    pub p_value: f64,
    /// Effect size: chi_square / (n (k − 1)), in [0, 1].
    pub kendalls_w: f64,
    pub n: usize,
    pub k: usize,
    /// Whether the tie correction was actually applied.
    pub tie_corrected: bool,
    /// All rows fully tied: the matrix carries no ranking information.
    pub degenerate: bool,
}

/// Kendall's W implied by a Friedman chi-square at the given design size.
pub fn kendalls_w_from_chi_square(chi_square: f64, n: usize, k: usize) -> f64 {
    (chi_square / (n as f64 * (k as f64 - 1.0))).clamp(0.0, 1.0)
}

/// Friedman rank test across k related columns measured on n rows.
///
/// chi² = 12 / (n k (k+1)) · Σ_j R_j² − 3 n (k+1), with the usual tie
/// correction 1 − Σ(t³−t) / (n k (k²−1)) applied when `tie_correction` is on
/// and ties exist.
pub fn friedman_test(values: &[Vec<f64>], tie_correction: bool) -> Result<FriedmanResult, StatsError> {
    let (n, k) = check_matrix(values)?;
    let matrix = rank_within_rows(values, RankDirection::HigherIsBetter)?;
    let (nf, kf) = (n as f64, k as f64);

    let sum_sq: f64 = matrix.column_sums().iter().map(|r| r * r).sum();
    let chi_raw = ((12.0 * sum_sq) / (nf * kf * (kf + 1.0)) - 3.0 * nf * (kf + 1.0)).max(0.0);

    let ties: f64 = values.iter().map(|row| tie_term(row)).sum();
    let correction = 1.0 - ties / (nf * kf * (kf * kf - 1.0));

    if correction <= 0.0 {
        // Every row fully tied.
        return Ok(FriedmanResult {
            chi_square: 0.0,
            df: k - 1,
            p_value: 1.0,
            kendalls_w: 0.0,
            n,
            k,
            tie_corrected: false,
            degenerate: true,
        });
    }

    let apply = tie_correction && ties > 0.0;
    let chi_square = if apply { chi_raw / correction } else { chi_raw };
    Ok(FriedmanResult {
        chi_square,
        df: k - 1,
        p_value: chi_square_sf(chi_square, k - 1)?,
        kendalls_w: kendalls_w_from_chi_square(chi_square, n, k),
        n,
        k,
        tie_corrected: apply,
        degenerate: false,
    })
}

/// Critical values q_alpha for the two-tailed Nemenyi test, already divided
/// by sqrt(2), indexed by the number of compared treatments k = 2..=20.
const NEMENYI_Q_05: [f64; 19] = [
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030879, 3.101730, 3.163684,
    3.218654, 3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073,
    3.543799,
];
const NEMENYI_Q_10: [f64; 19] = [
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606, 2.919889,
    2.977768, 3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723, 3.261461, 3.291224,
    3.319233,
];

/// Embedded critical value q for the Nemenyi test, if covered by the table.
pub fn nemenyi_q(alpha: f64, k: usize) -> Option<f64> {
    if !(2..=20).contains(&k) {
        return None;
    }
    let table = if (alpha - 0.05).abs() < 1e-9 {
        &NEMENYI_Q_05
    } else if (alpha - 0.10).abs() < 1e-9 {
        &NEMENYI_Q_10
    } else {
        return None;
    };
    Some(table[k - 2])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NemenyiComparison {
    pub model_a: String,
    pub model_b: String,
    /// mean_rank(a) − mean_rank(b); positive favors a under
    /// higher-is-better ranking.
    pub mean_rank_diff: f64,
    pub significant: bool,
}

/// Nemenyi post-hoc outcome: mean ranks per model and every pairwise verdict
/// against the critical difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NemenyiResult {
    pub critical_difference: f64,
    pub q_value: f64,
    pub alpha: f64,
    pub n: usize,
    pub k: usize,
    pub direction: RankDirection,
    pub mean_ranks: Vec<(String, f64)>,
    pub comparisons: Vec<NemenyiComparison>,
}

impl NemenyiResult {
    /// Verdict for an unordered pair of labels, if both are present.
    pub fn is_significant(&self, a: &str, b: &str) -> Option<bool> {
        self.comparisons
            .iter()
            .find(|c| {
                (c.model_a == a && c.model_b == b) || (c.model_a == b && c.model_b == a)
            })
            .map(|c| c.significant)
    }
}

/// Nemenyi post-hoc comparisons over the same matrix as [`friedman_test`].
///
/// Two models differ when their mean-rank gap exceeds
/// CD = q_alpha · sqrt(k (k+1) / (6 n)).
pub fn nemenyi(
    values: &[Vec<f64>],
    alpha: f64,
    labels: &[String],
) -> Result<NemenyiResult, StatsError> {
    let (n, k) = check_matrix(values)?;
    if labels.len() != k {
        return Err(StatsError::LabelMismatch {
            expected: k,
            got: labels.len(),
        });
    }
    let q = nemenyi_q(alpha, k).ok_or(StatsError::OutsideNemenyiTable { alpha, k })?;
    let cd = q * (k as f64 * (k as f64 + 1.0) / (6.0 * n as f64)).sqrt();

    let matrix = rank_within_rows(values, RankDirection::HigherIsBetter)?;
    let means = matrix.column_mean_ranks();

    let mut comparisons = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in (i + 1)..k {
            let diff = means[i] - means[j];
            comparisons.push(NemenyiComparison {
                model_a: labels[i].clone(),
                model_b: labels[j].clone(),
                mean_rank_diff: diff,
                significant: diff.abs() > cd,
            });
        }
    }

    Ok(NemenyiResult {
        critical_difference: cd,
        q_value: q,
        alpha,
        n,
        k,
        direction: RankDirection::HigherIsBetter,
        mean_ranks: labels.iter().cloned().zip(means).collect(),
        comparisons,
    })
}

/// Kruskal-Wallis H test outcome over independent groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KruskalWallisResult {
    pub h_statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Mean joint rank per group, in input order.
    pub group_mean_ranks: Vec<f64>,
    pub group_sizes: Vec<usize>,
    pub n_total: usize,
    pub tie_corrected: bool,
    /// All observations identical: no rank information.
    pub degenerate: bool,
}

struct JointRanking {
    group_rank_sums: Vec<f64>,
    group_sizes: Vec<usize>,
    n_total: usize,
    tie_term: f64,
}

fn joint_ranking(groups: &[Vec<f64>]) -> Result<JointRanking, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups(groups.len()));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(StatsError::EmptyGroup(i));
        }
        for (j, v) in g.iter().enumerate() {
            if !v.is_finite() {
                return Err(StatsError::NonFinite { row: i, col: j });
            }
        }
    }
    let n_total: usize = groups.iter().map(Vec::len).sum();
    if n_total < 3 {
        return Err(StatsError::TooFewObservations(n_total));
    }

    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let ranks = average_ranks(&all);

    let mut group_rank_sums = Vec::with_capacity(groups.len());
    let mut offset = 0;
    for g in groups {
        group_rank_sums.push(ranks[offset..offset + g.len()].iter().sum());
        offset += g.len();
    }

    Ok(JointRanking {
        group_rank_sums,
        group_sizes: groups.iter().map(Vec::len).collect(),
        n_total,
        tie_term: tie_term(&all),
    })
}

/// Kruskal-Wallis H over two or more independent samples.
///
/// H = 12 / (N (N+1)) · Σ_i R_i² / n_i − 3 (N+1), divided by
/// 1 − Σ(t³−t) / (N³−N) when `tie_correction` is on and ties exist.
pub fn kruskal_wallis(
    groups: &[Vec<f64>],
    tie_correction: bool,
) -> Result<KruskalWallisResult, StatsError> {
    let joint = joint_ranking(groups)?;
    let nf = joint.n_total as f64;
    let df = groups.len() - 1;

    let group_mean_ranks: Vec<f64> = joint
        .group_rank_sums
        .iter()
        .zip(&joint.group_sizes)
        .map(|(r, &n)| r / n as f64)
        .collect();

    let correction = 1.0 - joint.tie_term / (nf * nf * nf - nf);
    if correction <= 0.0 {
        return Ok(KruskalWallisResult {
            h_statistic: 0.0,
            df,
            p_value: 1.0,
            group_mean_ranks,
            group_sizes: joint.group_sizes,
            n_total: joint.n_total,
            tie_corrected: false,
            degenerate: true,
        });
    }

    let sum_sq_over_n: f64 = joint
        .group_rank_sums
        .iter()
        .zip(&joint.group_sizes)
        .map(|(r, &n)| r * r / n as f64)
        .sum();
    let h_raw = ((12.0 * sum_sq_over_n) / (nf * (nf + 1.0)) - 3.0 * (nf + 1.0)).max(0.0);

    let apply = tie_correction && joint.tie_term > 0.0;
    let h = if apply { h_raw / correction } else { h_raw };

    Ok(KruskalWallisResult {
        h_statistic: h,
        df,
        p_value: chi_square_sf(h, df)?,
        group_mean_ranks,
        group_sizes: joint.group_sizes,
        n_total: joint.n_total,
        tie_corrected: apply,
        degenerate: false,
    })
}

/// One pairwise Dunn comparison; `group_a` / `group_b` are zero-based
/// positions in the input group list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunnComparison {
    pub group_a: usize,
    pub group_b: usize,
    /// (mean_rank_a − mean_rank_b) / standard error; antisymmetric in the
    /// pair.
    pub z: f64,
    pub p_unadjusted: f64,
    /// min(1, m · p_unadjusted) for m comparisons.
    pub p_bonferroni: f64,
    /// p_unadjusted < alpha / m.
    pub significant_at_adjusted_alpha: bool,
}

/// Dunn's post-hoc test outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DunnResult {
    pub comparisons: Vec<DunnComparison>,
    pub alpha: f64,
    /// alpha / m where m is the number of comparisons.
    pub adjusted_alpha: f64,
    pub m: usize,
    pub group_mean_ranks: Vec<f64>,
    pub tie_corrected: bool,
}

/// Dunn's pairwise z-tests on joint mean ranks after Kruskal-Wallis.
///
/// z = (R̄_i − R̄_j) / sqrt((N(N+1)/12 − T)(1/n_i + 1/n_j)) with the tie term
/// T = Σ(t³−t) / (12 (N−1)) when `tie_correction` is on. Verdicts compare the
/// unadjusted p against alpha/m; Bonferroni-multiplied p-values are also
/// reported.
pub fn dunn_test(
    groups: &[Vec<f64>],
    alpha: f64,
    tie_correction: bool,
) -> Result<DunnResult, StatsError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(StatsError::Domain(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    let joint = joint_ranking(groups)?;
    let nf = joint.n_total as f64;
    let g = groups.len();
    let m = g * (g - 1) / 2;
    let adjusted_alpha = alpha / m as f64;

    let tie_adjustment = if tie_correction {
        joint.tie_term / (12.0 * (nf - 1.0))
    } else {
        0.0
    };
    let var_base = nf * (nf + 1.0) / 12.0 - tie_adjustment;

    let mean_ranks: Vec<f64> = joint
        .group_rank_sums
        .iter()
        .zip(&joint.group_sizes)
        .map(|(r, &n)| r / n as f64)
        .collect();

    let mut comparisons = Vec::with_capacity(m);
    for i in 0..g {
        for j in (i + 1)..g {
            let se = (var_base
                * (1.0 / joint.group_sizes[i] as f64 + 1.0 / joint.group_sizes[j] as f64))
                .sqrt();
            let z = if se > 0.0 {
                (mean_ranks[i] - mean_ranks[j]) / se
            } else {
                0.0 // fully tied data: every mean rank is equal
            };
            let p_unadjusted = (2.0 * normal_sf(z.abs())).min(1.0);
            comparisons.push(DunnComparison {
                group_a: i,
                group_b: j,
                z,
                p_unadjusted,
                p_bonferroni: (m as f64 * p_unadjusted).min(1.0),
                significant_at_adjusted_alpha: p_unadjusted < adjusted_alpha,
            });
        }
    }

    Ok(DunnResult {
        comparisons,
        alpha,
        adjusted_alpha,
        m,
        group_mean_ranks: mean_ranks,
        tie_corrected: tie_correction && joint.tie_term > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ranks_simple_row() {
        let m = rank_within_rows(&[vec![0.1, 0.5, 0.9], vec![0.9, 0.5, 0.1]], RankDirection::HigherIsBetter)
            .unwrap();
        assert_eq!(m.rows()[0], vec![1.0, 2.0, 3.0]);
        assert_eq!(m.rows()[1], vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn ranks_average_ties() {
        let m = rank_within_rows(&[vec![0.5, 0.5, 0.9], vec![0.5, 0.5, 0.9]], RankDirection::HigherIsBetter)
            .unwrap();
        assert_eq!(m.rows()[0], vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn rank_column_sums_for_identical_permutation() {
        // Five rows all ranked (1, 2, 3): column sums 5, 10, 15.
        let rows = vec![vec![0.2, 0.4, 0.6]; 5];
        let m = rank_within_rows(&rows, RankDirection::HigherIsBetter).unwrap();
        assert_eq!(m.column_sums(), vec![5.0, 10.0, 15.0]);
    }

    #[test]
    fn rank_rejects_non_finite() {
        let err = rank_within_rows(
            &[vec![0.1, f64::NAN], vec![0.3, 0.4]],
            RankDirection::HigherIsBetter,
        )
        .unwrap_err();
        assert!(matches!(err, StatsError::NonFinite { row: 0, col: 1 }));
    }

    proptest::proptest! {
        #[test]
        fn rank_rows_sum_to_k_formula(rows in proptest::collection::vec(
            proptest::collection::vec(0.0f64..1.0, 5), 2..10)) {
            let m = rank_within_rows(&rows, RankDirection::HigherIsBetter).unwrap();
            let k = 5.0;
            for row in m.rows() {
                let sum: f64 = row.iter().sum();
                proptest::prop_assert!((sum - k * (k + 1.0) / 2.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn friedman_perfect_agreement_is_exact() {
        // n = 5 rows, k = 3, no ties, identical orderings.
        let rows = vec![vec![0.1, 0.5, 0.9]; 5];
        let r = friedman_test(&rows, true).unwrap();
        assert_eq!(r.chi_square, 10.0);
        assert_eq!(r.kendalls_w, 1.0);
        assert_eq!(r.df, 2);
        assert!(!r.degenerate);
        assert!(!r.tie_corrected);
        assert_abs_diff_eq!(r.p_value, (-5.0_f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn friedman_all_equal_is_degenerate() {
        let rows = vec![vec![0.5, 0.5, 0.5]; 4];
        let r = friedman_test(&rows, true).unwrap();
        assert_eq!(r.chi_square, 0.0);
        assert_eq!(r.kendalls_w, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.degenerate);
    }

    #[test]
    fn friedman_row_permutation_invariance() {
        let rows = vec![
            vec![0.7, 0.2, 0.9, 0.4],
            vec![0.3, 0.6, 0.8, 0.1],
            vec![0.5, 0.5, 0.2, 0.9],
            vec![0.9, 0.1, 0.3, 0.2],
        ];
        let mut shuffled = rows.clone();
        shuffled.swap(0, 3);
        shuffled.swap(1, 2);
        let a = friedman_test(&rows, true).unwrap();
        let b = friedman_test(&shuffled, true).unwrap();
        assert_eq!(a.chi_square, b.chi_square);
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn friedman_tie_correction_raises_chi_square() {
        let rows = vec![
            vec![0.5, 0.5, 0.9],
            vec![0.2, 0.4, 0.9],
            vec![0.1, 0.1, 0.7],
            vec![0.3, 0.6, 0.8],
        ];
        let corrected = friedman_test(&rows, true).unwrap();
        let raw = friedman_test(&rows, false).unwrap();
        assert!(corrected.tie_corrected);
        assert!(!raw.tie_corrected);
        assert!(corrected.chi_square > raw.chi_square);
    }

    #[test]
    fn kendalls_w_from_chi_square_design() {
        // chi2 = 142.65 over 53 topics and 9 treatments implies W = 0.3364.
        let w = kendalls_w_from_chi_square(142.65, 53, 9);
        assert_abs_diff_eq!(w, 0.3364, epsilon = 0.0005);
        assert_eq!(format!("{:.2}", w), "0.34");
    }

    #[test]
    fn friedman_w_identity_without_ties() {
        let rows = vec![
            vec![0.7, 0.2, 0.9, 0.4],
            vec![0.3, 0.6, 0.8, 0.1],
            vec![0.4, 0.5, 0.2, 0.9],
            vec![0.9, 0.1, 0.3, 0.2],
            vec![0.6, 0.7, 0.1, 0.3],
        ];
        let r = friedman_test(&rows, false).unwrap();
        assert_abs_diff_eq!(
            r.kendalls_w,
            r.chi_square / (r.n as f64 * (r.k as f64 - 1.0)),
            epsilon = 1e-12
        );
    }

    #[test]
    fn nemenyi_cd_hand_values() {
        // k = 2, n = 25: CD = 1.960 · sqrt(6 / 150) = 0.392.
        let rows = vec![vec![0.0, 1.0]; 25];
        let labels = vec!["a".to_string(), "b".to_string()];
        let r = nemenyi(&rows, 0.05, &labels).unwrap();
        assert_abs_diff_eq!(r.critical_difference, 0.392, epsilon = 0.001);

        // k = 9, n = 53: CD = 3.102 · sqrt(90 / 318) ≈ 1.650.
        let row: Vec<f64> = (0..9).map(|i| i as f64).collect();
        let rows = vec![row; 53];
        let labels: Vec<String> = (0..9).map(|i| format!("m{i}")).collect();
        let r = nemenyi(&rows, 0.05, &labels).unwrap();
        assert_abs_diff_eq!(r.critical_difference, 1.650, epsilon = 0.01);
    }

    #[test]
    fn nemenyi_equal_mean_ranks_not_significant() {
        // Two columns alternate wins: mean ranks equal.
        let mut rows = Vec::new();
        for i in 0..10 {
            if i % 2 == 0 {
                rows.push(vec![0.0, 1.0, 0.5]);
            } else {
                rows.push(vec![1.0, 0.0, 0.5]);
            }
        }
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let r = nemenyi(&rows, 0.05, &labels).unwrap();
        assert_eq!(r.is_significant("a", "b"), Some(false));
        assert_abs_diff_eq!(r.mean_ranks[0].1, r.mean_ranks[1].1, epsilon = 1e-12);
    }

    #[test]
    fn nemenyi_rejects_uncovered_inputs() {
        let rows = vec![vec![0.0, 1.0]; 5];
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(matches!(
            nemenyi(&rows, 0.01, &labels),
            Err(StatsError::OutsideNemenyiTable { .. })
        ));
        let wide_row: Vec<f64> = (0..21).map(|i| i as f64).collect();
        let wide = vec![wide_row; 3];
        let wide_labels: Vec<String> = (0..21).map(|i| format!("m{i}")).collect();
        assert!(matches!(
            nemenyi(&wide, 0.05, &wide_labels),
            Err(StatsError::OutsideNemenyiTable { .. })
        ));
    }

    #[test]
    fn kruskal_wallis_hand_fixture() {
        let groups = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 9.0]];
        let r = kruskal_wallis(&groups, true).unwrap();
        assert_abs_diff_eq!(r.h_statistic, 7.2, epsilon = 1e-12);
        assert_eq!(r.df, 2);
        assert_abs_diff_eq!(r.p_value, (-3.6_f64).exp(), epsilon = 1e-6);
        assert_eq!(r.group_mean_ranks, vec![2.0, 5.0, 8.0]);
        assert!(!r.tie_corrected);
    }

    #[test]
    fn kruskal_wallis_identical_groups_degenerate() {
        let groups = vec![vec![2.0, 2.0, 2.0], vec![2.0, 2.0, 2.0]];
        let r = kruskal_wallis(&groups, true).unwrap();
        assert_eq!(r.h_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(r.degenerate);
    }

    #[test]
    fn kruskal_wallis_monotone_invariance() {
        let groups = vec![vec![1.0, 2.0, 2.0, 5.0], vec![3.0, 4.0, 4.0], vec![0.5, 6.0, 7.0]];
        let transformed: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|&x: &f64| (2.0 * x + 1.0).exp()).collect())
            .collect();
        let a = kruskal_wallis(&groups, true).unwrap();
        let b = kruskal_wallis(&transformed, true).unwrap();
        assert_eq!(a.h_statistic, b.h_statistic);
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.group_mean_ranks, b.group_mean_ranks);
    }

    #[test]
    fn dunn_equal_mean_ranks() {
        let groups = vec![vec![1.0, 4.0, 5.0, 8.0], vec![2.0, 3.0, 6.0, 7.0]];
        let r = dunn_test(&groups, 0.05, false).unwrap();
        assert_eq!(r.comparisons.len(), 1);
        assert_abs_diff_eq!(r.comparisons[0].z, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.comparisons[0].p_unadjusted, 1.0, epsilon = 1e-12);
        assert!(!r.comparisons[0].significant_at_adjusted_alpha);
    }

    #[test]
    fn dunn_symmetry_under_group_swap() {
        let g1 = vec![1.0, 2.0, 9.0, 4.0];
        let g2 = vec![3.0, 8.0, 7.0];
        let g3 = vec![5.0, 6.0, 10.0, 11.0];
        let fwd = dunn_test(&[g1.clone(), g2.clone(), g3.clone()], 0.05, true).unwrap();
        let rev = dunn_test(&[g3, g2, g1], 0.05, true).unwrap();
        // Comparison (0,2) in one order is (0,2) reversed in the other.
        let a = &fwd.comparisons[1]; // groups 0 and 2
        let b = &rev.comparisons[1];
        assert_abs_diff_eq!(a.z, -b.z, epsilon = 1e-12);
        assert_abs_diff_eq!(a.p_unadjusted, b.p_unadjusted, epsilon = 1e-12);
    }

    #[test]
    fn dunn_monotone_invariance() {
        let groups = vec![vec![1.0, 2.0, 2.0, 5.0], vec![3.0, 4.0, 4.0], vec![0.5, 6.0, 7.0]];
        let transformed: Vec<Vec<f64>> = groups
            .iter()
            .map(|g| g.iter().map(|&x: &f64| x.powi(3) + 10.0).collect())
            .collect();
        let a = dunn_test(&groups, 0.05, true).unwrap();
        let b = dunn_test(&transformed, 0.05, true).unwrap();
        for (ca, cb) in a.comparisons.iter().zip(&b.comparisons) {
            assert_eq!(ca.z, cb.z);
            assert_eq!(ca.p_unadjusted, cb.p_unadjusted);
        }
    }

    /// Reconstruction of the learner-study design: 3 groups of 120 distinct
    /// values, so joint ranks are exactly 1..=360, with group rank sums
    /// 24360, 21660, and 18960 — mean ranks 203.0, 180.5, and 158.0.
    fn synthetic_learner_groups() -> Vec<Vec<f64>> {
        let ranges = |spans: &[(u32, u32)]| -> Vec<f64> {
            spans
                .iter()
                .flat_map(|&(lo, hi)| (lo..=hi).map(f64::from))
                .collect()
        };
        let g1 = ranges(&[(181, 240), (328, 360), (1, 27)]);
        let g2 = ranges(&[(61, 120), (241, 300)]);
        let g3 = ranges(&[(28, 60), (121, 180), (301, 327)]);
        assert_eq!((g1.len(), g2.len(), g3.len()), (120, 120, 120));
        assert_eq!(g1.iter().sum::<f64>(), 24360.0);
        assert_eq!(g2.iter().sum::<f64>(), 21660.0);
        assert_eq!(g3.iter().sum::<f64>(), 18960.0);
        vec![g1, g2, g3]
    }

    #[test]
    fn dunn_reproduces_learner_study_verdicts() {
        let groups = synthetic_learner_groups();
        let r = dunn_test(&groups, 0.05, false).unwrap();
        assert_abs_diff_eq!(r.group_mean_ranks[0], 203.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.group_mean_ranks[1], 180.5, epsilon = 1e-9);
        assert_abs_diff_eq!(r.group_mean_ranks[2], 158.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.adjusted_alpha, 0.05 / 3.0, epsilon = 1e-12);

        let g1_g2 = &r.comparisons[0];
        let g1_g3 = &r.comparisons[1];
        let g2_g3 = &r.comparisons[2];
        assert_abs_diff_eq!(g1_g3.z, 3.3495, epsilon = 0.001);
        assert_abs_diff_eq!(g1_g3.p_unadjusted, 8.1e-4, epsilon = 5e-5);
        assert!(g1_g3.significant_at_adjusted_alpha);
        assert_abs_diff_eq!(g1_g2.z, 1.6747, epsilon = 0.001);
        assert_abs_diff_eq!(g2_g3.z, 1.6747, epsilon = 0.001);
        assert!(!g1_g2.significant_at_adjusted_alpha);
        assert!(!g2_g3.significant_at_adjusted_alpha);
    }

    #[test]
    fn dunn_bonferroni_identity() {
        let groups = synthetic_learner_groups();
        let r = dunn_test(&groups, 0.05, false).unwrap();
        for c in &r.comparisons {
            assert_abs_diff_eq!(
                c.p_bonferroni,
                (r.m as f64 * c.p_unadjusted).min(1.0),
                epsilon = 0.0
            );
        }
    }

    proptest::proptest! {
        #[test]
        fn kw_permutation_within_groups_invariant(
            seed in 0u64..1000,
            sizes in proptest::collection::vec(2usize..6, 2..4),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut value = 0.0;
            let groups: Vec<Vec<f64>> = sizes.iter().map(|&s| {
                (0..s).map(|_| { value += 0.7; value % 3.0 }).collect()
            }).collect();
            let mut shuffled = groups.clone();
            for g in &mut shuffled {
                g.shuffle(&mut rng);
            }
            let a = kruskal_wallis(&groups, true).unwrap();
            let b = kruskal_wallis(&shuffled, true).unwrap();
            proptest::prop_assert_eq!(a.h_statistic, b.h_statistic);
        }
    }
}
