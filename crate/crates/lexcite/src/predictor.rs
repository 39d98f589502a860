//! Citation-importance prediction: per-article features from a
//! training window, a deterministic logistic regression, AUC and
//! precision-at-K evaluation, the frequency baseline, and the
//! surprise-riser report.

use crate::graphstore::BipartiteGraph;
use crate::{Error, Result};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::RangeInclusive;

pub const FEATURE_NAMES: [&str; 4] = ["log_total", "active_years", "growth_ratio", "cv"];

/// Features derived from an article's yearly citation counts inside
/// the training window. Test-window data never enters here.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleFeatures {
    /// ln(1 + total citations in the window).
    pub log_total: f64,
    /// Window years with at least one citation.
    pub active_years: f64,
    /// (final-third citations + 1) / (first-third citations + 1),
    /// thirds of k = max(1, n/3) years each.
    pub growth_ratio: f64,
    /// Coefficient of variation of the yearly counts (population
    /// stddev over mean), 0 when the mean is 0.
    pub cv: f64,
}

impl ArticleFeatures {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.log_total, self.active_years, self.growth_ratio, self.cv]
    }
}

/// Yearly citation counts for one legislation key across a window.
/// Unknown-year citations are outside every window and ignored.
pub fn yearly_counts(
    g: &BipartiteGraph,
    article: &str,
    window: &RangeInclusive<i32>,
) -> Vec<u64> {
    let n = (*window.end() - *window.start() + 1).max(0) as usize;
    let mut counts = vec![0u64; n];
    if let Some(leg) = g.legislation_ordinal(article) {
        for &(dec, count) in g.citing_decisions(leg) {
            let year = g.year(dec);
            if window.contains(&year) {
                counts[(year - *window.start()) as usize] += count as u64;
            }
        }
    }
    counts
}

pub fn compute_features(
    g: &BipartiteGraph,
    article: &str,
    train_years: &RangeInclusive<i32>,
) -> ArticleFeatures {
    features_from_counts(&yearly_counts(g, article, train_years))
}

pub fn features_from_counts(counts: &[u64]) -> ArticleFeatures {
    if counts.is_empty() {
        return ArticleFeatures {
            log_total: 0.0,
            active_years: 0.0,
            growth_ratio: 1.0,
            cv: 0.0,
        };
    }
    let n = counts.len();
    let total: u64 = counts.iter().sum();
    let active = counts.iter().filter(|&&c| c > 0).count();
    let k = (n / 3).max(1);
    let first: u64 = counts[..k].iter().sum();
    let last: u64 = counts[n - k..].iter().sum();
    let mean = total as f64 / n as f64;
    let cv = if mean == 0.0 {
        0.0
    } else {
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        var.sqrt() / mean
    };
    ArticleFeatures {
        log_total: (1.0 + total as f64).ln(),
        active_years: active as f64,
        growth_ratio: (last as f64 + 1.0) / (first as f64 + 1.0),
        cv,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Column means and stddevs used for z-scoring at fit time;
    /// applied again when scoring.
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl LogisticModel {
    /// Predicted probability for a raw (unstandardized) feature row.
    pub fn score(&self, x: &[f64]) -> f64 {
        let mut z = self.intercept;
        for i in 0..self.weights.len() {
            z += self.weights[i] * (x[i] - self.means[i]) / self.stds[i];
        }
        sigmoid(z)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            l2: 1e-4,
            lr: 0.1,
            epochs: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub model: LogisticModel,
    /// Objective after each accepted epoch; non-increasing.
    pub loss_history: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^(-m)) without overflow.
fn softplus_neg(m: f64) -> f64 {
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

/// Full-batch gradient descent on L2-regularized mean log loss, zero
/// initialization. The step size halves whenever a step would raise
/// the objective, so the recorded loss history is monotone and the
/// fit is deterministic.
pub fn train_logistic(
    features: &[Vec<f64>],
    labels: &[bool],
    opts: &TrainOptions,
) -> Result<TrainResult> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: features.len(),
            right: labels.len(),
        });
    }
    let n = features.len();
    if n == 0 {
        return Err(Error::InsufficientData { needed: 2, got: 0 });
    }
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == n {
        return Err(Error::DegenerateTraining(format!(
            "all {n} labels in one class"
        )));
    }
    let d = features[0].len();
    if features.iter().any(|row| row.len() != d) {
        return Err(Error::InvalidInput("ragged feature matrix".to_owned()));
    }

    let mut means = vec![0.0f64; d];
    for row in features {
        for (m, &x) in means.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let mut stds = vec![0.0f64; d];
    for row in features {
        for j in 0..d {
            stds[j] += (row[j] - means[j]).powi(2);
        }
    }
    for s in stds.iter_mut() {
        *s = (*s / n as f64).sqrt();
        if *s == 0.0 {
            *s = 1.0; // constant column: centered to zero, weight inert
        }
    }
    let z: Vec<Vec<f64>> = features
        .iter()
        .map(|row| {
            (0..d)
                .map(|j| (row[j] - means[j]) / stds[j])
                .collect()
        })
        .collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();

    let objective = |w: &[f64], b: f64| -> f64 {
        let mut loss = 0.0;
        for (row, &yi) in z.iter().zip(&y) {
            let zi = b + row.iter().zip(w).map(|(x, wv)| x * wv).sum::<f64>();
            // log loss = softplus(-margin) with margin = (2y-1)·z
            loss += softplus_neg((2.0 * yi - 1.0) * zi);
        }
        loss / n as f64 + 0.5 * opts.l2 * w.iter().map(|v| v * v).sum::<f64>()
    };

    let mut w = vec![0.0f64; d];
    let mut b = 0.0f64;
    let mut lr = opts.lr;
    let mut loss = objective(&w, b);
    let mut history = vec![loss];

    for _ in 0..opts.epochs {
        let mut grad_w = vec![0.0f64; d];
        let mut grad_b = 0.0f64;
        for (row, &yi) in z.iter().zip(&y) {
            let zi = b + row.iter().zip(&w).map(|(x, wv)| x * wv).sum::<f64>();
            let err = sigmoid(zi) - yi;
            grad_b += err;
            for j in 0..d {
                grad_w[j] += err * row[j];
            }
        }
        grad_b /= n as f64;
        for j in 0..d {
            grad_w[j] = grad_w[j] / n as f64 + opts.l2 * w[j];
        }

        // Backtrack until the step does not increase the objective.
        let mut accepted = false;
        for _ in 0..40 {
            let cand_w: Vec<f64> = w
                .iter()
                .zip(&grad_w)
                .map(|(wv, g)| wv - lr * g)
                .collect();
            let cand_b = b - lr * grad_b;
            let cand_loss = objective(&cand_w, cand_b);
            if cand_loss <= loss {
                w = cand_w;
                b = cand_b;
                loss = cand_loss;
                accepted = true;
                break;
            }
            lr *= 0.5;
        }
        if !accepted {
            break;
        }
        history.push(loss);
    }

    Ok(TrainResult {
        model: LogisticModel {
            weights: w,
            intercept: b,
            means,
            stds,
        },
        loss_history: history,
    })
}

/// Area under the ROC curve via the rank-sum formulation: tied scores
/// receive their average rank.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidInput(
            "AUC needs both positive and negative labels".to_owned(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_pos_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        // 1-based ranks i+1 ..= j averaged across the tie run.
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if labels[idx] {
                rank_pos_sum += avg_rank;
            }
        }
        i = j;
    }
    let np = n_pos as f64;
    Ok((rank_pos_sum - np * (np + 1.0) / 2.0) / (np * n_neg as f64))
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub auc: f64,
    pub precision_at: BTreeMap<usize, f64>,
}

/// AUC plus precision at each requested K. Top-K ordering is by score
/// descending with ties broken by key so the report is deterministic.
pub fn evaluate(
    keys: &[String],
    scores: &[f64],
    labels: &[bool],
    ks: &[usize],
) -> Result<Evaluation> {
    if keys.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: keys.len(),
            right: scores.len(),
        });
    }
    let auc = auc(scores, labels)?;
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .total_cmp(&scores[a])
            .then_with(|| keys[a].cmp(&keys[b]))
    });
    let mut precision_at = BTreeMap::new();
    for &k in ks {
        if k == 0 {
            continue;
        }
        let hits = order
            .iter()
            .take(k)
            .filter(|&&idx| labels[idx])
            .count();
        precision_at.insert(k, hits as f64 / k as f64);
    }
    Ok(Evaluation { auc, precision_at })
}

/// Rank keys by count descending, key ascending.
pub fn rank_by_count(counts: &BTreeMap<String, u64>) -> Vec<(String, u64)> {
    let mut ranked: Vec<(String, u64)> = counts
        .iter()
        .map(|(k, &v)| (k.clone(), v))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Precision of the frequency heuristic: the training period's
/// most-cited articles, cut at K, against the test top set.
pub fn naive_baseline(
    train_counts: &BTreeMap<String, u64>,
    test_top: &BTreeSet<String>,
    ks: &[usize],
) -> BTreeMap<usize, f64> {
    let ranked = rank_by_count(train_counts);
    let mut out = BTreeMap::new();
    for &k in ks {
        if k == 0 {
            continue;
        }
        let hits = ranked
            .iter()
            .take(k)
            .filter(|(key, _)| test_top.contains(key))
            .count();
        out.insert(k, hits as f64 / k as f64);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurpriseRiser {
    pub key: String,
    pub train_citations: u64,
    pub test_citations: u64,
}

/// Articles that reached the test top set from under `max_train`
/// training citations (strict), in test-rank order. `test_top` must
/// already be ranked.
pub fn surprise_risers(
    train_counts: &BTreeMap<String, u64>,
    test_top: &[(String, u64)],
    max_train: u64,
) -> Vec<SurpriseRiser> {
    test_top
        .iter()
        .filter_map(|(key, test)| {
            let train = train_counts.get(key).copied().unwrap_or(0);
            (train < max_train).then(|| SurpriseRiser {
                key: key.clone(),
                train_citations: train,
                test_citations: *test,
            })
        })
        .collect()
}

/// Plain-text model form: one key=value per line with feature names,
/// so a fit can be inspected and reloaded.
pub fn render_model(model: &LogisticModel, names: &[&str]) -> String {
    let mut out = String::new();
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(out, "weight.{name}={:.17e}", model.weights[i]);
    }
    let _ = writeln!(out, "intercept={:.17e}", model.intercept);
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(out, "mean.{name}={:.17e}", model.means[i]);
    }
    for (i, name) in names.iter().enumerate() {
        let _ = writeln!(out, "std.{name}={:.17e}", model.stds[i]);
    }
    out
}

pub fn parse_model(text: &str) -> Result<LogisticModel> {
    let mut weights = Vec::new();
    let mut means = Vec::new();
    let mut stds = Vec::new();
    let mut intercept = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("bad model line: {line}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad model value: {line}")))?;
        if key == "intercept" {
            intercept = Some(value);
        } else if key.starts_with("weight.") {
            weights.push(value);
        } else if key.starts_with("mean.") {
            means.push(value);
        } else if key.starts_with("std.") {
            stds.push(value);
        } else {
            return Err(Error::InvalidInput(format!("bad model key: {key}")));
        }
    }
    if weights.len() != means.len() || weights.len() != stds.len() || weights.is_empty() {
        return Err(Error::InvalidInput("incomplete model file".to_owned()));
    }
    Ok(LogisticModel {
        weights,
        intercept: intercept.ok_or_else(|| Error::InvalidInput("missing intercept".to_owned()))?,
        means,
        stds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_counts_yield_zero_unit_features() {
        let f = features_from_counts(&[0; 13]);
        assert_eq!(
            f,
            ArticleFeatures {
                log_total: 0.0,
                active_years: 0.0,
                growth_ratio: 1.0,
                cv: 0.0
            }
        );
    }

    #[test]
    fn last_year_burst_features() {
        let mut counts = [0u64; 13];
        counts[12] = 30;
        let f = features_from_counts(&counts);
        assert!((f.log_total - 31.0f64.ln()).abs() < 1e-15);
        assert_eq!(f.active_years, 1.0);
        // Thirds of a 13-year window are 4/5/4 years.
        assert_eq!(f.growth_ratio, 31.0);
        assert!(f.cv > 0.0);
    }

    #[test]
    fn constant_counts_have_zero_cv_and_unit_growth() {
        let f = features_from_counts(&[10; 13]);
        assert_eq!(f.cv, 0.0);
        assert_eq!(f.growth_ratio, 1.0);
        assert_eq!(f.active_years, 13.0);
    }

    #[test]
    fn separable_data_reaches_train_auc_one() {
        let features: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![if i < 20 { i as f64 } else { 100.0 + i as f64 }])
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        let fit = train_logistic(&features, &labels, &TrainOptions::default()).unwrap();
        let scores: Vec<f64> = features.iter().map(|x| fit.model.score(x)).collect();
        assert_eq!(auc(&scores, &labels).unwrap(), 1.0);
    }

    #[test]
    fn random_labels_give_chance_auc() {
        // Labels independent of features: held-out AUC sits at chance
        // (training-set AUC would drift up from overfitting).
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut draw = |n: usize| -> (Vec<Vec<f64>>, Vec<bool>) {
            let xs = (0..n)
                .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                .collect();
            let ys = (0..n).map(|_| rng.random::<f64>() < 0.5).collect();
            (xs, ys)
        };
        let (train_x, train_y) = draw(1000);
        let (test_x, test_y) = draw(500);
        let fit = train_logistic(&train_x, &train_y, &TrainOptions::default()).unwrap();
        let scores: Vec<f64> = test_x.iter().map(|x| fit.model.score(x)).collect();
        let a = auc(&scores, &test_y).unwrap();
        assert!((a - 0.5).abs() <= 0.05, "auc = {a}");
    }

    #[test]
    fn training_loss_is_monotone_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let features: Vec<Vec<f64>> = (0..200)
            .map(|_| vec![rng.random::<f64>() * 4.0 - 2.0, rng.random::<f64>()])
            .collect();
        let labels: Vec<bool> = features
            .iter()
            .map(|x| x[0] + 0.3 * rng.random::<f64>() > 0.0)
            .collect();
        let fit = train_logistic(&features, &labels, &TrainOptions::default()).unwrap();
        for pair in fit.loss_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn single_class_labels_rejected() {
        let features = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            train_logistic(&features, &[true, true], &TrainOptions::default()),
            Err(Error::DegenerateTraining(_))
        ));
    }

    #[test]
    fn auc_hand_example() {
        let scores = [0.9, 0.8, 0.3, 0.1];
        let labels = [true, false, true, false];
        assert_eq!(auc(&scores, &labels).unwrap(), 0.75);
    }

    #[test]
    fn auc_all_ties_is_half() {
        let scores = [0.4; 6];
        let labels = [true, false, true, false, false, true];
        assert_eq!(auc(&scores, &labels).unwrap(), 0.5);
    }

    #[test]
    fn auc_invariant_under_increasing_transforms() {
        let scores = [0.2, 1.5, 0.7, 3.0, 0.7, 2.2];
        let labels = [false, true, false, true, true, false];
        let base = auc(&scores, &labels).unwrap();
        let affine: Vec<f64> = scores.iter().map(|s| 2.0 * s + 3.0).collect();
        let logged: Vec<f64> = scores.iter().map(|s| s.ln()).collect();
        assert_eq!(auc(&affine, &labels).unwrap(), base);
        assert_eq!(auc(&logged, &labels).unwrap(), base);
    }

    #[test]
    fn auc_matches_brute_force_pair_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 60;
            // Coarse grid forces plenty of ties.
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.random::<f64>() * 8.0).floor() / 8.0)
                .collect();
            let labels: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.4).collect();
            if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
                continue;
            }
            let fast = auc(&scores, &labels).unwrap();
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                if !labels[i] {
                    continue;
                }
                for j in 0..n {
                    if labels[j] {
                        continue;
                    }
                    den += 1.0;
                    if scores[i] > scores[j] {
                        num += 1.0;
                    } else if scores[i] == scores[j] {
                        num += 0.5;
                    }
                }
            }
            assert!((fast - num / den).abs() < 1e-12);
        }
    }

    #[test]
    fn evaluate_perfect_scores() {
        let keys: Vec<String> = (0..4).map(|i| format!("k{i}")).collect();
        let labels = [true, false, true, false];
        let scores = [1.0, 0.0, 1.0, 0.0];
        let ev = evaluate(&keys, &scores, &labels, &[1, 2, 4]).unwrap();
        assert_eq!(ev.auc, 1.0);
        assert_eq!(ev.precision_at[&1], 1.0);
        assert_eq!(ev.precision_at[&2], 1.0);
        assert_eq!(ev.precision_at[&4], 0.5);
    }

    #[test]
    fn evaluate_breaks_score_ties_by_key() {
        let keys: Vec<String> = ["b", "a"].iter().map(|s| s.to_string()).collect();
        let scores = [0.5, 0.5];
        // "a" sorts first in the tie; it is the positive.
        let ev = evaluate(&keys, &scores, &[false, true], &[1]).unwrap();
        assert_eq!(ev.precision_at[&1], 1.0);
    }

    #[test]
    fn baseline_identical_rankings_score_one() {
        let mut train = BTreeMap::new();
        train.insert("a".to_owned(), 100u64);
        train.insert("b".to_owned(), 50u64);
        train.insert("c".to_owned(), 10u64);
        let test_top: BTreeSet<String> =
            ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let p = naive_baseline(&train, &test_top, &[1, 2, 3]);
        assert!(p.values().all(|&v| v == 1.0));
    }

    #[test]
    fn baseline_disjoint_top_sets_score_zero() {
        let mut train = BTreeMap::new();
        train.insert("a".to_owned(), 100u64);
        let test_top: BTreeSet<String> = ["z".to_owned()].into_iter().collect();
        assert_eq!(naive_baseline(&train, &test_top, &[1])[&1], 0.0);
    }

    #[test]
    fn surprise_risers_strict_cutoff_and_order() {
        let mut train = BTreeMap::new();
        train.insert("steady".to_owned(), 100u64);
        train.insert("riser".to_owned(), 2u64);
        let test_top = vec![
            ("steady".to_owned(), 60_000u64),
            ("riser".to_owned(), 49_201u64),
            ("fresh".to_owned(), 1_000u64),
        ];
        let risers = surprise_risers(&train, &test_top, 100);
        assert_eq!(
            risers,
            vec![
                SurpriseRiser {
                    key: "riser".to_owned(),
                    train_citations: 2,
                    test_citations: 49_201
                },
                SurpriseRiser {
                    key: "fresh".to_owned(),
                    train_citations: 0,
                    test_citations: 1_000
                },
            ]
        );
        assert!(surprise_risers(&train, &[], 100).is_empty());
    }

    #[test]
    fn model_text_round_trip() {
        let model = LogisticModel {
            weights: vec![1.23, -0.5, 0.0, 2.5e-7],
            intercept: -3.75,
            means: vec![0.1, 0.2, 0.3, 0.4],
            stds: vec![1.0, 2.0, 3.0, 4.0],
        };
        let text = render_model(&model, &FEATURE_NAMES);
        let back = parse_model(&text).unwrap();
        assert_eq!(back, model);
    }
}
