//! Randomized invariants over the numeric and parsing primitives.

use lexcite::communities::nmi;
use lexcite::predictor::auc;
use lexcite::textcite::expand_article_ranges;
use lexcite::validator::wilson_interval;
use proptest::prelude::*;

fn brute_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut concordant = 0.0;
    let mut ties = 0.0;
    let mut pairs = 0.0;
    for (i, &li) in labels.iter().enumerate() {
        if !li {
            continue;
        }
        for (j, &lj) in labels.iter().enumerate() {
            if lj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                concordant += 1.0;
            } else if scores[i] == scores[j] {
                ties += 1.0;
            }
        }
    }
    (concordant + 0.5 * ties) / pairs
}

proptest! {
    /// Any ascending range expands to exactly b - a + 1 consecutive
    /// articles, whatever dash or spacing the text uses.
    #[test]
    fn range_expansion_counts_inclusive_span(
        a in 1u64..5000,
        span in 0u64..500,
        dash in prop::sample::select(vec!["-", "–", "—"]),
        pad in prop::sample::select(vec!["", " ", "  "]),
    ) {
        let b = a + span;
        let got = expand_article_ranges(&format!("{a}{pad}{dash}{pad}{b}")).articles;
        prop_assert_eq!(got.len() as u64, span + 1);
        prop_assert_eq!(got.first().unwrap(), &a.to_string());
        prop_assert_eq!(got.last().unwrap(), &b.to_string());
        for w in got.windows(2) {
            let (x, y): (u64, u64) = (w[0].parse().unwrap(), w[1].parse().unwrap());
            prop_assert_eq!(y, x + 1);
        }
    }

    /// The Wilson interval stays inside [0, 1] and brackets the
    /// observed proportion.
    #[test]
    fn wilson_interval_brackets_the_estimate(
        n in 1u64..100_000,
        frac in 0.0f64..=1.0,
        z in 0.1f64..4.0,
    ) {
        let successes = (frac * n as f64).round() as u64;
        let successes = successes.min(n);
        let (low, high) = wilson_interval(successes, n, z).unwrap();
        let p_hat = successes as f64 / n as f64;
        prop_assert!((0.0..=1.0).contains(&low));
        prop_assert!((0.0..=1.0).contains(&high));
        prop_assert!(low <= p_hat + 1e-12 && p_hat <= high + 1e-12);
        prop_assert!(low <= high);
    }

    /// Mutual information is symmetric in its arguments and normalized.
    #[test]
    fn nmi_is_symmetric_and_bounded(
        labels in prop::collection::vec((0u32..5, 0u32..5), 2..120),
    ) {
        let a: Vec<u32> = labels.iter().map(|&(x, _)| x).collect();
        let b: Vec<u32> = labels.iter().map(|&(_, y)| y).collect();
        let ab = nmi(&a, &b).unwrap();
        let ba = nmi(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&ab));
    }

    /// The rank-based AUC equals explicit concordant-pair counting.
    #[test]
    fn auc_matches_pair_counting(
        rows in prop::collection::vec((0u32..6, any::<bool>()), 2..200),
    ) {
        let scores: Vec<f64> = rows.iter().map(|&(s, _)| s as f64 / 5.0).collect();
        let mut labels: Vec<bool> = rows.iter().map(|&(_, l)| l).collect();
        let n = labels.len();
        labels[0] = true;
        labels[n - 1] = false;
        let fast = auc(&scores, &labels).unwrap();
        prop_assert!((fast - brute_auc(&scores, &labels)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&fast));
    }
}
