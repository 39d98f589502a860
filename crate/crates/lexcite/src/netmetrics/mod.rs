//! Degree-distribution fitting and centrality analytics.

mod centrality;
mod powerlaw;

pub use centrality::{
    eigenvector_authority, pagerank, PageRankResult, DEFAULT_DAMPING, DEFAULT_TOL,
    MAX_PAGERANK_ITER,
};
pub use powerlaw::{
    compare_distributions, continuous_alpha, fit_power_law, fit_power_law_with, hurwitz_zeta,
    nelder_mead, Alternative, DiscretePowerLaw, DistributionComparison, FitMethod, FitOptions,
    PowerLawFit,
};

use crate::graphstore::CoCitationGraph;
use crate::{Error, Result};

/// Spearman rank correlation with average-rank tie handling.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: xs.len(),
        });
    }
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    pearson(&rx, &ry)
}

/// Ranks 1..n with ties replaced by the mean rank of their run.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let mean_rank = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = mean_rank;
        }
        i = j;
    }
    ranks
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "constant input has no rank variation".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pairwise Spearman correlations among the three centrality scores.
#[derive(Debug, Clone, Default)]
pub struct CentralityCorrelations {
    pub degree_pagerank: Option<f64>,
    pub degree_eigenvector: Option<f64>,
    pub pagerank_eigenvector: Option<f64>,
}

/// Joint centrality view of a co-citation graph.
#[derive(Debug, Clone)]
pub struct CentralityReport {
    pub keys: Vec<String>,
    /// Weighted degree (raw co-citation strength).
    pub degree: Vec<f64>,
    pub pagerank: Vec<f64>,
    pub eigenvector: Vec<f64>,
    pub damping: f64,
    pub iterations: usize,
    pub spearman: CentralityCorrelations,
}

/// Compute degree, PageRank and eigenvector centrality plus their rank
/// correlations in one pass. Correlations are None when undefined
/// (constant scores on tiny graphs).
pub fn centrality_report(g: &CoCitationGraph, damping: f64, tol: f64) -> Result<CentralityReport> {
    let degree: Vec<f64> = (0..g.n_nodes() as u32)
        .map(|i| g.weighted_degree(i) as f64)
        .collect();
    let pr = pagerank(g, damping, tol)?;
    let ev = eigenvector_authority(g, tol)?;
    let spearman_of = |a: &[f64], b: &[f64]| spearman(a, b).ok();
    let report = CentralityReport {
        keys: g.node_keys().to_vec(),
        spearman: CentralityCorrelations {
            degree_pagerank: spearman_of(&degree, &pr.scores),
            degree_eigenvector: spearman_of(&degree, &ev),
            pagerank_eigenvector: spearman_of(&pr.scores, &ev),
        },
        degree,
        pagerank: pr.scores,
        eigenvector: ev,
        damping,
        iterations: pr.iterations,
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_reversal() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys: Vec<f64> = xs.iter().rev().copied().collect();
        assert!((spearman(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_example() {
        // d² sum = 2 → rho = 1 - 12/60 = 0.8.
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 2.0, 4.0];
        assert!((spearman(&xs, &ys).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn invariant_under_monotone_transforms() {
        let xs = [0.3, 1.9, 0.7, 4.2, 2.8, 0.1];
        let ys = [5.0, 2.0, 9.0, 1.0, 7.0, 3.0];
        let base = spearman(&xs, &ys).unwrap();
        let ex: Vec<f64> = xs.iter().map(|x| x.exp()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        assert!((spearman(&ex, &ys).unwrap() - base).abs() < 1e-12);
        assert!((spearman(&xs, &ly).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn ties_get_average_ranks() {
        // xs has a tie; compare against scipy-style expectation.
        let xs = [1.0, 2.0, 2.0, 3.0];
        let ranks = average_ranks(&xs);
        assert_eq!(ranks, vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::InsufficientData { .. })
        ));
        assert!(matches!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::UndefinedCorrelation(_))
        ));
    }

    #[test]
    fn report_on_small_graph() {
        let g = crate::graphstore::CoCitationGraph::from_weighted_edges(&[
            ("a", "b", 4),
            ("b", "c", 2),
            ("c", "d", 1),
            ("a", "c", 1),
        ])
        .unwrap();
        let rep = centrality_report(&g, 0.85, 1e-12).unwrap();
        assert_eq!(rep.keys.len(), 4);
        assert!((rep.pagerank.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(rep.iterations > 0);
        let rho = rep.spearman.degree_pagerank.unwrap();
        assert!((-1.0..=1.0).contains(&rho));
    }
}
