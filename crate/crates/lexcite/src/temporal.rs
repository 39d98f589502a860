//! Temporal analytics over the bipartite graph: annual volumes,
//! year-over-year regime detection per codex, citation entropy, and
//! the emergent-node and bridge-article reports.

use crate::graphstore::BipartiteGraph;
use crate::textcite::CitationType;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Decisions without year metadata land in this bucket.
pub const UNKNOWN_YEAR: i32 = 0;

fn type_index(ct: CitationType) -> usize {
    CitationType::ALL.iter().position(|&t| t == ct).unwrap()
}

/// Aggregates for a single year.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct YearStats {
    pub decisions: u64,
    /// Citation instances: every repeat mention counts.
    pub citations: u64,
    /// Distinct (decision, legislation) pairs.
    pub pairs: u64,
    /// Citation instances per type, indexed like `CitationType::ALL`.
    pub per_type: [u64; 6],
}

impl YearStats {
    pub fn citations_per_decision(&self) -> f64 {
        if self.decisions == 0 {
            0.0
        } else {
            self.citations as f64 / self.decisions as f64
        }
    }

    pub fn of_type(&self, ct: CitationType) -> u64 {
        self.per_type[type_index(ct)]
    }
}

pub type AnnualSeries = BTreeMap<i32, YearStats>;

/// Exact per-year counts; decisions with unknown year aggregate under
/// [`UNKNOWN_YEAR`].
pub fn annual_series(g: &BipartiteGraph) -> AnnualSeries {
    let mut series: AnnualSeries = BTreeMap::new();
    for d in 0..g.n_decisions() as u32 {
        let stats = series.entry(g.year(d)).or_default();
        stats.decisions += 1;
        for &(leg, count) in g.cited_by_decision(d) {
            stats.pairs += 1;
            stats.citations += count as u64;
            stats.per_type[type_index(g.legislation_type(leg))] += count as u64;
        }
    }
    series
}

/// Citation instances per codex per year, the input shape
/// [`regime_changes`] expects. Unknown-year decisions are skipped.
pub fn per_codex_series(g: &BipartiteGraph) -> BTreeMap<String, BTreeMap<i32, u64>> {
    let mut out: BTreeMap<String, BTreeMap<i32, u64>> = BTreeMap::new();
    for d in 0..g.n_decisions() as u32 {
        let year = g.year(d);
        if year == UNKNOWN_YEAR {
            continue;
        }
        for &(leg, count) in g.cited_by_decision(d) {
            if g.legislation_type(leg) != CitationType::CodexArticle {
                continue;
            }
            let key = g.legislation_key(leg);
            let codex = key.split("::").next().unwrap_or(key);
            *out.entry(codex.to_owned())
                .or_default()
                .entry(year)
                .or_insert(0) += count as u64;
        }
    }
    out
}

/// A year with a defined year-over-year change.
#[derive(Debug, Clone, PartialEq)]
pub struct YearChange {
    pub year: i32,
    pub yoy_pct: f64,
    /// |yoy| reached the report threshold.
    pub flagged: bool,
    /// Part of a surge-then-drop pair: a flagged surge at or above
    /// the threshold followed by a drop of at least 50% the next
    /// year. Both years carry the label.
    pub transition: bool,
}

#[derive(Debug, Clone, Default)]
pub struct RegimeChangeReport {
    pub threshold_pct: f64,
    pub per_codex: BTreeMap<String, Vec<YearChange>>,
}

const TRANSITION_DROP_PCT: f64 = -50.0;

/// Flag every year whose |year-over-year change| meets the threshold.
/// The change is only defined against a present, non-zero count in
/// the immediately preceding calendar year.
pub fn regime_changes(
    series: &BTreeMap<String, BTreeMap<i32, u64>>,
    threshold_pct: f64,
) -> RegimeChangeReport {
    let mut per_codex = BTreeMap::new();
    for (codex, counts) in series {
        let mut changes: Vec<YearChange> = Vec::new();
        for (&year, &count) in counts {
            let Some(&prev) = counts.get(&(year - 1)) else {
                continue;
            };
            if prev == 0 {
                continue;
            }
            let yoy_pct = 100.0 * (count as f64 - prev as f64) / prev as f64;
            changes.push(YearChange {
                year,
                yoy_pct,
                flagged: yoy_pct.abs() >= threshold_pct,
                transition: false,
            });
        }
        for i in 0..changes.len() {
            let surge = changes[i].yoy_pct >= threshold_pct;
            let followed_by_drop = changes
                .get(i + 1)
                .is_some_and(|next| next.year == changes[i].year + 1 && next.yoy_pct <= TRANSITION_DROP_PCT);
            if surge && followed_by_drop {
                changes[i].transition = true;
                changes[i + 1].transition = true;
            }
        }
        per_codex.insert(codex.clone(), changes);
    }
    RegimeChangeReport {
        threshold_pct,
        per_codex,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EntropyOptions {
    /// Logarithm base; 2 reports in bits.
    pub base: f64,
    /// Count each (decision, target) pair once instead of weighting
    /// by citation multiplicity.
    pub distinct_pairs: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            base: 2.0,
            distinct_pairs: false,
        }
    }
}

/// Shannon entropy of the citation-target distribution in one year,
/// in bits. Multiplicity-weighted: every citation instance counts.
pub fn citation_entropy(g: &BipartiteGraph, year: i32) -> Result<f64> {
    citation_entropy_with(g, year, &EntropyOptions::default())
}

pub fn citation_entropy_with(
    g: &BipartiteGraph,
    year: i32,
    opts: &EntropyOptions,
) -> Result<f64> {
    // Dense accumulator keeps the summation order fixed by ordinal.
    let mut mass = vec![0.0f64; g.n_legislation()];
    let mut total = 0.0f64;
    for d in 0..g.n_decisions() as u32 {
        if g.year(d) != year {
            continue;
        }
        for &(leg, count) in g.cited_by_decision(d) {
            let w = if opts.distinct_pairs { 1.0 } else { count as f64 };
            mass[leg as usize] += w;
            total += w;
        }
    }
    if total == 0.0 {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut h = 0.0;
    for &m in &mass {
        if m > 0.0 {
            let p = m / total;
            h -= p * p.ln();
        }
    }
    Ok(h / opts.base.ln())
}

/// Entropy per known year, skipping the unknown bucket.
pub fn entropy_series(g: &BipartiteGraph, opts: &EntropyOptions) -> BTreeMap<i32, f64> {
    let mut years: Vec<i32> = (0..g.n_decisions() as u32).map(|d| g.year(d)).collect();
    years.sort_unstable();
    years.dedup();
    let mut out = BTreeMap::new();
    for year in years {
        if year == UNKNOWN_YEAR {
            continue;
        }
        if let Ok(h) = citation_entropy_with(g, year, opts) {
            out.insert(year, h);
        }
    }
    out
}

/// Legislation first cited at or after `cutoff_year` with at least
/// `min_citations` total citations, descending by total. The first
/// year is taken over citers with known years; nodes cited only by
/// unknown-year decisions have no first year and are excluded.
pub fn emergent_nodes(
    g: &BipartiteGraph,
    cutoff_year: i32,
    min_citations: u64,
) -> Vec<(String, u64)> {
    let mut out: Vec<(String, u64)> = Vec::new();
    for leg in 0..g.n_legislation() as u32 {
        let mut first: Option<i32> = None;
        let mut total = 0u64;
        for &(dec, count) in g.citing_decisions(leg) {
            total += count as u64;
            let year = g.year(dec);
            if year != UNKNOWN_YEAR {
                first = Some(first.map_or(year, |f| f.min(year)));
            }
        }
        if first.is_some_and(|f| f >= cutoff_year) && total >= min_citations {
            out.push((g.legislation_key(leg).to_owned(), total));
        }
    }
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeArticle {
    pub key: String,
    /// Justice kinds where the per-domain threshold was exceeded.
    pub domains: u32,
    pub total_citations: u64,
}

#[derive(Debug, Clone)]
pub struct BridgeReport {
    pub articles: Vec<BridgeArticle>,
    /// Citations to qualifying articles over all citations.
    pub covered_share: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BridgeOptions {
    /// Alternative reading of the qualifying rule: require the
    /// aggregate total to exceed the threshold and mere presence in
    /// enough domains, instead of the per-domain threshold.
    pub aggregate_total: bool,
}

/// Articles cited heavily across several justice domains. Under the
/// default rule an article qualifies when its citation count exceeds
/// `min_citations_per_domain` within each of at least `min_domains`
/// distinct known justice kinds.
pub fn bridge_articles(
    g: &BipartiteGraph,
    min_citations_per_domain: u64,
    min_domains: u32,
) -> BridgeReport {
    bridge_articles_with(g, min_citations_per_domain, min_domains, &BridgeOptions::default())
}

pub fn bridge_articles_with(
    g: &BipartiteGraph,
    min_citations_per_domain: u64,
    min_domains: u32,
    opts: &BridgeOptions,
) -> BridgeReport {
    let mut articles = Vec::new();
    let mut grand_total = 0u64;
    let mut covered = 0u64;
    for leg in 0..g.n_legislation() as u32 {
        // Justice kinds run 1..=5; 0 marks unknown and never counts
        // toward domains.
        let mut per_kind = [0u64; 6];
        let mut total = 0u64;
        for &(dec, count) in g.citing_decisions(leg) {
            per_kind[g.justice_kind(dec) as usize] += count as u64;
            total += count as u64;
        }
        grand_total += total;
        let qualifying = per_kind[1..]
            .iter()
            .filter(|&&c| c > min_citations_per_domain)
            .count() as u32;
        let present = per_kind[1..].iter().filter(|&&c| c > 0).count() as u32;
        let qualifies = if opts.aggregate_total {
            total > min_citations_per_domain && present >= min_domains
        } else {
            qualifying >= min_domains
        };
        if qualifies {
            covered += total;
            articles.push(BridgeArticle {
                key: g.legislation_key(leg).to_owned(),
                domains: if opts.aggregate_total { present } else { qualifying },
                total_citations: total,
            });
        }
    }
    articles.sort_by(|a, b| {
        b.total_citations
            .cmp(&a.total_citations)
            .then_with(|| a.key.cmp(&b.key))
    });
    BridgeReport {
        articles,
        covered_share: if grand_total == 0 {
            0.0
        } else {
            covered as f64 / grand_total as f64
        },
    }
}
