//! Extraction quality measurement: precision over a decision sample
//! with Wilson intervals, and the recall proxy against stored
//! citation rows.

use crate::textcite::{
    expand_article_ranges, extract_citations, legislation_key, normalize_law_ref, CitationType,
    CodexTable,
};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

/// Wilson score interval for a binomial proportion, clamped to [0,1].
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "Wilson interval needs n >= 1".to_owned(),
        ));
    }
    if successes > n {
        return Err(Error::InvalidInput(format!(
            "successes {successes} exceed n {n}"
        )));
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    Ok(((center - half).max(0.0), (center + half).min(1.0)))
}

/// One sampled decision: its text and the citation rows a registry
/// stored for it.
#[derive(Debug, Clone)]
pub struct SampleCase {
    pub decision_id: String,
    pub text: String,
    pub stored: Vec<StoredCitation>,
}

/// A stored citation row; `article_ref` may hold a composite
/// fragment like "1-3" that the extractor would emit as three rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredCitation {
    pub ctype: CitationType,
    pub law_ref: String,
    pub article_ref: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypePrecision {
    pub ctype: CitationType,
    pub validated: u64,
    pub total: u64,
    pub precision: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub decision_id: String,
    pub ctype: CitationType,
    pub key: String,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// Types that appeared in the sample, in declaration order.
    pub per_type: Vec<TypePrecision>,
    pub validated: u64,
    pub total: u64,
    pub precision: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub z: f64,
    pub mismatches: Vec<Mismatch>,
}

/// Re-extract every sampled decision and validate each distinct
/// citation row. Article-bearing types check key membership in the
/// legislation index; reference types carry no index, so surviving
/// the extraction grammar is the validity rule for them.
pub fn precision_eval(
    sample: &[SampleCase],
    index: &BTreeSet<String>,
    z: f64,
) -> ValidationReport {
    let mut validated_by_type: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    let mut mismatches = Vec::new();
    for case in sample {
        for edge in extract_citations(&case.decision_id, &case.text).edges {
            let slot = validated_by_type
                .entry(type_pos(edge.ctype))
                .or_insert((0, 0));
            slot.1 += 1;
            let valid = if edge.ctype.has_article() {
                index.contains(&edge.legislation_key())
            } else {
                true
            };
            if valid {
                slot.0 += 1;
            } else {
                mismatches.push(Mismatch {
                    decision_id: case.decision_id.clone(),
                    ctype: edge.ctype,
                    key: edge.legislation_key(),
                });
            }
        }
    }

    let mut per_type = Vec::new();
    let mut validated = 0;
    let mut total = 0;
    for (pos, (ok, all)) in &validated_by_type {
        validated += ok;
        total += all;
        let (low, high) = wilson_interval(*ok, *all, z).expect("all >= 1 per construction");
        per_type.push(TypePrecision {
            ctype: CitationType::ALL[*pos],
            validated: *ok,
            total: *all,
            precision: *ok as f64 / *all as f64,
            wilson_low: low,
            wilson_high: high,
        });
    }
    let (precision, wilson_low, wilson_high) = if total == 0 {
        // No claims made, none wrong; the interval stays vacuous.
        (1.0, 0.0, 1.0)
    } else {
        let (low, high) = wilson_interval(validated, total, z).unwrap();
        (validated as f64 / total as f64, low, high)
    };
    ValidationReport {
        per_type,
        validated,
        total,
        precision,
        wilson_low,
        wilson_high,
        z,
        mismatches,
    }
}

fn type_pos(ct: CitationType) -> usize {
    CitationType::ALL.iter().position(|&t| t == ct).unwrap()
}

/// Why a stored citation failed to re-extract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissReason {
    /// The stored row is a composite range or list.
    RangeNormalization,
    /// The extractor never saw this law in the decision at all.
    PatternGap,
    Other,
}

impl MissReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            MissReason::RangeNormalization => "range-normalization",
            MissReason::PatternGap => "pattern-gap",
            MissReason::Other => "other",
        }
    }
}

#[derive(Debug, Clone)]
pub struct UnmatchedStored {
    pub decision_id: String,
    pub ctype: CitationType,
    pub law_ref: String,
    pub article_ref: Option<String>,
    pub reason: MissReason,
}

#[derive(Debug, Clone)]
pub struct RecallReport {
    pub stored_total: u64,
    /// Composite stored rows count as matched when every article in
    /// the expansion was re-extracted.
    pub matched_range_aware: u64,
    /// Exact row-for-row agreement.
    pub matched_strict: u64,
    /// None when no stored citations were provided.
    pub recall_range_aware: Option<f64>,
    pub recall_strict: Option<f64>,
    /// Rows missed under the range-aware rule.
    pub unmatched: Vec<UnmatchedStored>,
}

/// Fraction of stored citations the extractor reproduces, under both
/// a strict row comparison and a range-aware one that expands
/// composite stored rows before comparing.
pub fn recall_proxy(sample: &[SampleCase]) -> RecallReport {
    let table = CodexTable::new();
    let mut stored_total = 0;
    let mut matched_range_aware = 0;
    let mut matched_strict = 0;
    let mut unmatched = Vec::new();

    for case in sample {
        let extraction = extract_citations(&case.decision_id, &case.text);
        let extracted: BTreeSet<(CitationType, String)> = extraction
            .edges
            .iter()
            .map(|e| (e.ctype, e.legislation_key()))
            .collect();
        let laws_seen: BTreeSet<(CitationType, String)> = extraction
            .edges
            .iter()
            .map(|e| (e.ctype, e.law_ref.clone()))
            .collect();

        for row in &case.stored {
            stored_total += 1;
            let law = normalize_law_ref(&table, row.ctype, &row.law_ref)
                .unwrap_or_else(|| row.law_ref.clone());

            let strict_hit = match &row.article_ref {
                Some(art) => extracted.contains(&(row.ctype, legislation_key(&law, Some(art)))),
                None => extracted.contains(&(row.ctype, legislation_key(&law, None))),
            };
            if strict_hit {
                matched_strict += 1;
            }

            let (range_hit, composite) = match &row.article_ref {
                Some(art) => {
                    let expanded = expand_article_ranges(art).articles;
                    let composite = expanded.len() > 1;
                    let all_found = !expanded.is_empty()
                        && expanded.iter().all(|a| {
                            extracted.contains(&(row.ctype, legislation_key(&law, Some(a))))
                        });
                    (all_found || strict_hit, composite)
                }
                None => (strict_hit, false),
            };
            if range_hit {
                matched_range_aware += 1;
            } else {
                let reason = if composite {
                    MissReason::RangeNormalization
                } else if !laws_seen.contains(&(row.ctype, law.clone())) {
                    MissReason::PatternGap
                } else {
                    MissReason::Other
                };
                unmatched.push(UnmatchedStored {
                    decision_id: case.decision_id.clone(),
                    ctype: row.ctype,
                    law_ref: law,
                    article_ref: row.article_ref.clone(),
                    reason,
                });
            }
        }
    }

    let ratio = |m: u64| {
        if stored_total == 0 {
            None
        } else {
            Some(m as f64 / stored_total as f64)
        }
    };
    RecallReport {
        stored_total,
        matched_range_aware,
        matched_strict,
        recall_range_aware: ratio(matched_range_aware),
        recall_strict: ratio(matched_strict),
        unmatched,
    }
}

/// Seeded uniform sample of decision ids, order-stable for a seed.
pub fn sample_decisions(ids: &[String], k: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<&String> = ids.iter().collect();
    pool.shuffle(&mut rng);
    pool.into_iter().take(k).cloned().collect()
}

/// Stratified variant: rows are spread across year buckets as evenly
/// as the buckets allow, cycling over years in ascending order.
pub fn sample_stratified(ids: &[String], years: &[i32], k: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buckets: BTreeMap<i32, Vec<&String>> = BTreeMap::new();
    for (id, &year) in ids.iter().zip(years) {
        buckets.entry(year).or_default().push(id);
    }
    for bucket in buckets.values_mut() {
        bucket.shuffle(&mut rng);
    }
    let mut out = Vec::new();
    let mut offsets: BTreeMap<i32, usize> = buckets.keys().map(|&y| (y, 0)).collect();
    while out.len() < k {
        let mut progressed = false;
        for (year, bucket) in &buckets {
            let off = offsets.get_mut(year).unwrap();
            if *off < bucket.len() && out.len() < k {
                out.push(bucket[*off].clone());
                *off += 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    out
}

/// Plain-text table of the precision report.
pub fn render_validation_text(report: &ValidationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "precision {:.4} [{:.4}, {:.4}] ({}/{} citations, z={})",
        report.precision,
        report.wilson_low,
        report.wilson_high,
        report.validated,
        report.total,
        report.z
    );
    for t in &report.per_type {
        let _ = writeln!(
            out,
            "  {:<22} {:.4} [{:.4}, {:.4}]  ({}/{})",
            t.ctype.as_str(),
            t.precision,
            t.wilson_low,
            t.wilson_high,
            t.validated,
            t.total
        );
    }
    if !report.mismatches.is_empty() {
        let _ = writeln!(out, "mismatches:");
        for m in &report.mismatches {
            let _ = writeln!(out, "  {}\t{}\t{}", m.decision_id, m.ctype.as_str(), m.key);
        }
    }
    out
}

/// CSV form: one row per type plus an overall row.
pub fn validation_csv(report: &ValidationReport) -> String {
    let mut out = String::from("type,validated,total,precision,wilson_low,wilson_high\n");
    for t in &report.per_type {
        let _ = writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6}",
            t.ctype.as_str(),
            t.validated,
            t.total,
            t.precision,
            t.wilson_low,
            t.wilson_high
        );
    }
    let _ = writeln!(
        out,
        "overall,{},{},{:.6},{:.6},{:.6}",
        report.validated, report.total, report.precision, report.wilson_low, report.wilson_high
    );
    out
}

pub fn render_recall_text(report: &RecallReport) -> String {
    let mut out = String::new();
    match (report.recall_range_aware, report.recall_strict) {
        (Some(ra), Some(st)) => {
            let _ = writeln!(
                out,
                "recall proxy {:.4} range-aware ({}/{}), {:.4} strict ({}/{})",
                ra,
                report.matched_range_aware,
                report.stored_total,
                st,
                report.matched_strict,
                report.stored_total
            );
        }
        _ => {
            let _ = writeln!(out, "recall proxy: no stored citations (no data)");
        }
    }
    for u in &report.unmatched {
        let _ = writeln!(
            out,
            "  missed {}\t{}\t{}\t{}\t{}",
            u.decision_id,
            u.ctype.as_str(),
            u.law_ref,
            u.article_ref.as_deref().unwrap_or("-"),
            u.reason.as_str()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_reference_values() {
        let (low, high) = wilson_interval(200, 200, 1.96).unwrap();
        assert!((low - 0.982).abs() < 0.001, "low = {low}");
        assert_eq!(high, 1.0);

        let (low0, _high0) = wilson_interval(0, 200, 1.96).unwrap();
        assert_eq!(low0, 0.0);

        let (l, h) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((l - 0.404).abs() < 0.002);
        assert!((h - 0.596).abs() < 0.002);
    }

    #[test]
    fn wilson_contains_point_estimate_and_narrows() {
        for &(s, n) in &[(3u64, 10u64), (50, 100), (199, 200)] {
            let p = s as f64 / n as f64;
            let (low, high) = wilson_interval(s, n, 1.96).unwrap();
            assert!(low <= p && p <= high);
            let (low10, high10) = wilson_interval(s * 10, n * 10, 1.96).unwrap();
            assert!(high10 - low10 < high - low);
        }
    }

    #[test]
    fn wilson_rejects_empty_and_overfull() {
        assert!(wilson_interval(0, 0, 1.96).is_err());
        assert!(wilson_interval(5, 4, 1.96).is_err());
    }

    fn clean_case() -> SampleCase {
        SampleCase {
            decision_id: "d1".to_owned(),
            text: "Відповідно до ст. 625 ЦК України та ст. 526 ЦК України".to_owned(),
            stored: vec![
                StoredCitation {
                    ctype: CitationType::CodexArticle,
                    law_ref: "ЦК".to_owned(),
                    article_ref: Some("625".to_owned()),
                },
                StoredCitation {
                    ctype: CitationType::CodexArticle,
                    law_ref: "ЦК".to_owned(),
                    article_ref: Some("526".to_owned()),
                },
            ],
        }
    }

    fn full_index() -> BTreeSet<String> {
        ["ЦК::625", "ЦК::526", "ЦК::1", "ЦК::2", "ЦК::3"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    #[test]
    fn clean_sample_has_perfect_precision() {
        let report = precision_eval(&[clean_case()], &full_index(), 1.96);
        assert_eq!(report.precision, 1.0);
        assert_eq!(report.total, 2);
        assert!(report.mismatches.is_empty());
        assert!(report.wilson_low <= 1.0 && report.wilson_high == 1.0);
        assert_eq!(report.per_type.len(), 1);
        assert_eq!(report.per_type[0].ctype, CitationType::CodexArticle);
    }

    #[test]
    fn fabricated_keys_lower_precision_to_m_over_m_plus_k() {
        // The index misses ЦК::526, so one of the two extracted rows
        // counts as fabricated: m=1, k=1.
        let mut index = full_index();
        index.remove("ЦК::526");
        let report = precision_eval(&[clean_case()], &index, 1.96);
        assert_eq!(report.precision, 0.5);
        assert_eq!(report.mismatches.len(), 1);
        assert_eq!(report.mismatches[0].key, "ЦК::526");
    }

    #[test]
    fn empty_index_zeroes_indexed_types() {
        let report = precision_eval(&[clean_case()], &BTreeSet::new(), 1.96);
        assert_eq!(report.precision, 0.0);
        assert_eq!(report.mismatches.len(), 2);
    }

    #[test]
    fn reference_types_validate_by_form() {
        let case = SampleCase {
            decision_id: "d2".to_owned(),
            text: "у справі № 757/1234/20 та ст. 625 ЦК України".to_owned(),
            stored: Vec::new(),
        };
        let report = precision_eval(&[case], &full_index(), 1.96);
        assert_eq!(report.precision, 1.0);
        let types: Vec<CitationType> = report.per_type.iter().map(|t| t.ctype).collect();
        assert!(types.contains(&CitationType::CaseReference));
    }

    #[test]
    fn recall_perfect_when_stored_equals_extraction() {
        let report = recall_proxy(&[clean_case()]);
        assert_eq!(report.stored_total, 2);
        assert_eq!(report.recall_strict, Some(1.0));
        assert_eq!(report.recall_range_aware, Some(1.0));
        assert!(report.unmatched.is_empty());
    }

    #[test]
    fn composite_stored_row_matches_range_aware_only() {
        let case = SampleCase {
            decision_id: "d3".to_owned(),
            text: "згідно зі ст.ст. 1-3 ЦК України".to_owned(),
            stored: vec![StoredCitation {
                ctype: CitationType::CodexArticle,
                law_ref: "ЦК".to_owned(),
                article_ref: Some("1-3".to_owned()),
            }],
        };
        let report = recall_proxy(&[case]);
        assert_eq!(report.recall_strict, Some(0.0));
        assert_eq!(report.recall_range_aware, Some(1.0));
        assert!(report.unmatched.is_empty());
    }

    #[test]
    fn empty_stored_returns_no_data_marker() {
        let case = SampleCase {
            decision_id: "d4".to_owned(),
            text: "ст. 625 ЦК України".to_owned(),
            stored: Vec::new(),
        };
        let report = recall_proxy(&[case]);
        assert_eq!(report.recall_strict, None);
        assert_eq!(report.recall_range_aware, None);
    }

    #[test]
    fn miss_reasons_classified() {
        let case = SampleCase {
            decision_id: "d5".to_owned(),
            text: "Відповідно до ст. 625 ЦК України".to_owned(),
            stored: vec![
                // Law never extracted at all.
                StoredCitation {
                    ctype: CitationType::CodexArticle,
                    law_ref: "КК".to_owned(),
                    article_ref: Some("185".to_owned()),
                },
                // Law extracted, article absent.
                StoredCitation {
                    ctype: CitationType::CodexArticle,
                    law_ref: "ЦК".to_owned(),
                    article_ref: Some("999".to_owned()),
                },
                // Composite row whose members were not all extracted.
                StoredCitation {
                    ctype: CitationType::CodexArticle,
                    law_ref: "ЦК".to_owned(),
                    article_ref: Some("625-627".to_owned()),
                },
            ],
        };
        let report = recall_proxy(&[case]);
        let reasons: Vec<MissReason> = report.unmatched.iter().map(|u| u.reason).collect();
        assert_eq!(
            reasons,
            vec![
                MissReason::PatternGap,
                MissReason::Other,
                MissReason::RangeNormalization
            ]
        );
    }

    #[test]
    fn stored_law_ref_normalized_before_comparison() {
        let case = SampleCase {
            decision_id: "d6".to_owned(),
            text: "ст. 625 ЦК України".to_owned(),
            stored: vec![StoredCitation {
                ctype: CitationType::CodexArticle,
                // Registry kept the long form; comparison normalizes.
                law_ref: "ЦК України".to_owned(),
                article_ref: Some("625".to_owned()),
            }],
        };
        let report = recall_proxy(&[case]);
        assert_eq!(report.recall_strict, Some(1.0));
    }

    #[test]
    fn uniform_sampling_is_seed_stable() {
        let ids: Vec<String> = (0..100).map(|i| format!("d{i:03}")).collect();
        let a = sample_decisions(&ids, 10, 42);
        let b = sample_decisions(&ids, 10, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 10);
        let c = sample_decisions(&ids, 10, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn stratified_sampling_spreads_over_years() {
        let ids: Vec<String> = (0..90).map(|i| format!("d{i:03}")).collect();
        let years: Vec<i32> = (0..90).map(|i| 2019 + (i % 3)).collect();
        let sample = sample_stratified(&ids, &years, 9, 7);
        assert_eq!(sample.len(), 9);
        let mut per_year = [0; 3];
        for id in &sample {
            let idx: usize = id[1..].parse().unwrap();
            per_year[idx % 3] += 1;
        }
        assert_eq!(per_year, [3, 3, 3]);
    }

    #[test]
    fn renders_are_parseable_shapes() {
        let report = precision_eval(&[clean_case()], &full_index(), 1.96);
        let text = render_validation_text(&report);
        assert!(text.starts_with("precision 1.0000"));
        let csv = validation_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "type,validated,total,precision,wilson_low,wilson_high"
        );
        assert!(csv.lines().last().unwrap().starts_with("overall,2,2,1.000000"));

        let recall = recall_proxy(&[clean_case()]);
        assert!(render_recall_text(&recall).starts_with("recall proxy 1.0000"));
    }
}
