//! Named analysis experiments over a previously extracted edge set.
//! Each experiment reads `edges.tsv` + `meta.tsv` from the output
//! directory, writes its artifacts into a subdirectory named after the
//! experiment, and returns a human-readable summary that is also
//! persisted as `summary.txt`.

use super::{corpus_files, read_corpus_records, read_edges_tsv, read_meta_tsv, Config};
use crate::communities::{
    export_ontology, louvain, render_ontology, temporal_communities, Partition,
};
use crate::graphstore::{build_bipartite, project_cocitation, BipartiteGraph, DecisionInfo};
use crate::netmetrics::{
    centrality_report, compare_distributions, fit_power_law_with, FitMethod, FitOptions,
};
use crate::predictor::{
    compute_features, evaluate, naive_baseline, rank_by_count, render_model, surprise_risers,
    train_logistic, TrainOptions, FEATURE_NAMES,
};
use crate::temporal::{
    annual_series, bridge_articles, emergent_nodes, entropy_series, per_codex_series,
    regime_changes, EntropyOptions, UNKNOWN_YEAR,
};
use crate::textcite::{CitationEdge, CitationType};
use crate::validator::{
    precision_eval, recall_proxy, render_recall_text, render_validation_text, sample_stratified,
    validation_csv, SampleCase, StoredCitation,
};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::PathBuf;

pub const EXPERIMENT_NAMES: [&str; 7] = [
    "powerlaw",
    "centrality",
    "communities",
    "temporal",
    "predict",
    "validate",
    "ablation",
];

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub name: String,
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

pub fn run_experiment(name: &str, cfg: &Config) -> Result<ExperimentOutput> {
    match name {
        "powerlaw" => powerlaw(cfg),
        "centrality" => centrality(cfg),
        "communities" => communities(cfg),
        "temporal" => temporal(cfg),
        "predict" => predict(cfg),
        "validate" => validate(cfg),
        "ablation" => ablation(cfg),
        other => Err(Error::InvalidInput(format!(
            "unknown experiment {other:?}; expected one of {}",
            EXPERIMENT_NAMES.join(", ")
        ))),
    }
}

/// Load the extracted graph inputs, failing with the exact missing
/// path so the fix is obvious.
fn load_inputs(cfg: &Config) -> Result<(Vec<CitationEdge>, HashMap<String, DecisionInfo>)> {
    let edges_path = cfg.out_dir.join("edges.tsv");
    let meta_path = cfg.out_dir.join("meta.tsv");
    for p in [&edges_path, &meta_path] {
        if !p.exists() {
            return Err(Error::InvalidInput(format!(
                "missing {}; run the extract step first",
                p.display()
            )));
        }
    }
    Ok((read_edges_tsv(&edges_path)?, read_meta_tsv(&meta_path)?))
}

fn load_graph(cfg: &Config) -> Result<BipartiteGraph> {
    let (edges, meta) = load_inputs(cfg)?;
    Ok(build_bipartite(edges, &meta))
}

struct Workspace {
    name: &'static str,
    dir: PathBuf,
    files: Vec<PathBuf>,
    summary: String,
}

impl Workspace {
    fn new(cfg: &Config, name: &'static str) -> Result<Workspace> {
        let dir = cfg.out_dir.join(name);
        std::fs::create_dir_all(&dir)?;
        Ok(Workspace {
            name,
            dir,
            files: Vec::new(),
            summary: String::new(),
        })
    }

    fn write(&mut self, file: &str, content: &str) -> Result<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, content)?;
        self.files.push(path);
        Ok(())
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn finish(mut self) -> Result<ExperimentOutput> {
        let path = self.dir.join("summary.txt");
        std::fs::write(&path, &self.summary)?;
        self.files.push(path);
        Ok(ExperimentOutput {
            name: self.name.to_owned(),
            dir: self.dir,
            files: self.files,
            summary: self.summary,
        })
    }
}

fn parse_fit_method(name: &str) -> Result<FitMethod> {
    match name {
        "continuous" => Ok(FitMethod::ContinuousApprox),
        "discrete" => Ok(FitMethod::DiscreteExact),
        other => Err(Error::InvalidInput(format!(
            "fit_method must be \"continuous\" or \"discrete\", got {other:?}"
        ))),
    }
}

/// Total citation count per legislation node.
fn citation_totals(g: &BipartiteGraph) -> Vec<(String, u64)> {
    let mut totals: Vec<(String, u64)> = (0..g.n_legislation() as u32)
        .map(|leg| {
            let total = g
                .citing_decisions(leg)
                .iter()
                .map(|&(_, c)| c as u64)
                .sum();
            (g.legislation_key(leg).to_owned(), total)
        })
        .collect();
    totals.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    totals
}

fn powerlaw(cfg: &Config) -> Result<ExperimentOutput> {
    let g = load_graph(cfg)?;
    let mut ws = Workspace::new(cfg, "powerlaw")?;

    let totals = citation_totals(&g);
    let mut csv = String::from("key,citations\n");
    for (key, n) in &totals {
        let _ = writeln!(csv, "{key},{n}");
    }
    ws.write("citation_counts.csv", &csv)?;

    let counts: Vec<u64> = totals.iter().map(|&(_, n)| n).collect();
    let opts = FitOptions {
        method: parse_fit_method(&cfg.fit_method)?,
        min_tail: cfg.fit_min_tail,
    };
    let fit = fit_power_law_with(&counts, &opts)?;
    ws.line(format!(
        "alpha {:.4} +/- {:.4} (x_min {}, tail n {}, KS {:.4}, {})",
        fit.alpha,
        fit.sigma,
        fit.x_min,
        fit.n_tail,
        fit.ks_d,
        fit.method.as_str()
    ));
    let mut fit_text = String::new();
    let _ = writeln!(fit_text, "alpha={:.10}", fit.alpha);
    let _ = writeln!(fit_text, "sigma={:.10}", fit.sigma);
    let _ = writeln!(fit_text, "x_min={}", fit.x_min);
    let _ = writeln!(fit_text, "n_tail={}", fit.n_tail);
    let _ = writeln!(fit_text, "ks_d={:.10}", fit.ks_d);
    let _ = writeln!(fit_text, "method={}", fit.method.as_str());
    ws.write("fit.txt", &fit_text)?;

    match compare_distributions(&counts, &fit) {
        Ok(comparisons) => {
            let mut csv = String::from("alternative,r,p_value\n");
            for c in &comparisons {
                let _ = writeln!(csv, "{},{:.6},{:.6}", c.alternative.as_str(), c.r, c.p_value);
                ws.line(format!(
                    "vs {}: r {:.4}, p {:.4}",
                    c.alternative.as_str(),
                    c.r,
                    c.p_value
                ));
            }
            ws.write("comparisons.csv", &csv)?;
        }
        Err(e) => ws.line(format!("alternative comparison skipped: {e}")),
    }
    ws.finish()
}

fn centrality(cfg: &Config) -> Result<ExperimentOutput> {
    let g = load_graph(cfg)?;
    let proj = project_cocitation(&g, cfg.min_weight);
    if proj.n_nodes() == 0 {
        return Err(Error::InvalidInput(format!(
            "co-citation projection is empty at min_weight {}; lower the threshold",
            cfg.min_weight
        )));
    }
    let report = centrality_report(&proj, cfg.damping, cfg.tolerance)?;
    let mut ws = Workspace::new(cfg, "centrality")?;

    let mut order: Vec<usize> = (0..report.keys.len()).collect();
    order.sort_by(|&a, &b| {
        report.pagerank[b]
            .total_cmp(&report.pagerank[a])
            .then_with(|| report.keys[a].cmp(&report.keys[b]))
    });
    let mut csv = String::from("key,degree,pagerank,eigenvector\n");
    for &i in &order {
        let _ = writeln!(
            csv,
            "{},{},{:.10e},{:.10e}",
            report.keys[i], report.degree[i] as u64, report.pagerank[i], report.eigenvector[i]
        );
    }
    ws.write("centrality.csv", &csv)?;

    ws.line(format!(
        "{} nodes, {} edges (min co-citation weight {})",
        proj.n_nodes(),
        proj.edges().len(),
        cfg.min_weight
    ));
    ws.line(format!(
        "pagerank converged in {} iterations (damping {})",
        report.iterations, report.damping
    ));
    let fmt = |v: Option<f64>| v.map_or("undefined".to_owned(), |r| format!("{r:.4}"));
    ws.line(format!(
        "spearman degree~pagerank {}, degree~eigenvector {}, pagerank~eigenvector {}",
        fmt(report.spearman.degree_pagerank),
        fmt(report.spearman.degree_eigenvector),
        fmt(report.spearman.pagerank_eigenvector)
    ));
    ws.line("top by pagerank:");
    for &i in order.iter().take(10) {
        ws.line(format!(
            "  {}  pr {:.6}  deg {}",
            report.keys[i], report.pagerank[i], report.degree[i] as u64
        ));
    }
    ws.finish()
}

/// Known-year periods of `period_years` consecutive years, labeled
/// "start-end".
fn period_label(year: i32, first: i32, span: u32) -> String {
    let idx = (year - first).div_euclid(span as i32);
    let lo = first + idx * span as i32;
    format!("{}-{}", lo, lo + span as i32 - 1)
}

fn communities(cfg: &Config) -> Result<ExperimentOutput> {
    let (edges, meta) = load_inputs(cfg)?;
    let g = build_bipartite(edges.iter().cloned(), &meta);
    let proj = project_cocitation(&g, cfg.min_weight);
    if proj.n_nodes() == 0 {
        return Err(Error::InvalidInput(format!(
            "co-citation projection is empty at min_weight {}; lower the threshold",
            cfg.min_weight
        )));
    }
    let partition = louvain(&proj, cfg.seed);
    let mut ws = Workspace::new(cfg, "communities")?;

    let mut rows: Vec<(&str, u32)> = (0..proj.n_nodes() as u32)
        .map(|i| (proj.node_key(i), partition.assignment[i as usize]))
        .collect();
    rows.sort();
    let mut tsv = String::from("key\tcommunity\n");
    for (key, c) in &rows {
        let _ = writeln!(tsv, "{key}\t{c}");
    }
    ws.write("partition.tsv", &tsv)?;

    let ontology = export_ontology(&proj, &partition, &g)?;
    ws.write("ontology.txt", &render_ontology(&ontology))?;

    ws.line(format!(
        "{} communities over {} nodes, modularity {:.4}",
        partition.n_communities(),
        proj.n_nodes(),
        partition.q
    ));
    let mut sizes: Vec<(usize, u32)> = ontology
        .classes
        .iter()
        .map(|c| (c.members.len(), c.id))
        .collect();
    sizes.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    for &(n, id) in sizes.iter().take(8) {
        let class = ontology.classes.iter().find(|c| c.id == id).unwrap();
        ws.line(format!(
            "  class {}: {} members, codex {}",
            id,
            n,
            class.dominant_codex.as_deref().unwrap_or("-")
        ));
    }

    // Temporal stability: re-detect per period of known-year
    // decisions and compare adjacent periods on shared nodes.
    let known: Vec<i32> = meta
        .values()
        .map(|i| i.year)
        .filter(|&y| y != UNKNOWN_YEAR)
        .collect();
    match (known.iter().min(), known.iter().max()) {
        (Some(&first), Some(_)) => {
            let mut by_period: BTreeMap<String, Vec<CitationEdge>> = BTreeMap::new();
            for e in &edges {
                let Some(info) = meta.get(&e.decision_id) else {
                    continue;
                };
                if info.year == UNKNOWN_YEAR {
                    continue;
                }
                by_period
                    .entry(period_label(info.year, first, cfg.period_years))
                    .or_default()
                    .push(e.clone());
            }
            let graphs: BTreeMap<String, _> = by_period
                .into_iter()
                .map(|(label, edges)| {
                    let bip = build_bipartite(edges, &meta);
                    (label, project_cocitation(&bip, cfg.min_weight))
                })
                .collect();
            match temporal_communities(&graphs, cfg.seed, cfg.stability_threshold) {
                Ok(tc) => {
                    let mut csv = String::from("from,to,shared_nodes,nmi,stable\n");
                    for c in &tc.comparisons {
                        let _ = writeln!(
                            csv,
                            "{},{},{},{:.6},{}",
                            c.from, c.to, c.shared_nodes, c.nmi, c.stable
                        );
                        ws.line(format!(
                            "period {} -> {}: nmi {:.4} on {} shared nodes ({})",
                            c.from,
                            c.to,
                            c.nmi,
                            c.shared_nodes,
                            if c.stable { "stable" } else { "unstable" }
                        ));
                    }
                    ws.write("stability.csv", &csv)?;
                }
                Err(e) => ws.line(format!("stability skipped: {e}")),
            }
        }
        _ => ws.line("stability skipped: no decisions with known years"),
    }
    ws.finish()
}

fn temporal(cfg: &Config) -> Result<ExperimentOutput> {
    let g = load_graph(cfg)?;
    let mut ws = Workspace::new(cfg, "temporal")?;

    let series = annual_series(&g);
    let mut csv = String::from("year,decisions,citations,pairs,citations_per_decision");
    for t in CitationType::ALL {
        let _ = write!(csv, ",{}", t.as_str());
    }
    csv.push('\n');
    for (year, s) in &series {
        let _ = write!(
            csv,
            "{},{},{},{},{:.4}",
            year,
            s.decisions,
            s.citations,
            s.pairs,
            s.citations_per_decision()
        );
        for n in s.per_type {
            let _ = write!(csv, ",{n}");
        }
        csv.push('\n');
    }
    ws.write("annual.csv", &csv)?;
    let known = series.iter().filter(|(&y, _)| y != UNKNOWN_YEAR).count();
    ws.line(format!(
        "{} known years, {} decisions total",
        known,
        series.values().map(|s| s.decisions).sum::<u64>()
    ));

    let per_codex = per_codex_series(&g);
    let regimes = regime_changes(&per_codex, cfg.regime_threshold_pct);
    let mut csv = String::from("codex,year,yoy_pct,flagged,transition\n");
    let mut flagged = 0;
    for (codex, changes) in &regimes.per_codex {
        for c in changes {
            let _ = writeln!(
                csv,
                "{},{},{:.2},{},{}",
                codex, c.year, c.yoy_pct, c.flagged, c.transition
            );
            if c.flagged {
                flagged += 1;
                if flagged <= 12 {
                    ws.line(format!(
                        "  {} {}: {:+.1}%{}",
                        codex,
                        c.year,
                        c.yoy_pct,
                        if c.transition { " (transition)" } else { "" }
                    ));
                }
            }
        }
    }
    ws.write("regimes.csv", &csv)?;
    ws.line(format!(
        "{} codex-year changes at |yoy| >= {}%",
        flagged, regimes.threshold_pct
    ));

    let entropy = entropy_series(
        &g,
        &EntropyOptions {
            base: cfg.entropy_base,
            distinct_pairs: false,
        },
    );
    let mut csv = String::from("year,entropy\n");
    for (year, h) in &entropy {
        let _ = writeln!(csv, "{year},{h:.6}");
    }
    ws.write("entropy.csv", &csv)?;
    if let (Some((fy, fh)), Some((ly, lh))) = (entropy.iter().next(), entropy.iter().last()) {
        ws.line(format!(
            "entropy {fh:.3} ({fy}) -> {lh:.3} ({ly}), base {}",
            cfg.entropy_base
        ));
    }

    let emergent = emergent_nodes(&g, cfg.emergent_cutoff_year, cfg.emergent_min_citations);
    let mut csv = String::from("key,citations\n");
    for (key, n) in &emergent {
        let _ = writeln!(csv, "{key},{n}");
    }
    ws.write("emergent.csv", &csv)?;
    ws.line(format!(
        "{} targets first cited in {} or later (min {} citations)",
        emergent.len(),
        cfg.emergent_cutoff_year,
        cfg.emergent_min_citations
    ));

    let bridges = bridge_articles(&g, cfg.bridge_min_citations, cfg.bridge_min_domains);
    let mut csv = String::from("key,domains,citations\n");
    for b in &bridges.articles {
        let _ = writeln!(csv, "{},{},{}", b.key, b.domains, b.total_citations);
    }
    ws.write("bridges.csv", &csv)?;
    ws.line(format!(
        "{} bridge targets (> {} citations in >= {} justice kinds), covering {:.1}% of citations",
        bridges.articles.len(),
        cfg.bridge_min_citations,
        cfg.bridge_min_domains,
        100.0 * bridges.covered_share
    ));
    ws.finish()
}

fn predict(cfg: &Config) -> Result<ExperimentOutput> {
    let g = load_graph(cfg)?;
    let known: Vec<i32> = (0..g.n_decisions() as u32)
        .map(|d| g.year(d))
        .filter(|&y| y != UNKNOWN_YEAR)
        .collect();
    let (Some(&first), Some(&last)) = (known.iter().min(), known.iter().max()) else {
        return Err(Error::InvalidInput(
            "prediction needs decisions with known years".to_owned(),
        ));
    };
    if first > cfg.train_end_year || last <= cfg.train_end_year {
        return Err(Error::InvalidInput(format!(
            "train_end_year {} must split the known year span {first}..={last}",
            cfg.train_end_year
        )));
    }
    let train_years = first..=cfg.train_end_year;

    // Per-target citation totals on each side of the split.
    let mut train_counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut test_counts: BTreeMap<String, u64> = BTreeMap::new();
    for d in 0..g.n_decisions() as u32 {
        let year = g.year(d);
        if year == UNKNOWN_YEAR {
            continue;
        }
        let side = if year <= cfg.train_end_year {
            &mut train_counts
        } else {
            &mut test_counts
        };
        for &(leg, count) in g.cited_by_decision(d) {
            *side.entry(g.legislation_key(leg).to_owned()).or_insert(0) += count as u64;
        }
    }
    let ranked_test = rank_by_count(&test_counts);
    let top_n = cfg.predict_top_n.min(ranked_test.len());
    let test_top: BTreeSet<String> = ranked_test
        .iter()
        .take(top_n)
        .map(|(k, _)| k.clone())
        .collect();

    let mut ws = Workspace::new(cfg, "predict")?;
    ws.line(format!(
        "train {}..={}, test {}..={}, predicting the test top {}",
        first,
        cfg.train_end_year,
        cfg.train_end_year + 1,
        last,
        top_n
    ));

    // Candidates are targets already cited during training; a held-out
    // subset measures generalization.
    let candidates: Vec<String> = train_counts.keys().cloned().collect();
    let features: Vec<Vec<f64>> = candidates
        .iter()
        .map(|key| compute_features(&g, key, &train_years).to_vec())
        .collect();
    let labels: Vec<bool> = candidates.iter().map(|k| test_top.contains(k)).collect();

    let mut csv = String::from("key,label,train_citations,test_citations");
    for name in FEATURE_NAMES {
        let _ = write!(csv, ",{name}");
    }
    csv.push('\n');
    for (i, key) in candidates.iter().enumerate() {
        let _ = write!(
            csv,
            "{key},{},{},{}",
            labels[i] as u8,
            train_counts[key],
            test_counts.get(key).copied().unwrap_or(0)
        );
        for v in &features[i] {
            let _ = write!(csv, ",{v:.6}");
        }
        csv.push('\n');
    }
    ws.write("features.csv", &csv)?;
    ws.line(format!(
        "{} candidates, {} positives",
        candidates.len(),
        labels.iter().filter(|&&l| l).count()
    ));

    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let fit_n = (candidates.len() * 7) / 10;
    let (fit_idx, eval_idx) = order.split_at(fit_n);

    let gather = |idx: &[usize]| -> (Vec<String>, Vec<Vec<f64>>, Vec<bool>) {
        (
            idx.iter().map(|&i| candidates[i].clone()).collect(),
            idx.iter().map(|&i| features[i].clone()).collect(),
            idx.iter().map(|&i| labels[i]).collect(),
        )
    };
    let (_, fit_x, fit_y) = gather(fit_idx);
    let (eval_keys, eval_x, eval_y) = gather(eval_idx);

    let opts = TrainOptions {
        l2: cfg.l2,
        lr: cfg.learning_rate,
        epochs: cfg.epochs,
    };
    match train_logistic(&fit_x, &fit_y, &opts) {
        Ok(trained) => {
            ws.write("model.txt", &render_model(&trained.model, &FEATURE_NAMES))?;
            let scores: Vec<f64> = eval_x.iter().map(|x| trained.model.score(x)).collect();
            let ks: Vec<usize> = cfg
                .precision_ks
                .iter()
                .map(|&k| k.min(eval_keys.len()))
                .filter(|&k| k > 0)
                .collect();
            match evaluate(&eval_keys, &scores, &eval_y, &ks) {
                Ok(eval) => {
                    ws.line(format!(
                        "held-out auc {:.4} on {} candidates ({} epochs, final loss {:.5})",
                        eval.auc,
                        eval_keys.len(),
                        trained.loss_history.len(),
                        trained.loss_history.last().copied().unwrap_or(f64::NAN)
                    ));
                    for (k, p) in &eval.precision_at {
                        ws.line(format!("model precision@{k} {p:.4}"));
                    }
                }
                Err(e) => ws.line(format!("held-out evaluation skipped: {e}")),
            }
        }
        Err(e) => ws.line(format!("model training skipped: {e}")),
    }

    let mut baseline_ks = cfg.precision_ks.clone();
    baseline_ks.push(top_n);
    baseline_ks.retain(|&k| k > 0);
    baseline_ks.sort_unstable();
    baseline_ks.dedup();
    for (k, p) in naive_baseline(&train_counts, &test_top, &baseline_ks) {
        ws.line(format!("frequency baseline precision@{k} {p:.4}"));
    }

    let risers = surprise_risers(
        &train_counts,
        &ranked_test[..top_n],
        cfg.max_train_citations,
    );
    let mut csv = String::from("key,train_citations,test_citations\n");
    for r in &risers {
        let _ = writeln!(csv, "{},{},{}", r.key, r.train_citations, r.test_citations);
    }
    ws.write("risers.csv", &csv)?;
    ws.line(format!(
        "{} test-top targets rose from <= {} training citations",
        risers.len(),
        cfg.max_train_citations
    ));
    ws.finish()
}

fn validate(cfg: &Config) -> Result<ExperimentOutput> {
    let (edges, _) = load_inputs(cfg)?;
    let files = corpus_files(&cfg.corpus_dir)?;
    let records = read_corpus_records(&files)?;
    if records.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no readable corpus records under {}",
            cfg.corpus_dir.display()
        )));
    }

    let index: BTreeSet<String> = edges.iter().map(|e| e.legislation_key()).collect();
    let stored = match &cfg.truth_edges {
        Some(path) => {
            let mut by_decision: HashMap<String, Vec<StoredCitation>> = HashMap::new();
            for e in read_edges_tsv(path)? {
                by_decision
                    .entry(e.decision_id.clone())
                    .or_default()
                    .push(StoredCitation {
                        ctype: e.ctype,
                        law_ref: e.law_ref,
                        article_ref: e.article_ref,
                    });
            }
            Some(by_decision)
        }
        None => None,
    };

    let ids: Vec<String> = records.iter().map(|r| r.doc_id.clone()).collect();
    let years: Vec<i32> = records.iter().map(|r| r.year).collect();
    let picked = sample_stratified(&ids, &years, cfg.validate_sample, cfg.seed);
    let by_id: HashMap<&str, &super::CorpusRecord> =
        records.iter().map(|r| (r.doc_id.as_str(), r)).collect();
    let sample: Vec<SampleCase> = picked
        .iter()
        .filter_map(|id| by_id.get(id.as_str()))
        .map(|r| SampleCase {
            decision_id: r.doc_id.clone(),
            text: r.text.clone(),
            stored: stored
                .as_ref()
                .and_then(|m| m.get(&r.doc_id).cloned())
                .unwrap_or_default(),
        })
        .collect();

    let mut ws = Workspace::new(cfg, "validate")?;
    ws.line(format!(
        "sampled {} of {} decisions (stratified by year, seed {})",
        sample.len(),
        records.len(),
        cfg.seed
    ));

    let report = precision_eval(&sample, &index, cfg.z);
    ws.write("precision.csv", &validation_csv(&report))?;
    ws.line(render_validation_text(&report).trim_end());

    if stored.is_some() {
        let recall = recall_proxy(&sample);
        ws.write(
            "recall.txt",
            &render_recall_text(&recall),
        )?;
        ws.line(render_recall_text(&recall).trim_end());
        if !recall.unmatched.is_empty() {
            let mut tsv = String::from("doc_id\ttype\tlaw_ref\tarticle_ref\treason\n");
            for u in &recall.unmatched {
                let _ = writeln!(
                    tsv,
                    "{}\t{}\t{}\t{}\t{}",
                    u.decision_id,
                    u.ctype.as_str(),
                    u.law_ref,
                    u.article_ref.as_deref().unwrap_or(""),
                    u.reason.as_str()
                );
            }
            ws.write("unmatched.tsv", &tsv)?;
        }
    } else {
        ws.line("recall proxy skipped: no truth_edges configured");
    }
    ws.finish()
}

fn ablation(cfg: &Config) -> Result<ExperimentOutput> {
    let g = load_graph(cfg)?;
    let mut ws = Workspace::new(cfg, "ablation")?;

    let mut thresholds = vec![1, 2, 3, 5, 10];
    thresholds.push(cfg.min_weight);
    thresholds.sort_unstable();
    thresholds.dedup();

    let mut csv = String::from("min_weight,nodes,edges,total_weight,communities,modularity\n");
    ws.line("projection threshold sweep:");
    for &w in &thresholds {
        let proj = project_cocitation(&g, w);
        let (communities, q) = if proj.n_nodes() == 0 {
            (0, 0.0)
        } else {
            let p: Partition = louvain(&proj, cfg.seed);
            (p.n_communities(), p.q)
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{:.6}",
            w,
            proj.n_nodes(),
            proj.edges().len(),
            proj.total_weight(),
            communities,
            q
        );
        ws.line(format!(
            "  w>={w}: {} nodes, {} edges, {} communities, q {:.4}",
            proj.n_nodes(),
            proj.edges().len(),
            communities,
            q
        ));
    }
    ws.write("ablation.csv", &csv)?;
    ws.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{ingest, synth_corpus, write_edges_tsv, write_meta_tsv, SynthSpec};
    use std::path::Path;
    use tempfile::TempDir;

    /// Build a ready-to-analyze output directory from a synthetic
    /// corpus and return its config.
    fn prepared_config(tmp: &Path) -> Config {
        let corpus_dir = tmp.join("corpus");
        let out_dir = tmp.join("out");
        std::fs::create_dir_all(&out_dir).unwrap();
        let spec = SynthSpec {
            n_decisions: 400,
            n_articles: 120,
            communities: 3,
            year_start: 2014,
            year_end: 2021,
            seed: 11,
            ..SynthSpec::default()
        };
        let synth = synth_corpus(&spec, &corpus_dir).unwrap();
        let ingested = ingest(&synth.corpus_files, 2).unwrap();
        write_edges_tsv(&out_dir.join("edges.tsv"), &ingested.edges).unwrap();
        write_meta_tsv(&out_dir.join("meta.tsv"), &ingested.meta).unwrap();
        Config {
            corpus_dir,
            out_dir,
            truth_edges: Some(synth.truth_edges.clone()),
            min_weight: 2,
            fit_min_tail: 20,
            train_end_year: 2019,
            predict_top_n: 40,
            precision_ks: vec![10, 40],
            bridge_min_citations: 5,
            bridge_min_domains: 3,
            emergent_cutoff_year: 2020,
            validate_sample: 60,
            ..Config::default()
        }
    }

    #[test]
    fn unknown_experiment_is_rejected() {
        let err = run_experiment("frobnicate", &Config::default()).unwrap_err();
        assert!(err.to_string().contains("frobnicate"));
    }

    #[test]
    fn missing_inputs_name_the_file() {
        let tmp = TempDir::new().unwrap();
        let cfg = Config {
            out_dir: tmp.path().join("out"),
            ..Config::default()
        };
        let err = run_experiment("powerlaw", &cfg).unwrap_err();
        assert!(err.to_string().contains("edges.tsv"));
    }

    #[test]
    fn every_experiment_runs_on_a_synthetic_corpus() {
        let tmp = TempDir::new().unwrap();
        let cfg = prepared_config(tmp.path());
        for name in EXPERIMENT_NAMES {
            let out = run_experiment(name, &cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(!out.summary.is_empty(), "{name} produced no summary");
            assert!(
                out.files.iter().all(|f| f.exists()),
                "{name} listed a missing artifact"
            );
            assert!(out.files.iter().any(|f| f.ends_with("summary.txt")));
        }
    }

    #[test]
    fn validate_reports_full_precision_and_recall_on_synthetic_truth() {
        let tmp = TempDir::new().unwrap();
        let cfg = prepared_config(tmp.path());
        let out = run_experiment("validate", &cfg).unwrap();
        assert!(
            out.summary.contains("precision 1.0000"),
            "summary was: {}",
            out.summary
        );
        assert!(
            out.summary.contains("recall proxy 1.0000"),
            "summary was: {}",
            out.summary
        );
    }

    #[test]
    fn experiment_reruns_are_byte_identical() {
        let tmp = TempDir::new().unwrap();
        let cfg = prepared_config(tmp.path());
        for name in ["powerlaw", "communities", "predict"] {
            let first = run_experiment(name, &cfg).unwrap();
            let snapshot: Vec<Vec<u8>> = first
                .files
                .iter()
                .map(|f| std::fs::read(f).unwrap())
                .collect();
            let second = run_experiment(name, &cfg).unwrap();
            for (path, before) in second.files.iter().zip(snapshot) {
                assert_eq!(
                    std::fs::read(path).unwrap(),
                    before,
                    "{name}: {} changed between runs",
                    path.display()
                );
            }
        }
    }
}
