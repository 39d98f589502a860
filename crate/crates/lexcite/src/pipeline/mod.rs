//! Corpus ingestion and orchestration: newline-delimited JSON corpus
//! records in, deduplicated citation edges out, plus the synthetic
//! corpus generator and the experiment runner behind the CLI.

mod experiment;
mod synth;

pub use experiment::{run_experiment, ExperimentOutput, EXPERIMENT_NAMES};
pub use synth::{synth_corpus, SynthOutput, SynthSpec};

use crate::graphstore::DecisionInfo;
use crate::textcite::{extract_citations, CitationEdge, CitationType, ExtractionDiagnostics};
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One court decision as stored in a corpus partition file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorpusRecord {
    pub doc_id: String,
    pub year: i32,
    /// Branch of justice, 1=civil, 2=criminal, 3=commercial,
    /// 4=administrative, 5=constitutional.
    pub justice_kind: u8,
    pub text: String,
}

/// Records are processed in chunks of this many rows so workers can
/// steal evenly.
pub const CHUNK_ROWS: usize = 50_000;

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub records: u64,
    pub malformed_lines: u64,
    /// Distinct edges after deduplication.
    pub edges: u64,
    /// Duplicate (decision, target) rows dropped on merge.
    pub duplicates_dropped: u64,
    /// Citation instances per type, indexed like `CitationType::ALL`.
    pub per_type: [u64; 6],
    pub elapsed_secs: f64,
    pub rows_per_sec: f64,
    pub extraction: ExtractionDiagnostics,
}

impl IngestReport {
    /// Input-determined counters only, safe to persist: two runs over
    /// the same corpus produce the same text.
    pub fn render_stable(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "records {}  malformed {}  edges {}  duplicates {}",
            self.records, self.malformed_lines, self.edges, self.duplicates_dropped
        );
        for (i, t) in CitationType::ALL.iter().enumerate() {
            let _ = writeln!(out, "  {:<22} {}", t.as_str(), self.per_type[i]);
        }
        out
    }

    pub fn render(&self) -> String {
        let mut out = self.render_stable();
        let _ = writeln!(
            out,
            "throughput {:.0} rows/s ({:.2}s)",
            self.rows_per_sec, self.elapsed_secs
        );
        out
    }
}

#[derive(Debug, Default)]
pub struct IngestOutput {
    /// Canonically sorted, deduplicated.
    pub edges: Vec<CitationEdge>,
    pub meta: HashMap<String, DecisionInfo>,
    pub report: IngestReport,
}

struct ChunkResult {
    edges: Vec<CitationEdge>,
    meta: Vec<(String, DecisionInfo)>,
    malformed: u64,
    records: u64,
    per_type: [u64; 6],
    extraction: ExtractionDiagnostics,
}

fn parse_record(line: &str) -> Option<CorpusRecord> {
    let record: CorpusRecord = serde_json::from_str(line).ok()?;
    // The justice coding has five branches; anything else means the
    // row is corrupt.
    if !(1..=5).contains(&record.justice_kind) {
        return None;
    }
    Some(record)
}

fn process_chunk(lines: &[&str]) -> ChunkResult {
    let mut result = ChunkResult {
        edges: Vec::new(),
        meta: Vec::new(),
        malformed: 0,
        records: 0,
        per_type: [0; 6],
        extraction: ExtractionDiagnostics::default(),
    };
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let Some(record) = parse_record(line) else {
            result.malformed += 1;
            continue;
        };
        result.records += 1;
        let extraction = extract_citations(&record.doc_id, &record.text);
        result.extraction.merge(&extraction.diagnostics);
        for edge in extraction.edges {
            let pos = CitationType::ALL
                .iter()
                .position(|&t| t == edge.ctype)
                .unwrap();
            result.per_type[pos] += edge.count as u64;
            result.edges.push(edge);
        }
        result.meta.push((
            record.doc_id,
            DecisionInfo {
                year: record.year,
                justice_kind: record.justice_kind,
            },
        ));
    }
    result
}

/// Extract citation edges from corpus partition files.
///
/// Files are split into fixed-size row chunks processed on a thread
/// pool of `workers` threads (0 uses all cores). Chunk results merge
/// in input order and identical (decision, target) rows keep their
/// first occurrence, so the output is identical for any worker count
/// and re-running over the same input reproduces the same edge set.
/// Malformed lines are skipped and counted; an unreadable file is
/// fatal and names the file.
pub fn ingest(paths: &[PathBuf], workers: usize) -> Result<IngestOutput> {
    let start = Instant::now();
    let mut contents = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.clone(),
            source,
        })?;
        contents.push(text);
    }
    let lines: Vec<&str> = contents.iter().flat_map(|c| c.lines()).collect();
    let chunks: Vec<&[&str]> = lines.chunks(CHUNK_ROWS).collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let results: Vec<ChunkResult> =
        pool.install(|| chunks.par_iter().map(|chunk| process_chunk(chunk)).collect());

    let mut out = IngestOutput::default();
    let mut seen: HashSet<(String, CitationType, String, Option<String>)> = HashSet::new();
    for chunk in results {
        out.report.records += chunk.records;
        out.report.malformed_lines += chunk.malformed;
        out.report.extraction.merge(&chunk.extraction);
        for (i, n) in chunk.per_type.iter().enumerate() {
            out.report.per_type[i] += n;
        }
        for edge in chunk.edges {
            let key = (
                edge.decision_id.clone(),
                edge.ctype,
                edge.law_ref.clone(),
                edge.article_ref.clone(),
            );
            if seen.insert(key) {
                out.edges.push(edge);
            } else {
                out.report.duplicates_dropped += 1;
            }
        }
        for (id, info) in chunk.meta {
            out.meta.entry(id).or_insert(info);
        }
    }
    sort_edges(&mut out.edges);
    out.report.edges = out.edges.len() as u64;
    out.report.elapsed_secs = start.elapsed().as_secs_f64();
    out.report.rows_per_sec = if out.report.elapsed_secs > 0.0 {
        out.report.records as f64 / out.report.elapsed_secs
    } else {
        0.0
    };
    Ok(out)
}

/// Canonical edge order for persisted TSVs.
pub fn sort_edges(edges: &mut [CitationEdge]) {
    edges.sort_by(|a, b| {
        a.decision_id
            .cmp(&b.decision_id)
            .then_with(|| a.ctype.as_str().cmp(b.ctype.as_str()))
            .then_with(|| a.law_ref.cmp(&b.law_ref))
            .then_with(|| a.article_ref.cmp(&b.article_ref))
    });
}

pub const EDGES_HEADER: &str = "doc_id\ttype\tlaw_ref\tarticle_ref\tcount";

/// Serialize edges as the diffable TSV; empty article column encodes
/// "no article part".
pub fn render_edges_tsv(edges: &[CitationEdge]) -> String {
    let mut out = String::from(EDGES_HEADER);
    out.push('\n');
    for e in edges {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.decision_id,
            e.ctype.as_str(),
            e.law_ref,
            e.article_ref.as_deref().unwrap_or(""),
            e.count
        );
    }
    out
}

pub fn write_edges_tsv(path: &Path, edges: &[CitationEdge]) -> Result<()> {
    std::fs::write(path, render_edges_tsv(edges))?;
    Ok(())
}

pub fn read_edges_tsv(path: &Path) -> Result<Vec<CitationEdge>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.to_owned(),
        source,
    })?;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line == EDGES_HEADER {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 5 {
            return Err(Error::InvalidInput(format!(
                "bad edge row {} in {}",
                i + 1,
                path.display()
            )));
        }
        let ctype: CitationType = cols[1]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad citation type {:?}", cols[1])))?;
        let count: u32 = cols[4]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad count {:?}", cols[4])))?;
        edges.push(CitationEdge {
            decision_id: cols[0].to_owned(),
            ctype,
            law_ref: cols[2].to_owned(),
            article_ref: (!cols[3].is_empty()).then(|| cols[3].to_owned()),
            count,
        });
    }
    Ok(edges)
}

pub const META_HEADER: &str = "doc_id\tyear\tjustice_kind";

pub fn write_meta_tsv(path: &Path, meta: &HashMap<String, DecisionInfo>) -> Result<()> {
    let mut rows: Vec<(&String, &DecisionInfo)> = meta.iter().collect();
    rows.sort_by(|a, b| a.0.cmp(b.0));
    let mut out = String::from(META_HEADER);
    out.push('\n');
    for (id, info) in rows {
        let _ = writeln!(out, "{}\t{}\t{}", id, info.year, info.justice_kind);
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_meta_tsv(path: &Path) -> Result<HashMap<String, DecisionInfo>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
        path: path.to_owned(),
        source,
    })?;
    let mut meta = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if (i == 0 && line == META_HEADER) || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::InvalidInput(format!(
                "bad meta row {} in {}",
                i + 1,
                path.display()
            )));
        }
        let year: i32 = cols[1]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad year {:?}", cols[1])))?;
        let kind: u8 = cols[2]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad justice_kind {:?}", cols[2])))?;
        meta.insert(
            cols[0].to_owned(),
            DecisionInfo {
                year,
                justice_kind: kind,
            },
        );
    }
    Ok(meta)
}

/// Read corpus records back (for validation sampling). Malformed
/// lines are skipped, mirroring ingest.
pub fn read_corpus_records(paths: &[PathBuf]) -> Result<Vec<CorpusRecord>> {
    let mut records = Vec::new();
    for path in paths {
        let text = std::fs::read_to_string(path).map_err(|source| Error::FileRead {
            path: path.clone(),
            source,
        })?;
        for line in text.lines() {
            if line.trim().is_empty() {
                continue;
            }
            if let Some(r) = parse_record(line) {
                records.push(r);
            }
        }
    }
    Ok(records)
}

/// Corpus partition files in a directory, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let entries = std::fs::read_dir(dir).map_err(|source| Error::FileRead {
        path: dir.to_owned(),
        source,
    })?;
    for entry in entries {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no .jsonl corpus files in {}",
            dir.display()
        )));
    }
    Ok(files)
}

/// Runtime configuration. Every field has a default, so a missing or
/// partial file works; the `LEXCITE_CONFIG` environment variable
/// overrides the path.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub corpus_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Ground-truth edges TSV for recall measurement, when one exists.
    pub truth_edges: Option<PathBuf>,
    /// 0 lets the thread pool use every core.
    pub workers: usize,
    pub min_weight: u32,
    pub seed: u64,
    pub period_years: u32,
    pub damping: f64,
    pub tolerance: f64,
    pub fit_min_tail: usize,
    /// "continuous" or "discrete".
    pub fit_method: String,
    pub regime_threshold_pct: f64,
    pub entropy_base: f64,
    pub emergent_cutoff_year: i32,
    pub emergent_min_citations: u64,
    pub bridge_min_citations: u64,
    pub bridge_min_domains: u32,
    pub stability_threshold: f64,
    pub train_end_year: i32,
    pub predict_top_n: usize,
    pub precision_ks: Vec<usize>,
    pub max_train_citations: u64,
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub validate_sample: usize,
    pub z: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            corpus_dir: PathBuf::from("corpus"),
            out_dir: PathBuf::from("out"),
            truth_edges: None,
            workers: 0,
            min_weight: 2,
            seed: 42,
            period_years: 4,
            damping: 0.85,
            tolerance: 1e-10,
            fit_min_tail: 50,
            fit_method: "continuous".to_owned(),
            regime_threshold_pct: 100.0,
            entropy_base: 2.0,
            emergent_cutoff_year: 2022,
            emergent_min_citations: 1,
            bridge_min_citations: 1000,
            bridge_min_domains: 3,
            stability_threshold: 0.8,
            train_end_year: 2019,
            predict_top_n: 1000,
            precision_ks: vec![100, 1000],
            max_train_citations: 100,
            l2: 1e-4,
            learning_rate: 0.1,
            epochs: 500,
            validate_sample: 200,
            z: 1.96,
        }
    }
}

pub const CONFIG_ENV: &str = "LEXCITE_CONFIG";
pub const CONFIG_FILE: &str = "lexcite.toml";

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let path = match path {
            Some(p) => p.to_owned(),
            None => std::env::var_os(CONFIG_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(CONFIG_FILE)),
        };
        if !path.exists() {
            return Ok(Config::default());
        }
        let text = std::fs::read_to_string(&path).map_err(|source| Error::FileRead {
            path: path.clone(),
            source,
        })?;
        toml::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))
    }
}
