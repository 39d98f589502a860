//! Citation extraction from Ukrainian court-decision text.
//!
//! Six citation shapes are recognized; each raw match is normalized to a
//! canonical law key, article lists are expanded, and repeated mentions
//! fold into per-decision counts. The patterns favor precision: an
//! ambiguous fragment is dropped, not guessed at.

mod codex;
mod normalize;
mod ranges;

pub use codex::{CodexTable, CODEX_ABBREVIATIONS};
pub use normalize::{
    normalize_law_name, normalize_law_number, normalize_law_ref, CONSTITUTION_KEY, SC_RULING_KEY,
};
pub use ranges::{expand_article_ranges, RangeExpansion};

use regex::Regex;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

/// The kinds of legal sources a decision can cite.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum CitationType {
    CodexArticle,
    LawArticle,
    Constitution,
    CaseReference,
    LawByNumber,
    SupremeCourtRuling,
}

impl CitationType {
    pub const ALL: [CitationType; 6] = [
        CitationType::CodexArticle,
        CitationType::LawArticle,
        CitationType::Constitution,
        CitationType::CaseReference,
        CitationType::LawByNumber,
        CitationType::SupremeCourtRuling,
    ];

    /// Stable snake_case name used in TSV output and config files.
    pub fn as_str(&self) -> &'static str {
        match self {
            CitationType::CodexArticle => "codex_article",
            CitationType::LawArticle => "law_article",
            CitationType::Constitution => "constitution",
            CitationType::CaseReference => "case_reference",
            CitationType::LawByNumber => "law_by_number",
            CitationType::SupremeCourtRuling => "supreme_court_ruling",
        }
    }

    /// Whether citations of this type carry an article reference.
    pub fn has_article(&self) -> bool {
        matches!(
            self,
            CitationType::CodexArticle | CitationType::LawArticle | CitationType::Constitution
        )
    }
}

impl fmt::Display for CitationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CitationType {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CitationType::ALL
            .iter()
            .copied()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| crate::Error::InvalidInput(format!("unknown citation type: {s}")))
    }
}

/// One folded citation: a decision citing a legal source a number of
/// times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationEdge {
    pub decision_id: String,
    #[serde(rename = "type")]
    pub ctype: CitationType,
    pub law_ref: String,
    /// Article within the law; None for source types that cite a whole
    /// document (case references, laws by number, court rulings).
    pub article_ref: Option<String>,
    pub count: u32,
}

impl CitationEdge {
    /// Key identifying the cited legislation node: "law_ref::article_ref"
    /// with an empty article part when absent.
    pub fn legislation_key(&self) -> String {
        legislation_key(&self.law_ref, self.article_ref.as_deref())
    }
}

/// Build the canonical legislation-node key.
pub fn legislation_key(law_ref: &str, article_ref: Option<&str>) -> String {
    format!("{}::{}", law_ref, article_ref.unwrap_or(""))
}

/// Counters describing what extraction saw besides the emitted edges.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionDiagnostics {
    /// Citation instances after range expansion; equals the sum of edge
    /// counts.
    pub raw_matches: u32,
    /// "a–b" ranges with a > b (kept as two endpoints).
    pub reversed_ranges: u32,
    /// Ranges too wide to be plausible (kept as two endpoints).
    pub oversized_ranges: u32,
    /// Bare law-number mentions dropped because a law-article match
    /// already covers the same span.
    pub suppressed_law_numbers: u32,
    /// "статті N Закону України" fragments with neither a quoted title
    /// nor a № number, dropped for lack of a usable key.
    pub anonymous_law_mentions: u32,
}

impl ExtractionDiagnostics {
    fn absorb(&mut self, other: &ExtractionDiagnostics) {
        self.raw_matches += other.raw_matches;
        self.reversed_ranges += other.reversed_ranges;
        self.oversized_ranges += other.oversized_ranges;
        self.suppressed_law_numbers += other.suppressed_law_numbers;
        self.anonymous_law_mentions += other.anonymous_law_mentions;
    }

    /// Merge counters from another extraction (used when aggregating
    /// per-document diagnostics over a corpus).
    pub fn merge(&mut self, other: &ExtractionDiagnostics) {
        self.absorb(other);
    }
}

/// Result of extracting one decision's text.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    /// Folded edges ordered by first occurrence offset, then type, then
    /// key.
    pub edges: Vec<CitationEdge>,
    pub diagnostics: ExtractionDiagnostics,
}

/// Article-marker prefix: "ст.", "ст.ст." or any inflection of
/// "стаття". The Ukrainian letters і/ї/є/ґ sit outside [а-я], hence the
/// explicit class.
const ART: &str = r"\b(?i:ст\.(?:\s*ст\.)?|статт[а-яіїєґ]+)";

/// One article-list item: a number with an optional glued sub-article
/// suffix or a dash range (disambiguated later by `expand_article_ranges`).
const ITEM: &str = r"[0-9]+(?:\s*[-–—]\s*[0-9]+)?";

fn list_pattern() -> String {
    format!(r"{ITEM}(?:(?:\s*,\s*|\s+(?i:та|і)\s+){ITEM})*")
}

fn law_anchor() -> &'static str {
    // "Закону України", "Законом України" etc. Capitalized З only: the
    // lowercase word is generic prose, not a citation.
    r"\bЗакон[а-яіїєґ]*\s+України"
}

fn date_clause() -> &'static str {
    r"(?:\s+від\s+[0-9]{1,2}\.[0-9]{1,2}\.[0-9]{4}(?:\s*(?:року|р\.))?)"
}

fn number_id() -> &'static str {
    r"[0-9]+(?:[-–][IVXLCDMivxlcdm]+)?"
}

/// Compiled pattern set. Build once and reuse; compilation is not free.
#[derive(Debug)]
pub struct Extractor {
    codex: CodexTable,
    re_codex: Regex,
    re_law_article: Regex,
    re_constitution: Regex,
    re_case: Regex,
    re_law_number: Regex,
    re_sc: Regex,
}

impl Default for Extractor {
    fn default() -> Self {
        Self::new()
    }
}

impl Extractor {
    pub fn new() -> Self {
        let codex = CodexTable::new();
        let list = list_pattern();
        let re_codex = Regex::new(&format!(
            r"{ART}\s*({list})\s+({alt})(?:\s+України)?\b",
            alt = codex.alternation_pattern()
        ))
        .expect("codex pattern");
        let re_law_article = Regex::new(&format!(
            r"{ART}\s*({list})\s+{anchor}{date}?(?:\s*№\s*({id}))?(?:\s*«([^«»]{{1,300}})»)?",
            anchor = law_anchor(),
            date = date_clause(),
            id = number_id(),
        ))
        .expect("law article pattern");
        let re_constitution = Regex::new(&format!(
            r"{ART}\s*({list})\s+Конституці[а-яіїєґ]+(?:\s+України)?\b"
        ))
        .expect("constitution pattern");
        let re_case =
            Regex::new(r"\b(?i:справ[а-яіїєґ]*)\s*№\s*([0-9]{1,6}/[0-9]{1,6}/[0-9]{2})\b")
                .expect("case pattern");
        let re_law_number = Regex::new(&format!(
            r"{anchor}{date}?\s*№\s*({id})\b",
            anchor = law_anchor(),
            date = date_clause(),
            id = number_id(),
        ))
        .expect("law number pattern");
        let re_sc = Regex::new(
            r"\b(?i:постанов[а-яіїєґ]*)\s+(?:Великої\s+Палати\s+(?:Верховного\s+Суду|ВС\b)|Пленуму\s+Верховного\s+Суду)",
        )
        .expect("ruling pattern");
        Extractor {
            codex,
            re_codex,
            re_law_article,
            re_constitution,
            re_case,
            re_law_number,
            re_sc,
        }
    }

    pub fn codex_table(&self) -> &CodexTable {
        &self.codex
    }

    /// Extract all citations from one decision's text.
    pub fn extract(&self, decision_id: &str, text: &str) -> Extraction {
        let mut hits: Vec<Hit> = Vec::new();
        let mut diags = ExtractionDiagnostics::default();

        // Law-article matches first: their spans suppress bare
        // law-number matches nested inside them.
        let mut law_spans: Vec<(usize, usize)> = Vec::new();
        for cap in self.re_law_article.captures_iter(text) {
            let m = cap.get(0).unwrap();
            let number = cap.get(2).map(|g| g.as_str());
            let name = cap.get(3).map(|g| g.as_str());
            let law_ref = match (name, number) {
                (Some(n), _) => normalize_law_name(n),
                (None, Some(num)) => normalize_law_number(num),
                (None, None) => {
                    diags.anonymous_law_mentions += 1;
                    continue;
                }
            };
            if law_ref.is_empty() {
                diags.anonymous_law_mentions += 1;
                continue;
            }
            law_spans.push((m.start(), m.end()));
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::LawArticle,
                law_ref,
                list: Some(cap.get(1).unwrap().as_str().to_owned()),
            });
        }

        for cap in self.re_codex.captures_iter(text) {
            let m = cap.get(0).unwrap();
            let abbrev = cap.get(2).unwrap().as_str();
            let Some(canonical) = self.codex.canonical(abbrev) else {
                continue;
            };
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::CodexArticle,
                law_ref: canonical.to_owned(),
                list: Some(cap.get(1).unwrap().as_str().to_owned()),
            });
        }

        for cap in self.re_constitution.captures_iter(text) {
            let m = cap.get(0).unwrap();
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::Constitution,
                law_ref: CONSTITUTION_KEY.to_owned(),
                list: Some(cap.get(1).unwrap().as_str().to_owned()),
            });
        }

        for cap in self.re_case.captures_iter(text) {
            let m = cap.get(0).unwrap();
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::CaseReference,
                law_ref: cap.get(1).unwrap().as_str().to_owned(),
                list: None,
            });
        }

        for cap in self.re_law_number.captures_iter(text) {
            let m = cap.get(0).unwrap();
            if law_spans
                .iter()
                .any(|&(s, e)| m.start() < e && s < m.end())
            {
                diags.suppressed_law_numbers += 1;
                continue;
            }
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::LawByNumber,
                law_ref: normalize_law_number(cap.get(1).unwrap().as_str()),
                list: None,
            });
        }

        for m in self.re_sc.find_iter(text) {
            hits.push(Hit {
                offset: m.start(),
                ctype: CitationType::SupremeCourtRuling,
                law_ref: SC_RULING_KEY.to_owned(),
                list: None,
            });
        }

        // Expand article lists and fold instances into counted edges,
        // remembering the earliest offset per key.
        let mut folded: HashMap<(CitationType, String, Option<String>), (u32, usize)> =
            HashMap::new();
        let mut add = |ctype: CitationType,
                       law_ref: &str,
                       article: Option<String>,
                       offset: usize,
                       diags: &mut ExtractionDiagnostics| {
            diags.raw_matches += 1;
            let entry = folded
                .entry((ctype, law_ref.to_owned(), article))
                .or_insert((0, offset));
            entry.0 += 1;
            entry.1 = entry.1.min(offset);
        };
        for hit in &hits {
            match &hit.list {
                Some(fragment) => {
                    let expansion = expand_article_ranges(fragment);
                    diags.reversed_ranges += expansion.reversed_ranges;
                    diags.oversized_ranges += expansion.oversized_ranges;
                    for article in expansion.articles {
                        add(hit.ctype, &hit.law_ref, Some(article), hit.offset, &mut diags);
                    }
                }
                None => add(hit.ctype, &hit.law_ref, None, hit.offset, &mut diags),
            }
        }

        let mut entries: Vec<((CitationType, String, Option<String>), (u32, usize))> =
            folded.into_iter().collect();
        entries.sort_by(|(ka, (_, offa)), (kb, (_, offb))| {
            offa.cmp(offb)
                .then_with(|| ka.0.cmp(&kb.0))
                .then_with(|| ka.1.cmp(&kb.1))
                .then_with(|| article_order(ka.2.as_deref(), kb.2.as_deref()))
        });

        let edges = entries
            .into_iter()
            .map(|((ctype, law_ref, article_ref), (count, _))| CitationEdge {
                decision_id: decision_id.to_owned(),
                ctype,
                law_ref,
                article_ref,
                count,
            })
            .collect();
        Extraction {
            edges,
            diagnostics: diags,
        }
    }
}

struct Hit {
    offset: usize,
    ctype: CitationType,
    law_ref: String,
    /// Raw article-list fragment for types that carry articles.
    list: Option<String>,
}

/// Numeric-aware ordering of article references so "9" sorts before
/// "12" and "111" before "111-1".
fn article_order(a: Option<&str>, b: Option<&str>) -> std::cmp::Ordering {
    fn parts(s: &str) -> (u64, u64) {
        match s.split_once('-') {
            Some((main, suffix)) => (
                main.parse().unwrap_or(u64::MAX),
                suffix.parse().unwrap_or(u64::MAX),
            ),
            None => (s.parse().unwrap_or(u64::MAX), 0),
        }
    }
    match (a, b) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some(x), Some(y)) => parts(x).cmp(&parts(y)).then_with(|| x.cmp(y)),
    }
}

static SHARED: LazyLock<Extractor> = LazyLock::new(Extractor::new);

/// Extract citations using a process-wide shared pattern set.
pub fn extract_citations(decision_id: &str, text: &str) -> Extraction {
    SHARED.extract(decision_id, text)
}
