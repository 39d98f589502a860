//! Canonicalization of law references into stable graph keys.

use super::codex::CodexTable;
use super::CitationType;

/// Canonical key used for constitution citations; the article number
/// lives in `article_ref`.
pub const CONSTITUTION_KEY: &str = "CONSTITUTION";

/// Canonical key for Supreme Court ruling mentions, which carry no
/// per-ruling identity at extraction time.
pub const SC_RULING_KEY: &str = "SC_RULING";

/// Normalize a raw law reference into its canonical key.
///
/// Returns None when the reference cannot be canonicalized (unknown
/// codex abbreviation, empty law name); such matches are dropped by the
/// extractor rather than emitted with a junk key.
pub fn normalize_law_ref(table: &CodexTable, ctype: CitationType, raw: &str) -> Option<String> {
    match ctype {
        CitationType::CodexArticle => {
            let abbrev = raw.trim();
            let abbrev = abbrev.strip_suffix("України").unwrap_or(abbrev).trim_end();
            table.canonical(abbrev).map(str::to_owned)
        }
        CitationType::LawArticle => {
            let name = normalize_law_name(raw);
            if name.is_empty() {
                None
            } else {
                Some(name)
            }
        }
        CitationType::Constitution => Some(CONSTITUTION_KEY.to_owned()),
        CitationType::CaseReference => {
            let r = raw.trim();
            if r.is_empty() {
                None
            } else {
                Some(r.to_owned())
            }
        }
        CitationType::LawByNumber => {
            let r = raw.trim();
            if r.is_empty() {
                None
            } else {
                Some(normalize_law_number(r))
            }
        }
        CitationType::SupremeCourtRuling => Some(SC_RULING_KEY.to_owned()),
    }
}

/// Lowercase, strip guillemets and collapse runs of whitespace, so the
/// many typographic spellings of one law title fold together.
pub fn normalize_law_name(raw: &str) -> String {
    let stripped: String = raw.chars().filter(|c| !matches!(c, '«' | '»')).collect();
    stripped
        .split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Uppercase the roman-numeral convocation suffix of a law number
/// ("2341-iii" and "2341-III" are the same law).
pub fn normalize_law_number(raw: &str) -> String {
    raw.to_uppercase()
}
