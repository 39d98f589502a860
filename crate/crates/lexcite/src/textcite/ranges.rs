//! Expansion of article list fragments like "3, 5, 7–9 та 12".

/// Ranges longer than this are treated as corrupt input (OCR noise,
/// year-like numbers) rather than expanded.
const MAX_RANGE_SPAN: u64 = 10_000;

/// Result of expanding one article-list fragment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RangeExpansion {
    /// Article references in the order they appear in the fragment.
    pub articles: Vec<String>,
    /// Count of "a–b" items with a > b; both endpoints were kept as
    /// independent articles instead of expanding.
    pub reversed_ranges: u32,
    /// Count of ranges wider than [`MAX_RANGE_SPAN`], also kept as two
    /// independent articles.
    pub oversized_ranges: u32,
}

fn is_dash(c: char) -> bool {
    matches!(c, '-' | '\u{2013}' | '\u{2014}')
}

/// Parse one list item: either a single article number (with optional
/// "-N" suffix) or a numeric range.
#[derive(Debug, PartialEq, Eq)]
enum Item {
    Single(String),
    Range(u64, u64),
}

fn normalize_number(s: &str) -> String {
    // Strips leading zeros so "05" and "5" fold to one key.
    match s.parse::<u64>() {
        Ok(n) => n.to_string(),
        Err(_) => s.to_string(),
    }
}

fn parse_item(item: &str) -> Option<Item> {
    let item = item.trim();
    if item.is_empty() {
        return None;
    }
    let dash_pos = item.char_indices().find(|(_, c)| is_dash(*c));
    let Some((pos, dash)) = dash_pos else {
        if item.bytes().all(|b| b.is_ascii_digit()) {
            return Some(Item::Single(normalize_number(item)));
        }
        return None;
    };
    let left_raw = &item[..pos];
    let right_raw = &item[pos + dash.len_utf8()..];
    let left = left_raw.trim_end();
    let right = right_raw.trim_start();
    if left.is_empty()
        || right.is_empty()
        || !left.bytes().all(|b| b.is_ascii_digit())
        || !right.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let spaced = left.len() != left_raw.len() || right.len() != right_raw.len();
    // A dash glued to both numbers with a shorter right side is a
    // sub-article suffix ("111-1"), not a range.
    if !spaced && right.len() < left.len() {
        return Some(Item::Single(format!(
            "{}-{}",
            normalize_number(left),
            normalize_number(right)
        )));
    }
    let (a, b) = (left.parse::<u64>().ok()?, right.parse::<u64>().ok()?);
    Some(Item::Range(a, b))
}

/// Expand an article-list fragment into individual article references.
///
/// Items are separated by commas or the conjunctions "та"/"і".
/// "a–b" with a <= b expands to every value in [a, b]; hyphen, en dash
/// and em dash are interchangeable. Reversed ranges contribute both
/// endpoints and are tallied instead of silently dropped.
pub fn expand_article_ranges(fragment: &str) -> RangeExpansion {
    let mut out = RangeExpansion::default();
    for piece in split_list(fragment) {
        match parse_item(&piece) {
            Some(Item::Single(a)) => out.articles.push(a),
            Some(Item::Range(a, b)) => {
                if a > b {
                    out.reversed_ranges += 1;
                    out.articles.push(a.to_string());
                    out.articles.push(b.to_string());
                } else if b - a > MAX_RANGE_SPAN {
                    out.oversized_ranges += 1;
                    out.articles.push(a.to_string());
                    out.articles.push(b.to_string());
                } else {
                    for v in a..=b {
                        out.articles.push(v.to_string());
                    }
                }
            }
            None => {}
        }
    }
    out
}

/// Split on commas and standalone "та"/"і" words.
fn split_list(fragment: &str) -> Vec<String> {
    let commas = fragment.split(',');
    let mut pieces = Vec::new();
    for part in commas {
        let mut current = String::new();
        for word in part.split_whitespace() {
            let lower = word.to_lowercase();
            if lower == "та" || lower == "і" {
                if !current.is_empty() {
                    pieces.push(std::mem::take(&mut current));
                }
            } else {
                if !current.is_empty() {
                    current.push(' ');
                }
                current.push_str(word);
            }
        }
        if !current.is_empty() {
            pieces.push(current);
        }
    }
    pieces
}
