//! Registry of Ukrainian codex abbreviations.

/// (abbreviation, canonical key) pairs. КАСУ is an older spelling of the
/// administrative-procedure codex and folds into КАС so both spellings
/// land on one graph node.
pub const CODEX_ABBREVIATIONS: [(&str, &str); 18] = [
    ("ЦК", "ЦК"),
    ("КК", "КК"),
    ("ГК", "ГК"),
    ("ГПК", "ГПК"),
    ("КПК", "КПК"),
    ("КАС", "КАС"),
    ("ЦПК", "ЦПК"),
    ("КЗпП", "КЗпП"),
    ("СК", "СК"),
    ("ЗК", "ЗК"),
    ("ПК", "ПК"),
    ("МК", "МК"),
    ("БК", "БК"),
    ("ВК", "ВК"),
    ("ЛК", "ЛК"),
    ("ЖК", "ЖК"),
    ("КУпАП", "КУпАП"),
    ("КАСУ", "КАС"),
];

/// Lookup table from codex abbreviation to canonical key.
///
/// Matching is case sensitive: lowercase look-alikes ("цк") are not
/// citations in practice and admitting them would cost precision.
#[derive(Debug, Clone)]
pub struct CodexTable {
    entries: Vec<(&'static str, &'static str)>,
}

impl Default for CodexTable {
    fn default() -> Self {
        CodexTable {
            entries: CODEX_ABBREVIATIONS.to_vec(),
        }
    }
}

impl CodexTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical key for an abbreviation, or None if unknown.
    pub fn canonical(&self, abbrev: &str) -> Option<&'static str> {
        self.entries
            .iter()
            .find(|(a, _)| *a == abbrev)
            .map(|(_, c)| *c)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Regex alternation over all abbreviations, longest first so that
    /// e.g. КУпАП is preferred over a hypothetical prefix match.
    pub fn alternation_pattern(&self) -> String {
        let mut abbrevs: Vec<&str> = self.entries.iter().map(|(a, _)| *a).collect();
        abbrevs.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        abbrevs.join("|")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eighteen_abbreviations() {
        assert_eq!(CodexTable::new().len(), 18);
    }

    #[test]
    fn kasu_folds_into_kas() {
        let t = CodexTable::new();
        assert_eq!(t.canonical("КАСУ"), Some("КАС"));
        assert_eq!(t.canonical("КАС"), Some("КАС"));
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let t = CodexTable::new();
        assert_eq!(t.canonical("ЦК"), Some("ЦК"));
        assert_eq!(t.canonical("цк"), None);
        assert_eq!(t.canonical("ЦКУ"), None);
    }

    #[test]
    fn alternation_puts_longer_forms_first() {
        let pat = CodexTable::new().alternation_pattern();
        let kupap = pat.find("КУпАП").unwrap();
        let kas = pat.find("КАС").unwrap();
        assert!(kupap < kas);
    }
}
