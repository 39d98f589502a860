//! Fixture-driven extractor checks: every `cases/NN-name.txt` holds a
//! decision text and its `.expected.tsv` sidecar lists exactly the
//! citations the extractor must produce (header only for negatives).

use lexcite::textcite::extract_citations;
use std::path::{Path, PathBuf};

type Row = (String, String, Option<String>, u32);

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/cases")
}

fn case_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture_dir())
        .expect("fixture dir exists")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "txt"))
        .collect();
    files.sort();
    files
}

fn parse_expected(path: &Path) -> Vec<Row> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 4, "bad row in {}: {line:?}", path.display());
        rows.push((
            cols[0].to_owned(),
            cols[1].to_owned(),
            (!cols[2].is_empty()).then(|| cols[2].to_owned()),
            cols[3].parse().unwrap(),
        ));
    }
    rows
}

fn canonical(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort();
    rows
}

fn extract_rows(doc_id: &str, text: &str) -> Vec<Row> {
    extract_citations(doc_id, text)
        .edges
        .into_iter()
        .map(|e| (e.ctype.as_str().to_owned(), e.law_ref, e.article_ref, e.count))
        .collect()
}

#[test]
fn every_curated_case_matches_its_sidecar_exactly() {
    let files = case_files();
    assert!(files.len() >= 28, "fixture corpus shrank to {}", files.len());
    let mut positives = 0;
    let mut negatives = 0;
    for case in files {
        let stem = case.file_stem().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&case).unwrap();
        let expected = canonical(parse_expected(&case.with_extension("expected.tsv")));
        let got = canonical(extract_rows(&stem, text.trim_end()));
        assert_eq!(got, expected, "case {stem} diverged");
        if expected.is_empty() {
            negatives += 1;
        } else {
            positives += 1;
        }
    }
    assert!(positives >= 19, "only {positives} positive cases");
    assert!(negatives >= 9, "only {negatives} negative cases");
}

#[test]
fn fixtures_cover_every_citation_type() {
    use std::collections::BTreeSet;
    let mut seen = BTreeSet::new();
    for case in case_files() {
        for (ctype, ..) in parse_expected(&case.with_extension("expected.tsv")) {
            seen.insert(ctype);
        }
    }
    for t in lexcite::textcite::CitationType::ALL {
        assert!(seen.contains(t.as_str()), "no fixture covers {}", t.as_str());
    }
}
