//! Export detected communities as an ontology sketch: one class per
//! community with per-member usage properties, plus inter-class
//! relations weighted by the co-citation mass crossing them.

use super::Partition;
use crate::graphstore::{BipartiteGraph, CoCitationGraph};
use crate::textcite::CitationType;
use crate::{Error, Result};
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct MemberProps {
    pub key: String,
    /// Weighted degree in the co-citation projection.
    pub cocitation_weight: u64,
    /// Total citation count across decisions in the bipartite graph.
    pub citation_count: u64,
    pub first_year: Option<i32>,
    pub last_year: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OntologyClass {
    pub id: u32,
    /// Modal codex among members that are codex articles; ties break
    /// to the alphabetically smallest abbreviation.
    pub dominant_codex: Option<String>,
    /// Sorted by key.
    pub members: Vec<MemberProps>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OntologyExport {
    pub classes: Vec<OntologyClass>,
    /// (class a, class b, weight) with a < b, sorted.
    pub relations: Vec<(u32, u32, u64)>,
}

/// Assemble the export from a projection, its partition, and the
/// bipartite graph the projection came from (for citation counts and
/// year ranges).
pub fn export_ontology(
    g: &CoCitationGraph,
    p: &Partition,
    source: &BipartiteGraph,
) -> Result<OntologyExport> {
    if p.assignment.len() != g.n_nodes() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.n_nodes()
        )));
    }

    let mut classes: Vec<OntologyClass> = (0..p.n_communities() as u32)
        .map(|id| OntologyClass {
            id,
            dominant_codex: None,
            members: Vec::new(),
        })
        .collect();

    for ord in 0..g.n_nodes() as u32 {
        let key = g.node_key(ord).to_owned();
        let mut citation_count = 0u64;
        let mut first_year: Option<i32> = None;
        let mut last_year: Option<i32> = None;
        if let Some(leg) = source.legislation_ordinal(&key) {
            for &(dec, count) in source.citing_decisions(leg) {
                citation_count += count as u64;
                let year = source.year(dec);
                if year != 0 {
                    first_year = Some(first_year.map_or(year, |y| y.min(year)));
                    last_year = Some(last_year.map_or(year, |y| y.max(year)));
                }
            }
        }
        classes[p.assignment[ord as usize] as usize]
            .members
            .push(MemberProps {
                key,
                cocitation_weight: g.weighted_degree(ord),
                citation_count,
                first_year,
                last_year,
            });
    }

    for class in classes.iter_mut() {
        class.members.sort_by(|a, b| a.key.cmp(&b.key));
        class.dominant_codex = dominant_codex(class, source);
    }

    let mut relations: Vec<(u32, u32, u64)> = Vec::new();
    for &(u, v, w) in g.edges() {
        let (cu, cv) = (p.assignment[u as usize], p.assignment[v as usize]);
        if cu != cv {
            relations.push((cu.min(cv), cu.max(cv), w));
        }
    }
    relations.sort_unstable();
    let mut merged: Vec<(u32, u32, u64)> = Vec::new();
    for (a, b, w) in relations {
        match merged.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += w,
            _ => merged.push((a, b, w)),
        }
    }

    Ok(OntologyExport {
        classes,
        relations: merged,
    })
}

fn dominant_codex(class: &OntologyClass, source: &BipartiteGraph) -> Option<String> {
    // Count members per codex; members list is key-sorted so equal
    // counts resolve to the alphabetically smallest codex.
    let mut counts: Vec<(String, u32)> = Vec::new();
    for member in &class.members {
        let Some(leg) = source.legislation_ordinal(&member.key) else {
            continue;
        };
        if source.legislation_type(leg) != CitationType::CodexArticle {
            continue;
        }
        let codex = member.key.split("::").next().unwrap_or("").to_owned();
        match counts.iter_mut().find(|(c, _)| *c == codex) {
            Some((_, n)) => *n += 1,
            None => counts.push((codex, 1)),
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    counts.into_iter().next().map(|(c, _)| c)
}

/// Line-oriented text form: a CLASS header per community followed by
/// tab-indented member rows, then RELATION lines.
pub fn render_ontology(export: &OntologyExport) -> String {
    let mut out = String::new();
    let year = |y: Option<i32>| y.map_or("-".to_owned(), |v| v.to_string());
    for class in &export.classes {
        out.push_str(&format!(
            "CLASS\t{}\tdominant_codex={}\tmembers={}\n",
            class.id,
            class.dominant_codex.as_deref().unwrap_or("-"),
            class.members.len()
        ));
        for m in &class.members {
            out.push_str(&format!(
                "\t{}\t{}\t{}\t{}\t{}\n",
                m.key,
                m.cocitation_weight,
                m.citation_count,
                year(m.first_year),
                year(m.last_year)
            ));
        }
    }
    for &(a, b, w) in &export.relations {
        out.push_str(&format!("RELATION\t{a}\t{b}\t{w}\n"));
    }
    out
}

pub fn write_ontology(export: &OntologyExport, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(render_ontology(export).as_bytes())?;
    Ok(())
}
