//! Citation graph construction: the bipartite decision/legislation
//! graph, its co-citation projection, and lazy decision-similarity
//! queries.
//!
//! Both graph types are canonical: node ordinals are assigned over
//! sorted keys, so the same edge multiset yields byte-identical
//! serialized graphs no matter how the input was ordered or sharded.

mod io;
mod projection;

pub use io::{
    export_projection_tsv, load_bipartite, load_projection, save_bipartite, save_projection,
};
pub use projection::{project_cocitation, project_cocitation_with, ProjectionOptions};

use crate::textcite::{CitationEdge, CitationType};
use crate::{Error, Result};
use std::collections::HashMap;

/// Year/branch metadata attached to a decision. Zero means unknown in
/// both fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecisionInfo {
    pub year: i32,
    /// Branch of justice, 1 through 5 (civil, criminal, commercial,
    /// administrative, constitutional).
    pub justice_kind: u8,
}

/// Counters from bipartite construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildDiagnostics {
    /// Decisions present in the edge stream but absent from metadata.
    pub missing_meta: u32,
}

/// Weighted bipartite graph of decisions citing legislation nodes.
///
/// Frozen after construction. Ordinals on both sides are dense and
/// assigned in sorted key order.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    decision_ids: Vec<String>,
    legislation_keys: Vec<String>,
    legislation_types: Vec<CitationType>,
    /// Per decision: (legislation ordinal, summed count), sorted by
    /// ordinal, duplicate-free.
    adjacency: Vec<Vec<(u32, u32)>>,
    /// Per legislation node: (decision ordinal, summed count), sorted.
    citers: Vec<Vec<(u32, u32)>>,
    years: Vec<i32>,
    justice_kinds: Vec<u8>,
    diagnostics: BuildDiagnostics,
}

/// Side selector for degree queries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Decisions,
    Legislation,
}

/// Build the bipartite graph from an edge stream.
///
/// Duplicate (decision, legislation) pairs have their counts summed, so
/// partial re-runs and shard overlaps merge cleanly. Decisions missing
/// from `meta` keep their edges with year/justice_kind marked unknown.
pub fn build_bipartite<I>(edges: I, meta: &HashMap<String, DecisionInfo>) -> BipartiteGraph
where
    I: IntoIterator<Item = CitationEdge>,
{
    let edges: Vec<CitationEdge> = edges.into_iter().collect();

    let mut decision_ids: Vec<&str> = edges.iter().map(|e| e.decision_id.as_str()).collect();
    decision_ids.sort_unstable();
    decision_ids.dedup();

    let mut keyed: Vec<(String, CitationType)> = edges
        .iter()
        .map(|e| (e.legislation_key(), e.ctype))
        .collect();
    keyed.sort_unstable();
    keyed.dedup_by(|a, b| a.0 == b.0);
    let legislation_keys: Vec<String> = keyed.iter().map(|(k, _)| k.clone()).collect();
    let legislation_types: Vec<CitationType> = keyed.iter().map(|(_, t)| *t).collect();

    let d_index: HashMap<&str, u32> = decision_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (*id, i as u32))
        .collect();
    let l_index: HashMap<&str, u32> = legislation_keys
        .iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i as u32))
        .collect();

    let mut weights: HashMap<(u32, u32), u32> = HashMap::new();
    for e in &edges {
        let d = d_index[e.decision_id.as_str()];
        let l = l_index[e.legislation_key().as_str()];
        *weights.entry((d, l)).or_insert(0) += e.count;
    }

    let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); decision_ids.len()];
    let mut citers: Vec<Vec<(u32, u32)>> = vec![Vec::new(); legislation_keys.len()];
    for (&(d, l), &w) in &weights {
        adjacency[d as usize].push((l, w));
        citers[l as usize].push((d, w));
    }
    for list in adjacency.iter_mut().chain(citers.iter_mut()) {
        list.sort_unstable();
    }

    let mut diagnostics = BuildDiagnostics::default();
    let mut years = Vec::with_capacity(decision_ids.len());
    let mut justice_kinds = Vec::with_capacity(decision_ids.len());
    for id in &decision_ids {
        match meta.get(*id) {
            Some(info) => {
                years.push(info.year);
                justice_kinds.push(info.justice_kind);
            }
            None => {
                diagnostics.missing_meta += 1;
                years.push(0);
                justice_kinds.push(0);
            }
        }
    }

    BipartiteGraph {
        decision_ids: decision_ids.into_iter().map(str::to_owned).collect(),
        legislation_keys,
        legislation_types,
        adjacency,
        citers,
        years,
        justice_kinds,
        diagnostics,
    }
}

impl BipartiteGraph {
    pub fn n_decisions(&self) -> usize {
        self.decision_ids.len()
    }

    pub fn n_legislation(&self) -> usize {
        self.legislation_keys.len()
    }

    pub fn decision_id(&self, ord: u32) -> &str {
        &self.decision_ids[ord as usize]
    }

    pub fn legislation_key(&self, ord: u32) -> &str {
        &self.legislation_keys[ord as usize]
    }

    pub fn legislation_type(&self, ord: u32) -> CitationType {
        self.legislation_types[ord as usize]
    }

    pub fn decision_ordinal(&self, id: &str) -> Option<u32> {
        self.decision_ids
            .binary_search_by(|x| x.as_str().cmp(id))
            .ok()
            .map(|i| i as u32)
    }

    pub fn legislation_ordinal(&self, key: &str) -> Option<u32> {
        self.legislation_keys
            .binary_search_by(|x| x.as_str().cmp(key))
            .ok()
            .map(|i| i as u32)
    }

    /// (legislation ordinal, weight) pairs cited by a decision.
    pub fn cited_by_decision(&self, ord: u32) -> &[(u32, u32)] {
        &self.adjacency[ord as usize]
    }

    /// (decision ordinal, weight) pairs citing a legislation node.
    pub fn citing_decisions(&self, ord: u32) -> &[(u32, u32)] {
        &self.citers[ord as usize]
    }

    pub fn year(&self, decision_ord: u32) -> i32 {
        self.years[decision_ord as usize]
    }

    pub fn justice_kind(&self, decision_ord: u32) -> u8 {
        self.justice_kinds[decision_ord as usize]
    }

    pub fn diagnostics(&self) -> BuildDiagnostics {
        self.diagnostics
    }

    /// Number of distinct (decision, legislation) pairs.
    pub fn n_pairs(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    /// Degrees (distinct-neighbor counts, not summed weights) for one
    /// side, sorted by degree descending with key as tie-break.
    pub fn degree_sequence(&self, side: Side) -> Vec<(String, u32)> {
        let mut out: Vec<(String, u32)> = match side {
            Side::Decisions => self
                .decision_ids
                .iter()
                .zip(&self.adjacency)
                .map(|(id, adj)| (id.clone(), adj.len() as u32))
                .collect(),
            Side::Legislation => self
                .legislation_keys
                .iter()
                .zip(&self.citers)
                .map(|(k, c)| (k.clone(), c.len() as u32))
                .collect(),
        };
        out.sort_by(|(ka, da), (kb, db)| db.cmp(da).then_with(|| ka.cmp(kb)));
        out
    }

    /// Decisions sharing at least `k` distinct cited articles with `d`.
    ///
    /// Computed on demand; the full decision-similarity graph is far too
    /// large to materialize. Sorted by shared count descending, then id.
    pub fn decision_neighbors(&self, d: &str, k: u32) -> Result<Vec<(String, u32)>> {
        let ord = self
            .decision_ordinal(d)
            .ok_or_else(|| Error::DecisionNotFound(d.to_owned()))?;
        let mut shared: HashMap<u32, u32> = HashMap::new();
        for &(l, _) in self.cited_by_decision(ord) {
            for &(other, _) in self.citing_decisions(l) {
                if other != ord {
                    *shared.entry(other).or_insert(0) += 1;
                }
            }
        }
        let mut out: Vec<(String, u32)> = shared
            .into_iter()
            .filter(|&(_, c)| c >= k)
            .map(|(o, c)| (self.decision_id(o).to_owned(), c))
            .collect();
        out.sort_by(|(ia, ca), (ib, cb)| cb.cmp(ca).then_with(|| ia.cmp(ib)));
        Ok(out)
    }
}

/// Weighted undirected legislation graph: nodes are legislation keys,
/// edge weight is the number of distinct decisions citing both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct CoCitationGraph {
    keys: Vec<String>,
    /// Canonical edge list: u < v, sorted, weights >= min_weight.
    edges: Vec<(u32, u32, u64)>,
    /// Symmetric neighbor lists derived from `edges`.
    adjacency: Vec<Vec<(u32, u64)>>,
    min_weight: u32,
    /// Decisions skipped during projection for exceeding the degree cap.
    skipped_decisions: u32,
}

impl CoCitationGraph {
    /// Assemble a graph from (key, key, weight) triples. Keys are
    /// sorted for ordinal assignment; reversed duplicates merge by
    /// summing. Self-loops are rejected.
    pub fn from_weighted_edges(input: &[(&str, &str, u64)]) -> Result<CoCitationGraph> {
        let mut keys: Vec<&str> = input
            .iter()
            .flat_map(|(a, b, _)| [*a, *b])
            .collect();
        keys.sort_unstable();
        keys.dedup();
        let index: HashMap<&str, u32> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (*k, i as u32))
            .collect();
        let mut merged: HashMap<(u32, u32), u64> = HashMap::new();
        for (a, b, w) in input {
            if a == b {
                return Err(Error::InvalidInput(format!("self-loop on {a}")));
            }
            let (u, v) = (index[a], index[b]);
            let pair = (u.min(v), u.max(v));
            *merged.entry(pair).or_insert(0) += w;
        }
        let mut edges: Vec<(u32, u32, u64)> =
            merged.into_iter().map(|((u, v), w)| (u, v, w)).collect();
        edges.sort_unstable();
        Ok(Self::assemble(
            keys.into_iter().map(str::to_owned).collect(),
            edges,
            1,
            0,
        ))
    }

    pub(crate) fn assemble(
        keys: Vec<String>,
        edges: Vec<(u32, u32, u64)>,
        min_weight: u32,
        skipped_decisions: u32,
    ) -> CoCitationGraph {
        let mut adjacency: Vec<Vec<(u32, u64)>> = vec![Vec::new(); keys.len()];
        for &(u, v, w) in &edges {
            adjacency[u as usize].push((v, w));
            adjacency[v as usize].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        CoCitationGraph {
            keys,
            edges,
            adjacency,
            min_weight,
            skipped_decisions,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.keys.len()
    }

    pub fn node_key(&self, ord: u32) -> &str {
        &self.keys[ord as usize]
    }

    pub fn node_keys(&self) -> &[String] {
        &self.keys
    }

    pub fn node_ordinal(&self, key: &str) -> Option<u32> {
        self.keys
            .binary_search_by(|x| x.as_str().cmp(key))
            .ok()
            .map(|i| i as u32)
    }

    pub fn edges(&self) -> &[(u32, u32, u64)] {
        &self.edges
    }

    pub fn neighbors(&self, ord: u32) -> &[(u32, u64)] {
        &self.adjacency[ord as usize]
    }

    pub fn weighted_degree(&self, ord: u32) -> u64 {
        self.adjacency[ord as usize].iter().map(|&(_, w)| w).sum()
    }

    /// Total edge weight m (each undirected edge counted once).
    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }

    pub fn min_weight(&self) -> u32 {
        self.min_weight
    }

    pub fn skipped_decisions(&self) -> u32 {
        self.skipped_decisions
    }
}
