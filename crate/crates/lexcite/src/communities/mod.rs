//! Community structure: weighted modularity, Louvain detection, NMI
//! partition comparison, and the ontology-class export.

mod louvain;
mod nmi;
mod ontology;

pub use louvain::{louvain, louvain_with, LouvainOptions};
pub use nmi::{nmi, nmi_aligned};
pub use ontology::{
    export_ontology, render_ontology, write_ontology, MemberProps, OntologyClass, OntologyExport,
};

use crate::graphstore::CoCitationGraph;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// A community assignment over a graph's node ordinals, with the
/// modularity it achieves there.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Community id per node ordinal; ids are dense from 0.
    pub assignment: Vec<u32>,
    pub q: f64,
}

impl Partition {
    /// Build from raw labels, relabeling to dense ids in order of
    /// first appearance. The q field is left at 0; call
    /// [`modularity`] to evaluate it on a graph.
    pub fn new(labels: &[u32]) -> Partition {
        let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for &l in labels {
            let next = remap.len() as u32;
            let id = *remap.entry(l).or_insert(next);
            assignment.push(id);
        }
        Partition { assignment, q: 0.0 }
    }

    pub fn n_communities(&self) -> usize {
        self.assignment.iter().map(|&c| c + 1).max().unwrap_or(0) as usize
    }

    /// Node ordinals per community id.
    pub fn blocks(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.n_communities()];
        for (node, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(node as u32);
        }
        out
    }
}

/// Weighted modularity of a partition:
/// Q = Σ_c [ w_in(c)/m − (tot(c)/2m)² ]
/// where w_in(c) sums internal edge weights once, tot(c) sums weighted
/// degrees, and m is the total edge weight. Zero-edge graphs score 0.
pub fn modularity(g: &CoCitationGraph, p: &Partition) -> Result<f64> {
    if p.assignment.len() != g.n_nodes() {
        return Err(Error::PartitionMismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.assignment.len(),
            g.n_nodes()
        )));
    }
    let m = g.total_weight() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let k = p.n_communities();
    let mut w_in = vec![0.0f64; k];
    let mut tot = vec![0.0f64; k];
    for &(u, v, w) in g.edges() {
        let (cu, cv) = (p.assignment[u as usize], p.assignment[v as usize]);
        if cu == cv {
            w_in[cu as usize] += w as f64;
        }
    }
    for node in 0..g.n_nodes() as u32 {
        tot[p.assignment[node as usize] as usize] += g.weighted_degree(node) as f64;
    }
    let mut q = 0.0;
    for c in 0..k {
        q += w_in[c] / m - (tot[c] / (2.0 * m)).powi(2);
    }
    Ok(q)
}

/// Per-period Louvain partitions plus adjacent-period NMI with
/// stability labels.
#[derive(Debug, Clone)]
pub struct PeriodComparison {
    pub from: String,
    pub to: String,
    pub nmi: f64,
    /// Size of the node intersection the NMI was computed on.
    pub shared_nodes: usize,
    pub stable: bool,
}

#[derive(Debug, Clone)]
pub struct TemporalCommunities {
    pub partitions: BTreeMap<String, Partition>,
    pub comparisons: Vec<PeriodComparison>,
}

/// Detect communities independently per period and compare adjacent
/// periods by NMI over their shared nodes. STABLE means NMI at or
/// above `stability_threshold` (0.8 in the reports).
pub fn temporal_communities(
    graphs: &BTreeMap<String, CoCitationGraph>,
    seed: u64,
    stability_threshold: f64,
) -> Result<TemporalCommunities> {
    if graphs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: graphs.len(),
        });
    }
    let mut partitions: BTreeMap<String, Partition> = BTreeMap::new();
    for (period, g) in graphs {
        partitions.insert(period.clone(), louvain(g, seed));
    }
    let periods: Vec<&String> = graphs.keys().collect();
    let mut comparisons = Vec::new();
    for pair in periods.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ga, gb) = (&graphs[a], &graphs[b]);
        let (value, shared) = nmi_aligned(
            ga.node_keys(),
            &partitions[a].assignment,
            gb.node_keys(),
            &partitions[b].assignment,
        )?;
        comparisons.push(PeriodComparison {
            from: a.clone(),
            to: b.clone(),
            nmi: value,
            shared_nodes: shared,
            stable: value >= stability_threshold,
        });
    }
    Ok(TemporalCommunities {
        partitions,
        comparisons,
    })
}
