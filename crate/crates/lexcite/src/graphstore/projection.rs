//! Co-citation projection of the bipartite graph.

use super::{BipartiteGraph, CoCitationGraph};
use crate::textcite::CitationType;
use std::collections::HashMap;

/// Controls for [`project_cocitation_with`].
#[derive(Debug, Clone)]
pub struct ProjectionOptions {
    /// Pairs co-cited by fewer decisions than this are dropped.
    pub min_weight: u32,
    /// Decisions citing more scoped articles than this are skipped:
    /// one mega-decision otherwise contributes a quadratic pair blow-up.
    pub degree_cap: usize,
    /// Citation types whose nodes participate in the projection. None
    /// means all six types.
    pub include_types: Option<Vec<CitationType>>,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            min_weight: 1,
            degree_cap: 1000,
            // Article-bearing types only: case references and ruling
            // mentions are targets of a different kind and would swamp
            // the legislation projection.
            include_types: Some(vec![
                CitationType::CodexArticle,
                CitationType::LawArticle,
                CitationType::Constitution,
            ]),
        }
    }
}

/// Project with the default scope and degree cap at a given weight
/// threshold.
pub fn project_cocitation(g: &BipartiteGraph, min_weight: u32) -> CoCitationGraph {
    project_cocitation_with(
        g,
        &ProjectionOptions {
            min_weight,
            ..ProjectionOptions::default()
        },
    )
}

/// Project the bipartite graph onto its legislation side.
///
/// Edge weight between two articles is the number of distinct decisions
/// citing both; bipartite edge multiplicity never inflates it. Nodes of
/// the result are exactly the endpoints of surviving edges.
pub fn project_cocitation_with(g: &BipartiteGraph, opts: &ProjectionOptions) -> CoCitationGraph {
    let in_scope: Vec<bool> = (0..g.n_legislation() as u32)
        .map(|l| match &opts.include_types {
            Some(types) => types.contains(&g.legislation_type(l)),
            None => true,
        })
        .collect();

    let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
    let mut skipped = 0u32;
    let mut scoped: Vec<u32> = Vec::new();
    for d in 0..g.n_decisions() as u32 {
        scoped.clear();
        scoped.extend(
            g.cited_by_decision(d)
                .iter()
                .map(|&(l, _)| l)
                .filter(|&l| in_scope[l as usize]),
        );
        if scoped.len() > opts.degree_cap {
            skipped += 1;
            continue;
        }
        // Adjacency is ordinal-sorted, so i < j already yields u < v.
        for i in 0..scoped.len() {
            for j in i + 1..scoped.len() {
                *pair_counts.entry((scoped[i], scoped[j])).or_insert(0) += 1;
            }
        }
    }

    let mut surviving: Vec<(u32, u32, u64)> = pair_counts
        .into_iter()
        .filter(|&(_, w)| w >= opts.min_weight as u64)
        .map(|((u, v), w)| (u, v, w))
        .collect();
    surviving.sort_unstable();

    let mut node_ords: Vec<u32> = surviving
        .iter()
        .flat_map(|&(u, v, _)| [u, v])
        .collect();
    node_ords.sort_unstable();
    node_ords.dedup();
    let remap: HashMap<u32, u32> = node_ords
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new as u32))
        .collect();
    let keys: Vec<String> = node_ords
        .iter()
        .map(|&l| g.legislation_key(l).to_owned())
        .collect();
    let edges: Vec<(u32, u32, u64)> = surviving
        .into_iter()
        .map(|(u, v, w)| (remap[&u], remap[&v], w))
        .collect();

    CoCitationGraph::assemble(keys, edges, opts.min_weight, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphstore::{build_bipartite, DecisionInfo};
    use crate::textcite::CitationEdge;
    use std::collections::HashMap;

    fn edge(d: &str, law: &str, art: &str, count: u32) -> CitationEdge {
        CitationEdge {
            decision_id: d.to_owned(),
            ctype: CitationType::CodexArticle,
            law_ref: law.to_owned(),
            article_ref: Some(art.to_owned()),
            count,
        }
    }

    fn meta() -> HashMap<String, DecisionInfo> {
        HashMap::new()
    }

    #[test]
    fn counts_distinct_decisions_not_multiplicity() {
        // d1 cites {a,b} (a five times); d2 cites {a,b,c}.
        let g = build_bipartite(
            vec![
                edge("d1", "a", "1", 5),
                edge("d1", "b", "1", 1),
                edge("d2", "a", "1", 1),
                edge("d2", "b", "1", 1),
                edge("d2", "c", "1", 1),
            ],
            &meta(),
        );
        let p = project_cocitation(&g, 1);
        let weights: Vec<(String, String, u64)> = p
            .edges()
            .iter()
            .map(|&(u, v, w)| (p.node_key(u).to_owned(), p.node_key(v).to_owned(), w))
            .collect();
        assert_eq!(
            weights,
            vec![
                ("a::1".to_owned(), "b::1".to_owned(), 2),
                ("a::1".to_owned(), "c::1".to_owned(), 1),
                ("b::1".to_owned(), "c::1".to_owned(), 1)
            ]
        );
    }

    #[test]
    fn min_weight_threshold_prunes_edges_and_nodes() {
        let g = build_bipartite(
            vec![
                edge("d1", "a", "1", 1),
                edge("d1", "b", "1", 1),
                edge("d2", "a", "1", 1),
                edge("d2", "b", "1", 1),
                edge("d2", "c", "1", 1),
            ],
            &meta(),
        );
        let p = project_cocitation(&g, 2);
        assert_eq!(p.n_nodes(), 2);
        assert_eq!(p.edges().len(), 1);
        assert_eq!(p.edges()[0].2, 2);
        assert_eq!(p.min_weight(), 2);
    }

    #[test]
    fn single_decision_single_article_no_edges() {
        let g = build_bipartite(vec![edge("d1", "a", "1", 1)], &meta());
        let p = project_cocitation(&g, 1);
        assert_eq!(p.n_nodes(), 0);
        assert!(p.edges().is_empty());
    }

    #[test]
    fn degree_cap_skips_mega_decisions() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push(edge("big", "a", &i.to_string(), 1));
        }
        edges.push(edge("d1", "a", "0", 1));
        edges.push(edge("d1", "a", "1", 1));
        let g = build_bipartite(edges, &meta());
        let p = project_cocitation_with(
            &g,
            &ProjectionOptions {
                min_weight: 1,
                degree_cap: 4,
                include_types: None,
            },
        );
        assert_eq!(p.skipped_decisions(), 1);
        assert_eq!(p.edges().len(), 1);
        assert_eq!(p.edges()[0].2, 1);
    }

    #[test]
    fn default_scope_excludes_case_references() {
        let mut case_edge = edge("d1", "200/1/20", "", 1);
        case_edge.ctype = CitationType::CaseReference;
        case_edge.article_ref = None;
        let g = build_bipartite(
            vec![edge("d1", "a", "1", 1), edge("d1", "b", "1", 1), case_edge],
            &meta(),
        );
        let p = project_cocitation(&g, 1);
        assert_eq!(p.n_nodes(), 2);
        let p_all = project_cocitation_with(
            &g,
            &ProjectionOptions {
                min_weight: 1,
                degree_cap: 1000,
                include_types: None,
            },
        );
        assert_eq!(p_all.n_nodes(), 3);
        assert_eq!(p_all.edges().len(), 3);
    }

    #[test]
    fn projection_weight_bounded_by_min_degree() {
        let g = build_bipartite(
            vec![
                edge("d1", "a", "1", 1),
                edge("d1", "b", "1", 1),
                edge("d2", "a", "1", 1),
                edge("d2", "b", "1", 1),
                edge("d3", "a", "1", 1),
            ],
            &meta(),
        );
        let p = project_cocitation(&g, 1);
        for &(u, v, w) in p.edges() {
            let du = g
                .citing_decisions(g.legislation_ordinal(p.node_key(u)).unwrap())
                .len() as u64;
            let dv = g
                .citing_decisions(g.legislation_ordinal(p.node_key(v)).unwrap())
                .len() as u64;
            assert!(w <= du.min(dv));
        }
    }
}
