//! Graph 3-grams: directed walks `u -> v -> w` over node instances,
//! aggregated by label triple. Revisits are allowed, so cycles and
//! self-loops contribute. Duplicate edges count once.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{chain_key, extract_sparse, FeatureKind, FeatureVector, KeyedCounts};
use crate::corpus::{Corpus, SeedProgram};
use crate::error::{Error, Result};
use crate::registry::DimensionRegistry;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfgNode {
    pub id: u64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CfgGraph {
    pub nodes: Vec<CfgNode>,
    #[serde(default)]
    pub edges: Vec<(u64, u64)>,
}

impl CfgGraph {
    pub fn add_node(&mut self, label: impl Into<String>) -> u64 {
        let id = self.nodes.len() as u64;
        self.nodes.push(CfgNode {
            id,
            label: label.into(),
        });
        id
    }

    pub fn add_edge(&mut self, from: u64, to: u64) {
        if !self.edges.contains(&(from, to)) {
            self.edges.push((from, to));
        }
    }

    pub fn successors(&self, id: u64) -> impl Iterator<Item = u64> + '_ {
        self.edges.iter().filter(move |e| e.0 == id).map(|e| e.1)
    }

    pub fn label(&self, id: u64) -> Option<&str> {
        self.nodes
            .iter()
            .find(|n| n.id == id)
            .map(|n| n.label.as_str())
    }

    /// Checks unique ids, non-empty labels and resolvable edge endpoints.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let mut ids = HashSet::with_capacity(self.nodes.len());
        for node in &self.nodes {
            if !ids.insert(node.id) {
                return Err(format!("duplicate node id {}", node.id));
            }
            if node.label.is_empty() {
                return Err(format!("node {} has an empty label", node.id));
            }
        }
        for &(from, to) in &self.edges {
            for end in [from, to] {
                if !ids.contains(&end) {
                    return Err(format!(
                        "edge {from}->{to} references undeclared node {end}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(seed: &str, text: &str) -> Result<Self> {
        let graph: CfgGraph = serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("CFG of seed {seed:?}"), e))?;
        graph
            .validate()
            .map_err(|m| Error::Validation(format!("CFG of seed {seed:?}: {m}")))?;
        Ok(graph)
    }
}

/// Label-triple walk counts, in edge-order first-occurrence order.
///
/// Assumes a validated graph.
pub fn cfg_chains(graph: &CfgGraph) -> KeyedCounts {
    let pos: HashMap<u64, usize> = graph
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.id, i))
        .collect();
    let mut seen = HashSet::with_capacity(graph.edges.len());
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); graph.nodes.len()];
    let mut edges = Vec::with_capacity(graph.edges.len());
    for &(from, to) in &graph.edges {
        let e = (pos[&from], pos[&to]);
        if seen.insert(e) {
            succ[e.0].push(e.1);
            edges.push(e);
        }
    }

    let label = |i: usize| graph.nodes[i].label.as_str();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut out: KeyedCounts = Vec::new();
    for &(u, v) in &edges {
        for &w in &succ[v] {
            let key = chain_key(label(u), label(v), label(w));
            match index.get(&key) {
                Some(&i) => out[i].1 += 1.0,
                None => {
                    index.insert(key.clone(), out.len());
                    out.push((key, 1.0));
                }
            }
        }
    }
    out
}

/// The seed's CFG: the serialized graph if present, else the built-in frontend.
pub fn seed_cfg(seed: &SeedProgram) -> Result<CfgGraph> {
    if let Some(side) = &seed.cfg {
        return CfgGraph::from_json(&seed.id, &side.text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::parse(side.describe(&seed.id, "CFG"), message),
            other => other,
        });
    }
    match &seed.source_text {
        Some(_) => super::frontend::build_frontend_repr(seed).map(|(_, cfg)| cfg),
        None => Err(Error::MissingRepresentation {
            seed: seed.id.clone(),
            repr: "CFG (no cfg file and no source text)",
        }),
    }
}

pub fn cfg_3gram_vectors(corpus: &Corpus) -> Result<(DimensionRegistry, Vec<FeatureVector>)> {
    extract_sparse(corpus, FeatureKind::Cfg3Gram, |seed| {
        seed_cfg(seed).map(|cfg| cfg_chains(&cfg))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(labels: &[&str], edges: &[(u64, u64)]) -> CfgGraph {
        let mut g = CfgGraph::default();
        for l in labels {
            g.add_node(*l);
        }
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    #[test]
    fn linear_chain() {
        let g = graph(&["l1", "l2", "l3", "l4"], &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(
            cfg_chains(&g),
            vec![
                (chain_key("l1", "l2", "l3"), 1.0),
                (chain_key("l2", "l3", "l4"), 1.0)
            ]
        );
    }

    #[test]
    fn single_node() {
        assert!(cfg_chains(&graph(&["x"], &[])).is_empty());
    }

    #[test]
    fn self_loop_counts_once() {
        let g = graph(&["l1"], &[(0, 0)]);
        assert_eq!(cfg_chains(&g), vec![(chain_key("l1", "l1", "l1"), 1.0)]);
    }

    #[test]
    fn same_labels_through_different_instances_add_up() {
        // a -> b1, a -> b2, b1 -> c, b2 -> c with b1, b2 both labelled "b"
        let g = graph(&["a", "b", "b", "c"], &[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(cfg_chains(&g), vec![(chain_key("a", "b", "c"), 2.0)]);
    }

    #[test]
    fn duplicate_edges_count_once() {
        let g = CfgGraph {
            nodes: vec![
                CfgNode {
                    id: 5,
                    label: "a".into(),
                },
                CfgNode {
                    id: 9,
                    label: "b".into(),
                },
            ],
            edges: vec![(5, 9), (5, 9), (9, 5)],
        };
        assert_eq!(
            cfg_chains(&g),
            vec![
                (chain_key("a", "b", "a"), 1.0),
                (chain_key("b", "a", "b"), 1.0)
            ]
        );
    }

    #[test]
    fn dangling_edge_is_a_validation_error() {
        let err = CfgGraph::from_json("s", r#"{"nodes":[{"id":1,"label":"x"}],"edges":[[1,2]]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn json_shape() {
        let g = CfgGraph::from_json(
            "s",
            r#"{"nodes":[{"id":1,"label":"x"},{"id":2,"label":"y"}],"edges":[[1,2]]}"#,
        )
        .unwrap();
        assert_eq!(g.edges, vec![(1, 2)]);
        assert_eq!(g.label(2), Some("y"));
    }

    #[test]
    fn missing_cfg_is_named() {
        let corpus = Corpus::new(
            "t",
            vec![SeedProgram::new("lonely").with_embedding_json("[[1]]")],
        )
        .unwrap();
        match cfg_3gram_vectors(&corpus) {
            Err(Error::MissingRepresentation { seed, .. }) => assert_eq!(seed, "lonely"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
