use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::TernaryLabel;
use crate::error::{Error, Result};

/// Upper bound on `num_nodes` accepted from files.
pub const MAX_NODES: usize = 10_000_000;

/// Undirected, unweighted propagation subgraph for one tweet.
///
/// Edges are stored normalized: each pair is `(lo, hi)` with `lo < hi`,
/// sorted, without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropagationGraph {
    pub id: String,
    pub num_nodes: usize,
    edges: Vec<(usize, usize)>,
    pub label: Option<TernaryLabel>,
}

impl PropagationGraph {
    /// Builds a normalized graph: self-loops dropped, duplicate and reversed
    /// pairs merged, indices checked against `num_nodes`.
    pub fn new(
        id: impl Into<String>,
        num_nodes: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        label: Option<TernaryLabel>,
    ) -> Result<Self> {
        let id = id.into();
        if num_nodes > MAX_NODES {
            return Err(Error::Graph {
                id,
                message: format!("num_nodes {num_nodes} exceeds limit {MAX_NODES}"),
            });
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::Graph {
                    id,
                    message: format!("edge [{a},{b}] out of range for {num_nodes} nodes"),
                });
            }
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        Ok(PropagationGraph {
            id,
            num_nodes,
            edges: set.into_iter().collect(),
            label,
        })
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Relabel nodes: node `v` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::Shape(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.num_nodes
            )));
        }
        Self::new(
            self.id.clone(),
            self.num_nodes,
            self.edges.iter().map(|&(a, b)| (perm[a], perm[b])),
            self.label,
        )
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphRecord {
    id: String,
    num_nodes: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<TernaryLabel>,
}

/// Parse graph JSONL: one `{id, num_nodes, edges, label?}` object per line.
pub fn parse_graphs(input: &str) -> Result<Vec<PropagationGraph>> {
    let mut graphs = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: GraphRecord = serde_json::from_str(line).map_err(|e| Error::parse(line_no, e.to_string()))?;
        if !seen.insert(record.id.clone()) {
            return Err(Error::parse(line_no, format!("duplicate graph id {:?}", record.id)));
        }
        graphs.push(PropagationGraph::new(
            record.id,
            record.num_nodes,
            record.edges.into_iter().map(|[a, b]| (a, b)),
            record.label,
        )?);
    }
    Ok(graphs)
}

pub fn load_graphs(path: impl AsRef<Path>) -> Result<Vec<PropagationGraph>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graphs(&text)
}

pub fn format_graphs(graphs: &[PropagationGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        let record = GraphRecord {
            id: g.id.clone(),
            num_nodes: g.num_nodes,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
            label: g.label,
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string(&record).expect("graph record serializes")
        );
    }
    out
}

pub fn save_graphs(path: impl AsRef<Path>, graphs: &[PropagationGraph]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_graphs(graphs)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalizes_edges() {
        let g = parse_graphs(r#"{"id":"g1","num_nodes":3,"edges":[[0,1],[1,0],[1,1],[1,2]]}"#).unwrap();
        assert_eq!(g[0].edges(), &[(0, 1), (1, 2)]);
        assert_eq!(g[0].label, None);
    }

    #[test]
    fn out_of_range_names_graph() {
        let err = parse_graphs(r#"{"id":"bad","num_nodes":3,"edges":[[0,5]]}"#).unwrap_err();
        assert!(matches!(err, Error::Graph { ref id, .. } if id == "bad"), "{err}");
    }

    #[test]
    fn empty_graph_is_valid() {
        let g = parse_graphs(r#"{"id":"e","num_nodes":0,"edges":[],"label":"non_conspiracy"}"#).unwrap();
        assert_eq!(g[0].num_nodes, 0);
        assert_eq!(g[0].label, Some(TernaryLabel::NonConspiracy));
    }

    #[test]
    fn malformed_record_names_line() {
        let input = "{\"id\":\"a\",\"num_nodes\":1,\"edges\":[]}\n{\"id\":\"b\",\"num_nodes\":1}";
        assert!(matches!(parse_graphs(input).unwrap_err(), Error::Parse { line: 2, .. }));
        assert!(parse_graphs(r#"{"id":"a","num_nodes":2,"edges":[[0,1,1]]}"#).is_err());
        assert!(parse_graphs(r#"{"id":"a","num_nodes":2,"edges":[[0,-1]]}"#).is_err());
        assert!(parse_graphs(r#"{"id":"a","num_nodes":2,"edges":[],"label":"x"}"#).is_err());
    }

    proptest! {
        #[test]
        fn save_load_round_trip(
            n in 0usize..12,
            raw in prop::collection::vec((0usize..12, 0usize..12), 0..40),
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|&(a, b)| a < n && b < n).collect();
            let g = PropagationGraph::new("g", n, edges, Some(TernaryLabel::FiveG)).unwrap();
            for &(a, b) in g.edges() {
                prop_assert!(a < b && b < n);
            }
            let again = parse_graphs(&format_graphs(std::slice::from_ref(&g))).unwrap();
            prop_assert_eq!(&again[0], &g);
        }
    }
}
