use std::ops::Range;

use crate::corpus::PropagationGraph;
use crate::nn::DenseMatrix;

/// One-hot degree encoding: a node of degree `d` sets slot `min(d, cap)`.
pub fn degree_features(graph: &PropagationGraph, cap: usize) -> DenseMatrix {
    let mut features = DenseMatrix::zeros(graph.num_nodes, cap + 1);
    for (v, d) in graph.degrees().into_iter().enumerate() {
        features[(v, d.min(cap))] = 1.0;
    }
    features
}

/// Several graphs packed into one disjoint union with contiguous node ranges.
#[derive(Debug, Clone)]
pub struct GraphBatch {
    pub features: DenseMatrix,
    /// Neighbor lists over batch-global node indices.
    pub neighbors: Vec<Vec<usize>>,
    /// Graph index of every node.
    pub membership: Vec<usize>,
    pub node_ranges: Vec<Range<usize>>,
}

impl GraphBatch {
    pub fn new<'a>(graphs: impl IntoIterator<Item = &'a PropagationGraph>, cap: usize) -> Self {
        let graphs: Vec<&PropagationGraph> = graphs.into_iter().collect();
        let total: usize = graphs.iter().map(|g| g.num_nodes).sum();
        let width = cap + 1;
        let mut data = Vec::with_capacity(total * width);
        let mut neighbors = Vec::with_capacity(total);
        let mut membership = Vec::with_capacity(total);
        let mut node_ranges = Vec::with_capacity(graphs.len());
        let mut offset = 0;
        for (gi, g) in graphs.iter().enumerate() {
            data.extend_from_slice(degree_features(g, cap).data());
            neighbors.extend(
                g.adjacency()
                    .into_iter()
                    .map(|adj| adj.into_iter().map(|u| u + offset).collect::<Vec<_>>()),
            );
            membership.extend(std::iter::repeat_n(gi, g.num_nodes));
            node_ranges.push(offset..offset + g.num_nodes);
            offset += g.num_nodes;
        }
        GraphBatch {
            features: DenseMatrix::from_vec(total, width, data).expect("feature buffer sized to nodes x width"),
            neighbors,
            membership,
            node_ranges,
        }
    }

    pub fn num_graphs(&self) -> usize {
        self.node_ranges.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.neighbors.len()
    }

    pub fn feature_width(&self) -> usize {
        self.features.cols()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> PropagationGraph {
        PropagationGraph::new("g", n, edges.iter().copied(), None).unwrap()
    }

    fn hot(m: &DenseMatrix, row: usize) -> usize {
        m.row(row).iter().position(|&x| x == 1.0).unwrap()
    }

    #[test]
    fn path_degrees() {
        let f = degree_features(&graph(3, &[(0, 1), (1, 2)]), 64);
        assert_eq!(f.cols(), 65);
        assert_eq!([hot(&f, 0), hot(&f, 1), hot(&f, 2)], [1, 2, 1]);
        assert!(f.data().iter().sum::<f64>() == 3.0);
    }

    #[test]
    fn isolated_and_overflow() {
        let f = degree_features(&graph(1, &[]), 64);
        assert_eq!(hot(&f, 0), 0);
        let star: Vec<(usize, usize)> = (1..=100).map(|i| (0, i)).collect();
        let f = degree_features(&graph(101, &star), 64);
        assert_eq!(hot(&f, 0), 64);
        assert_eq!(hot(&f, 1), 1);
    }

    #[test]
    fn batch_membership_partitions_nodes() {
        let a = graph(2, &[(0, 1)]);
        let b = graph(0, &[]);
        let c = graph(3, &[(0, 2)]);
        let batch = GraphBatch::new([&a, &b, &c], 4);
        assert_eq!(batch.num_nodes(), 5);
        assert_eq!(batch.membership, vec![0, 0, 2, 2, 2]);
        assert_eq!(batch.node_ranges, vec![0..2, 2..2, 2..5]);
        assert_eq!(batch.neighbors[2], vec![4]);
        assert_eq!(batch.neighbors[4], vec![2]);
    }
}
