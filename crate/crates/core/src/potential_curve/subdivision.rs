use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::function::GraphPLFunction;
use super::graph::{GraphPoint, MetricGraph};
use crate::rational::Rational;

/// A refinement of a metric graph by finitely many interior points. Node
/// `i < num_vertices` is vertex `i`; the rest are the inserted points.
#[derive(Clone, Debug)]
pub(crate) struct Subdivision {
    pub nodes: Vec<GraphPoint>,
    index: BTreeMap<GraphPoint, usize>,
    /// Per edge, `(offset, node)` from the start vertex to the end vertex.
    pub edge_nodes: Vec<Vec<(Rational, usize)>>,
    /// Per node, `(neighbor, segment length)`; a loop segment appears twice.
    pub neighbors: Vec<Vec<(usize, Rational)>>,
}

impl Subdivision {
    pub fn new<'a>(graph: &MetricGraph, points: impl IntoIterator<Item = &'a GraphPoint>) -> Self {
        let interior: BTreeSet<&GraphPoint> =
            points.into_iter().filter(|p| matches!(p, GraphPoint::Edge { .. })).collect();
        let mut nodes: Vec<GraphPoint> = (0..graph.num_vertices()).map(GraphPoint::Vertex).collect();
        nodes.extend(interior.into_iter().cloned());
        let index: BTreeMap<GraphPoint, usize> = nodes.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let mut edge_nodes: Vec<Vec<(Rational, usize)>> =
            graph.edges().iter().map(|e| vec![(Rational::zero(), e.ends[0])]).collect();
        // Interior nodes are sorted by (edge, offset), so pushing in order
        // keeps each edge list increasing.
        for (i, p) in nodes.iter().enumerate().skip(graph.num_vertices()) {
            if let GraphPoint::Edge { edge, offset } = p {
                edge_nodes[*edge].push((offset.clone(), i));
            }
        }
        for (k, e) in graph.edges().iter().enumerate() {
            edge_nodes[k].push((e.length.clone(), e.ends[1]));
        }
        let mut neighbors = vec![Vec::new(); nodes.len()];
        for list in &edge_nodes {
            for w in list.windows(2) {
                let len = &w[1].0 - &w[0].0;
                neighbors[w[0].1].push((w[1].1, len.clone()));
                neighbors[w[1].1].push((w[0].1, len));
            }
        }
        Subdivision { nodes, index, edge_nodes, neighbors }
    }

    /// Subdivision at the breakpoints of the given functions plus `points`.
    pub fn for_functions<'a>(
        graph: &MetricGraph,
        functions: &[&GraphPLFunction],
        points: impl IntoIterator<Item = &'a GraphPoint>,
    ) -> Self {
        let mut all: BTreeSet<GraphPoint> = points.into_iter().cloned().collect();
        for f in functions {
            all.extend(f.breakpoints(graph));
        }
        Self::new(graph, &all)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, p: &GraphPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn sample(&self, f: &GraphPLFunction) -> Vec<Rational> {
        let mut values = vec![Rational::zero(); self.len()];
        for (k, list) in self.edge_nodes.iter().enumerate() {
            for (t, i) in list {
                values[*i] = f.eval_on_edge(k, t);
            }
        }
        values
    }

    /// The function affine on every segment with the given node values.
    pub fn function(&self, values: &[Rational]) -> GraphPLFunction {
        GraphPLFunction::from_edges_unchecked(
            self.edge_nodes
                .iter()
                .map(|list| list.iter().map(|(t, i)| (t.clone(), values[*i].clone())).collect())
                .collect(),
        )
    }

    /// Sum of outgoing slopes at each node of the node interpolant.
    pub fn node_laplacian(&self, values: &[Rational]) -> Vec<Rational> {
        self.neighbors
            .iter()
            .enumerate()
            .map(|(a, ns)| ns.iter().map(|(b, len)| (&values[*b] - &values[a]) / len).sum())
            .collect()
    }

    /// The matrix of `node_laplacian` as sparse rows.
    pub fn laplacian_rows(&self) -> Vec<BTreeMap<usize, Rational>> {
        self.neighbors
            .iter()
            .enumerate()
            .map(|(a, ns)| {
                let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                for (b, len) in ns {
                    if *b == a {
                        continue;
                    }
                    let w = len.recip();
                    *row.entry(*b).or_insert_with(Rational::zero) += &w;
                    *row.entry(a).or_insert_with(Rational::zero) -= w;
                }
                row.retain(|_, v| !v.is_zero());
                row
            })
            .collect()
    }
}
