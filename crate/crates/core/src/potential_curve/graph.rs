use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub ends: [usize; 2],
    pub length: Rational,
}

/// A connected, finite metric graph. Loops and parallel edges are allowed.
/// Each edge is parametrized by arc length from `ends[0]` to `ends[1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    vertex_ids: Vec<String>,
    edges: Vec<Edge>,
    /// For each vertex, the incident `(edge, end)` pairs; a loop appears twice.
    incidence: Vec<Vec<(usize, usize)>>,
}

/// A point of a metric graph. Points at the ends of an edge are always
/// represented by the vertex, so derived equality is equality of points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphPoint {
    Vertex(usize),
    /// Strictly inside the edge: `0 < offset < length`.
    Edge {
        edge: usize,
        offset: Rational,
    },
}

impl fmt::Display for GraphPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphPoint::Vertex(v) => write!(f, "v{v}"),
            GraphPoint::Edge { edge, offset } => write!(f, "e{edge}@{}", format(offset)),
        }
    }
}

impl MetricGraph {
    /// A graph on vertices `0..num_vertices`.
    pub fn new(num_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        Self::with_ids((0..num_vertices).map(|i| i.to_string()).collect(), edges)
    }

    pub fn with_ids(vertex_ids: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let n = vertex_ids.len();
        if n == 0 {
            return Err(Error::Empty("graph vertices"));
        }
        if edges.is_empty() {
            return Err(Error::InvalidGraph("graph has no edges".into()));
        }
        let distinct: BTreeSet<&String> = vertex_ids.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidGraph("duplicate vertex id".into()));
        }
        let mut incidence = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if !e.length.is_positive() {
                return Err(Error::InvalidGraph(format!("edge {k} has nonpositive length {}", format(&e.length))));
            }
            for (end, &v) in e.ends.iter().enumerate() {
                if v >= n {
                    return Err(Error::InvalidGraph(format!("edge {k} refers to missing vertex {v}")));
                }
                incidence[v].push((k, end));
            }
        }
        let graph = MetricGraph { vertex_ids, edges, incidence };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    /// One vertex with a loop of the given length.
    pub fn circle(length: Rational) -> Result<Self> {
        Self::new(1, vec![Edge { ends: [0, 0], length }])
    }

    /// A star: center `0`, leaves `1..=k`, edge `i` joins `0` to `i + 1`.
    pub fn star(lengths: Vec<Rational>) -> Result<Self> {
        let edges =
            lengths.into_iter().enumerate().map(|(i, length)| Edge { ends: [0, i + 1], length }).collect::<Vec<_>>();
        Self::new(edges.len() + 1, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertex_ids
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn incidence(&self, v: usize) -> &[(usize, usize)] {
        &self.incidence[v]
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| &e.length).sum()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(k, end) in &self.incidence[v] {
                let w = self.edges[k].ends[1 - end];
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// The point at `offset` along edge `edge`, canonicalized.
    pub fn point(&self, edge: usize, offset: Rational) -> Result<GraphPoint> {
        let e = self.edges.get(edge).ok_or_else(|| Error::InvalidPoint(format!("edge {edge} does not exist")))?;
        if offset.is_negative() || offset > e.length {
            return Err(Error::InvalidPoint(format!(
                "offset {} outside [0, {}] on edge {edge}",
                format(&offset),
                format(&e.length)
            )));
        }
        Ok(if offset.is_zero() {
            GraphPoint::Vertex(e.ends[0])
        } else if offset == e.length {
            GraphPoint::Vertex(e.ends[1])
        } else {
            GraphPoint::Edge { edge, offset }
        })
    }

    pub fn vertex(&self, v: usize) -> Result<GraphPoint> {
        if v >= self.num_vertices() {
            return Err(Error::InvalidPoint(format!("vertex {v} does not exist")));
        }
        Ok(GraphPoint::Vertex(v))
    }

    pub fn check_point(&self, p: &GraphPoint) -> Result<()> {
        match p {
            GraphPoint::Vertex(v) => self.vertex(*v).map(|_| ()),
            GraphPoint::Edge { edge, offset } => match self.point(*edge, offset.clone())? {
                GraphPoint::Edge { .. } => Ok(()),
                GraphPoint::Vertex(_) => Err(Error::InvalidPoint(format!("{p} is an edge end, not interior"))),
            },
        }
    }

    /// Some `(edge, offset)` representing `p`: for a vertex, its lowest
    /// incident edge.
    pub fn edge_position(&self, p: &GraphPoint) -> (usize, Rational) {
        match p {
            GraphPoint::Vertex(v) => {
                let &(k, end) = self.incidence[*v].iter().min().expect("connected graphs have incident edges");
                (k, if end == 0 { Rational::zero() } else { self.edges[k].length.clone() })
            }
            GraphPoint::Edge { edge, offset } => (*edge, offset.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn validation() {
        assert!(matches!(
            MetricGraph::new(2, vec![Edge { ends: [0, 1], length: int(0) }]),
            Err(Error::InvalidGraph(_))
        ));
        assert!(matches!(MetricGraph::new(3, vec![Edge { ends: [0, 1], length: int(1) }]), Err(Error::Disconnected)));
        assert!(MetricGraph::new(2, vec![Edge { ends: [0, 1], length: int(1) }; 2]).is_ok());
    }

    #[test]
    fn points_are_canonical() {
        let g = MetricGraph::star(vec![int(1), int(2)]).unwrap();
        assert_eq!(g.point(0, int(0)).unwrap(), GraphPoint::Vertex(0));
        assert_eq!(g.point(1, int(0)).unwrap(), GraphPoint::Vertex(0));
        assert_eq!(g.point(1, int(2)).unwrap(), GraphPoint::Vertex(2));
        assert!(g.point(1, int(3)).is_err());
        let c = MetricGraph::circle(int(1)).unwrap();
        assert_eq!(c.point(0, int(1)).unwrap(), GraphPoint::Vertex(0));
        assert_eq!(c.edge_position(&GraphPoint::Vertex(0)), (0, int(0)));
        assert!(c.check_point(&GraphPoint::Edge { edge: 0, offset: rat(1, 2) }).is_ok());
        assert!(c.check_point(&GraphPoint::Edge { edge: 0, offset: int(1) }).is_err());
    }
}
