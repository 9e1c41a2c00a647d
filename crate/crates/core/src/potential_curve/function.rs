use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use super::graph::{GraphPoint, MetricGraph};
use crate::error::{Error, Result};
use crate::rational::{format, Rational};

/// A continuous function on a metric graph, affine between breakpoints on
/// each edge.
///
/// Each edge stores `(offset, value)` pairs from offset `0` to the edge
/// length, strictly increasing. Interior breakpoints where the slope does
/// not change are removed, so derived equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphPLFunction {
    edges: Vec<Vec<(Rational, Rational)>>,
}

fn slope(a: &(Rational, Rational), b: &(Rational, Rational)) -> Rational {
    (&b.1 - &a.1) / (&b.0 - &a.0)
}

fn simplify(points: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
    for p in points {
        while out.len() >= 2 && slope(&out[out.len() - 2], &out[out.len() - 1]) == slope(&out[out.len() - 1], &p) {
            out.pop();
        }
        out.push(p);
    }
    out
}

fn interpolate(points: &[(Rational, Rational)], t: &Rational) -> Rational {
    let i = points.partition_point(|(s, _)| s <= t);
    if i == 0 {
        return points[0].1.clone();
    }
    if i == points.len() {
        return points[i - 1].1.clone();
    }
    let (a, b) = (&points[i - 1], &points[i]);
    if &a.0 == t {
        return a.1.clone();
    }
    &a.1 + slope(a, b) * (t - &a.0)
}

impl GraphPLFunction {
    pub fn new(graph: &MetricGraph, edges: Vec<Vec<(Rational, Rational)>>) -> Result<Self> {
        if edges.len() != graph.edges().len() {
            return Err(Error::LengthMismatch { expected: graph.edges().len(), found: edges.len() });
        }
        for (k, pts) in edges.iter().enumerate() {
            let len = &graph.edge(k).length;
            let ok = pts.len() >= 2
                && pts[0].0.is_zero()
                && &pts[pts.len() - 1].0 == len
                && pts.windows(2).all(|w| w[0].0 < w[1].0);
            if !ok {
                return Err(Error::InvalidFunction(format!(
                    "edge {k}: breakpoints must increase strictly from 0 to {}",
                    format(len)
                )));
            }
        }
        for v in 0..graph.num_vertices() {
            let values: BTreeSet<&Rational> = graph
                .incidence(v)
                .iter()
                .map(|&(k, end)| if end == 0 { &edges[k][0].1 } else { &edges[k].last().unwrap().1 })
                .collect();
            if values.len() > 1 {
                return Err(Error::InvalidFunction(format!("discontinuous at vertex {v}")));
            }
        }
        Ok(Self::from_edges_unchecked(edges))
    }

    pub(crate) fn from_edges_unchecked(edges: Vec<Vec<(Rational, Rational)>>) -> Self {
        GraphPLFunction { edges: edges.into_iter().map(simplify).collect() }
    }

    pub fn constant(graph: &MetricGraph, c: Rational) -> Self {
        GraphPLFunction {
            edges: graph
                .edges()
                .iter()
                .map(|e| vec![(Rational::zero(), c.clone()), (e.length.clone(), c.clone())])
                .collect(),
        }
    }

    pub fn zero(graph: &MetricGraph) -> Self {
        Self::constant(graph, Rational::zero())
    }

    pub fn edge_breakpoints(&self, k: usize) -> &[(Rational, Rational)] {
        &self.edges[k]
    }

    pub fn edges(&self) -> &[Vec<(Rational, Rational)>] {
        &self.edges
    }

    pub fn eval_on_edge(&self, edge: usize, offset: &Rational) -> Rational {
        interpolate(&self.edges[edge], offset)
    }

    pub fn eval(&self, graph: &MetricGraph, p: &GraphPoint) -> Rational {
        let (k, t) = graph.edge_position(p);
        self.eval_on_edge(k, &t)
    }

    /// The vertices together with every interior breakpoint.
    pub fn breakpoints(&self, graph: &MetricGraph) -> Vec<GraphPoint> {
        let mut out: Vec<GraphPoint> = (0..graph.num_vertices()).map(GraphPoint::Vertex).collect();
        for (k, pts) in self.edges.iter().enumerate() {
            for (t, _) in &pts[1..pts.len() - 1] {
                out.push(GraphPoint::Edge { edge: k, offset: t.clone() });
            }
        }
        out
    }

    /// Slopes of the pieces on edge `k`, in the direction of increasing offset.
    pub fn edge_slopes(&self, k: usize) -> Vec<Rational> {
        self.edges[k].windows(2).map(|w| slope(&w[0], &w[1])).collect()
    }

    fn combine(&self, other: &Self, mut op: impl FnMut(&Rational, &Rational) -> Rational) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| {
                let ts: BTreeSet<&Rational> = a.iter().chain(b).map(|(t, _)| t).collect();
                ts.into_iter().map(|t| (t.clone(), op(&interpolate(a, t), &interpolate(b, t)))).collect()
            })
            .collect();
        Self::from_edges_unchecked(edges)
    }

    fn map_values(&self, mut op: impl FnMut(&Rational) -> Rational) -> Self {
        Self::from_edges_unchecked(
            self.edges.iter().map(|pts| pts.iter().map(|(t, y)| (t.clone(), op(y))).collect()).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.map_values(|y| y * k)
    }

    pub fn add_constant(&self, c: &Rational) -> Self {
        self.map_values(|y| y + c)
    }

    pub fn neg(&self) -> Self {
        self.map_values(|y| -y)
    }

    fn lattice(&self, other: &Self, take_max: bool) -> Self {
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| {
                let ts: Vec<Rational> =
                    a.iter().chain(b).map(|(t, _)| t.clone()).collect::<BTreeSet<_>>().into_iter().collect();
                let diff = |t: &Rational| interpolate(a, t) - interpolate(b, t);
                let mut all = ts.clone();
                for w in ts.windows(2) {
                    let (da, db) = (diff(&w[0]), diff(&w[1]));
                    if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                        all.push(&w[0] + (&w[1] - &w[0]) * &da / (&da - &db));
                    }
                }
                all.sort();
                all.into_iter()
                    .map(|t| {
                        let (x, y) = (interpolate(a, &t), interpolate(b, &t));
                        let v = if (x > y) == take_max { x } else { y };
                        (t, v)
                    })
                    .collect()
            })
            .collect();
        Self::from_edges_unchecked(edges)
    }

    pub fn max(&self, other: &Self) -> Self {
        self.lattice(other, true)
    }

    pub fn min(&self, other: &Self) -> Self {
        self.lattice(other, false)
    }

    /// `max |f|`, attained at a breakpoint.
    pub fn sup_norm(&self) -> Rational {
        self.edges.iter().flatten().map(|(_, y)| y.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// Whether `self <= other` everywhere.
    pub fn le(&self, other: &Self) -> bool {
        let d = other.sub(self);
        d.edges.iter().flatten().all(|(_, y)| !y.is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn circle() -> MetricGraph {
        MetricGraph::circle(int(1)).unwrap()
    }

    fn tent() -> GraphPLFunction {
        GraphPLFunction::new(&circle(), vec![vec![(int(0), int(0)), (rat(1, 2), rat(1, 2)), (int(1), int(0))]]).unwrap()
    }

    #[test]
    fn validation_and_canonical_form() {
        let c = circle();
        assert!(GraphPLFunction::new(&c, vec![vec![(int(0), int(0)), (int(1), int(1))]]).is_err());
        assert!(GraphPLFunction::new(&c, vec![vec![(int(0), int(0)), (int(2), int(0))]]).is_err());
        let redundant = GraphPLFunction::new(
            &c,
            vec![vec![(int(0), int(0)), (rat(1, 4), rat(1, 4)), (rat(1, 2), rat(1, 2)), (int(1), int(0))]],
        )
        .unwrap();
        assert_eq!(redundant, tent());
    }

    #[test]
    fn evaluation_and_arithmetic() {
        let c = circle();
        let f = tent();
        assert_eq!(f.eval(&c, &GraphPoint::Edge { edge: 0, offset: rat(1, 4) }), rat(1, 4));
        assert_eq!(f.eval(&c, &GraphPoint::Vertex(0)), int(0));
        assert_eq!(f.sub(&f), GraphPLFunction::zero(&c));
        assert_eq!(f.add(&f), f.scale(&int(2)));
        let half = GraphPLFunction::constant(&c, rat(1, 4));
        let m = f.min(&half);
        assert_eq!(m.edge_breakpoints(0).len(), 4);
        assert_eq!(m.sup_norm(), rat(1, 4));
        assert!(m.le(&f) && m.le(&half) && f.le(&f.max(&half)));
    }
}
