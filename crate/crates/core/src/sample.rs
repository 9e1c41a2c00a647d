//! Seeded random instances: polytopes, admissible functions, metric graphs
//! and measures. Used by the test suites and the CLI self-test.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::convex_geometry::{AffineFunctional, DiscreteMeasure, PLConvexFunction, Point, Polytope};
use crate::potential_curve::{Edge, GraphMeasure, GraphPoint, MetricGraph};
use crate::rational::{int, rat, Rational};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `conv{+-e1, +-e2, +-(e1 + e2)}`, of area 3.
pub fn hexagon() -> Polytope {
    let pts = [[1, 0], [0, 1], [-1, 0], [0, -1], [1, 1], [-1, -1]];
    Polytope::new(2, pts.iter().map(|p| Point::from_ints(p)).collect()).expect("nonempty")
}

/// The polytopes of the acceptance suite: `[0,1]`, `[0,1]^2`, the standard
/// 2-simplex and the hexagon.
pub fn standard_polytopes() -> Vec<(&'static str, Polytope)> {
    vec![
        ("interval", Polytope::unit_cube(1)),
        ("square", Polytope::unit_cube(2)),
        ("simplex", Polytope::standard_simplex(2)),
        ("hexagon", hexagon()),
    ]
}

/// A rational in `[lo, hi]` with denominator `denom`.
pub fn rational(rng: &mut SampleRng, lo: i64, hi: i64, denom: i64) -> Rational {
    rat(rng.gen_range(lo * denom..=hi * denom), denom)
}

/// A random point of `delta`: a convex combination of its vertices with
/// small-denominator weights.
pub fn point_in(rng: &mut SampleRng, delta: &Polytope) -> Point {
    let weights: Vec<i64> = delta.vertices().iter().map(|_| rng.gen_range(0..=4)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return delta.vertices()[0].clone();
    }
    let mut acc = Point::zeros(delta.dim());
    for (v, w) in delta.vertices().iter().zip(weights) {
        acc = acc.add(&v.scale(&rat(w, total)));
    }
    acc
}

/// A random admissible function for `delta`: one piece per vertex plus up
/// to `extra` pieces with slopes inside `delta`, all with random intercepts.
pub fn admissible(rng: &mut SampleRng, delta: &Polytope, extra: usize) -> PLConvexFunction {
    let mut pieces: Vec<AffineFunctional> =
        delta.vertices().iter().map(|v| AffineFunctional::new(v.clone(), rational(rng, -2, 2, 4))).collect();
    let k = rng.gen_range(0..=extra);
    for _ in 0..k {
        let u = point_in(rng, delta);
        pieces.push(AffineFunctional::new(u, rational(rng, -2, 2, 4)));
    }
    PLConvexFunction::new(delta.dim(), pieces).expect("pieces share the dimension")
}

/// A random point with coordinates in `[-r, r]`, denominator `denom`.
pub fn point(rng: &mut SampleRng, dim: usize, r: i64, denom: i64) -> Point {
    Point::new((0..dim).map(|_| rational(rng, -r, r, denom)).collect())
}

/// A positive measure of total mass `mass` with `atoms` random atoms.
pub fn measure(rng: &mut SampleRng, dim: usize, atoms: usize, mass: &Rational) -> DiscreteMeasure {
    let weights: Vec<i64> = (0..atoms).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    DiscreteMeasure::new(dim, weights.into_iter().map(|w| (point(rng, dim, 2, 4), mass * rat(w, total))))
        .expect("positive masses")
}

/// A random connected metric graph with at most `max_vertices` vertices
/// and `max_edges` edges (loops and parallel edges included).
pub fn graph(rng: &mut SampleRng, max_vertices: usize, max_edges: usize) -> MetricGraph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let tree = n - 1;
    let min_edges = tree.max(1);
    let m = rng.gen_range(min_edges..=max_edges.max(min_edges));
    let mut edges = Vec::with_capacity(m);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(Edge { ends: [u, v], length: rational(rng, 1, 3, 4) });
    }
    while edges.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        edges.push(Edge { ends: [a, b], length: rational(rng, 1, 3, 4) });
    }
    MetricGraph::new(n, edges).expect("spanning tree makes it connected")
}

/// A vertex or an interior point with a small-denominator offset.
pub fn graph_point(rng: &mut SampleRng, graph: &MetricGraph) -> GraphPoint {
    if rng.gen_bool(0.3) {
        return GraphPoint::Vertex(rng.gen_range(0..graph.num_vertices()));
    }
    let k = rng.gen_range(0..graph.edges().len());
    let len = &graph.edge(k).length;
    let t = rat(rng.gen_range(1..8), 8) * len;
    graph.point(k, t).expect("offset inside the edge")
}

/// A positive atomic measure on `graph` of total mass `mass`.
pub fn graph_measure(rng: &mut SampleRng, graph: &MetricGraph, atoms: usize, mass: &Rational) -> GraphMeasure {
    let weights: Vec<i64> = (0..atoms.max(1)).map(|_| rng.gen_range(1..=5)).collect();
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| (graph_point(rng, graph), mass * rat(w, total))).collect()
}

/// A signed atomic measure of total mass zero.
pub fn balanced_graph_measure(rng: &mut SampleRng, graph: &MetricGraph, atoms: usize) -> GraphMeasure {
    let mut pts: Vec<(GraphPoint, Rational)> =
        (0..atoms.max(1)).map(|_| (graph_point(rng, graph), rational(rng, -2, 2, 3))).collect();
    let total: Rational = pts.iter().map(|(_, m)| m).sum();
    let p = graph_point(rng, graph);
    pts.push((p, -total));
    let mu = GraphMeasure::new(pts);
    debug_assert!(mu.total_mass().is_zero());
    mu
}

/// A random positive reference measure on `graph` of total mass 1.
pub fn reference_measure(rng: &mut SampleRng, graph: &MetricGraph) -> GraphMeasure {
    let atoms = rng.gen_range(1..=3);
    graph_measure(rng, graph, atoms, &int(1))
}

/// A random continuous piecewise-linear function on `graph` with values in
/// `[-2, 2]` and up to `breaks` interior breakpoints per edge.
pub fn graph_function(
    rng: &mut SampleRng,
    graph: &MetricGraph,
    breaks: usize,
) -> crate::potential_curve::GraphPLFunction {
    let vertex_values: Vec<Rational> = (0..graph.num_vertices()).map(|_| rational(rng, -2, 2, 4)).collect();
    let edges = graph
        .edges()
        .iter()
        .map(|e| {
            let k = rng.gen_range(0..=breaks);
            let mut offsets: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(1..16), 16) * &e.length).collect();
            offsets.sort();
            offsets.dedup();
            let mut pts = vec![(Rational::zero(), vertex_values[e.ends[0]].clone())];
            pts.extend(offsets.into_iter().map(|t| (t, rational(rng, -2, 2, 4))));
            pts.push((e.length.clone(), vertex_values[e.ends[1]].clone()));
            pts
        })
        .collect();
    crate::potential_curve::GraphPLFunction::new(graph, edges).expect("continuous by construction")
}
