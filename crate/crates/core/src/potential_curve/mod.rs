//! Potential theory on metric graphs: the Laplacian, Poisson problems,
//! Green's functions and the Monge-Ampere operator of a curve.
//!
//! Sign convention: the Laplacian of `f` puts at each point the sum of the
//! outgoing slopes of `f` there. A local maximum therefore carries negative
//! mass, and a potential `f = phi - phi_0` has Monge-Ampere measure
//! `omega0 + laplacian(f)`. The Green's function `phi_x` solves
//! `laplacian(phi_x) = d_L delta_x - omega0`.

mod canonical;
mod function;
mod graph;
mod measure;
pub(crate) mod subdivision;

pub use canonical::{arc_masses, canonical_metric, canonical_metric_with_degree, CanonicalMetric};
pub use function::GraphPLFunction;
pub use graph::{Edge, GraphPoint, MetricGraph};
pub use measure::GraphMeasure;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::solve_sparse;
use crate::rational::Rational;
use subdivision::Subdivision;

/// The Laplacian of `f`: outgoing slope sums at vertices and breakpoints.
/// Its total mass is zero.
pub fn laplacian(f: &GraphPLFunction, graph: &MetricGraph) -> GraphMeasure {
    let sub = Subdivision::for_functions(graph, &[f], []);
    let lap = sub.node_laplacian(&sub.sample(f));
    sub.nodes.iter().cloned().zip(lap).collect()
}

/// The function `f` with `laplacian(f) = rho` and `f(normalization) = 0`.
/// It is affine away from the atoms of `rho` and the vertices.
pub fn solve_poisson(graph: &MetricGraph, rho: &GraphMeasure, normalization: &GraphPoint) -> Result<GraphPLFunction> {
    rho.check_points(graph)?;
    graph.check_point(normalization)?;
    let total = rho.total_mass();
    if !total.is_zero() {
        return Err(Error::MassBalance(Box::new(total)));
    }
    let sub = Subdivision::new(graph, rho.support().chain([normalization]));
    let mut rows = sub.laplacian_rows();
    let mut rhs = vec![Rational::zero(); sub.len()];
    for (p, m) in rho.atoms() {
        rhs[sub.node(p).expect("atoms are nodes")] = m.clone();
    }
    let anchor = sub.node(normalization).expect("normalization is a node");
    rows[anchor] = [(anchor, Rational::from_integer(1.into()))].into();
    rhs[anchor] = Rational::zero();
    let values = solve_sparse(rows, rhs).expect("the reduced Laplacian of a connected graph is invertible");
    Ok(sub.function(&values))
}

fn check_reference(omega0: &GraphMeasure, graph: &MetricGraph) -> Result<Rational> {
    omega0.check_points(graph)?;
    omega0.check_positive()?;
    let d = omega0.total_mass();
    if !d.is_positive() {
        return Err(Error::InvalidArgument("reference measure must have positive mass".into()));
    }
    Ok(d)
}

/// Subtracts the constant making `integral f d(omega0) = 0`.
fn normalize(f: GraphPLFunction, graph: &MetricGraph, omega0: &GraphMeasure, d: &Rational) -> GraphPLFunction {
    let c = omega0.integrate(&f, graph) / d;
    f.add_constant(&-c)
}

/// The Green's function `phi_x`: `laplacian(phi_x) = d_L delta_x - omega0`
/// with `integral phi_x d(omega0) = 0`, where `d_L` is the mass of `omega0`.
pub fn green(graph: &MetricGraph, x: &GraphPoint, omega0: &GraphMeasure) -> Result<GraphPLFunction> {
    let d = check_reference(omega0, graph)?;
    let rho = GraphMeasure::dirac(x.clone(), d.clone()).sub(omega0);
    let f = solve_poisson(graph, &rho, x)?;
    Ok(normalize(f, graph, omega0, &d))
}

/// `d_L^{-1} integral phi_x d(mu)(x)`: the normalized potential with
/// `laplacian = mu - omega0`.
pub fn superpose(graph: &MetricGraph, mu: &GraphMeasure, omega0: &GraphMeasure) -> Result<GraphPLFunction> {
    let d = check_reference(omega0, graph)?;
    mu.check_points(graph)?;
    mu.check_positive()?;
    let m = mu.total_mass();
    if m != d {
        return Err(Error::MassMismatch { expected: Box::new(d), found: Box::new(m) });
    }
    let f = solve_poisson(graph, &mu.sub(omega0), &GraphPoint::Vertex(0))?;
    Ok(normalize(f, graph, omega0, &d))
}

/// Whether `laplacian(f) + omega0` is a positive measure.
pub fn is_subharmonic(f: &GraphPLFunction, graph: &MetricGraph, omega0: &GraphMeasure) -> bool {
    laplacian(f, graph).add(omega0).is_positive()
}

/// The Monge-Ampere measure `omega0 + laplacian(f)` of `phi_0 + f`.
pub fn ma_curve(f: &GraphPLFunction, graph: &MetricGraph, omega0: &GraphMeasure) -> Result<GraphMeasure> {
    let mu = laplacian(f, graph).add(omega0);
    if !mu.is_positive() {
        return Err(Error::NotSubharmonic);
    }
    Ok(mu)
}
