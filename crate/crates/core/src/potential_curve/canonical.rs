use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{laplacian, ma_curve, solve_poisson, GraphMeasure, GraphPLFunction, GraphPoint, MetricGraph};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};

/// An iterate of the canonical metric on the unit circle skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalMetric {
    /// The circle of length 1: vertex `0` at `t = 0`, loop edge `0`.
    pub graph: MetricGraph,
    /// `d_L delta_0`.
    pub omega0: GraphMeasure,
    /// The potential `u_k = phi_k - phi_0` after `k` iterations.
    pub potential: GraphPLFunction,
    /// `omega0 + laplacian(u_k)`.
    pub measure: GraphMeasure,
}

/// [`canonical_metric_with_degree`] with `d_L = 1`.
pub fn canonical_metric(m: u32, iterations: u32) -> Result<CanonicalMetric> {
    canonical_metric_with_degree(m, iterations, &int(1))
}

/// Iterates the pullback-and-rescale operator of the multiplication-by-`m`
/// map on the circle skeleton, starting from `u = 0`:
///
/// `T(u)(t) = u(m t mod 1) / m^2 + h(t)`,
///
/// where `h` solves `laplacian(h) = (d_L / m) sum_j delta_{j/m} - omega0`
/// with `h(0) = 0`. The Monge-Ampere measure of `T(u)` is `1/m` times the
/// pullback of that of `u`, so after `k` steps it puts mass `d_L / m^k` at
/// each point `j / m^k`, approaching `d_L` times Lebesgue measure.
pub fn canonical_metric_with_degree(m: u32, iterations: u32, degree: &Rational) -> Result<CanonicalMetric> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("multiplier must be at least 2, got {m}")));
    }
    if !degree.is_positive() {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let graph = MetricGraph::circle(int(1))?;
    let omega0 = GraphMeasure::dirac(GraphPoint::Vertex(0), degree.clone());
    let mf = Rational::from_integer(m.into());
    let mu1: GraphMeasure =
        (0..m).map(|j| (graph.point(0, int(j.into()) / &mf).expect("inside the loop"), degree / &mf)).collect();
    let h = solve_poisson(&graph, &mu1.sub(&omega0), &GraphPoint::Vertex(0))?;
    let lambda_inv = (&mf * &mf).recip();
    let mut u = GraphPLFunction::zero(&graph);
    for _ in 0..iterations {
        let pts = u.edge_breakpoints(0);
        let mut composed: Vec<(Rational, Rational)> = Vec::with_capacity(m as usize * pts.len());
        for j in 0..m {
            let shift = Rational::from_integer(j.into());
            // Skip each copy's start: it repeats the previous copy's end.
            let skip = usize::from(j > 0);
            for (s, y) in &pts[skip..] {
                composed.push(((&shift + s) / &mf, y * &lambda_inv));
            }
        }
        u = GraphPLFunction::from_edges_unchecked(vec![composed]).add(&h);
    }
    let measure = ma_curve(&u, &graph, &omega0)?;
    debug_assert_eq!(laplacian(&u, &graph).add(&omega0), measure);
    Ok(CanonicalMetric { graph, omega0, potential: u, measure })
}

/// Masses of the half-open arcs `[j/n, (j+1)/n)` of the unit circle
/// skeleton (as built by [`MetricGraph::circle`] with length 1).
pub fn arc_masses(measure: &GraphMeasure, n: usize) -> Result<Vec<Rational>> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of arcs must be positive".into()));
    }
    let mut out = vec![Rational::zero(); n];
    let nr = Rational::from_integer(n.into());
    for (p, mass) in measure.atoms() {
        let t = match p {
            GraphPoint::Vertex(0) => Rational::zero(),
            GraphPoint::Edge { edge: 0, offset } if offset < &int(1) => offset.clone(),
            _ => return Err(Error::InvalidPoint(format!("{p} is not on the unit circle"))),
        };
        let j = (t * &nr).floor().to_integer();
        let j = j.mod_floor(&n.into()).to_usize().expect("index below n");
        out[j] += mass;
    }
    Ok(out)
}
