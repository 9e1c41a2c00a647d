use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::PshContext;
use crate::error::{Error, Result};
use crate::linalg::solve_sparse;
use crate::potential_curve::subdivision::Subdivision;
use crate::potential_curve::{ma_curve, GraphMeasure, GraphPLFunction, MetricGraph};
use crate::rational::{int, to_f64, Rational};

/// `E(phi_0 + f) - E(phi_0) = (integral f d MA(phi_0 + f) + integral f d omega0) / 2`.
pub fn energy_curve(f: &GraphPLFunction, graph: &MetricGraph, omega0: &GraphMeasure) -> Result<Rational> {
    let mu = ma_curve(f, graph, omega0)?;
    Ok((mu.integrate(f, graph) + omega0.integrate(f, graph)) / int(2))
}

/// `F_mu(phi_0 + f) = E(phi_0 + f) - integral f d(mu)` for positive `mu` of
/// the same mass as `omega0`.
pub fn f_mu_curve(
    f: &GraphPLFunction,
    mu: &GraphMeasure,
    graph: &MetricGraph,
    omega0: &GraphMeasure,
) -> Result<Rational> {
    mu.check_points(graph)?;
    mu.check_positive()?;
    let (expected, found) = (omega0.total_mass(), mu.total_mass());
    if expected != found {
        return Err(Error::MassMismatch { expected: Box::new(expected), found: Box::new(found) });
    }
    Ok(energy_curve(f, graph, omega0)? - mu.integrate(f, graph))
}

/// The largest `omega0`-subharmonic function below `psi`.
///
/// Between consecutive breakpoints of `psi`, vertices and atoms of `omega0`
/// the envelope is affine, so it is the solution of a discrete obstacle
/// problem on those nodes. A projected Gauss-Seidel sweep in floating
/// point guesses the contact set; exact primal-dual active-set steps then
/// settle it, and the final answer satisfies the complementarity
/// conditions exactly.
pub fn envelope_curve(psi: &GraphPLFunction, graph: &MetricGraph, omega0: &GraphMeasure) -> Result<GraphPLFunction> {
    omega0.check_points(graph)?;
    omega0.check_positive()?;
    if !omega0.total_mass().is_positive() {
        return Err(Error::InvalidArgument("reference measure must have positive mass".into()));
    }
    if psi.edges().len() != graph.edges().len() {
        return Err(Error::LengthMismatch { expected: graph.edges().len(), found: psi.edges().len() });
    }
    let sub = Subdivision::for_functions(graph, &[psi], omega0.support());
    let n = sub.len();
    let obstacle = sub.sample(psi);
    let mut omega = vec![Rational::zero(); n];
    for (p, m) in omega0.atoms() {
        omega[sub.node(p).expect("atoms are nodes")] = m.clone();
    }

    let mut contact = guess_contact(&sub, &obstacle, &omega);
    let rows = sub.laplacian_rows();
    for _ in 0..4 * n + 4 {
        let mut system = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for a in 0..n {
            if contact[a] {
                system.push(BTreeMap::from([(a, Rational::from_integer(1.into()))]));
                rhs.push(obstacle[a].clone());
            } else {
                system.push(rows[a].clone());
                rhs.push(-&omega[a]);
            }
        }
        let x = solve_sparse(system, rhs).ok_or_else(|| Error::NotConverged("singular obstacle system".into()))?;
        let lambda: Vec<Rational> = sub.node_laplacian(&x).into_iter().zip(&omega).map(|(l, w)| l + w).collect();
        let mut next = vec![false; n];
        let mut settled = true;
        for a in 0..n {
            if contact[a] {
                next[a] = !lambda[a].is_negative();
                settled &= next[a];
            } else {
                next[a] = x[a] > obstacle[a];
                settled &= !next[a];
            }
        }
        if settled {
            return Ok(sub.function(&x));
        }
        if !next.iter().any(|&c| c) {
            let worst = (0..n).max_by(|&a, &b| (&x[a] - &obstacle[a]).cmp(&(&x[b] - &obstacle[b]))).unwrap();
            next[worst] = true;
        }
        contact = next;
    }
    Err(Error::NotConverged("obstacle problem active set did not settle".into()))
}

fn guess_contact(sub: &Subdivision, obstacle: &[Rational], omega: &[Rational]) -> Vec<bool> {
    let psi: Vec<f64> = obstacle.iter().map(to_f64).collect();
    let w: Vec<f64> = omega.iter().map(to_f64).collect();
    let nbrs: Vec<Vec<(usize, f64)>> = sub
        .neighbors
        .iter()
        .enumerate()
        .map(|(a, ns)| ns.iter().filter(|(b, _)| *b != a).map(|(b, len)| (*b, 1.0 / to_f64(len))).collect())
        .collect();
    let scale = psi.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut x = psi.clone();
    for _ in 0..2000 {
        let mut change = 0.0_f64;
        for a in 0..x.len() {
            let weight: f64 = nbrs[a].iter().map(|(_, c)| c).sum();
            if weight == 0.0 {
                continue;
            }
            let free = (nbrs[a].iter().map(|(b, c)| c * x[*b]).sum::<f64>() + w[a]) / weight;
            let new = psi[a].min(free);
            change = change.max((new - x[a]).abs());
            x[a] = new;
        }
        if change <= 1e-14 * scale {
            break;
        }
    }
    let mut contact: Vec<bool> = x.iter().zip(&psi).map(|(xi, pi)| xi >= &(pi - 1e-9 * scale)).collect();
    if !contact.iter().any(|&c| c) {
        contact[0] = true;
    }
    contact
}

/// The curve model: a metric graph with reference measure `omega0`
/// (the curvature of `phi_0`); potentials are `phi - phi_0`.
#[derive(Clone, Debug)]
pub struct CurveContext {
    pub graph: MetricGraph,
    pub omega0: GraphMeasure,
}

impl CurveContext {
    pub fn new(graph: MetricGraph, omega0: GraphMeasure) -> Result<Self> {
        omega0.check_points(&graph)?;
        omega0.check_positive()?;
        if !omega0.total_mass().is_positive() {
            return Err(Error::InvalidArgument("reference measure must have positive mass".into()));
        }
        Ok(CurveContext { graph, omega0 })
    }
}

impl PshContext for CurveContext {
    type Potential = GraphPLFunction;
    type Psi = GraphPLFunction;
    type Perturbation = GraphPLFunction;
    type Measure = GraphMeasure;

    fn degree(&self) -> Rational {
        self.omega0.total_mass()
    }

    fn envelope(&self, psi: &GraphPLFunction) -> Result<GraphPLFunction> {
        envelope_curve(psi, &self.graph, &self.omega0)
    }

    fn energy(&self, phi: &GraphPLFunction) -> Result<Rational> {
        energy_curve(phi, &self.graph, &self.omega0)
    }

    fn ma(&self, phi: &GraphPLFunction) -> Result<GraphMeasure> {
        ma_curve(phi, &self.graph, &self.omega0)
    }

    fn as_psi(&self, phi: &GraphPLFunction) -> GraphPLFunction {
        phi.clone()
    }

    fn perturb(&self, phi: &GraphPLFunction, f: &GraphPLFunction, t: &Rational) -> Result<GraphPLFunction> {
        Ok(phi.add(&f.scale(t)))
    }

    fn integrate(&self, psi: &GraphPLFunction, mu: &GraphMeasure) -> Rational {
        mu.integrate(psi, &self.graph)
    }

    fn integrate_perturbation(&self, f: &GraphPLFunction, mu: &GraphMeasure) -> Rational {
        mu.integrate(f, &self.graph)
    }

    fn sup_norm(&self, f: &GraphPLFunction) -> Rational {
        f.sup_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential_curve::{green, is_subharmonic, laplacian, GraphPoint};
    use crate::rational::rat;
    use crate::variational::{default_t_grid, energy_of_envelope_derivative, orthogonality_defect};

    fn circle() -> MetricGraph {
        MetricGraph::circle(int(1)).unwrap()
    }

    fn ctx() -> CurveContext {
        CurveContext::new(circle(), GraphMeasure::dirac(GraphPoint::Vertex(0), int(1))).unwrap()
    }

    fn pl(points: &[(Rational, Rational)]) -> GraphPLFunction {
        GraphPLFunction::new(&circle(), vec![points.to_vec()]).unwrap()
    }

    #[test]
    fn energy_examples() {
        let c = ctx();
        assert!(c.energy(&GraphPLFunction::zero(&c.graph)).unwrap().is_zero());
        assert_eq!(c.energy(&GraphPLFunction::constant(&c.graph, rat(3, 2))).unwrap(), rat(3, 2));
        // phi = -min(t, 1 - t)/2: MA = delta_{1/2}, phi(1/2) = -1/4, phi(0) = 0.
        let phi = green(&c.graph, &GraphPoint::Edge { edge: 0, offset: rat(1, 2) }, &c.omega0).unwrap();
        assert_eq!(c.energy(&phi).unwrap(), rat(-1, 8));
        let mu = c.ma(&phi).unwrap();
        assert_eq!(f_mu_curve(&phi, &mu, &c.graph, &c.omega0).unwrap(), rat(1, 8));
        let shifted = phi.add_constant(&int(4));
        assert_eq!(f_mu_curve(&shifted, &mu, &c.graph, &c.omega0).unwrap(), rat(1, 8));
    }

    /// Projected Gauss-Seidel on a uniform grid of the unit circle.
    fn grid_envelope(psi: impl Fn(f64) -> f64, n: usize) -> Vec<f64> {
        let h = 1.0 / n as f64;
        let obstacle: Vec<f64> = (0..n).map(|i| psi(i as f64 * h)).collect();
        let mut x = obstacle.clone();
        for _ in 0..200_000 {
            let mut change = 0.0_f64;
            for i in 0..n {
                let omega = if i == 0 { 1.0 } else { 0.0 };
                let free = (x[(i + 1) % n] + x[(i + n - 1) % n] + omega * h) / 2.0;
                let new = obstacle[i].min(free);
                change = change.max((new - x[i]).abs());
                x[i] = new;
            }
            if change < 1e-15 {
                break;
            }
        }
        x
    }

    #[test]
    fn dented_obstacle_matches_grid() {
        let c = ctx();
        // A tent with a dent at 3/4 that pokes below the subharmonic range.
        let psi = pl(&[
            (int(0), int(0)),
            (rat(1, 2), rat(1, 2)),
            (rat(3, 4), rat(-1, 8)),
            (rat(7, 8), rat(1, 8)),
            (int(1), int(0)),
        ]);
        let p = c.envelope(&psi).unwrap();
        assert!(p.le(&psi));
        assert!(is_subharmonic(&p, &c.graph, &c.omega0));
        assert_eq!(c.envelope(&p).unwrap(), p);
        assert!(orthogonality_defect(&c, &psi).unwrap().is_zero());
        let n = 400;
        let grid = grid_envelope(
            |t| {
                let pts = [(0.0, 0.0), (0.5, 0.5), (0.75, -0.125), (0.875, 0.125), (1.0, 0.0)];
                let i = pts.iter().rposition(|(s, _)| *s <= t).unwrap().min(3);
                let ((a, fa), (b, fb)) = (pts[i], pts[i + 1]);
                fa + (fb - fa) * (t - a) / (b - a)
            },
            n,
        );
        for (i, g) in grid.iter().enumerate() {
            let t = Rational::new((i as i64).into(), (n as i64).into());
            let exact = to_f64(&p.eval_on_edge(0, &t));
            assert!((exact - g).abs() < 1e-6, "t = {i}/{n}: {exact} vs {g}");
        }
    }

    #[test]
    fn subharmonic_input_is_fixed() {
        let c = ctx();
        let phi = green(&c.graph, &GraphPoint::Edge { edge: 0, offset: rat(1, 3) }, &c.omega0).unwrap();
        assert_eq!(c.envelope(&phi).unwrap(), phi);
        assert!(laplacian(&phi, &c.graph).add(&c.omega0).is_positive());
    }

    #[test]
    fn constant_perturbation() {
        let c = ctx();
        let phi = GraphPLFunction::zero(&c.graph);
        let one = GraphPLFunction::constant(&c.graph, int(1));
        let d = energy_of_envelope_derivative(&c, &phi, &one, &default_t_grid()).unwrap();
        assert_eq!(d.exact, int(1));
        assert!(d.estimates.iter().all(|(_, e)| e == &int(1)));
    }
}
