//! Solving `MA(phi) = mu`.
//!
//! On curves the equation is linear and [`solve_curve`] is the Green's
//! function superposition. In the toric case a candidate solution is
//! parametrized by weights `w_i` on the atoms `v_i` of `nu`: the dual
//! function `F_w(u) = max_i (<u, v_i> - w_i)` on `Delta` has Laguerre cells
//! `Lag_i` (where the `i`-th term is the max), and its Legendre transform
//! `g` is admissible with `g(v_i) = w_i` and `subdifferential(g, v_i) =
//! Lag_i` whenever that cell has interior. Solving the equation means
//! `vol(Lag_i) = nu_i`, which is the critical point of the concave
//!
//! `J(w) = -sum_i nu_i w_i - integral_Delta F_w`,
//!
//! the finite-dimensional form of maximizing `F_mu`. Its gradient is
//! `vol(Lag_i) - nu_i` and its Hessian is minus a weighted graph Laplacian
//! with weights `|Lag_i cap Lag_j| / |v_i - v_j|`. Damped Newton runs in
//! floating point; the weights are then snapped to rationals (and, if that
//! does not already solve the equation, given one exact Newton step) and
//! the residual is recomputed exactly from the resulting `g`.

mod laguerre;

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::convex_geometry::{convex_envelope, DiscreteMeasure, PLConvexFunction, Point, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{abs_max, solve, solve_f64};
use crate::potential_curve::{superpose, GraphMeasure, GraphPLFunction, MetricGraph};
use crate::rational::{approximate, from_f64, to_f64, Rational};
use crate::toric_ma::real_ma;
use laguerre::{cell, laguerre_cells, Cell, Domain};

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    /// Target for `max_i |vol(Lag_i) - nu_i| / Vol(Delta)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Smallest damping factor tried before falling back to coordinate ascent.
    pub min_step: f64,
    /// Print one line per iteration to standard error.
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tolerance: 1e-10, max_iterations: 200, min_step: 1.0 / (1u64 << 20) as f64, verbose: false }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(Error::InvalidArgument("min_step must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: PLConvexFunction,
    /// The exact weights `(v_i, w_i)` that define `solution`.
    pub weights: Vec<(Point, Rational)>,
    /// `MA_R(solution) - nu` on the union of supports, exact.
    pub residual: Vec<(Point, Rational)>,
    /// `max_i |vol(Lag_i) - nu_i|` at the last floating-point iterate.
    pub float_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Values of `J` at accepted iterates.
    pub objective_history: Vec<f64>,
}

impl SolveReport {
    pub fn max_residual(&self) -> Rational {
        abs_max(self.residual.iter().map(|(_, r)| r))
    }

    pub fn is_exact(&self) -> bool {
        self.residual.iter().all(|(_, r)| r.is_zero())
    }
}

/// `MA_R(g) - nu` atom by atom, over the union of both supports.
pub fn residual(g: &PLConvexFunction, nu: &DiscreteMeasure, delta: &Polytope) -> Result<Vec<(Point, Rational)>> {
    if nu.dim() != delta.dim() {
        return Err(Error::DimensionMismatch { expected: delta.dim(), found: nu.dim() });
    }
    Ok(real_ma(g, delta)?.signed_difference(nu))
}

/// The solution of `MA(phi_0 + f) = mu` on a metric graph with
/// `integral f d(omega0) = 0`.
pub fn solve_curve(graph: &MetricGraph, mu: &GraphMeasure, omega0: &GraphMeasure) -> Result<GraphPLFunction> {
    superpose(graph, mu, omega0)
}

fn check_problem(delta: &Polytope, nu: &DiscreteMeasure, opts: &SolverOptions) -> Result<()> {
    opts.validate()?;
    if nu.dim() != delta.dim() {
        return Err(Error::DimensionMismatch { expected: delta.dim(), found: nu.dim() });
    }
    delta.require_full_dimensional()?;
    if delta.dim() > 2 {
        return Err(Error::UnsupportedDimension(delta.dim()));
    }
    if nu.is_empty() {
        return Err(Error::Empty("target measure"));
    }
    let vol = delta.volume();
    let mass = nu.total_mass();
    if mass != vol {
        return Err(Error::MassMismatch { expected: Box::new(vol), found: Box::new(mass) });
    }
    Ok(())
}

/// Solves `MA_R(g) = nu` for `nu` of total mass `Vol(Delta)` (`n <= 2`).
pub fn solve_toric(delta: &Polytope, nu: &DiscreteMeasure, opts: &SolverOptions) -> Result<SolveReport> {
    check_problem(delta, nu, opts)?;
    let domain = Domain::exact(delta)?.to_f64();
    let sites: Vec<Vec<f64>> = nu.atoms().map(|(v, _)| v.to_f64()).collect();
    solve_toric_from(delta, nu, opts, &initial_weights(&domain, &sites))
}

/// Weights whose cells are the Voronoi cells of points placed inside
/// `Delta` in the same configuration as the atoms, so every cell starts
/// with positive volume.
fn initial_weights(domain: &Domain<f64>, sites: &[Vec<f64>]) -> Vec<f64> {
    let n = sites[0].len();
    let mean: Vec<f64> = (0..n).map(|k| sites.iter().map(|s| s[k]).sum::<f64>() / sites.len() as f64).collect();
    let (center, inradius) = match domain {
        Domain::Interval(a, b) => (vec![(a + b) / 2.0], (b - a) / 2.0),
        Domain::Polygon(ps) => {
            let c = [
                ps.iter().map(|p| p[0]).sum::<f64>() / ps.len() as f64,
                ps.iter().map(|p| p[1]).sum::<f64>() / ps.len() as f64,
            ];
            let r = (0..ps.len())
                .map(|k| {
                    let (p, q) = (ps[k], ps[(k + 1) % ps.len()]);
                    let e = [q[0] - p[0], q[1] - p[1]];
                    ((e[0] * (c[1] - p[1]) - e[1] * (c[0] - p[0])) / (e[0] * e[0] + e[1] * e[1]).sqrt()).abs()
                })
                .fold(f64::INFINITY, f64::min);
            (c.to_vec(), r)
        }
    };
    let spread = sites
        .iter()
        .map(|s| s.iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>().sqrt())
        .fold(0.0_f64, f64::max);
    let alpha = if spread == 0.0 { 1.0 } else { 0.5 * inradius / spread };
    sites
        .iter()
        .map(|s| {
            let norm2: f64 = (0..n)
                .map(|k| {
                    let x = center[k] + alpha * (s[k] - mean[k]);
                    x * x
                })
                .sum();
            norm2 / (2.0 * alpha)
        })
        .collect()
}

struct State {
    weights: Vec<f64>,
    cells: Vec<Cell<f64>>,
    objective: f64,
}

impl State {
    fn new(domain: &Domain<f64>, sites: &[Vec<f64>], nu: &[f64], weights: Vec<f64>) -> Self {
        let cells = laguerre_cells(domain, sites, &weights);
        let objective = -(0..sites.len())
            .map(|i| {
                let c = &cells[i];
                let integral: f64 =
                    c.moment.iter().zip(&sites[i]).map(|(m, v)| m * v).sum::<f64>() - weights[i] * c.volume;
                nu[i] * weights[i] + integral
            })
            .sum::<f64>();
        State { weights, cells, objective }
    }

    fn gradient(&self, nu: &[f64]) -> Vec<f64> {
        self.cells.iter().zip(nu).map(|(c, m)| c.volume - m).collect()
    }

    fn min_volume(&self) -> f64 {
        self.cells.iter().map(|c| c.volume).fold(f64::INFINITY, f64::min)
    }
}

fn newton_direction(cells: &[Cell<f64>], gradient: &[f64]) -> Option<Vec<f64>> {
    let m = cells.len();
    if m == 1 {
        return Some(vec![0.0]);
    }
    let mut h = vec![vec![0.0; m]; m];
    for (i, c) in cells.iter().enumerate() {
        for (j, a) in &c.facets {
            h[i][*j] += a;
            h[i][i] -= a;
        }
    }
    let reduced: Vec<Vec<f64>> = h[1..].iter().map(|row| row[1..].to_vec()).collect();
    let rhs: Vec<f64> = gradient[1..].iter().map(|g| -g).collect();
    let d = solve_f64(reduced, rhs)?;
    Some(std::iter::once(0.0).chain(d).collect())
}

/// Moves each weight (except the first) to balance its own cell, holding
/// the others fixed. Each move increases `J`, since `vol(Lag_i)` is
/// nonincreasing in `w_i`.
fn coordinate_sweep(domain: &Domain<f64>, sites: &[Vec<f64>], nu: &[f64], weights: &mut [f64]) {
    for i in 1..sites.len() {
        let vol = |w: &mut [f64], x: f64| {
            w[i] = x;
            cell(domain, sites, w, i).volume
        };
        let start = weights[i];
        let mut step = 1.0_f64.max(start.abs() * 1e-3);
        let (mut lo, mut hi);
        if vol(weights, start) > nu[i] {
            lo = start;
            hi = start + step;
            while vol(weights, hi) > nu[i] && step < 1e12 {
                lo = hi;
                step *= 2.0;
                hi += step;
            }
        } else {
            hi = start;
            lo = start - step;
            while vol(weights, lo) < nu[i] && step < 1e12 {
                hi = lo;
                step *= 2.0;
                lo -= step;
            }
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if vol(weights, mid) > nu[i] {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        weights[i] = 0.5 * (lo + hi);
    }
}

/// [`solve_toric`] from the given initial weights (one per atom of `nu`,
/// in atom order).
pub fn solve_toric_from(
    delta: &Polytope,
    nu: &DiscreteMeasure,
    opts: &SolverOptions,
    initial: &[f64],
) -> Result<SolveReport> {
    check_problem(delta, nu, opts)?;
    if initial.len() != nu.len() {
        return Err(Error::LengthMismatch { expected: nu.len(), found: initial.len() });
    }
    let exact_domain = Domain::exact(delta)?;
    let domain = exact_domain.to_f64();
    let atoms: Vec<Point> = nu.atoms().map(|(v, _)| v.clone()).collect();
    let masses: Vec<Rational> = nu.atoms().map(|(_, m)| m.clone()).collect();
    let sites: Vec<Vec<f64>> = atoms.iter().map(Point::to_f64).collect();
    let nu_f: Vec<f64> = masses.iter().map(to_f64).collect();
    let total = to_f64(&delta.volume());
    let target = opts.tolerance * total;

    let mut state = State::new(&domain, &sites, &nu_f, initial.to_vec());
    let min_mass = nu_f.iter().copied().fold(f64::INFINITY, f64::min);
    let floor = 0.5 * min_mass.min(state.min_volume());
    let mut history = vec![state.objective];
    let mut iterations = 0;
    let mut float_converged = false;
    let mut err = f64::INFINITY;
    while iterations < opts.max_iterations {
        let grad = state.gradient(&nu_f);
        err = grad.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        if opts.verbose {
            eprintln!("iter {iterations}: residual {err:.3e} objective {:.15e}", state.objective);
        }
        if err <= target {
            float_converged = true;
            break;
        }
        iterations += 1;
        let slack = 1e-13 * (1.0 + state.objective.abs());
        let mut next = None;
        if let Some(d) = newton_direction(&state.cells, &grad) {
            let mut tau = 1.0;
            while tau >= opts.min_step {
                let w: Vec<f64> = state.weights.iter().zip(&d).map(|(w, d)| w + tau * d).collect();
                let trial = State::new(&domain, &sites, &nu_f, w);
                if trial.min_volume() >= floor && trial.objective >= state.objective - slack {
                    next = Some(trial);
                    break;
                }
                tau *= 0.5;
            }
        }
        let next = next.unwrap_or_else(|| {
            let mut w = state.weights.clone();
            coordinate_sweep(&domain, &sites, &nu_f, &mut w);
            State::new(&domain, &sites, &nu_f, w)
        });
        history.push(next.objective);
        state = next;
    }
    if !float_converged {
        err = state.gradient(&nu_f).iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        float_converged = err <= target;
    }

    let exact_sites: Vec<Vec<Rational>> = atoms.iter().map(|p| p.coords().to_vec()).collect();
    let weights = polish(&exact_domain, &exact_sites, &masses, &state.weights);
    let samples: Vec<(Point, Rational)> = atoms.iter().cloned().zip(weights.iter().cloned()).collect();
    let solution = convex_envelope(&samples, delta)?;
    let residual = residual(&solution, nu, delta)?;
    let tol = from_f64(opts.tolerance).expect("finite tolerance") * delta.volume();
    let converged = float_converged && abs_max(residual.iter().map(|(_, r)| r)) <= tol;
    Ok(SolveReport {
        solution,
        weights: samples,
        residual,
        float_residual: err,
        iterations,
        converged,
        objective_history: history,
    })
}

fn exact_error(
    domain: &Domain<Rational>,
    sites: &[Vec<Rational>],
    masses: &[Rational],
    w: &[Rational],
) -> (Rational, Vec<Cell<Rational>>) {
    let cells = laguerre_cells(domain, sites, w);
    let err = cells.iter().zip(masses).map(|(c, m)| (&c.volume - m).abs()).max().unwrap_or_else(Rational::zero);
    (err, cells)
}

/// Rational weights near `w`: the first continued-fraction rounding that
/// balances every cell exactly, else the finest rounding followed by one
/// exact Newton step, whichever has the smaller exact error.
fn polish(domain: &Domain<Rational>, sites: &[Vec<Rational>], masses: &[Rational], w: &[f64]) -> Vec<Rational> {
    let mut best: Option<(Rational, Vec<Rational>, Vec<Cell<Rational>>)> = None;
    let mut tried = BTreeSet::new();
    for denom in [10u64, 100, 1_000, 10_000, 100_000, 1_000_000] {
        let snapped: Vec<Rational> =
            w.iter().map(|x| approximate(x - w[0], denom).unwrap_or_else(Rational::zero)).collect();
        if !tried.insert(snapped.clone()) {
            continue;
        }
        let (err, cells) = exact_error(domain, sites, masses, &snapped);
        if err.is_zero() {
            return snapped;
        }
        if best.as_ref().is_none_or(|(e, _, _)| &err <= e) {
            best = Some((err, snapped, cells));
        }
    }
    let (err, snapped, cells) = best.expect("at least one rounding");
    if let Some(stepped) = exact_newton_step(&cells, masses, &snapped) {
        let (err2, _) = exact_error(domain, sites, masses, &stepped);
        if err2 < err {
            return stepped;
        }
    }
    snapped
}

fn exact_newton_step(cells: &[Cell<Rational>], masses: &[Rational], w: &[Rational]) -> Option<Vec<Rational>> {
    let m = cells.len();
    if m == 1 {
        return None;
    }
    let mut h = vec![vec![Rational::zero(); m]; m];
    for (i, c) in cells.iter().enumerate() {
        for (j, a) in &c.facets {
            h[i][*j] += a;
            h[i][i] -= a;
        }
    }
    let reduced: Vec<Vec<Rational>> = h[1..].iter().map(|row| row[1..].to_vec()).collect();
    let rhs: Vec<Rational> = cells[1..].iter().zip(&masses[1..]).map(|(c, m)| m - &c.volume).collect();
    let d = solve(reduced, rhs)?;
    Some(std::iter::once(w[0].clone()).chain(w[1..].iter().zip(d).map(|(w, d)| w + d)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::toric_ma::point_mass_solution;

    fn pts(atoms: &[(&[i64], Rational)]) -> DiscreteMeasure {
        DiscreteMeasure::new(atoms[0].0.len(), atoms.iter().map(|(p, m)| (Point::from_ints(p), m.clone()))).unwrap()
    }

    fn same_up_to_constant(a: &PLConvexFunction, b: &PLConvexFunction) -> bool {
        let c = &a.pieces()[0].intercept - &b.pieces()[0].intercept;
        a == &b.add_constant(&-c)
    }

    #[test]
    fn point_mass_is_exact() {
        let delta = Polytope::standard_simplex(2);
        let nu = pts(&[(&[2, -1], rat(1, 2))]);
        let r = solve_toric(&delta, &nu, &SolverOptions::default()).unwrap();
        assert!(r.converged && r.is_exact());
        assert!(same_up_to_constant(&r.solution, &point_mass_solution(&delta, &Point::from_ints(&[2, -1])).unwrap()));
    }

    #[test]
    fn two_atoms_on_interval() {
        // Cumulative mass inversion: the cells are [0, 1/2] and [1/2, 1],
        // so g has slope 1/2 between the atoms.
        let delta = Polytope::unit_cube(1);
        let nu = pts(&[(&[0], rat(1, 2)), (&[1], rat(1, 2))]);
        let r = solve_toric(&delta, &nu, &SolverOptions::default()).unwrap();
        assert!(r.converged && r.is_exact());
        let expected = PLConvexFunction::from_pairs(
            1,
            vec![
                (Point::from_ints(&[0]), int(0)),
                (Point::new(vec![rat(1, 2)]), int(0)),
                (Point::from_ints(&[1]), rat(1, 2)),
            ],
        )
        .unwrap();
        assert!(same_up_to_constant(&r.solution, &expected));
    }

    #[test]
    fn simplex_vertices() {
        let delta = Polytope::standard_simplex(2);
        let nu = pts(&[(&[0, 0], rat(1, 6)), (&[1, 0], rat(1, 6)), (&[0, 1], rat(1, 6))]);
        let r = solve_toric(&delta, &nu, &SolverOptions::default()).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.float_residual <= 1e-10);
        // The cell boundaries meet at (a, a) with a^2 = 1/6, so no rational
        // weights balance the cells; the exact residual is tiny but nonzero.
        assert!(!r.is_exact());
        assert!(r.max_residual() <= rat(1, 10i64.pow(12)));
        for w in r.objective_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs()));
        }
    }

    #[test]
    fn residual_reports_both_sides() {
        let delta = Polytope::unit_cube(1);
        let g = point_mass_solution(&delta, &Point::from_ints(&[0])).unwrap();
        let nu = pts(&[(&[1], int(1))]);
        let r = residual(&g, &nu, &delta).unwrap();
        assert_eq!(r, vec![(Point::from_ints(&[0]), int(1)), (Point::from_ints(&[1]), int(-1))]);
    }

    #[test]
    fn rejects_bad_input() {
        let delta = Polytope::unit_cube(1);
        let nu = pts(&[(&[0], int(2))]);
        assert!(matches!(solve_toric(&delta, &nu, &SolverOptions::default()), Err(Error::MassMismatch { .. })));
        let cube = Polytope::unit_cube(3);
        let nu3 = pts(&[(&[0, 0, 0], int(1))]);
        assert!(matches!(solve_toric(&cube, &nu3, &SolverOptions::default()), Err(Error::UnsupportedDimension(3))));
        let opts = SolverOptions { tolerance: 0.0, ..SolverOptions::default() };
        assert!(solve_toric(&delta, &pts(&[(&[0], int(1))]), &opts).is_err());
    }
}
