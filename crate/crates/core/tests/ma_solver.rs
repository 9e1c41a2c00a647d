use proptest::prelude::*;

use plma::convex_geometry::{breakpoints, DiscreteMeasure, Polytope};
use plma::ma_solver::{residual, solve_curve, solve_toric, SolverOptions};
use plma::rational::{factorial, int, rat, to_f64};
use plma::sample;
use plma::toric_ma::real_ma;
use plma::variational::{envelope_curve, envelope_toric, f_mu_curve, f_mu_toric, ToricContext, ToricPsi};

fn polytope(index: usize) -> Polytope {
    sample::standard_polytopes().swap_remove(index % 4).1
}

/// A target measure on `delta` of mass `Vol(delta)`, atoms inside `2 delta`.
fn target(rng: &mut sample::SampleRng, delta: &Polytope) -> DiscreteMeasure {
    let atoms = (0..3).map(|_| sample::point_in(rng, &delta.dilate(&int(2))));
    let weights = [1, 2, 3];
    let total = int(6);
    DiscreteMeasure::new(delta.dim(), atoms.zip(weights).map(|(v, w)| (v, delta.volume() * int(w) / &total))).unwrap()
}

#[test]
fn interval_round_trip_is_exact() {
    let delta = Polytope::unit_cube(1);
    let mut rng = sample::rng(31);
    for _ in 0..20 {
        let g = sample::admissible(&mut rng, &delta, 3);
        let nu = real_ma(&g, &delta).unwrap();
        let report = solve_toric(&delta, &nu, &SolverOptions::default()).unwrap();
        assert!(report.is_exact());
        // Same breakpoints and the same slope changes: g up to a constant.
        assert_eq!(breakpoints(&report.solution), breakpoints(&g));
        let diff: Vec<_> =
            breakpoints(&g).iter().map(|v| g.eval(v).unwrap() - report.solution.eval(v).unwrap()).collect();
        assert!(diff.windows(2).all(|w| w[0] == w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn toric_solution_maximizes_f_mu(seed in any::<u64>(), which in 0usize..4) {
        let delta = polytope(which);
        let mut rng = sample::rng(seed);
        let nu = target(&mut rng, &delta);
        let report = solve_toric(&delta, &nu, &SolverOptions::default()).unwrap();
        prop_assert!(report.converged);
        prop_assert!(to_f64(&report.max_residual()) <= 1e-9);
        prop_assert_eq!(residual(&report.solution, &nu, &delta).unwrap(), report.residual.clone());

        let ctx = ToricContext::new(delta.clone()).unwrap();
        let mu = nu.scale(&factorial(delta.dim())).unwrap();
        let f = |g: &_| to_f64(&f_mu_toric(g, &mu, &ctx.reference, &delta).unwrap());
        let best = f(&report.solution);
        let slack = if report.is_exact() { 0.0 } else { 1e-8 };
        // Dominance over arbitrary competitors.
        for _ in 0..3 {
            let g = sample::admissible(&mut rng, &delta, 3);
            prop_assert!(f(&g) <= best + slack, "competitor beats solution: {} > {}", f(&g), best);
        }
        // Criticality: moving along P(phi + t u) in either direction does not increase F_mu.
        let u = ToricPsi::difference(&sample::admissible(&mut rng, &delta, 2), &sample::admissible(&mut rng, &delta, 2)).unwrap();
        for t in [rat(1, 16), rat(-1, 16)] {
            let psi = ToricPsi::from_convex(&report.solution).add(&u.scale(&t));
            let moved = envelope_toric(&psi, &delta).unwrap();
            prop_assert!(f(&moved) <= best + slack);
        }
    }

    #[test]
    fn curve_solution_maximizes_f_mu(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let graph = sample::graph(&mut rng, 5, 7);
        let omega0 = sample::reference_measure(&mut rng, &graph);
        let mu = sample::graph_measure(&mut rng, &graph, 3, &int(1));
        let phi = solve_curve(&graph, &mu, &omega0).unwrap();
        let best = f_mu_curve(&phi, &mu, &graph, &omega0).unwrap();
        for t in [rat(1, 4), rat(-1, 4), rat(1, 32)] {
            let u = sample::graph_function(&mut rng, &graph, 2);
            let moved = envelope_curve(&phi.add(&u.scale(&t)), &graph, &omega0).unwrap();
            prop_assert!(f_mu_curve(&moved, &mu, &graph, &omega0).unwrap() <= best);
        }
    }
}
