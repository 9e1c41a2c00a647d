//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};
use rand::Rng;

use plma::convex_geometry::{DiscreteMeasure, PLConvexFunction, Point, Polytope};
use plma::ma_solver::{solve_toric, solve_toric_from, SolverOptions};
use plma::potential_curve::{
    arc_masses, canonical_metric, green, laplacian, ma_curve, solve_poisson, superpose, GraphMeasure,
};
use plma::rational::{factorial, int, rat, to_f64};
use plma::sample;
use plma::toric_ma::{ma_measure, point_mass_solution, real_ma};
use plma::variational::{
    default_t_grid, energy_of_envelope_derivative, energy_toric, orthogonality_defect, CurveContext, ToricContext,
    ToricPsi,
};
use plma::Rational;

type Outcome = Result<String, String>;
/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn toric_mass_identity() -> Outcome {
    let mut rng = sample::rng(1);
    for (name, delta) in sample::standard_polytopes() {
        let vol = delta.volume();
        let degree = factorial(delta.dim()) * &vol;
        for i in 0..50 {
            let g = sample::admissible(&mut rng, &delta, 6);
            let r = ma_measure(&g, &delta).map_err(|e| e.to_string())?;
            ensure(r.measure_nr.total_mass() == vol, || {
                format!("{name} #{i}: real mass {}", r.measure_nr.total_mass())
            })?;
            ensure(r.berkovich_mass() == degree && r.degree == degree, || format!("{name} #{i}: Berkovich mass"))?;
        }
    }
    Ok("200 functions, real mass = Vol, Berkovich mass = n! Vol".into())
}

fn point_mass_solutions() -> Outcome {
    let mut rng = sample::rng(2);
    for (name, delta) in sample::standard_polytopes() {
        for i in 0..20 {
            let v0 = sample::point(&mut rng, delta.dim(), 3, 7);
            let g = point_mass_solution(&delta, &v0).map_err(|e| e.to_string())?;
            let expected = DiscreteMeasure::dirac(v0.clone(), delta.volume()).unwrap();
            ensure(real_ma(&g, &delta).map_err(|e| e.to_string())? == expected, || format!("{name} #{i}: v0 = {v0}"))?;
        }
    }
    Ok("80 instances exact".into())
}

/// Oscillation of `a - b` over the vertices of their common refinement.
fn oscillation(a: &PLConvexFunction, b: &PLConvexFunction) -> f64 {
    let d = ToricPsi::difference(a, b).unwrap();
    let mut verts = d.refinement_vertices();
    verts.push(Point::zeros(a.dim()));
    let values: Vec<f64> = verts.iter().map(|v| to_f64(&d.eval(v))).collect();
    values.iter().copied().fold(f64::MIN, f64::max) - values.iter().copied().fold(f64::MAX, f64::min)
}

fn solver_round_trip() -> Outcome {
    let mut rng = sample::rng(3);
    let opts = SolverOptions::default();
    let mut exact_2d = 0;
    let mut worst_exact = Rational::zero();
    let mut worst_float = 0.0_f64;
    let mut worst_osc = 0.0_f64;
    let mut count_2d = 0;
    for (name, delta) in sample::standard_polytopes() {
        let vol = delta.volume();
        for i in 0..25 {
            let (g, nu) = loop {
                let g = sample::admissible(&mut rng, &delta, 6);
                let nu = real_ma(&g, &delta).unwrap();
                if nu.len() <= 12 {
                    break (g, nu);
                }
            };
            let r = solve_toric(&delta, &nu, &opts).map_err(|e| e.to_string())?;
            let rel = r.float_residual / to_f64(&vol);
            worst_float = worst_float.max(rel);
            ensure(r.converged && rel <= 1e-10, || format!("{name} #{i}: relative float residual {rel:e}"))?;
            let exact_rel = r.max_residual() / &vol;
            if exact_rel > worst_exact {
                worst_exact = exact_rel.clone();
            }
            if delta.dim() == 1 {
                ensure(r.is_exact(), || format!("{name} #{i}: 1-D residual {}", exact_rel))?;
            } else {
                count_2d += 1;
                exact_2d += usize::from(r.is_exact());
            }
            // Round trip: the input function is recovered up to a constant.
            let osc_input = oscillation(&r.solution, &g);
            ensure(osc_input <= 1e-9, || format!("{name} #{i}: differs from input by {osc_input:e}"))?;
            // Uniqueness: a second run from scrambled weights.
            let init: Vec<f64> = (0..nu.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r2 = solve_toric_from(&delta, &nu, &opts, &init).map_err(|e| e.to_string())?;
            ensure(r2.converged, || format!("{name} #{i}: second run did not converge"))?;
            let osc = oscillation(&r.solution, &r2.solution);
            worst_osc = worst_osc.max(osc);
            ensure(osc <= 1e-9, || format!("{name} #{i}: runs differ by oscillation {osc:e}"))?;
        }
    }
    Ok(format!(
        "100 instances; max float residual {worst_float:.1e}; exact polish residual max {:.1e} (1-D all zero, 2-D exact {exact_2d}/{count_2d}); uniqueness oscillation max {worst_osc:.1e}",
        to_f64(&worst_exact)
    ))
}

fn random_toric_psi(rng: &mut sample::SampleRng, delta: &Polytope) -> ToricPsi {
    let g = sample::admissible(rng, delta, 4);
    let a = sample::admissible(rng, delta, 4);
    let b = sample::admissible(rng, delta, 4);
    let t = sample::rational(rng, 0, 2, 4);
    ToricPsi::new(vec![(int(1), g), (t.clone(), a), (-t, b)]).unwrap()
}

fn orthogonality() -> Outcome {
    let mut rng = sample::rng(4);
    let polys = sample::standard_polytopes();
    for i in 0..50 {
        let (name, delta) = &polys[i % polys.len()];
        let ctx = ToricContext::new(delta.clone()).unwrap();
        let psi = random_toric_psi(&mut rng, delta);
        let d = orthogonality_defect(&ctx, &psi).map_err(|e| e.to_string())?;
        ensure(d.is_zero(), || format!("toric {name} #{i}: defect {d}"))?;
    }
    for i in 0..50 {
        let graph = sample::graph(&mut rng, 8, 12);
        let omega0 = sample::reference_measure(&mut rng, &graph);
        let ctx = CurveContext::new(graph.clone(), omega0).unwrap();
        let psi = sample::graph_function(&mut rng, &graph, 3);
        let d = orthogonality_defect(&ctx, &psi).map_err(|e| e.to_string())?;
        ensure(d.is_zero(), || format!("curve #{i}: defect {d}"))?;
    }
    Ok("50 toric + 50 curve instances, defect exactly 0".into())
}

fn differentiability() -> Outcome {
    let mut rng = sample::rng(5);
    let grid = default_t_grid();
    let polys = sample::standard_polytopes();
    let mut worst = 0.0_f64;
    let mut failures = Vec::new();
    for i in 0..20 {
        let d = if i % 2 == 0 {
            let (_, delta) = &polys[(i / 2) % polys.len()];
            let ctx = ToricContext::new(delta.clone()).unwrap();
            let phi = sample::admissible(&mut rng, delta, 4);
            let f =
                ToricPsi::difference(&sample::admissible(&mut rng, delta, 4), &sample::admissible(&mut rng, delta, 4))
                    .unwrap();
            energy_of_envelope_derivative(&ctx, &phi, &f, &grid)
        } else {
            let graph = sample::graph(&mut rng, 6, 8);
            let omega0 = sample::reference_measure(&mut rng, &graph);
            let mu = sample::graph_measure(&mut rng, &graph, 3, &omega0.total_mass());
            let phi = superpose(&graph, &mu, &omega0).unwrap();
            let f = sample::graph_function(&mut rng, &graph, 2);
            let ctx = CurveContext::new(graph, omega0).unwrap();
            energy_of_envelope_derivative(&ctx, &phi, &f, &grid)
        }
        .map_err(|e| e.to_string())?;
        let mut ratio = 0.0_f64;
        for (t, err) in d.errors() {
            if d.bound_constant.is_positive() {
                ratio = ratio.max(to_f64(&(&err / (&d.bound_constant * &t))));
            }
        }
        worst = worst.max(ratio);
        if !d.within_first_order_bound() {
            failures.push(format!("#{i} ({}) ratio {ratio:.3}", if i % 2 == 0 { "toric" } else { "curve" }));
        }
    }
    let summary = format!("20 instances (10 toric, 10 curve); max |FD - exact| / (C t) = {worst:.3}");
    ensure(failures.is_empty(), || format!("{summary}; over the bound: {}", failures.join(", ")))?;
    Ok(summary)
}

fn poisson_and_green() -> Outcome {
    let mut rng = sample::rng(6);
    for i in 0..50 {
        let graph = sample::graph(&mut rng, 8, 12);
        let rho = sample::balanced_graph_measure(&mut rng, &graph, 4);
        let p = sample::graph_point(&mut rng, &graph);
        let f = solve_poisson(&graph, &rho, &p).map_err(|e| e.to_string())?;
        ensure(laplacian(&f, &graph) == rho, || format!("Poisson #{i}"))?;
        ensure(f.eval(&graph, &p).is_zero(), || format!("Poisson #{i}: normalization"))?;
    }
    for i in 0..20 {
        let graph = sample::graph(&mut rng, 8, 12);
        let omega0 = sample::reference_measure(&mut rng, &graph);
        let x = sample::graph_point(&mut rng, &graph);
        let y = sample::graph_point(&mut rng, &graph);
        let gx = green(&graph, &x, &omega0).map_err(|e| e.to_string())?;
        let gy = green(&graph, &y, &omega0).map_err(|e| e.to_string())?;
        ensure(gx.eval(&graph, &y) == gy.eval(&graph, &x), || format!("Green #{i}: x = {x}, y = {y}"))?;
    }
    Ok("50 Poisson solves exact; 20 Green symmetry checks exact".into())
}

fn energy_cocycle() -> Outcome {
    let mut rng = sample::rng(7);
    let polys = sample::standard_polytopes();
    for i in 0..30 {
        let (name, delta) = &polys[i % polys.len()];
        let g = sample::admissible(&mut rng, delta, 4);
        let h = sample::admissible(&mut rng, delta, 4);
        let k = sample::admissible(&mut rng, delta, 4);
        let e = |a: &PLConvexFunction, b: &PLConvexFunction| energy_toric(a, b, delta).map_err(|e| e.to_string());
        let (gh, hg) = (e(&g, &h)?, e(&h, &g)?);
        ensure(gh == -hg.clone(), || format!("{name} #{i}: E(g,h) = {gh}, E(h,g) = {hg}"))?;
        ensure(e(&g, &k)? == e(&g, &h)? + e(&h, &k)?, || format!("{name} #{i}: chain rule"))?;
    }
    Ok("30 pairs: antisymmetric and additive, exact".into())
}

fn canonical_dynamics() -> Outcome {
    let c = canonical_metric(2, 6).map_err(|e| e.to_string())?;
    let target = rat(1, 64);
    let arcs = arc_masses(&c.measure, 64).map_err(|e| e.to_string())?;
    let worst = arcs.iter().map(|a| (a - &target).abs() / &target).max().unwrap();
    ensure(worst <= rat(5, 100), || format!("k = 6: worst relative arc error {worst}"))?;
    let mut discrepancies = Vec::new();
    for k in 1..=8 {
        let c = canonical_metric(2, k).map_err(|e| e.to_string())?;
        let arcs = arc_masses(&c.measure, 8).map_err(|e| e.to_string())?;
        discrepancies.push(arcs.iter().map(|a| (a - rat(1, 8)).abs()).max().unwrap());
    }
    ensure(discrepancies.windows(2).all(|w| w[1] <= w[0]), || format!("not monotone: {discrepancies:?}"))?;
    let shown: Vec<String> = discrepancies.iter().map(plma::rational::format).collect();
    Ok(format!("k = 6 worst relative arc error {worst}; 8-arc discrepancies k = 1..8: [{}]", shown.join(", ")))
}

fn linearity() -> Outcome {
    let mut rng = sample::rng(9);
    let delta = Polytope::unit_cube(1);
    let doubled = delta.dilate(&int(2));
    for i in 0..30 {
        let a = sample::admissible(&mut rng, &delta, 5);
        let b = sample::admissible(&mut rng, &delta, 5);
        let sum = a.add(&b).unwrap();
        let lhs = real_ma(&sum, &doubled).map_err(|e| e.to_string())?;
        let rhs = real_ma(&a, &delta).unwrap().add(&real_ma(&b, &delta).unwrap()).unwrap();
        ensure(lhs == rhs, || format!("toric #{i}"))?;
    }
    for i in 0..30 {
        let graph = sample::graph(&mut rng, 8, 12);
        let w1 = sample::reference_measure(&mut rng, &graph);
        let w2 = sample::reference_measure(&mut rng, &graph);
        let f1 = superpose(&graph, &sample::graph_measure(&mut rng, &graph, 3, &w1.total_mass()), &w1).unwrap();
        let f2 = superpose(&graph, &sample::graph_measure(&mut rng, &graph, 3, &w2.total_mass()), &w2).unwrap();
        let lhs = ma_curve(&f1.add(&f2), &graph, &w1.add(&w2)).map_err(|e| e.to_string())?;
        let rhs: GraphMeasure = ma_curve(&f1, &graph, &w1).unwrap().add(&ma_curve(&f2, &graph, &w2).unwrap());
        ensure(lhs == rhs, || format!("curve #{i}"))?;
        ensure(laplacian(&f1.add(&f2), &graph) == laplacian(&f1, &graph).add(&laplacian(&f2, &graph)), || {
            format!("curve laplacian #{i}")
        })?;
    }
    Ok("30 toric 1-D pairs and 30 curve pairs exact".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("toric mass identity", 10, toric_mass_identity),
        ("point-mass solution", 5, point_mass_solutions),
        ("solver round trip and uniqueness", 60, solver_round_trip),
        ("orthogonality", 30, orthogonality),
        ("differentiability of E o P", 30, differentiability),
        ("curve Poisson and Green symmetry", 10, poisson_and_green),
        ("energy cocycle", 10, energy_cocycle),
        ("canonical dynamics", 10, canonical_dynamics),
        ("linearity in dimension one", 5, linearity),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(msg)
            } else {
                Err(format!("{msg}; exceeded the {limit} s budget"))
            }
        });
        match outcome {
            Ok(msg) => println!("PASS criterion {}: {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({:.2} s): {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
