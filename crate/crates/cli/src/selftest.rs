//! Exact-zero properties on seeded instances, one line per property.

use plma::potential_curve::green;
use plma::rational::{factorial, int};
use plma::sample;
use plma::toric_ma::ma_measure;
use plma::variational::{orthogonality_defect, CurveContext, ToricContext, ToricPsi};

type Check = Result<String, String>;
type NamedCheck = (&'static str, fn() -> Check);

fn mass_identity() -> Check {
    let mut rng = sample::rng(1);
    let mut count = 0;
    for (name, delta) in sample::standard_polytopes() {
        for i in 0..10 {
            let g = sample::admissible(&mut rng, &delta, 3);
            let r = ma_measure(&g, &delta).map_err(|e| e.to_string())?;
            let vol = delta.volume();
            if r.measure_nr.total_mass() != vol || r.berkovich_mass() != factorial(delta.dim()) * &vol {
                return Err(format!("{name} #{i}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} functions"))
}

fn orthogonality() -> Check {
    let mut rng = sample::rng(4);
    for (name, delta) in sample::standard_polytopes() {
        let ctx = ToricContext::new(delta.clone()).map_err(|e| e.to_string())?;
        for i in 0..3 {
            let psi = ToricPsi::min(&sample::admissible(&mut rng, &delta, 3), &sample::admissible(&mut rng, &delta, 3))
                .map_err(|e| e.to_string())?;
            let d = orthogonality_defect(&ctx, &psi).map_err(|e| e.to_string())?;
            if d != int(0) {
                return Err(format!("toric {name} #{i}: defect {d}"));
            }
        }
    }
    for i in 0..15 {
        let graph = sample::graph(&mut rng, 6, 9);
        let omega0 = sample::reference_measure(&mut rng, &graph);
        let psi = sample::graph_function(&mut rng, &graph, 3);
        let ctx = CurveContext::new(graph, omega0).map_err(|e| e.to_string())?;
        let d = orthogonality_defect(&ctx, &psi).map_err(|e| e.to_string())?;
        if d != int(0) {
            return Err(format!("curve #{i}: defect {d}"));
        }
    }
    Ok("toric and curve envelopes, defect exactly 0".into())
}

fn green_symmetry() -> Check {
    let mut rng = sample::rng(6);
    for i in 0..15 {
        let graph = sample::graph(&mut rng, 8, 12);
        let omega0 = sample::reference_measure(&mut rng, &graph);
        let x = sample::graph_point(&mut rng, &graph);
        let y = sample::graph_point(&mut rng, &graph);
        let gx = green(&graph, &x, &omega0).map_err(|e| e.to_string())?;
        let gy = green(&graph, &y, &omega0).map_err(|e| e.to_string())?;
        if gx.eval(&graph, &y) != gy.eval(&graph, &x) {
            return Err(format!("#{i}: x = {x}, y = {y}"));
        }
    }
    Ok("15 pairs, g_x(y) = g_y(x) exactly".into())
}

/// Prints one line per property; true when all pass.
pub fn run() -> bool {
    let checks: [NamedCheck; 3] =
        [("mass identity", mass_identity), ("orthogonality", orthogonality), ("Green symmetry", green_symmetry)];
    let mut ok = true;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                ok = false;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    ok
}
