use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use plma::convex_geometry::{breakpoints, DiscreteMeasure, Point, Polytope};
use plma::json::{
    self, GraphFunctionJson, GraphJson, GraphMeasureJson, GraphPointJson, MeasureJson, PLFunctionJson, PolytopeJson,
    PsiJson, SolveReportJson, ToricMAJson,
};
use plma::ma_solver::{solve_curve, solve_toric, SolverOptions};
use plma::potential_curve::{arc_masses, canonical_metric, green, ma_curve, GraphPLFunction, MetricGraph};
use plma::rational::{factorial, format, int, to_decimal};
use plma::toric_ma::ma_measure;
use plma::variational::{
    energy_toric, envelope_curve, envelope_toric, f_mu_toric, orthogonality_defect, CurveContext, ToricContext,
    ToricPsi,
};
use plma::{Error, Rational};

mod selftest;

/// Exact piecewise-linear Monge-Ampere computations.
///
/// Every input flag takes a path to a JSON file or the JSON text itself.
#[derive(Parser, Debug)]
#[command(name = "plma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real and Berkovich Monge-Ampere measures of an admissible function.
    ToricMa {
        #[arg(long)]
        delta: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        out: Output,
    },
    /// Solve MA(g) = mu on a toric model (dimension at most two).
    ToricSolve {
        #[arg(long)]
        delta: String,
        /// Total mass Vol(Delta), or (L^n) = n! Vol(Delta).
        #[arg(long)]
        mu: String,
        #[command(flatten)]
        solver: Solver,
        #[command(flatten)]
        out: Output,
    },
    /// Energy relative to the support function of Delta, and F_mu when
    /// --mu is given.
    ToricEnergy {
        #[arg(long)]
        delta: String,
        #[arg(long)]
        g: String,
        /// Total mass (L^n), or Vol(Delta).
        #[arg(long)]
        mu: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// The psh envelope P(psi): toric with --delta, on a curve with --graph.
    Envelope {
        #[command(flatten)]
        model: Model,
        /// psi: a convex function or {"terms": [...]} (toric), or a graph function.
        #[arg(long)]
        g: String,
        #[command(flatten)]
        out: Output,
    },
    /// The orthogonality defect integral (psi - P(psi)) dMA(P(psi)).
    Orthogonality {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        out: Output,
    },
    /// Solve MA(phi_0 + f) = mu on a metric graph.
    CurveSolve {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        omega0: String,
        #[command(flatten)]
        out: Output,
    },
    /// Green's function of a point on a metric graph.
    CurveGreen {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        omega0: String,
        #[command(flatten)]
        out: Output,
    },
    /// Iterates of the canonical metric on the circle skeleton.
    CurveCanonical {
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 6)]
        iterations: u32,
        #[command(flatten)]
        out: Output,
    },
    /// Exact-zero checks on generated instances.
    Selftest,
}

#[derive(Args, Debug)]
struct Model {
    #[arg(long, required_unless_present = "graph", conflicts_with_all = ["graph", "omega0"])]
    delta: Option<String>,
    #[arg(long, requires = "omega0")]
    graph: Option<String>,
    #[arg(long, requires = "graph")]
    omega0: Option<String>,
}

#[derive(Args, Debug)]
struct Solver {
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    position: Option<(usize, usize)>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Empty(_) => "empty",
            Error::DegeneratePolytope { .. } => "degenerate_polytope",
            Error::NotAdmissible(_) => "not_admissible",
            Error::MassMismatch { .. } => "mass_mismatch",
            Error::MassBalance(_) => "mass_balance",
            Error::NegativeMass(_) => "negative_mass",
            Error::Disconnected => "disconnected",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::InvalidFunction(_) => "invalid_function",
            Error::InvalidPoint(_) => "invalid_point",
            Error::NotSubharmonic => "not_subharmonic",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NotConverged(_) => "not_converged",
            Error::Parse(_) => "parse",
            Error::Json { .. } => "malformed_json",
        };
        let position = match &e {
            Error::Json { line, column, .. } => Some((*line, *column)),
            _ => None,
        };
        let code = if matches!(e, Error::NotConverged(_)) { 3 } else { 2 };
        Failure { code, kind, message: e.to_string(), position }
    }
}

type Run<T = ()> = Result<T, Failure>;

fn load<T: serde::de::DeserializeOwned>(arg: &str) -> Run<T> {
    let text = if arg.trim_start().starts_with(['{', '[']) {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| Failure {
            code: 2,
            kind: "io",
            message: format!("cannot read {arg}: {e}"),
            position: None,
        })?
    };
    Ok(json::from_str(&text)?)
}

fn emit(out: &Output, text: String) -> Run {
    match &out.output {
        Some(path) => write_file(path, &text),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure {
            code: 1,
            kind: "io",
            message: e.to_string(),
            position: None,
        }),
    }
}

fn write_file(path: &Path, text: &str) -> Run {
    fs::write(path, text).map_err(|e| Failure {
        code: 1,
        kind: "io",
        message: format!("cannot write {}: {e}", path.display()),
        position: None,
    })
}

fn emit_json<T: Serialize>(out: &Output, value: &T) -> Run {
    emit(out, json::to_string(value))
}

fn csv(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

fn coordinate_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("v{k}")).collect()
}

fn decimal_and_exact(r: &Rational) -> [String; 2] {
    [to_decimal(r), format(r)]
}

/// Rescales `mu` to total mass `target` when its mass is `target / n!` or
/// `target * n!`, the two normalizations in use.
fn normalize(mu: DiscreteMeasure, delta: &Polytope, target: &Rational) -> Run<DiscreteMeasure> {
    let found = mu.total_mass();
    if &found == target {
        return Ok(mu);
    }
    let nf = factorial(delta.dim());
    for k in [nf.clone(), nf.recip()] {
        if &(&found * &k) == target {
            return Ok(mu.scale(&k)?);
        }
    }
    Err(Error::MassMismatch { expected: Box::new(target.clone()), found: Box::new(found) }.into())
}

fn load_graph_model(graph: &str, omega0: &str) -> Run<(MetricGraph, plma::potential_curve::GraphMeasure)> {
    let graph = load::<GraphJson>(graph)?.decode()?;
    let omega0 = load::<GraphMeasureJson>(omega0)?.decode(&graph)?;
    CurveContext::new(graph.clone(), omega0.clone())?;
    Ok((graph, omega0))
}

fn toric_ma(delta: &str, g: &str, out: &Output) -> Run {
    let delta = load::<PolytopeJson>(delta)?.decode()?;
    let g = load::<PLFunctionJson>(g)?.decode()?;
    let r = ma_measure(&g, &delta)?;
    match out.format {
        Format::Json => emit_json(out, &ToricMAJson::encode(&r)),
        Format::Csv => {
            let mut header = coordinate_header(delta.dim());
            header.extend(["ma_real", "ma_berkovich", "ma_real_exact", "ma_berkovich_exact"].map(String::from));
            let rows = r.measure_nr.atoms().zip(&r.measure_an).map(|((v, m), (_, b))| {
                let mut row: Vec<String> = v.coords().iter().map(to_decimal).collect();
                row.extend([to_decimal(m), to_decimal(b), format(m), format(b)]);
                row
            });
            emit(out, csv(&header, rows))
        }
    }
}

fn toric_solve(delta: &str, mu: &str, solver: &Solver, out: &Output) -> Run {
    let delta = load::<PolytopeJson>(delta)?.decode()?;
    let mu = normalize(load::<MeasureJson>(mu)?.decode(delta.dim())?, &delta, &delta.volume())?;
    let mut opts = SolverOptions::default();
    if let Some(tol) = solver.tol {
        opts.tolerance = tol;
    }
    if let Some(max_iter) = solver.max_iter {
        opts.max_iterations = max_iter;
    }
    let report = solve_toric(&delta, &mu, &opts)?;
    match out.format {
        Format::Json => emit_json(out, &SolveReportJson::encode(&report))?,
        Format::Csv => {
            let mut header = coordinate_header(delta.dim());
            header.extend(["target", "achieved", "residual", "residual_exact"].map(String::from));
            let rows = report.residual.iter().map(|(v, r)| {
                let target = mu.mass_at(v);
                let mut row: Vec<String> = v.coords().iter().map(to_decimal).collect();
                row.extend([to_decimal(&target), to_decimal(&(&target + r)), to_decimal(r), format(r)]);
                row
            });
            emit(out, csv(&header, rows))?;
        }
    }
    if report.converged {
        Ok(())
    } else {
        Err(Error::NotConverged(format!(
            "floating-point residual {:e} after {} iterations",
            report.float_residual, report.iterations
        ))
        .into())
    }
}

#[derive(Serialize)]
struct EnergyJson {
    energy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_mu: Option<String>,
}

fn toric_energy(delta: &str, g: &str, mu: Option<&str>, out: &Output) -> Run {
    let delta = load::<PolytopeJson>(delta)?.decode()?;
    let g = load::<PLFunctionJson>(g)?.decode()?;
    let ctx = ToricContext::new(delta.clone())?;
    let energy = energy_toric(&g, &ctx.reference, &delta)?;
    let f_mu = match mu {
        Some(mu) => {
            let degree = factorial(delta.dim()) * delta.volume();
            let mu = normalize(load::<MeasureJson>(mu)?.decode(delta.dim())?, &delta, &degree)?;
            Some(f_mu_toric(&g, &mu, &ctx.reference, &delta)?)
        }
        None => None,
    };
    match out.format {
        Format::Json => emit_json(out, &EnergyJson { energy: format(&energy), f_mu: f_mu.as_ref().map(format) }),
        Format::Csv => {
            let mut rows = vec![["energy".to_string()].into_iter().chain(decimal_and_exact(&energy)).collect()];
            if let Some(f) = &f_mu {
                rows.push(["f_mu".to_string()].into_iter().chain(decimal_and_exact(f)).collect());
            }
            emit(out, csv(&["quantity", "value", "exact"].map(String::from), rows))
        }
    }
}

/// Abscissae for a 1-D plot: every breakpoint plus 64 uniform points on a
/// window one unit wider than the breakpoints on each side.
fn plot_grid(mut breaks: Vec<Rational>) -> Vec<Rational> {
    let lo = breaks.iter().min().cloned().unwrap_or_else(|| int(0)) - int(1);
    let hi = breaks.iter().max().cloned().unwrap_or_else(|| int(0)) + int(1);
    let steps = int(63);
    breaks.extend((0..64).map(|k| &lo + (&hi - &lo) * int(k) / &steps));
    breaks.sort();
    breaks.dedup();
    breaks
}

/// Per edge: breakpoints of both functions plus 64 uniform points.
fn graph_plot_rows(graph: &MetricGraph, f: &GraphPLFunction, g: &GraphPLFunction) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (k, edge) in graph.edges().iter().enumerate() {
        let mut ts: Vec<Rational> =
            f.edge_breakpoints(k).iter().chain(g.edge_breakpoints(k)).map(|(t, _)| t.clone()).collect();
        ts.extend((0..64).map(|j| &edge.length * int(j) / int(63)));
        ts.sort();
        ts.dedup();
        for t in ts {
            rows.push(vec![
                k.to_string(),
                to_decimal(&t),
                to_decimal(&f.eval_on_edge(k, &t)),
                to_decimal(&g.eval_on_edge(k, &t)),
            ]);
        }
    }
    rows
}

fn envelope(model: &Model, psi: &str, out: &Output) -> Run {
    if let Some(delta) = &model.delta {
        let delta = load::<PolytopeJson>(delta)?.decode()?;
        let psi: ToricPsi = load::<PsiJson>(psi)?.decode()?;
        let p = envelope_toric(&psi, &delta)?;
        match out.format {
            Format::Json => emit_json(out, &PLFunctionJson::encode(&p)),
            Format::Csv => {
                if delta.dim() != 1 {
                    return Err(Error::UnsupportedDimension(delta.dim()).into());
                }
                let breaks =
                    psi.refinement_vertices().into_iter().chain(breakpoints(&p)).map(|v| v[0].clone()).collect();
                let rows = plot_grid(breaks)
                    .into_iter()
                    .map(|v| {
                        let pt = Point::new(vec![v.clone()]);
                        Ok(vec![to_decimal(&v), to_decimal(&psi.eval(&pt)), to_decimal(&p.eval(&pt)?)])
                    })
                    .collect::<Run<Vec<_>>>()?;
                emit(out, csv(&["v", "psi", "envelope"].map(String::from), rows))
            }
        }
    } else {
        let (graph, omega0) = load_graph_model(model.graph.as_deref().unwrap(), model.omega0.as_deref().unwrap())?;
        let psi = load::<GraphFunctionJson>(psi)?.decode(&graph)?;
        let p = envelope_curve(&psi, &graph, &omega0)?;
        match out.format {
            Format::Json => emit_json(out, &GraphFunctionJson::encode(&p)),
            Format::Csv => emit(
                out,
                csv(&["edge", "offset", "psi", "envelope"].map(String::from), graph_plot_rows(&graph, &psi, &p)),
            ),
        }
    }
}

fn orthogonality(model: &Model, psi: &str, out: &Output) -> Run {
    let defect = if let Some(delta) = &model.delta {
        let ctx = ToricContext::new(load::<PolytopeJson>(delta)?.decode()?)?;
        let psi = load::<PsiJson>(psi)?.decode()?;
        orthogonality_defect(&ctx, &psi)?
    } else {
        let (graph, omega0) = load_graph_model(model.graph.as_deref().unwrap(), model.omega0.as_deref().unwrap())?;
        let psi = load::<GraphFunctionJson>(psi)?.decode(&graph)?;
        orthogonality_defect(&CurveContext::new(graph, omega0)?, &psi)?
    };
    match out.format {
        Format::Json => emit_json(out, &json!({ "defect": format(&defect) })),
        Format::Csv => {
            let row = ["defect".to_string()].into_iter().chain(decimal_and_exact(&defect)).collect();
            emit(out, csv(&["quantity", "value", "exact"].map(String::from), [row]))
        }
    }
}

fn emit_graph_function(out: &Output, graph: &MetricGraph, f: &GraphPLFunction) -> Run {
    match out.format {
        Format::Json => emit_json(out, &GraphFunctionJson::encode(f)),
        Format::Csv => {
            let rows = (0..graph.edges().len()).flat_map(|k| {
                f.edge_breakpoints(k)
                    .iter()
                    .map(move |(t, y)| vec![k.to_string(), to_decimal(t), to_decimal(y), format(t), format(y)])
            });
            emit(out, csv(&["edge", "offset", "value", "offset_exact", "value_exact"].map(String::from), rows))
        }
    }
}

fn curve_solve(graph: &str, mu: &str, omega0: &str, out: &Output) -> Run {
    let (graph, omega0) = load_graph_model(graph, omega0)?;
    let mu = load::<GraphMeasureJson>(mu)?.decode(&graph)?;
    let f = solve_curve(&graph, &mu, &omega0)?;
    debug_assert_eq!(ma_curve(&f, &graph, &omega0)?, mu);
    emit_graph_function(out, &graph, &f)
}

fn curve_green(graph: &str, x: &str, omega0: &str, out: &Output) -> Run {
    let (graph, omega0) = load_graph_model(graph, omega0)?;
    let x = load::<GraphPointJson>(x)?.decode(&graph)?;
    emit_graph_function(out, &graph, &green(&graph, &x, &omega0)?)
}

fn curve_canonical(m: u32, iterations: u32, out: &Output) -> Run {
    let c = canonical_metric(m, iterations)?;
    match out.format {
        Format::Json => emit_json(
            out,
            &json!({
                "m": m,
                "iterations": iterations,
                "graph": GraphJson::encode(&c.graph),
                "omega0": GraphMeasureJson::encode(&c.omega0),
                "potential": GraphFunctionJson::encode(&c.potential),
                "measure": GraphMeasureJson::encode(&c.measure),
            }),
        ),
        Format::Csv => {
            let arcs = u32::try_from(u64::from(m).pow(iterations))
                .ok()
                .filter(|&n| n <= 1 << 20)
                .ok_or_else(|| Error::InvalidArgument(format!("{m}^{iterations} arcs is too many for CSV")))?;
            let n = Rational::from_integer(arcs.into());
            let rows = arc_masses(&c.measure, arcs as usize)?.into_iter().enumerate().map(|(j, mass)| {
                let j = Rational::from_integer(j.into());
                vec![to_decimal(&(&j / &n)), to_decimal(&((&j + int(1)) / &n)), to_decimal(&mass), format(&mass)]
            });
            emit(out, csv(&["arc_start", "arc_end", "mass", "mass_exact"].map(String::from), rows))
        }
    }
}

fn run(cli: Cli) -> Run {
    match &cli.command {
        Command::ToricMa { delta, g, out } => toric_ma(delta, g, out),
        Command::ToricSolve { delta, mu, solver, out } => toric_solve(delta, mu, solver, out),
        Command::ToricEnergy { delta, g, mu, out } => toric_energy(delta, g, mu.as_deref(), out),
        Command::Envelope { model, g, out } => envelope(model, g, out),
        Command::Orthogonality { model, g, out } => orthogonality(model, g, out),
        Command::CurveSolve { graph, mu, omega0, out } => curve_solve(graph, mu, omega0, out),
        Command::CurveGreen { graph, x, omega0, out } => curve_green(graph, x, omega0, out),
        Command::CurveCanonical { m, iterations, out } => curve_canonical(*m, *iterations, out),
        Command::Selftest => {
            if selftest::run() {
                Ok(())
            } else {
                Err(Failure { code: 1, kind: "selftest", message: "a property failed".into(), position: None })
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut error = json!({ "kind": f.kind, "message": f.message });
            if let Some((line, column)) = f.position {
                error["line"] = json!(line);
                error["column"] = json!(column);
            }
            eprintln!("{}", json!({ "error": error }));
            ExitCode::from(f.code)
        }
    }
}
