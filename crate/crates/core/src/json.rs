//! JSON encodings of the library's values.
//!
//! Every number is written as a rational string, `"p/q"` or `"p"`. On input,
//! decimal strings such as `"0.25"` and plain JSON numbers are also
//! accepted; both are read exactly from their decimal text. Points are
//! arrays of numbers. Graph vertices are referred to by their position in the
//! `"vertices"` list.
//!
//! ```
//! use plma::json::{self, PolytopeJson};
//!
//! let text = r#"{"vertices": [["0", "0"], ["1", "0"], ["0", "1"]]}"#;
//! let delta = json::from_str::<PolytopeJson>(text).unwrap().decode().unwrap();
//! assert_eq!(plma::rational::format(&delta.volume()), "1/2");
//! ```

use std::fmt;
use std::ops::Deref;

use serde::de::{self, DeserializeOwned, Deserializer, Visitor};
use serde::{Deserialize, Serialize};

use crate::convex_geometry::{AffineFunctional, DiscreteMeasure, PLConvexFunction, Point, Polytope};
use crate::error::{Error, Result};
use crate::ma_solver::SolveReport;
use crate::potential_curve::{Edge, GraphMeasure, GraphPLFunction, GraphPoint, MetricGraph};
use crate::rational::{format, parse, Rational};
use crate::toric_ma::ToricMAResult;
use crate::variational::ToricPsi;

/// A rational number: a string on output, a string or a JSON number on input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Num(pub String);

impl Deref for Num {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<&str> for Num {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

impl PartialEq<String> for Num {
    fn eq(&self, other: &String) -> bool {
        &self.0 == other
    }
}

impl From<String> for Num {
    fn from(s: String) -> Self {
        Num(s)
    }
}

impl From<&str> for Num {
    fn from(s: &str) -> Self {
        Num(s.to_string())
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational number as a string or a JSON number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
        Ok(Num(v.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
        Ok(Num(v.to_string()))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
        Ok(Num(v.to_string()))
    }

    // Display of f64 is the shortest decimal that round-trips, never in exponent form.
    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
        Ok(Num(v.to_string()))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Num, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

/// Parses `text`, reporting syntax and schema errors with their position.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let (line, column) = (e.line(), e.column());
        let message = e.to_string();
        let message = message.strip_suffix(&format!(" at line {line} column {column}")).unwrap_or(&message).to_string();
        Error::Json { line, column, message }
    })
}

/// Pretty-printed JSON followed by a newline.
pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn num(r: &Rational) -> Num {
    Num(format(r))
}

fn point_json(p: &Point) -> Vec<Num> {
    p.coords().iter().map(num).collect()
}

fn point_from(coords: &[Num]) -> Result<Point> {
    Ok(Point::new(coords.iter().map(|c| parse(c)).collect::<Result<_>>()?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeJson {
    pub vertices: Vec<Vec<Num>>,
}

impl PolytopeJson {
    pub fn encode(delta: &Polytope) -> Self {
        PolytopeJson { vertices: delta.vertices().iter().map(point_json).collect() }
    }

    pub fn decode(&self) -> Result<Polytope> {
        let points = self.vertices.iter().map(|v| point_from(v)).collect::<Result<Vec<_>>>()?;
        let dim = points.first().ok_or(Error::Empty("polytope vertices"))?.dim();
        Polytope::new(dim, points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceJson {
    pub slope: Vec<Num>,
    pub intercept: Num,
}

/// `max_k (<slope_k, v> - intercept_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PLFunctionJson {
    pub pieces: Vec<PieceJson>,
}

impl PLFunctionJson {
    pub fn encode(g: &PLConvexFunction) -> Self {
        PLFunctionJson {
            pieces: g
                .pieces()
                .iter()
                .map(|p| PieceJson { slope: point_json(&p.slope), intercept: num(&p.intercept) })
                .collect(),
        }
    }

    pub fn decode(&self) -> Result<PLConvexFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok(AffineFunctional::new(point_from(&p.slope)?, parse(&p.intercept)?)))
            .collect::<Result<Vec<_>>>()?;
        let dim = pieces.first().ok_or(Error::Empty("function pieces"))?.slope.dim();
        PLConvexFunction::new(dim, pieces)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiTermJson {
    pub coefficient: Num,
    pub function: PLFunctionJson,
}

/// `sum_k c_k g_k` with convex `g_k`; a bare function reads as one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PsiJson {
    Terms { terms: Vec<PsiTermJson> },
    Convex(PLFunctionJson),
}

impl PsiJson {
    pub fn encode(psi: &ToricPsi) -> Self {
        PsiJson::Terms {
            terms: psi
                .terms()
                .iter()
                .map(|(c, g)| PsiTermJson { coefficient: num(c), function: PLFunctionJson::encode(g) })
                .collect(),
        }
    }

    pub fn decode(&self) -> Result<ToricPsi> {
        match self {
            PsiJson::Convex(g) => Ok(ToricPsi::from_convex(&g.decode()?)),
            PsiJson::Terms { terms } => ToricPsi::new(
                terms.iter().map(|t| Ok((parse(&t.coefficient)?, t.function.decode()?))).collect::<Result<_>>()?,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub point: Vec<Num>,
    pub mass: Num,
}

/// A finite measure on `Q^n`; signed lists (residuals) use the same shape.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    pub atoms: Vec<AtomJson>,
}

impl MeasureJson {
    pub fn encode(mu: &DiscreteMeasure) -> Self {
        Self::encode_atoms(mu.atoms())
    }

    pub fn encode_atoms<'a>(atoms: impl IntoIterator<Item = (&'a Point, &'a Rational)>) -> Self {
        MeasureJson { atoms: atoms.into_iter().map(|(p, m)| AtomJson { point: point_json(p), mass: num(m) }).collect() }
    }

    pub fn decode_atoms(&self) -> Result<Vec<(Point, Rational)>> {
        self.atoms.iter().map(|a| Ok((point_from(&a.point)?, parse(&a.mass)?))).collect()
    }

    /// A positive measure on `Q^dim`.
    pub fn decode(&self, dim: usize) -> Result<DiscreteMeasure> {
        DiscreteMeasure::new(dim, self.decode_atoms()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricMAJson {
    pub ma_real: MeasureJson,
    pub ma_berkovich: MeasureJson,
    pub degree: Num,
}

impl ToricMAJson {
    pub fn encode(r: &ToricMAResult) -> Self {
        ToricMAJson {
            ma_real: MeasureJson::encode(&r.measure_nr),
            ma_berkovich: MeasureJson::encode_atoms(r.measure_an.iter().map(|(p, m)| (&p.0, m))),
            degree: num(&r.degree),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightJson {
    pub point: Vec<Num>,
    pub weight: Num,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveReportJson {
    pub solution: PLFunctionJson,
    pub weights: Vec<WeightJson>,
    /// `MA_R(solution) - nu`, exact.
    pub residual: MeasureJson,
    pub max_residual: Num,
    pub exact: bool,
    /// Decimal rendering of the last floating-point residual.
    pub float_residual: String,
    pub iterations: usize,
    pub converged: bool,
}

impl SolveReportJson {
    pub fn encode(r: &SolveReport) -> Self {
        SolveReportJson {
            solution: PLFunctionJson::encode(&r.solution),
            weights: r.weights.iter().map(|(p, w)| WeightJson { point: point_json(p), weight: num(w) }).collect(),
            residual: MeasureJson::encode_atoms(r.residual.iter().map(|(p, m)| (p, m))),
            max_residual: num(&r.max_residual()),
            exact: r.is_exact(),
            float_residual: format!("{:e}", r.float_residual),
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

/// Vertex ids may be written as strings or integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VertexId {
    Int(i64),
    Name(String),
}

impl VertexId {
    fn name(&self) -> String {
        match self {
            VertexId::Int(i) => i.to_string(),
            VertexId::Name(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeJson {
    pub ends: [usize; 2],
    pub length: Num,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeJson>,
}

impl GraphJson {
    pub fn encode(graph: &MetricGraph) -> Self {
        GraphJson {
            vertices: graph.vertex_ids().iter().map(|s| VertexId::Name(s.clone())).collect(),
            edges: graph.edges().iter().map(|e| EdgeJson { ends: e.ends, length: num(&e.length) }).collect(),
        }
    }

    pub fn decode(&self) -> Result<MetricGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| Ok(Edge { ends: e.ends, length: parse(&e.length)? }))
            .collect::<Result<Vec<_>>>()?;
        MetricGraph::with_ids(self.vertices.iter().map(VertexId::name).collect(), edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GraphPointJson {
    Edge { edge: usize, offset: Num },
    Vertex { vertex: usize },
}

impl GraphPointJson {
    pub fn encode(p: &GraphPoint) -> Self {
        match p {
            GraphPoint::Vertex(v) => GraphPointJson::Vertex { vertex: *v },
            GraphPoint::Edge { edge, offset } => GraphPointJson::Edge { edge: *edge, offset: num(offset) },
        }
    }

    /// Offsets `0` and the edge length become the end vertices.
    pub fn decode(&self, graph: &MetricGraph) -> Result<GraphPoint> {
        match self {
            GraphPointJson::Vertex { vertex } => graph.vertex(*vertex),
            GraphPointJson::Edge { edge, offset } => graph.point(*edge, parse(offset)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphAtomJson {
    pub point: GraphPointJson,
    pub mass: Num,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphMeasureJson {
    pub atoms: Vec<GraphAtomJson>,
}

impl GraphMeasureJson {
    pub fn encode(mu: &GraphMeasure) -> Self {
        GraphMeasureJson {
            atoms: mu.atoms().map(|(p, m)| GraphAtomJson { point: GraphPointJson::encode(p), mass: num(m) }).collect(),
        }
    }

    pub fn decode(&self, graph: &MetricGraph) -> Result<GraphMeasure> {
        self.atoms.iter().map(|a| Ok((a.point.decode(graph)?, parse(&a.mass)?))).collect()
    }
}

/// Per edge, the `[offset, value]` breakpoints from `0` to the length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFunctionJson {
    pub edges: Vec<Vec<[Num; 2]>>,
}

impl GraphFunctionJson {
    pub fn encode(f: &GraphPLFunction) -> Self {
        GraphFunctionJson {
            edges: f.edges().iter().map(|pts| pts.iter().map(|(t, y)| [num(t), num(y)]).collect()).collect(),
        }
    }

    pub fn decode(&self, graph: &MetricGraph) -> Result<GraphPLFunction> {
        let edges = self
            .edges
            .iter()
            .map(|pts| pts.iter().map(|[t, y]| Ok((parse(t)?, parse(y)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        GraphPLFunction::new(graph, edges)
    }
}
