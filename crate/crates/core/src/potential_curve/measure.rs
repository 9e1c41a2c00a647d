use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::function::GraphPLFunction;
use super::graph::{GraphPoint, MetricGraph};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite signed atomic measure on a metric graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphMeasure {
    atoms: BTreeMap<GraphPoint, Rational>,
}

impl GraphMeasure {
    /// Merges repeated locations and drops zero masses.
    pub fn new(atoms: impl IntoIterator<Item = (GraphPoint, Rational)>) -> Self {
        let mut map: BTreeMap<GraphPoint, Rational> = BTreeMap::new();
        for (p, m) in atoms {
            *map.entry(p).or_insert_with(Rational::zero) += m;
        }
        map.retain(|_, m| !m.is_zero());
        GraphMeasure { atoms: map }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn dirac(p: GraphPoint, mass: Rational) -> Self {
        Self::new([(p, mass)])
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&GraphPoint, &Rational)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &GraphPoint> {
        self.atoms.keys()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.atoms.values().sum()
    }

    pub fn mass_at(&self, p: &GraphPoint) -> Rational {
        self.atoms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_positive(&self) -> bool {
        self.atoms.values().all(|m| !m.is_negative())
    }

    pub fn check_positive(&self) -> Result<()> {
        match self.atoms.values().find(|m| m.is_negative()) {
            Some(m) => Err(Error::NegativeMass(Box::new(m.clone()))),
            None => Ok(()),
        }
    }

    pub fn check_points(&self, graph: &MetricGraph) -> Result<()> {
        self.atoms.keys().try_for_each(|p| graph.check_point(p))
    }

    pub fn add(&self, other: &GraphMeasure) -> GraphMeasure {
        Self::new(self.atoms().chain(other.atoms()).map(|(p, m)| (p.clone(), m.clone())))
    }

    pub fn sub(&self, other: &GraphMeasure) -> GraphMeasure {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, k: &Rational) -> GraphMeasure {
        Self::new(self.atoms().map(|(p, m)| (p.clone(), m * k)))
    }

    /// `sum_p mass(p) f(p)`.
    pub fn integrate(&self, f: &GraphPLFunction, graph: &MetricGraph) -> Rational {
        self.atoms().map(|(p, m)| m * f.eval(graph, p)).sum()
    }
}

impl FromIterator<(GraphPoint, Rational)> for GraphMeasure {
    fn from_iter<I: IntoIterator<Item = (GraphPoint, Rational)>>(iter: I) -> Self {
        Self::new(iter)
    }
}
