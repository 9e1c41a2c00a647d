use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::Point;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite positive measure `sum_i m_i delta_{p_i}` on `Q^n`.
///
/// Zero atoms are dropped and repeated locations merged, so atoms are
/// always strictly positive and listed in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: BTreeMap<Point, Rational>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, atoms: impl IntoIterator<Item = (Point, Rational)>) -> Result<Self> {
        let mut acc: BTreeMap<Point, Rational> = BTreeMap::new();
        for (p, m) in atoms {
            p.check_dim(dim)?;
            if m.is_negative() {
                return Err(Error::NegativeMass(Box::new(m)));
            }
            *acc.entry(p).or_insert_with(Rational::zero) += m;
        }
        acc.retain(|_, m| !m.is_zero());
        Ok(DiscreteMeasure { dim, atoms: acc })
    }

    pub fn zero(dim: usize) -> Self {
        DiscreteMeasure { dim, atoms: BTreeMap::new() }
    }

    pub fn dirac(point: Point, mass: Rational) -> Result<Self> {
        let dim = point.dim();
        Self::new(dim, [(point, mass)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Point, &Rational)> {
        self.atoms.iter()
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

    pub fn mass_at(&self, p: &Point) -> Rational {
        self.atoms.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, k: &Rational) -> Result<Self> {
        Self::new(self.dim, self.atoms.iter().map(|(p, m)| (p.clone(), m * k)))
    }

    pub fn add(&self, other: &DiscreteMeasure) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Self::new(self.dim, self.atoms.iter().chain(&other.atoms).map(|(p, m)| (p.clone(), m.clone())))
    }

    /// Pushforward under `v -> v + t`.
    pub fn translate(&self, t: &Point) -> Self {
        DiscreteMeasure { dim: self.dim, atoms: self.atoms.iter().map(|(p, m)| (p.add(t), m.clone())).collect() }
    }

    /// `int f d(self)` for a function known exactly at the atoms.
    pub fn integrate(&self, mut f: impl FnMut(&Point) -> Rational) -> Rational {
        self.atoms.iter().map(|(p, m)| m * f(p)).sum()
    }

    /// `self - other` atom by atom over the union of supports, zeros kept.
    pub fn signed_difference(&self, other: &DiscreteMeasure) -> Vec<(Point, Rational)> {
        let mut acc: BTreeMap<Point, Rational> = self.atoms.clone();
        for (p, m) in &other.atoms {
            *acc.entry(p.clone()).or_insert_with(Rational::zero) -= m;
        }
        acc.into_iter().collect()
    }
}
