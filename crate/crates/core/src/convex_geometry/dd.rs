//! Vertex enumeration for bounded H-polytopes by the double description
//! method, exact over rationals.
//!
//! Each vertex carries the full set of constraint indices tight at it.
//! Two vertices are adjacent iff their common tight constraints have rank
//! `dim - 1` (the algebraic adjacency test), which is valid under
//! degeneracy as long as tight sets are complete.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::linalg;
use crate::rational::Rational;

/// The half-space `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl HalfSpace {
    pub fn new(normal: Vec<Rational>, offset: Rational) -> Self {
        HalfSpace { normal, offset }
    }

    /// `offset - normal . x`: positive strictly inside, zero on the boundary.
    pub fn slack(&self, x: &[Rational]) -> Rational {
        let dot: Rational = self.normal.iter().zip(x).map(|(a, b)| a * b).sum();
        &self.offset - dot
    }
}

#[derive(Clone, Debug)]
pub(crate) struct DdVertex {
    pub point: Vec<Rational>,
    pub tight: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct DoubleDescription {
    dim: usize,
    constraints: Vec<HalfSpace>,
    vertices: Vec<DdVertex>,
}

impl DoubleDescription {
    /// Starts from a known bounded polytope given by both descriptions.
    /// `vertices` must be exactly the vertices of the intersection of
    /// `constraints`.
    pub fn new(dim: usize, constraints: Vec<HalfSpace>, vertices: Vec<Vec<Rational>>) -> Self {
        let vertices = vertices
            .into_iter()
            .map(|point| {
                let tight =
                    constraints.iter().enumerate().filter(|(_, h)| h.slack(&point).is_zero()).map(|(i, _)| i).collect();
                DdVertex { point, tight }
            })
            .collect();
        DoubleDescription { dim, constraints, vertices }
    }

    pub fn vertices(&self) -> &[DdVertex] {
        &self.vertices
    }

    fn adjacent(&self, a: &DdVertex, b: &DdVertex) -> bool {
        let common: Vec<usize> = a.tight.intersection(&b.tight).copied().collect();
        if common.len() + 1 < self.dim {
            return false;
        }
        let rows: Vec<Vec<Rational>> = common.iter().map(|&i| self.constraints[i].normal.clone()).collect();
        linalg::rank(&rows) + 1 == self.dim
    }

    pub fn add(&mut self, h: HalfSpace) {
        let idx = self.constraints.len();
        let slacks: Vec<Rational> = self.vertices.iter().map(|v| h.slack(&v.point)).collect();
        self.constraints.push(h);
        let mut kept = Vec::new();
        let mut new_vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !slacks[i].is_positive() {
                continue;
            }
            for (j, w) in self.vertices.iter().enumerate() {
                if !slacks[j].is_negative() || !self.adjacent(v, w) {
                    continue;
                }
                // Point on segment v -> w where the new constraint is tight.
                let lambda = &slacks[i] / (&slacks[i] - &slacks[j]);
                let point: Vec<Rational> = v.point.iter().zip(&w.point).map(|(a, b)| a + &lambda * (b - a)).collect();
                let mut tight: BTreeSet<usize> = v.tight.intersection(&w.tight).copied().collect();
                tight.insert(idx);
                new_vertices.push(DdVertex { point, tight });
            }
        }
        for (i, mut v) in std::mem::take(&mut self.vertices).into_iter().enumerate() {
            if slacks[i].is_negative() {
                continue;
            }
            if slacks[i].is_zero() {
                v.tight.insert(idx);
            }
            kept.push(v);
        }
        kept.extend(new_vertices);
        self.vertices = kept;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn square() -> DoubleDescription {
        let hs = vec![
            HalfSpace::new(vec![int(-1), int(0)], int(0)),
            HalfSpace::new(vec![int(1), int(0)], int(1)),
            HalfSpace::new(vec![int(0), int(-1)], int(0)),
            HalfSpace::new(vec![int(0), int(1)], int(1)),
        ];
        let vs = vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)], vec![int(1), int(1)]];
        DoubleDescription::new(2, hs, vs)
    }

    #[test]
    fn cut_square_by_diagonal() {
        let mut dd = square();
        dd.add(HalfSpace::new(vec![int(1), int(1)], int(1)));
        let mut pts: Vec<_> = dd.vertices().iter().map(|v| v.point.clone()).collect();
        pts.sort();
        assert_eq!(pts, vec![vec![int(0), int(0)], vec![int(0), int(1)], vec![int(1), int(0)]]);
    }

    #[test]
    fn cut_off_corner() {
        let mut dd = square();
        dd.add(HalfSpace::new(vec![int(1), int(1)], rat(3, 2)));
        assert_eq!(dd.vertices().len(), 5);
        dd.add(HalfSpace::new(vec![int(1), int(0)], int(-1)));
        assert!(dd.vertices().is_empty());
    }
}
