use std::cmp::Ordering;
use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::dd::HalfSpace;
use super::Point;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp;
use crate::rational::{factorial, Rational};

/// A rational polytope in V-representation.
///
/// The vertex list is exactly the set of extreme points, deduplicated and
/// sorted lexicographically, so two polytopes are equal iff their
/// structures are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
}

impl Polytope {
    /// Convex hull of `points` in ambient dimension `dim`.
    pub fn new(dim: usize, points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("polytope needs at least one point"));
        }
        for p in &points {
            p.check_dim(dim)?;
        }
        let unique: Vec<Point> = points.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let vertices = extreme_points(unique);
        Ok(Polytope { dim, vertices })
    }

    /// Wraps points already known to be the sorted extreme points.
    pub(crate) fn from_extreme_points(dim: usize, mut vertices: Vec<Point>) -> Self {
        vertices.sort();
        vertices.dedup();
        Polytope { dim, vertices }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        let base = &self.vertices[0];
        let rows: Vec<Vec<Rational>> = self.vertices[1..].iter().map(|v| v.sub(base).into_coords()).collect();
        if rows.is_empty() {
            0
        } else {
            linalg::rank(&rows)
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim() == self.dim
    }

    pub fn require_full_dimensional(&self) -> Result<()> {
        let affine_dim = self.affine_dim();
        if affine_dim == self.dim {
            Ok(())
        } else {
            Err(Error::DegeneratePolytope { dim: self.dim, affine_dim })
        }
    }

    /// Exact `n`-dimensional Lebesgue volume; zero for lower-dimensional
    /// polytopes.
    pub fn volume(&self) -> Rational {
        if self.dim == 0 {
            return Rational::one();
        }
        if !self.is_full_dimensional() {
            return Rational::zero();
        }
        match self.dim {
            1 => &self.vertices[self.vertices.len() - 1][0] - &self.vertices[0][0],
            2 => {
                let ring = ccw_hull(&self.vertices);
                let twice: Rational = (0..ring.len()).map(|i| cross2(&ring[i], &ring[(i + 1) % ring.len()])).sum();
                twice / Rational::from_integer(2.into())
            }
            n => {
                let pts: Vec<Vec<Rational>> = self.vertices.iter().map(|v| v.coords().to_vec()).collect();
                let total: Rational = triangulate(&pts)
                    .into_iter()
                    .map(|simplex| {
                        let apex = &pts[simplex[0]];
                        let rows = simplex[1..]
                            .iter()
                            .map(|&k| pts[k].iter().zip(apex).map(|(a, b)| a - b).collect())
                            .collect();
                        linalg::det(rows).abs()
                    })
                    .sum();
                total / factorial(n)
            }
        }
    }

    /// Exact membership test.
    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dim {
            return false;
        }
        if self.vertices.len() == 1 {
            return &self.vertices[0] == p;
        }
        convex_combination_exists(&self.vertices, p)
    }

    /// Facet inequalities `normal . u <= offset` of a full-dimensional
    /// polytope.
    pub fn facets(&self) -> Result<Vec<HalfSpace>> {
        self.require_full_dimensional()?;
        Ok(match self.dim {
            0 => Vec::new(),
            1 => {
                let lo = self.vertices[0][0].clone();
                let hi = self.vertices[self.vertices.len() - 1][0].clone();
                vec![HalfSpace::new(vec![-Rational::one()], -lo), HalfSpace::new(vec![Rational::one()], hi)]
            }
            2 => {
                let ring = ccw_hull(&self.vertices);
                (0..ring.len())
                    .map(|i| {
                        let p = &ring[i];
                        let q = &ring[(i + 1) % ring.len()];
                        let normal = vec![&q[1] - &p[1], &p[0] - &q[0]];
                        let offset = &normal[0] * &p[0] + &normal[1] * &p[1];
                        HalfSpace::new(normal, offset)
                    })
                    .collect()
            }
            _ => {
                let pts: Vec<Vec<Rational>> = self.vertices.iter().map(|v| v.coords().to_vec()).collect();
                facets_of_points(&pts).into_iter().map(|f| f.halfspace).collect()
            }
        })
    }

    /// Vertices in counter-clockwise order (dimension 2 only).
    pub fn ccw_vertices(&self) -> Result<Vec<Point>> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        Ok(ccw_hull(&self.vertices))
    }

    pub fn translate(&self, t: &Point) -> Polytope {
        Polytope::from_extreme_points(self.dim, self.vertices.iter().map(|v| v.add(t)).collect())
    }

    /// The dilate `k * self` for `k >= 0`.
    pub fn dilate(&self, k: &Rational) -> Polytope {
        if k.is_zero() {
            return Polytope::from_extreme_points(self.dim, vec![Point::zeros(self.dim)]);
        }
        Polytope::from_extreme_points(self.dim, self.vertices.iter().map(|v| v.scale(k)).collect())
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let sums = self.vertices.iter().cartesian_product(&other.vertices).map(|(a, b)| a.add(b)).collect();
        Polytope::new(self.dim, sums)
    }

    pub fn centroid_of_vertices(&self) -> Point {
        let k = Rational::from_integer((self.vertices.len() as i64).into());
        let mut acc = Point::zeros(self.dim);
        for v in &self.vertices {
            acc = acc.add(v);
        }
        acc.scale(&k.recip())
    }

    /// Standard simplex `conv{0, e_1, ..., e_n}`.
    pub fn standard_simplex(n: usize) -> Polytope {
        let mut pts = vec![Point::zeros(n)];
        for i in 0..n {
            let mut c = vec![Rational::zero(); n];
            c[i] = Rational::one();
            pts.push(Point::new(c));
        }
        Polytope::from_extreme_points(n, pts)
    }

    /// Unit cube `[0, 1]^n`.
    pub fn unit_cube(n: usize) -> Polytope {
        let pts = (0..1usize << n)
            .map(|mask| {
                Point::new(
                    (0..n).map(|i| if mask >> i & 1 == 1 { Rational::one() } else { Rational::zero() }).collect(),
                )
            })
            .collect();
        Polytope::from_extreme_points(n, pts)
    }
}

fn convex_combination_exists(points: &[Point], target: &Point) -> bool {
    let n = target.dim();
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for i in 0..n {
        a.push(points.iter().map(|p| p[i].clone()).collect());
        b.push(target[i].clone());
    }
    a.push(vec![Rational::one(); points.len()]);
    b.push(Rational::one());
    lp::feasible(&a, &b)
}

fn extreme_points(unique: Vec<Point>) -> Vec<Point> {
    if unique.len() <= 2 {
        return unique;
    }
    if unique[0].dim() == 2 {
        let mut ring = ccw_hull(&unique);
        ring.sort();
        return ring;
    }
    (0..unique.len())
        .filter(|&i| {
            let others: Vec<Point> =
                unique.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            !convex_combination_exists(&others, &unique[i])
        })
        .map(|i| unique[i].clone())
        .collect()
}

fn cross2(p: &Point, q: &Point) -> Rational {
    &p[0] * &q[1] - &p[1] * &q[0]
}

fn orient(o: &Point, a: &Point, b: &Point) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Strict convex hull (no collinear points) of planar points, counter-
/// clockwise, by the monotone chain. Handles collinear and singleton input.
fn ccw_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !orient(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Point> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !orient(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub(crate) struct PointFacet {
    pub halfspace: HalfSpace,
    pub members: Vec<usize>,
}

/// Facets of the convex hull of a full-dimensional point set in `Q^d`,
/// by brute force over `d`-subsets.
pub(crate) fn facets_of_points(pts: &[Vec<Rational>]) -> Vec<PointFacet> {
    let d = pts[0].len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::new();
    for subset in (0..pts.len()).combinations(d) {
        let base = &pts[subset[0]];
        let rows: Vec<Vec<Rational>> =
            subset[1..].iter().map(|&k| pts[k].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
        let Some(normal) = linalg::normal_vector(&rows, d) else {
            continue;
        };
        let offset: Rational = normal.iter().zip(base).map(|(a, b)| a * b).sum();
        let mut above = false;
        let mut below = false;
        let mut members = Vec::new();
        for (k, p) in pts.iter().enumerate() {
            let val: Rational = normal.iter().zip(p).map(|(a, b)| a * b).sum();
            match val.cmp(&offset) {
                Ordering::Greater => above = true,
                Ordering::Less => below = true,
                Ordering::Equal => members.push(k),
            }
        }
        if above && below {
            continue;
        }
        if !seen.insert(members.clone()) {
            continue;
        }
        let halfspace = if above {
            HalfSpace::new(normal.iter().map(|x| -x).collect(), -offset)
        } else {
            HalfSpace::new(normal, offset)
        };
        out.push(PointFacet { halfspace, members });
    }
    out
}

/// Triangulates the convex hull of `pts` (the vertices of a full-
/// dimensional polytope in `Q^d`) by pulling from the first point.
fn triangulate(pts: &[Vec<Rational>]) -> Vec<Vec<usize>> {
    let d = pts[0].len();
    if d == 1 {
        let lo = (0..pts.len()).min_by(|&a, &b| pts[a][0].cmp(&pts[b][0])).unwrap();
        let hi = (0..pts.len()).max_by(|&a, &b| pts[a][0].cmp(&pts[b][0])).unwrap();
        return vec![vec![lo, hi]];
    }
    let apex = (0..pts.len()).min_by(|&a, &b| pts[a].cmp(&pts[b])).unwrap();
    let mut out = Vec::new();
    for facet in facets_of_points(pts) {
        if facet.members.contains(&apex) {
            continue;
        }
        // Drop a coordinate along which the facet hyperplane is a graph.
        let drop = facet.halfspace.normal.iter().position(|x| !x.is_zero()).unwrap();
        let projected: Vec<Vec<Rational>> = facet
            .members
            .iter()
            .map(|&k| pts[k].iter().enumerate().filter(|&(i, _)| i != drop).map(|(_, x)| x.clone()).collect())
            .collect();
        for simplex in triangulate(&projected) {
            let mut s = vec![apex];
            s.extend(simplex.into_iter().map(|k| facet.members[k]));
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn volumes_of_standard_shapes() {
        assert_eq!(Polytope::unit_cube(2).volume(), int(1));
        assert_eq!(Polytope::standard_simplex(2).volume(), rat(1, 2));
        assert_eq!(Polytope::unit_cube(3).volume(), int(1));
        assert_eq!(Polytope::standard_simplex(3).volume(), rat(1, 6));
        let seg = Polytope::new(2, vec![p(&[0, 0]), p(&[1, 1])]).unwrap();
        assert_eq!(seg.volume(), int(0));
        assert_eq!(Polytope::new(1, vec![p(&[3]), p(&[-2]), p(&[0])]).unwrap().volume(), int(5));
    }

    #[test]
    fn extreme_points_are_filtered() {
        let sq =
            Polytope::new(2, vec![p(&[0, 0]), p(&[2, 0]), p(&[0, 2]), p(&[2, 2]), p(&[1, 1]), p(&[1, 0]), p(&[2, 2])])
                .unwrap();
        assert_eq!(sq.vertices(), &[p(&[0, 0]), p(&[0, 2]), p(&[2, 0]), p(&[2, 2])]);
        let cube_plus = Polytope::new(
            3,
            Polytope::unit_cube(3)
                .vertices()
                .iter()
                .cloned()
                .chain([Point::new(vec![rat(1, 2), rat(1, 2), rat(1, 2)]), p(&[1, 1, 0])])
                .collect(),
        )
        .unwrap();
        assert_eq!(cube_plus, Polytope::unit_cube(3));
    }

    #[test]
    fn membership_and_facets() {
        let tri = Polytope::standard_simplex(2);
        assert!(tri.contains(&Point::new(vec![rat(1, 3), rat(1, 3)])));
        assert!(tri.contains(&p(&[1, 0])));
        assert!(!tri.contains(&Point::new(vec![rat(2, 3), rat(1, 2)])));
        let facets = tri.facets().unwrap();
        assert_eq!(facets.len(), 3);
        let inside = [rat(1, 4), rat(1, 4)];
        assert!(facets.iter().all(|h| h.slack(&inside).is_positive()));
        let cube = Polytope::unit_cube(3);
        assert_eq!(cube.facets().unwrap().len(), 6);
    }

    #[test]
    fn degenerate_polytopes() {
        let pt = Polytope::new(2, vec![p(&[1, 2])]).unwrap();
        assert_eq!(pt.affine_dim(), 0);
        assert!(matches!(pt.require_full_dimensional(), Err(Error::DegeneratePolytope { .. })));
        assert!(Polytope::new(2, vec![]).is_err());
        assert!(Polytope::new(2, vec![p(&[1])]).is_err());
    }

    #[test]
    fn minkowski_and_dilation() {
        let tri = Polytope::standard_simplex(2);
        let twice = tri.minkowski_sum(&tri).unwrap();
        assert_eq!(twice, tri.dilate(&int(2)));
        assert_eq!(twice.volume(), int(2));
    }
}
