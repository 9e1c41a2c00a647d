use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use super::{Point, Polytope};
use crate::error::{Error, Result};
use crate::linalg;
use crate::lp;
use crate::rational::Rational;

/// The affine function `v -> <slope, v> - intercept`.
///
/// The slope lives in `M_R` and plays the role of the monomial section
/// `chi^slope`; the intercept is its scaling.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineFunctional {
    pub slope: Point,
    pub intercept: Rational,
}

impl AffineFunctional {
    pub fn new(slope: Point, intercept: Rational) -> Self {
        AffineFunctional { slope, intercept }
    }

    pub fn eval(&self, v: &Point) -> Rational {
        self.slope.dot(v) - &self.intercept
    }
}

/// A convex piecewise-linear function `g = max_i (<u_i, v> - c_i)` on `N_R`.
///
/// Pieces are kept irredundant (each is the unique maximum on some open
/// set) and sorted, so structural equality is equality of functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PLConvexFunction {
    dim: usize,
    pieces: Vec<AffineFunctional>,
}

impl PLConvexFunction {
    pub fn new(dim: usize, pieces: Vec<AffineFunctional>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Empty("a piecewise-linear function needs at least one piece"));
        }
        for p in &pieces {
            p.slope.check_dim(dim)?;
        }
        Ok(PLConvexFunction { dim, pieces: prune(pieces) })
    }

    /// For pieces already known to be irredundant.
    pub(crate) fn from_irredundant(dim: usize, mut pieces: Vec<AffineFunctional>) -> Self {
        pieces.sort();
        PLConvexFunction { dim, pieces }
    }

    /// Convenience constructor from `(slope, intercept)` pairs.
    pub fn from_pairs(dim: usize, pairs: Vec<(Point, Rational)>) -> Result<Self> {
        Self::new(dim, pairs.into_iter().map(|(s, c)| AffineFunctional::new(s, c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffineFunctional] {
        &self.pieces
    }

    pub fn slopes(&self) -> impl Iterator<Item = &Point> {
        self.pieces.iter().map(|p| &p.slope)
    }

    pub fn eval(&self, v: &Point) -> Result<Rational> {
        v.check_dim(self.dim)?;
        Ok(self.eval_unchecked(v))
    }

    pub(crate) fn eval_unchecked(&self, v: &Point) -> Rational {
        self.pieces.iter().map(|p| p.eval(v)).max().expect("nonempty")
    }

    /// Pieces attaining the maximum at `v` (exact ties).
    pub fn active_pieces(&self, v: &Point) -> Vec<&AffineFunctional> {
        let values: Vec<Rational> = self.pieces.iter().map(|p| p.eval(v)).collect();
        let max = values.iter().max().expect("nonempty").clone();
        self.pieces.iter().zip(values).filter(|(_, x)| *x == max).map(|(p, _)| p).collect()
    }

    /// Pointwise sum, pieces formed from pairwise sums then pruned.
    pub fn add(&self, other: &PLConvexFunction) -> Result<PLConvexFunction> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let pieces = self
            .pieces
            .iter()
            .cartesian_product(&other.pieces)
            .map(|(a, b)| AffineFunctional::new(a.slope.add(&b.slope), &a.intercept + &b.intercept))
            .collect();
        Ok(PLConvexFunction { dim: self.dim, pieces: prune(pieces) })
    }

    /// `k * g` for `k > 0`; `k = 0` gives the zero function.
    pub fn scale(&self, k: &Rational) -> Result<PLConvexFunction> {
        if k.is_negative() {
            return Err(Error::InvalidArgument("negative multiple of a convex function".into()));
        }
        if k.is_zero() {
            return Ok(PLConvexFunction::from_irredundant(
                self.dim,
                vec![AffineFunctional::new(Point::zeros(self.dim), Rational::zero())],
            ));
        }
        Ok(PLConvexFunction::from_irredundant(
            self.dim,
            self.pieces.iter().map(|p| AffineFunctional::new(p.slope.scale(k), &p.intercept * k)).collect(),
        ))
    }

    /// `g + c`.
    pub fn add_constant(&self, c: &Rational) -> PLConvexFunction {
        PLConvexFunction::from_irredundant(
            self.dim,
            self.pieces.iter().map(|p| AffineFunctional::new(p.slope.clone(), &p.intercept - c)).collect(),
        )
    }

    /// `v -> g(v - t)`.
    pub fn translate(&self, t: &Point) -> Result<PLConvexFunction> {
        t.check_dim(self.dim)?;
        Ok(PLConvexFunction::from_irredundant(
            self.dim,
            self.pieces.iter().map(|p| AffineFunctional::new(p.slope.clone(), &p.intercept + p.slope.dot(t))).collect(),
        ))
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &PLConvexFunction) -> Result<PLConvexFunction> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let pieces = self.pieces.iter().chain(&other.pieces).cloned().collect();
        Ok(PLConvexFunction { dim: self.dim, pieces: prune(pieces) })
    }

    /// Convex combination `(1 - t) g + t h`, `t` in `[0, 1]`.
    pub fn interpolate(&self, other: &PLConvexFunction, t: &Rational) -> Result<PLConvexFunction> {
        if t.is_negative() || t > &Rational::one() {
            return Err(Error::InvalidArgument("interpolation parameter outside [0, 1]".into()));
        }
        let a = self.scale(&(Rational::one() - t))?;
        let b = other.scale(t)?;
        a.add(&b)
    }
}

/// Removes exact duplicates, keeps the best intercept per slope, then
/// drops every piece whose lifted point `(u_p, c_p)` lies in the convex
/// hull of the other lifted points plus the upward ray.
fn prune(pieces: Vec<AffineFunctional>) -> Vec<AffineFunctional> {
    let mut best: BTreeMap<Point, Rational> = BTreeMap::new();
    for p in pieces {
        best.entry(p.slope)
            .and_modify(|c| {
                if p.intercept < *c {
                    *c = p.intercept.clone();
                }
            })
            .or_insert(p.intercept);
    }
    let pieces: Vec<AffineFunctional> = best.into_iter().map(|(s, c)| AffineFunctional::new(s, c)).collect();
    if pieces.len() <= 2 {
        return pieces;
    }
    let dim = pieces[0].slope.dim();
    let keep: Vec<bool> = (0..pieces.len())
        .map(|p| {
            let others: Vec<&AffineFunctional> =
                pieces.iter().enumerate().filter(|&(i, _)| i != p).map(|(_, q)| q).collect();
            // Variables: lambda_i (one per other piece), then mu.
            let mut a: Vec<Vec<Rational>> = Vec::with_capacity(dim + 2);
            let mut b = Vec::with_capacity(dim + 2);
            for k in 0..dim {
                let mut row: Vec<Rational> = others.iter().map(|q| q.slope[k].clone()).collect();
                row.push(Rational::zero());
                a.push(row);
                b.push(pieces[p].slope[k].clone());
            }
            let mut row = vec![Rational::one(); others.len()];
            row.push(Rational::zero());
            a.push(row);
            b.push(Rational::one());
            let mut row: Vec<Rational> = others.iter().map(|q| q.intercept.clone()).collect();
            row.push(Rational::one());
            a.push(row);
            b.push(pieces[p].intercept.clone());
            !lp::feasible(&a, &b)
        })
        .collect();
    pieces.into_iter().zip(keep).filter(|(_, k)| *k).map(|(p, _)| p).collect()
}

/// The support function `g_Delta(v) = max_{u in Delta} <u, v>`.
pub fn support_function(delta: &Polytope) -> PLConvexFunction {
    let pieces = delta.vertices().iter().map(|u| AffineFunctional::new(u.clone(), Rational::zero())).collect();
    PLConvexFunction::from_irredundant(delta.dim(), pieces)
}

/// Whether `g - g_Delta` is bounded on `N_R`.
///
/// For piecewise-linear `g` this holds iff every slope of `g` lies in
/// `Delta` and every vertex of `Delta` is a slope: the recession function
/// of `g` is `v -> max_i <u_i, v>`, the support function of the slope
/// hull, and two support functions agree iff the hulls agree.
pub fn is_admissible(g: &PLConvexFunction, delta: &Polytope) -> bool {
    if g.dim() != delta.dim() {
        return false;
    }
    let slopes: BTreeSet<&Point> = g.slopes().collect();
    delta.vertices().iter().all(|v| slopes.contains(v)) && g.slopes().all(|s| delta.contains(s))
}

pub(crate) fn check_admissible(g: &PLConvexFunction, delta: &Polytope) -> Result<()> {
    if g.dim() != delta.dim() {
        return Err(Error::DimensionMismatch { expected: delta.dim(), found: g.dim() });
    }
    if let Some(v) = delta.vertices().iter().find(|v| !g.slopes().any(|s| s == *v)) {
        return Err(Error::NotAdmissible(format!("vertex {v} of the polytope is not a slope")));
    }
    if let Some(s) = g.slopes().find(|s| !delta.contains(s)) {
        return Err(Error::NotAdmissible(format!("slope {s} lies outside the polytope")));
    }
    Ok(())
}

/// `conv{ slope(p) : p active at v }`.
pub fn subdifferential(g: &PLConvexFunction, v: &Point) -> Result<Polytope> {
    v.check_dim(g.dim())?;
    let slopes = g.active_pieces(v).into_iter().map(|p| p.slope.clone()).collect();
    Polytope::new(g.dim(), slopes)
}

/// Points where at least `n + 1` pieces are active with affinely spanning
/// slopes: the vertices of the linearity subdivision of `g`.
pub fn breakpoints(g: &PLConvexFunction) -> Vec<Point> {
    let n = g.dim();
    let pieces = g.pieces();
    if pieces.len() < n + 1 {
        return Vec::new();
    }
    if n == 0 {
        return vec![Point::zeros(0)];
    }
    let approx: Vec<(Vec<f64>, f64)> =
        pieces.iter().map(|p| (p.slope.to_f64(), crate::rational::to_f64(&p.intercept))).collect();
    let mut found: BTreeSet<Point> = BTreeSet::new();
    for subset in (0..pieces.len()).combinations(n + 1) {
        if clearly_not_maximal(&approx, &subset) {
            continue;
        }
        let base = &pieces[subset[0]];
        let a: Vec<Vec<Rational>> =
            subset[1..].iter().map(|&k| pieces[k].slope.sub(&base.slope).into_coords()).collect();
        let b: Vec<Rational> = subset[1..].iter().map(|&k| &pieces[k].intercept - &base.intercept).collect();
        let Some(x) = linalg::solve(a, b) else {
            continue;
        };
        let v = Point::new(x);
        if found.contains(&v) {
            continue;
        }
        if g.eval_unchecked(&v) == base.eval(&v) {
            found.insert(v);
        }
    }
    found.into_iter().collect()
}

/// Floating-point screen for [`breakpoints`]: true only when the pieces in
/// `subset` meet at a point where some other piece is larger by a margin
/// far beyond rounding error.
fn clearly_not_maximal(approx: &[(Vec<f64>, f64)], subset: &[usize]) -> bool {
    let (base_slope, base_c) = &approx[subset[0]];
    let a: Vec<Vec<f64>> =
        subset[1..].iter().map(|&k| approx[k].0.iter().zip(base_slope).map(|(x, y)| x - y).collect()).collect();
    let b: Vec<f64> = subset[1..].iter().map(|&k| approx[k].1 - base_c).collect();
    let Some(x) = linalg::solve_f64_with_pivot_floor(a, b, 1e-4) else {
        return false;
    };
    let value = |(s, c): &(Vec<f64>, f64)| s.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() - c;
    let here = value(&approx[subset[0]]);
    let scale = 1.0 + here.abs() + x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    approx.iter().any(|p| value(p) > here + 1e-6 * scale)
}

/// Vertices of the common refinement of the linearity subdivisions of
/// `fs`: points where the active slopes of all functions together span
/// `N_R` affinely. A function affine on every cell of the refinement is
/// determined (on bounded cells) by its values there.
pub fn common_breakpoints(fs: &[&PLConvexFunction]) -> Vec<Point> {
    let Some(first) = fs.first() else {
        return Vec::new();
    };
    if fs.iter().all(|f| f == first) {
        return breakpoints(first);
    }
    let n = first.dim();
    let mut found: BTreeSet<Point> = BTreeSet::new();
    // Every edge of a pointed subdivision touches a vertex, so the only
    // walls that matter join pieces active together at some breakpoint.
    // Functions without breakpoints contribute every pair of pieces.
    let mut walls: BTreeMap<(Vec<Rational>, Rational), BTreeSet<usize>> = BTreeMap::new();
    let mut add_wall = |owner: usize, a: &AffineFunctional, b: &AffineFunctional| {
        let mut normal: Vec<Rational> = a.slope.sub(&b.slope).into_coords();
        let mut offset = &a.intercept - &b.intercept;
        // Orient each wall canonically so duplicates collapse.
        if normal.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            normal.iter_mut().for_each(|x| *x = -x.clone());
            offset = -offset;
        }
        walls.entry((normal, offset)).or_default().insert(owner);
    };
    for (owner, f) in fs.iter().enumerate() {
        let vertices = breakpoints(f);
        if vertices.is_empty() {
            for (a, b) in f.pieces().iter().tuple_combinations() {
                add_wall(owner, a, b);
            }
        }
        for v in vertices {
            for (a, b) in f.active_pieces(&v).into_iter().tuple_combinations() {
                add_wall(owner, a, b);
            }
            found.insert(v);
        }
    }
    let walls: Vec<_> = walls.into_iter().collect();
    for combo in walls.iter().combinations(n) {
        // Walls carrying edges of a single function only meet at its own
        // breakpoints.
        if combo.iter().all(|(_, owners)| owners.len() == 1 && *owners == combo[0].1) {
            continue;
        }
        let a: Vec<Vec<Rational>> = combo.iter().map(|((normal, _), _)| normal.clone()).collect();
        let b: Vec<Rational> = combo.iter().map(|((_, c), _)| c.clone()).collect();
        let Some(x) = linalg::solve(a, b) else {
            continue;
        };
        let x = Point::new(x);
        if found.contains(&x) {
            continue;
        }
        let mut diffs: Vec<Vec<Rational>> = Vec::new();
        for f in fs {
            let active = f.active_pieces(&x);
            for p in &active[1..] {
                diffs.push(p.slope.sub(&active[0].slope).into_coords());
            }
        }
        if linalg::rank(&diffs) == n {
            found.insert(x);
        }
    }
    found.into_iter().collect()
}
