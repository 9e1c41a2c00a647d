//! Laguerre (power) cells of a weighted point set, restricted to a
//! segment or polygon. Generic over `f64` for the Newton loop and over
//! exact rationals for the final polish.

use num_traits::{Num, Signed};

use crate::convex_geometry::Polytope;
use crate::error::{Error, Result};
use crate::rational::{to_f64, Rational};

pub(crate) trait Scalar: Clone + PartialOrd + Num + Signed {}

impl<T: Clone + PartialOrd + Num + Signed> Scalar for T {}

/// `Delta` as a segment or a counterclockwise polygon.
#[derive(Clone, Debug)]
pub(crate) enum Domain<T> {
    Interval(T, T),
    Polygon(Vec<[T; 2]>),
}

impl Domain<Rational> {
    pub fn exact(delta: &Polytope) -> Result<Self> {
        delta.require_full_dimensional()?;
        match delta.dim() {
            1 => {
                let v = delta.vertices();
                Ok(Domain::Interval(v[0][0].clone(), v[v.len() - 1][0].clone()))
            }
            2 => Ok(Domain::Polygon(delta.ccw_vertices()?.iter().map(|p| [p[0].clone(), p[1].clone()]).collect())),
            n => Err(Error::UnsupportedDimension(n)),
        }
    }

    pub fn to_f64(&self) -> Domain<f64> {
        match self {
            Domain::Interval(a, b) => Domain::Interval(to_f64(a), to_f64(b)),
            Domain::Polygon(ps) => Domain::Polygon(ps.iter().map(|[x, y]| [to_f64(x), to_f64(y)]).collect()),
        }
    }
}

/// The part of `Delta` where site `i` attains `max_j (<u, v_j> - w_j)`.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Cell<T> {
    pub volume: T,
    /// `integral u du` over the cell.
    pub moment: Vec<T>,
    /// `(j, |facet shared with j| / |v_j - v_i|)`.
    pub facets: Vec<(usize, T)>,
}

fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

fn interval_cell<T: Scalar>(a: &T, b: &T, sites: &[Vec<T>], weights: &[T], i: usize) -> Cell<T> {
    let (mut lo, mut hi) = (a.clone(), b.clone());
    let (mut lo_label, mut hi_label) = (None, None);
    for j in 0..sites.len() {
        if j == i {
            continue;
        }
        // u (v_j - v_i) <= w_j - w_i
        let d = sites[j][0].clone() - sites[i][0].clone();
        let c = weights[j].clone() - weights[i].clone();
        if d.is_zero() {
            if c.is_negative() {
                lo = b.clone();
                hi = a.clone();
            }
            continue;
        }
        let t = c / d.clone();
        if d.is_positive() {
            if t < hi {
                hi = t;
                hi_label = Some((j, d));
            }
        } else if t > lo {
            lo = t;
            lo_label = Some((j, d));
        }
    }
    if hi <= lo {
        return Cell { volume: T::zero(), moment: vec![T::zero()], facets: vec![] };
    }
    let moment = (hi.clone() * hi.clone() - lo.clone() * lo.clone()) / two();
    let facets = [lo_label, hi_label].into_iter().flatten().map(|(j, d)| (j, T::one() / d.abs())).collect();
    Cell { volume: hi - lo, moment: vec![moment], facets }
}

fn polygon_cell<T: Scalar>(domain: &[[T; 2]], sites: &[Vec<T>], weights: &[T], i: usize) -> Cell<T> {
    // Vertices paired with the label of the edge leaving them.
    let mut poly: Vec<([T; 2], Option<usize>)> = domain.iter().map(|p| (p.clone(), None)).collect();
    for j in 0..sites.len() {
        if j == i || poly.is_empty() {
            continue;
        }
        let d = [sites[j][0].clone() - sites[i][0].clone(), sites[j][1].clone() - sites[i][1].clone()];
        let c = weights[j].clone() - weights[i].clone();
        let slack = |p: &[T; 2]| c.clone() - (d[0].clone() * p[0].clone() + d[1].clone() * p[1].clone());
        let mut out = Vec::with_capacity(poly.len() + 1);
        for k in 0..poly.len() {
            let (p, label) = &poly[k];
            let (q, _) = &poly[(k + 1) % poly.len()];
            let (sp, sq) = (slack(p), slack(q));
            let (p_in, q_in) = (!sp.is_negative(), !sq.is_negative());
            let cross = || {
                let t = sp.clone() / (sp.clone() - sq.clone());
                [
                    p[0].clone() + t.clone() * (q[0].clone() - p[0].clone()),
                    p[1].clone() + t * (q[1].clone() - p[1].clone()),
                ]
            };
            match (p_in, q_in) {
                (true, true) => out.push((p.clone(), *label)),
                (true, false) => {
                    out.push((p.clone(), *label));
                    if !sp.is_zero() {
                        out.push((cross(), Some(j)));
                    } else {
                        out.last_mut().unwrap().1 = Some(j);
                    }
                }
                (false, true) => {
                    if !sq.is_zero() {
                        out.push((cross(), *label));
                    }
                }
                (false, false) => {}
            }
        }
        poly = out;
    }
    let zero = || Cell { volume: T::zero(), moment: vec![T::zero(), T::zero()], facets: vec![] };
    if poly.len() < 3 {
        return zero();
    }
    let mut area2 = T::zero();
    let (mut mx, mut my) = (T::zero(), T::zero());
    let mut facets: Vec<(usize, T)> = Vec::new();
    for k in 0..poly.len() {
        let (p, label) = &poly[k];
        let (q, _) = &poly[(k + 1) % poly.len()];
        let cr = p[0].clone() * q[1].clone() - q[0].clone() * p[1].clone();
        area2 = area2 + cr.clone();
        mx = mx + (p[0].clone() + q[0].clone()) * cr.clone();
        my = my + (p[1].clone() + q[1].clone()) * cr;
        if let Some(j) = label {
            let d = [sites[*j][0].clone() - sites[i][0].clone(), sites[*j][1].clone() - sites[i][1].clone()];
            let e = [q[0].clone() - p[0].clone(), q[1].clone() - p[1].clone()];
            let num = (e[0].clone() * d[1].clone() - e[1].clone() * d[0].clone()).abs();
            let den = d[0].clone() * d[0].clone() + d[1].clone() * d[1].clone();
            let ratio = num / den;
            if !ratio.is_zero() {
                facets.push((*j, ratio));
            }
        }
    }
    if !area2.is_positive() {
        return zero();
    }
    let six = two::<T>() + two::<T>() + two::<T>();
    Cell { volume: area2 / two(), moment: vec![mx / six.clone(), my / six], facets }
}

pub(crate) fn laguerre_cells<T: Scalar>(domain: &Domain<T>, sites: &[Vec<T>], weights: &[T]) -> Vec<Cell<T>> {
    (0..sites.len())
        .map(|i| match domain {
            Domain::Interval(a, b) => interval_cell(a, b, sites, weights, i),
            Domain::Polygon(ps) => polygon_cell(ps, sites, weights, i),
        })
        .collect()
}

pub(crate) fn cell<T: Scalar>(domain: &Domain<T>, sites: &[Vec<T>], weights: &[T], i: usize) -> Cell<T> {
    match domain {
        Domain::Interval(a, b) => interval_cell(a, b, sites, weights, i),
        Domain::Polygon(ps) => polygon_cell(ps, sites, weights, i),
    }
}
