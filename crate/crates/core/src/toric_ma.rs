//! Real Monge-Ampere measures of admissible piecewise-linear convex
//! functions and their Berkovich-side pushforward.
//!
//! For `g` admissible for `Delta`, `MA_R(g)` has an atom at every
//! breakpoint `v` with mass `vol(subdifferential(g, v))`; the cells tile
//! `Delta`, so the total mass is `Vol(Delta)`. The metric attached to `g`
//! has Monge-Ampere measure `n! j_* MA_R(g)` where `j` sends `v` to the
//! monomial point with weights `v` (`j(0)` is the Gauss point), for total
//! mass the degree `(L^n) = n! Vol(Delta)`.

use num_traits::Zero;

use crate::convex_geometry::{
    breakpoints, check_admissible, common_breakpoints, subdifferential, support_function, AffineFunctional,
    DiscreteMeasure, PLConvexFunction, Point, Polytope,
};
use crate::error::{Error, Result};
use crate::rational::{factorial, int, Rational};

/// The monomial (quasimonomial) point `j(v)` of the analytification
/// attached to `v in N_R`. Bookkeeping only: no topology is modeled.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MonomialPoint(pub Point);

impl MonomialPoint {
    pub fn is_gauss_point(&self) -> bool {
        self.0.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricMAResult {
    /// `MA_R(g)` on `N_R`, total mass `Vol(Delta)`.
    pub measure_nr: DiscreteMeasure,
    /// `n! j_* MA_R(g)`, total mass `(L^n)`.
    pub measure_an: Vec<(MonomialPoint, Rational)>,
    /// `(L^n) = n! Vol(Delta)`.
    pub degree: Rational,
}

impl ToricMAResult {
    pub fn berkovich_mass(&self) -> Rational {
        self.measure_an.iter().map(|(_, m)| m).sum()
    }

    /// The Berkovich-normalized measure as a measure on `N_R`.
    pub fn berkovich_measure(&self) -> DiscreteMeasure {
        DiscreteMeasure::new(self.measure_nr.dim(), self.measure_an.iter().map(|(p, m)| (p.0.clone(), m.clone())))
            .expect("masses are positive")
    }
}

/// `(L^n) = n! Vol(Delta)`.
pub fn degree(delta: &Polytope) -> Result<Rational> {
    delta.require_full_dimensional()?;
    Ok(factorial(delta.dim()) * delta.volume())
}

/// `MA_R(g)` without the admissibility check.
pub(crate) fn real_ma_unchecked(g: &PLConvexFunction) -> DiscreteMeasure {
    let atoms = breakpoints(g).into_iter().filter_map(|v| {
        let cell = subdifferential(g, &v).expect("dimensions agree");
        let vol = cell.volume();
        (!vol.is_zero()).then_some((v, vol))
    });
    DiscreteMeasure::new(g.dim(), atoms).expect("volumes are nonnegative")
}

/// `MA_R(g)` for admissible `g`.
pub fn real_ma(g: &PLConvexFunction, delta: &Polytope) -> Result<DiscreteMeasure> {
    delta.require_full_dimensional()?;
    check_admissible(g, delta)?;
    Ok(real_ma_unchecked(g))
}

pub fn ma_measure(g: &PLConvexFunction, delta: &Polytope) -> Result<ToricMAResult> {
    let measure_nr = real_ma(g, delta)?;
    let nf = factorial(delta.dim());
    let measure_an = measure_nr.atoms().map(|(v, m)| (MonomialPoint(v.clone()), m * &nf)).collect();
    Ok(ToricMAResult { measure_nr, measure_an, degree: nf * delta.volume() })
}

/// `g_Delta(. - v0)`, whose Monge-Ampere measure is `Vol(Delta) delta_{v0}`.
pub fn point_mass_solution(delta: &Polytope, v0: &Point) -> Result<PLConvexFunction> {
    v0.check_dim(delta.dim())?;
    delta.require_full_dimensional()?;
    support_function(delta).translate(v0)
}

/// The mixed volume `V(P_1, ..., P_n)`, normalized so that `V(P, ..., P)
/// = vol(P)`, by polarization:
///
/// `(1/n!) sum_{S nonempty} (-1)^{n - |S|} vol(sum_{i in S} P_i)`.
pub fn mixed_volume(ps: &[Polytope]) -> Result<Rational> {
    let Some(first) = ps.first() else {
        return Err(Error::Empty("mixed volume needs at least one polytope"));
    };
    let n = first.dim();
    if ps.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: ps.len() });
    }
    if ps.iter().all(|p| p == first) {
        return Ok(first.volume());
    }
    let mut total = Rational::zero();
    for mask in 1usize..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut sum = ps[members[0]].clone();
        for &i in &members[1..] {
            sum = sum.minkowski_sum(&ps[i])?;
        }
        let vol = sum.volume();
        if (n - members.len()).is_multiple_of(2) {
            total += vol;
        } else {
            total -= vol;
        }
    }
    Ok(total / factorial(n))
}

/// The mixed real Monge-Ampere measure `MA_R(g_1, ..., g_n)`: at each
/// vertex `v` of the common refinement, the mixed volume of the
/// subdifferentials `subdifferential(g_i, v)`. It is symmetric, positive,
/// has mass `Vol(Delta)` and equals `MA_R(g)` on the diagonal.
pub fn mixed_ma(gs: &[PLConvexFunction], delta: &Polytope) -> Result<DiscreteMeasure> {
    let n = delta.dim();
    if gs.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: gs.len() });
    }
    delta.require_full_dimensional()?;
    for g in gs {
        check_admissible(g, delta)?;
    }
    let mut distinct: Vec<&PLConvexFunction> = Vec::new();
    for g in gs {
        if !distinct.contains(&g) {
            distinct.push(g);
        }
    }
    let mut atoms = Vec::new();
    for v in common_breakpoints(&distinct) {
        let cells: Vec<Polytope> = distinct.iter().map(|g| subdifferential(g, &v)).collect::<Result<_>>()?;
        let args: Vec<Polytope> =
            gs.iter().map(|g| cells[distinct.iter().position(|h| *h == g).unwrap()].clone()).collect();
        let mass = mixed_volume(&args)?;
        if !mass.is_zero() {
            atoms.push((v, mass));
        }
    }
    DiscreteMeasure::new(n, atoms)
}

/// Berkovich-normalized mixed measure `(dd^c g)^j ^ (dd^c h)^(n-j)`,
/// i.e. `n!` times the real mixed measure with `j` copies of `g`.
pub fn mixed_ma_berkovich(
    g: &PLConvexFunction,
    h: &PLConvexFunction,
    j: usize,
    delta: &Polytope,
) -> Result<DiscreteMeasure> {
    let n = delta.dim();
    if j > n {
        return Err(Error::InvalidArgument(format!("mixed degree {j} exceeds dimension {n}")));
    }
    let mut args = vec![g.clone(); j];
    args.extend(std::iter::repeat_n(h.clone(), n - j));
    mixed_ma(&args, delta)?.scale(&factorial(n))
}

/// A function with the given slopes' pieces, used by examples: `max_i
/// (<u_i, v> - c_i)` from integer data.
pub fn pl_from_ints(dim: usize, pieces: &[(&[i64], i64)]) -> Result<PLConvexFunction> {
    PLConvexFunction::new(
        dim,
        pieces.iter().map(|(s, c)| AffineFunctional::new(Point::from_ints(s), int(*c))).collect(),
    )
}
