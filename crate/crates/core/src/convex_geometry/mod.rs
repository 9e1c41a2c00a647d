//! Exact rational convex geometry: polytopes, piecewise-linear convex
//! functions on `N_R`, subdifferentials, volumes and convex envelopes.
//!
//! Slopes live in the dual space `M_R`. A function `g` whose slopes span
//! the polytope `Delta` differs from the support function `g_Delta` by a
//! bounded amount; these are the admissible functions. The compactified
//! tropical space is not modeled: it identifies with `Delta` only
//! topologically, not affinely.

mod dd;
mod envelope;
mod measure;
mod pl_function;
mod point;
mod polytope;

pub use dd::HalfSpace;
pub use envelope::convex_envelope;
pub use measure::DiscreteMeasure;
pub(crate) use pl_function::check_admissible;
pub use pl_function::{
    breakpoints, common_breakpoints, is_admissible, subdifferential, support_function, AffineFunctional,
    PLConvexFunction,
};
pub use point::Point;
pub use polytope::Polytope;

use crate::rational::Rational;

/// `g(v)`, exact.
pub fn eval(g: &PLConvexFunction, v: &Point) -> crate::Result<Rational> {
    g.eval(v)
}

/// Exact Lebesgue volume.
pub fn polytope_volume(p: &Polytope) -> Rational {
    p.volume()
}
