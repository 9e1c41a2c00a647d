//! Exact piecewise-linear Monge-Ampere theory.
//!
//! Two models where the non-Archimedean Monge-Ampere operator is computable
//! exactly:
//!
//! * **toric**: metrics are convex piecewise-linear functions on `N_R`
//!   whose slopes span a polytope `Delta`; the Monge-Ampere measure is
//!   the real one (volumes of subdifferentials) scaled by `n!`.
//! * **curves**: metrics are functions on a metric graph, and the
//!   Monge-Ampere operator is the graph Laplacian plus a reference
//!   measure.
//!
//! On top of both sit the energy functional, the semipositive envelope and
//! the orthogonality property, and a solver for `MA(phi) = mu`.

pub mod convex_geometry;
pub mod error;
pub mod json;
mod linalg;
mod lp;
pub mod ma_solver;
pub mod potential_curve;
pub mod rational;
pub mod sample;
pub mod toric_ma;
pub mod variational;

pub use error::{Error, Result};
pub use rational::Rational;

// The book's chapters, so that `cargo test` runs their snippets.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/toric.md")]
    mod toric {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
