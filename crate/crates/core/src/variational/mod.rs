//! Energy, the envelope `P`, and the two statements the variational
//! method rests on: orthogonality of `P` and differentiability of `E o P`.
//!
//! Both models implement [`PshContext`]: the toric model over a polytope
//! `Delta` (potentials are admissible convex functions, energies relative to
//! a reference) and the curve model on a metric graph (potentials are
//! `phi - phi_0`, energies relative to `phi_0`). All measures are
//! normalized to total mass `(L^n)`.

mod curve;
mod toric;

pub use curve::{energy_curve, envelope_curve, f_mu_curve, CurveContext};
pub use toric::{energy_toric, envelope_toric, f_mu_toric, ToricContext, ToricPsi};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rational};

/// A model of plurisubharmonic metrics on which `E`, `MA` and `P` can be
/// evaluated exactly.
pub trait PshContext {
    /// A psh metric, relative to the context's reference.
    type Potential: Clone;
    /// A continuous (not necessarily psh) metric: the input of `P`.
    type Psi: Clone;
    /// A continuous function, used as a perturbation direction.
    type Perturbation;
    type Measure;

    /// `(L^n)`, the total mass of every Monge-Ampere measure.
    fn degree(&self) -> Rational;
    /// `P(psi)`: the largest psh metric below `psi`.
    fn envelope(&self, psi: &Self::Psi) -> Result<Self::Potential>;
    /// The energy relative to the reference metric.
    fn energy(&self, phi: &Self::Potential) -> Result<Rational>;
    fn ma(&self, phi: &Self::Potential) -> Result<Self::Measure>;
    fn as_psi(&self, phi: &Self::Potential) -> Self::Psi;
    /// `phi + t f`.
    fn perturb(&self, phi: &Self::Potential, f: &Self::Perturbation, t: &Rational) -> Result<Self::Psi>;
    /// `integral (psi - reference) d(mu)`.
    fn integrate(&self, psi: &Self::Psi, mu: &Self::Measure) -> Rational;
    fn integrate_perturbation(&self, f: &Self::Perturbation, mu: &Self::Measure) -> Rational;
    fn sup_norm(&self, f: &Self::Perturbation) -> Rational;
}

/// `integral (psi - P(psi)) d MA(P(psi))`, which vanishes.
pub fn orthogonality_defect<C: PshContext>(ctx: &C, psi: &C::Psi) -> Result<Rational> {
    let p = ctx.envelope(psi)?;
    let mu = ctx.ma(&p)?;
    Ok(ctx.integrate(psi, &mu) - ctx.integrate(&ctx.as_psi(&p), &mu))
}

/// Central finite differences of `t -> E(P(phi + t f))` at `0`, next to the
/// predicted derivative `integral f d MA(phi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvelopeDerivative {
    pub exact: Rational,
    /// `(t, (E(P(phi + t f)) - E(P(phi - t f))) / 2t)`.
    pub estimates: Vec<(Rational, Rational)>,
    /// `C` in the first-order bound `|estimate - exact| <= C t`.
    pub bound_constant: Rational,
}

impl EnvelopeDerivative {
    pub fn errors(&self) -> Vec<(Rational, Rational)> {
        self.estimates.iter().map(|(t, fd)| (t.clone(), (fd - &self.exact).abs())).collect()
    }

    pub fn within_first_order_bound(&self) -> bool {
        self.errors().iter().all(|(t, e)| e <= &(&self.bound_constant * t))
    }
}

/// The dyadic grid `2^-3, ..., 2^-6`.
pub fn default_t_grid() -> Vec<Rational> {
    (3..=6).map(|k| rat(1, 1 << k)).collect()
}

pub fn energy_of_envelope_derivative<C: PshContext>(
    ctx: &C,
    phi: &C::Potential,
    f: &C::Perturbation,
    t_grid: &[Rational],
) -> Result<EnvelopeDerivative> {
    if t_grid.iter().any(|t| t <= &Rational::zero()) {
        return Err(Error::InvalidArgument("finite-difference steps must be positive".into()));
    }
    let mu = ctx.ma(phi)?;
    let exact = ctx.integrate_perturbation(f, &mu);
    let estimates = t_grid
        .iter()
        .map(|t| {
            let plus = ctx.energy(&ctx.envelope(&ctx.perturb(phi, f, t)?)?)?;
            let minus = ctx.energy(&ctx.envelope(&ctx.perturb(phi, f, &-t)?)?)?;
            Ok((t.clone(), (plus - minus) / (int(2) * t)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnvelopeDerivative { exact, estimates, bound_constant: int(4) * ctx.degree() * ctx.sup_norm(f) })
}
