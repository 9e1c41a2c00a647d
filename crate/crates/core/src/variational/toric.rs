use num_traits::{One, Signed, Zero};

use super::PshContext;
use crate::convex_geometry::{
    check_admissible, common_breakpoints, convex_envelope, support_function, DiscreteMeasure, PLConvexFunction, Point,
    Polytope,
};
use crate::error::{Error, Result};
use crate::rational::{factorial, int, Rational};
use crate::toric_ma::{ma_measure, mixed_ma_berkovich};

/// The relative energy `E(g) - E(g0)`:
///
/// `1/(n+1) sum_{j=0}^n integral (g - g0) (dd^c g)^j ^ (dd^c g0)^(n-j)`,
///
/// with mixed measures of total mass `(L^n) = n! Vol(Delta)`.
pub fn energy_toric(g: &PLConvexFunction, g0: &PLConvexFunction, delta: &Polytope) -> Result<Rational> {
    delta.require_full_dimensional()?;
    check_admissible(g, delta)?;
    check_admissible(g0, delta)?;
    let n = delta.dim();
    let diff = |v: &Point| g.eval_unchecked(v) - g0.eval_unchecked(v);
    let mut total = Rational::zero();
    for j in 0..=n {
        let mu = mixed_ma_berkovich(g, g0, j, delta)?;
        total += mu.integrate(diff);
    }
    Ok(total / int(n as i64 + 1))
}

fn check_mass(mu: &DiscreteMeasure, delta: &Polytope) -> Result<()> {
    let expected = factorial(delta.dim()) * delta.volume();
    let found = mu.total_mass();
    if found != expected {
        return Err(Error::MassMismatch { expected: Box::new(expected), found: Box::new(found) });
    }
    Ok(())
}

/// `F_mu(g) = E(g) - integral (g - g0) d(mu)` for `mu` of mass `(L^n)`.
pub fn f_mu_toric(
    g: &PLConvexFunction,
    mu: &DiscreteMeasure,
    g0: &PLConvexFunction,
    delta: &Polytope,
) -> Result<Rational> {
    mu.dim()
        .eq(&delta.dim())
        .then_some(())
        .ok_or(Error::DimensionMismatch { expected: delta.dim(), found: mu.dim() })?;
    check_mass(mu, delta)?;
    let e = energy_toric(g, g0, delta)?;
    Ok(e - mu.integrate(|v| g.eval_unchecked(v) - g0.eval_unchecked(v)))
}

/// A difference of convex functions `sum_k c_k g_k` with every `g_k`
/// admissible for the same polytope. With `sum_k c_k = 1` this is a
/// continuous metric of the toric line bundle; with `sum_k c_k = 0` it is a
/// bounded continuous function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricPsi {
    terms: Vec<(Rational, PLConvexFunction)>,
}

impl ToricPsi {
    pub fn new(terms: Vec<(Rational, PLConvexFunction)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Empty("difference of convex functions needs a term"));
        };
        let dim = first.dim();
        if let Some((_, g)) = terms.iter().find(|(_, g)| g.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.dim() });
        }
        Ok(ToricPsi { terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect() })
    }

    pub fn from_convex(g: &PLConvexFunction) -> Self {
        ToricPsi { terms: vec![(Rational::one(), g.clone())] }
    }

    /// `min(g, h) = g + h - max(g, h)`.
    pub fn min(g: &PLConvexFunction, h: &PLConvexFunction) -> Result<Self> {
        Self::new(vec![(Rational::one(), g.clone()), (Rational::one(), h.clone()), (-Rational::one(), g.max(h)?)])
    }

    /// `g - h`, a bounded function when both are admissible for one polytope.
    pub fn difference(g: &PLConvexFunction, h: &PLConvexFunction) -> Result<Self> {
        Self::new(vec![(Rational::one(), g.clone()), (-Rational::one(), h.clone())])
    }

    pub fn terms(&self) -> &[(Rational, PLConvexFunction)] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        self.terms.first().map_or(0, |(_, g)| g.dim())
    }

    pub fn coefficient_sum(&self) -> Rational {
        self.terms.iter().map(|(c, _)| c).sum()
    }

    pub fn eval(&self, v: &Point) -> Rational {
        self.terms.iter().map(|(c, g)| c * g.eval_unchecked(v)).sum()
    }

    pub fn add(&self, other: &ToricPsi) -> ToricPsi {
        ToricPsi { terms: self.terms.iter().chain(&other.terms).cloned().collect() }
    }

    pub fn scale(&self, k: &Rational) -> ToricPsi {
        ToricPsi { terms: self.terms.iter().filter(|_| !k.is_zero()).map(|(c, g)| (c * k, g.clone())).collect() }
    }

    /// Adds `c` to every term, which adds `c` times the coefficient sum.
    pub fn add_constant(&self, c: &Rational) -> ToricPsi {
        ToricPsi { terms: self.terms.iter().map(|(k, g)| (k.clone(), g.add_constant(c))).collect() }
    }

    fn check_admissible(&self, delta: &Polytope) -> Result<()> {
        if self.dim() != delta.dim() && !self.terms.is_empty() {
            return Err(Error::DimensionMismatch { expected: delta.dim(), found: self.dim() });
        }
        self.terms.iter().try_for_each(|(_, g)| check_admissible(g, delta))
    }

    /// Vertices of the common refinement of the linearity domains of all
    /// terms. The function is affine on each (pointed) cell.
    pub fn refinement_vertices(&self) -> Vec<Point> {
        let fs: Vec<&PLConvexFunction> = self.terms.iter().map(|(_, g)| g).collect();
        common_breakpoints(&fs)
    }

    /// `max |psi|` for a bounded `psi` (coefficient sum zero).
    pub fn sup_norm(&self) -> Rational {
        let verts = self.refinement_vertices();
        if verts.is_empty() {
            // No walls: every term is affine, so a bounded sum is constant.
            return self.eval(&Point::zeros(self.dim())).abs();
        }
        verts.iter().map(|v| self.eval(v).abs()).max().unwrap()
    }
}

/// The largest admissible convex function below `psi` (coefficient sum 1).
pub fn envelope_toric(psi: &ToricPsi, delta: &Polytope) -> Result<PLConvexFunction> {
    delta.require_full_dimensional()?;
    psi.check_admissible(delta)?;
    if !psi.coefficient_sum().is_one() {
        return Err(Error::InvalidArgument("envelope input must have coefficient sum 1".into()));
    }
    let mut verts = psi.refinement_vertices();
    if verts.is_empty() {
        verts.push(Point::zeros(delta.dim()));
    }
    let samples: Vec<(Point, Rational)> = verts
        .into_iter()
        .map(|v| {
            let y = psi.eval(&v);
            (v, y)
        })
        .collect();
    convex_envelope(&samples, delta)
}

/// The toric model over `delta`, with energies relative to `reference`.
#[derive(Clone, Debug)]
pub struct ToricContext {
    pub delta: Polytope,
    pub reference: PLConvexFunction,
}

impl ToricContext {
    /// Reference metric `g_Delta`, the support function.
    pub fn new(delta: Polytope) -> Result<Self> {
        delta.require_full_dimensional()?;
        let reference = support_function(&delta);
        Ok(ToricContext { delta, reference })
    }

    pub fn with_reference(delta: Polytope, reference: PLConvexFunction) -> Result<Self> {
        delta.require_full_dimensional()?;
        check_admissible(&reference, &delta)?;
        Ok(ToricContext { delta, reference })
    }
}

impl PshContext for ToricContext {
    type Potential = PLConvexFunction;
    type Psi = ToricPsi;
    type Perturbation = ToricPsi;
    type Measure = DiscreteMeasure;

    fn degree(&self) -> Rational {
        factorial(self.delta.dim()) * self.delta.volume()
    }

    fn envelope(&self, psi: &ToricPsi) -> Result<PLConvexFunction> {
        envelope_toric(psi, &self.delta)
    }

    fn energy(&self, phi: &PLConvexFunction) -> Result<Rational> {
        energy_toric(phi, &self.reference, &self.delta)
    }

    fn ma(&self, phi: &PLConvexFunction) -> Result<DiscreteMeasure> {
        Ok(ma_measure(phi, &self.delta)?.berkovich_measure())
    }

    fn as_psi(&self, phi: &PLConvexFunction) -> ToricPsi {
        ToricPsi::from_convex(phi)
    }

    fn perturb(&self, phi: &PLConvexFunction, f: &ToricPsi, t: &Rational) -> Result<ToricPsi> {
        if !f.coefficient_sum().is_zero() {
            return Err(Error::InvalidArgument("perturbation must have coefficient sum 0".into()));
        }
        Ok(ToricPsi::from_convex(phi).add(&f.scale(t)))
    }

    fn integrate(&self, psi: &ToricPsi, mu: &DiscreteMeasure) -> Rational {
        mu.integrate(|v| psi.eval(v) - self.reference.eval_unchecked(v))
    }

    fn integrate_perturbation(&self, f: &ToricPsi, mu: &DiscreteMeasure) -> Rational {
        mu.integrate(|v| f.eval(v))
    }

    fn sup_norm(&self, f: &ToricPsi) -> Rational {
        f.sup_norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::toric_ma::{pl_from_ints, point_mass_solution};
    use crate::variational::{default_t_grid, energy_of_envelope_derivative, orthogonality_defect};

    fn interval() -> Polytope {
        Polytope::unit_cube(1)
    }

    #[test]
    fn energy_examples() {
        let delta = interval();
        let g0 = support_function(&delta);
        assert!(energy_toric(&g0, &g0, &delta).unwrap().is_zero());
        assert_eq!(energy_toric(&g0.add_constant(&int(3)), &g0, &delta).unwrap(), int(3));
        // g = max(0, v - 1): MA(g) = delta_1, MA(g0) = delta_0, g - g0 is
        // 0 at 0 and -1 at 1, so E = (0 + (-1)) / 2.
        let g = pl_from_ints(1, &[(&[0], 0), (&[1], 1)]).unwrap();
        assert_eq!(energy_toric(&g, &g0, &delta).unwrap(), rat(-1, 2));
        assert_eq!(energy_toric(&g0, &g, &delta).unwrap(), rat(1, 2));
        let square = Polytope::unit_cube(2);
        let h0 = support_function(&square);
        assert_eq!(energy_toric(&h0.add_constant(&rat(1, 3)), &h0, &square).unwrap(), rat(2, 3));
    }

    #[test]
    fn f_mu_constancy() {
        let delta = Polytope::standard_simplex(2);
        let g0 = support_function(&delta);
        let g = pl_from_ints(2, &[(&[0, 0], 0), (&[1, 0], 1), (&[0, 1], -1)]).unwrap();
        let mu = DiscreteMeasure::dirac(Point::from_ints(&[1, 1]), int(1)).unwrap();
        let f = f_mu_toric(&g, &mu, &g0, &delta).unwrap();
        assert_eq!(f_mu_toric(&g.add_constant(&rat(5, 7)), &mu, &g0, &delta).unwrap(), f);
        assert!(f_mu_toric(&g0, &mu, &g0, &delta).unwrap().is_zero());
        let heavy = mu.scale(&int(2)).unwrap();
        assert!(matches!(f_mu_toric(&g, &heavy, &g0, &delta), Err(Error::MassMismatch { .. })));
    }

    /// Largest minorant on a grid: the discrete Legendre transform twice.
    fn grid_envelope(psi: impl Fn(f64) -> f64, x: f64) -> f64 {
        let xs: Vec<f64> = (0..=4000).map(|i| -10.0 + i as f64 * 0.005).collect();
        (0..=1000)
            .map(|j| {
                let u = -1.0 + j as f64 / 500.0;
                let dual = xs.iter().map(|&y| u * y - psi(y)).fold(f64::MIN, f64::max);
                u * x - dual
            })
            .fold(f64::MIN, f64::max)
    }

    #[test]
    fn envelope_of_two_wells() {
        let delta = Polytope::new(1, vec![Point::from_ints(&[-1]), Point::from_ints(&[1])]).unwrap();
        let a = point_mass_solution(&delta, &Point::from_ints(&[-1])).unwrap();
        let b = point_mass_solution(&delta, &Point::from_ints(&[2])).unwrap();
        let psi = ToricPsi::min(&a, &b).unwrap();
        let p = envelope_toric(&psi, &delta).unwrap();
        assert_eq!(p, pl_from_ints(1, &[(&[-1], 1), (&[0], 0), (&[1], 2)]).unwrap());
        for i in -30..=50 {
            let x = i as f64 / 10.0;
            let v = Point::new(vec![crate::rational::from_f64(x).unwrap()]);
            let exact = crate::rational::to_f64(&p.eval(&v).unwrap());
            let oracle = grid_envelope(|y| (y + 1.0).abs().min((y - 2.0).abs()), x);
            assert!((exact - oracle).abs() < 1e-2, "x = {x}: {exact} vs {oracle}");
            assert!(p.eval(&v).unwrap() <= psi.eval(&v));
        }
        let ctx = ToricContext::new(delta).unwrap();
        assert!(orthogonality_defect(&ctx, &psi).unwrap().is_zero());
    }

    #[test]
    fn envelope_of_convex_is_identity() {
        let delta = Polytope::unit_cube(2);
        let g = pl_from_ints(2, &[(&[0, 0], 0), (&[1, 0], 0), (&[0, 1], 0), (&[1, 1], 1)]).unwrap();
        assert_eq!(envelope_toric(&ToricPsi::from_convex(&g), &delta).unwrap(), g);
        let ctx = ToricContext::new(delta).unwrap();
        assert!(orthogonality_defect(&ctx, &ToricPsi::from_convex(&g)).unwrap().is_zero());
    }

    #[test]
    fn constant_perturbation_has_derivative_degree() {
        let ctx = ToricContext::new(Polytope::standard_simplex(2)).unwrap();
        let g = pl_from_ints(2, &[(&[0, 0], 0), (&[1, 0], 1), (&[0, 1], -1)]).unwrap();
        let one = ToricPsi::difference(&ctx.reference.add_constant(&int(1)), &ctx.reference).unwrap();
        assert_eq!(one.sup_norm(), int(1));
        let d = energy_of_envelope_derivative(&ctx, &g, &one, &default_t_grid()).unwrap();
        assert_eq!(d.exact, int(1));
        assert!(d.estimates.iter().all(|(_, e)| e == &int(1)));
    }
}
