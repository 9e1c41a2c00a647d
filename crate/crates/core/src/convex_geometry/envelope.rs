//! Largest convex minorant with slopes in a polytope.
//!
//! For samples `(v_i, y_i)` the affine minorants with slope `u` are
//! bounded by `F(u) = max_i (<u, v_i> - y_i)`, so the envelope is the
//! Legendre transform `h(v) = max_{u in Delta} (<u, v> - F(u))`. The
//! maximum is attained at vertices of the epigraph of `F` over `Delta`,
//! which are enumerated exactly by double description.

use num_traits::{One, Zero};

use super::dd::{DoubleDescription, HalfSpace};
use super::{AffineFunctional, PLConvexFunction, Point, Polytope};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// The pointwise-largest convex function `h` with slopes in `delta` and
/// `h(v_i) <= y_i` for every sample.
pub fn convex_envelope(samples: &[(Point, Rational)], delta: &Polytope) -> Result<PLConvexFunction> {
    if samples.is_empty() {
        return Err(Error::Empty("convex envelope needs at least one sample"));
    }
    for (v, _) in samples {
        v.check_dim(delta.dim())?;
    }
    let n = delta.dim();
    if delta.vertices().len() == 1 {
        let u = delta.vertices()[0].clone();
        let c = dual_value(samples, &u);
        return Ok(PLConvexFunction::from_irredundant(n, vec![AffineFunctional::new(u, c)]));
    }
    let facets = delta.facets()?;

    // F on the vertices of Delta bounds F over Delta from above; a single
    // sample bounds it from below.
    let top = delta.vertices().iter().map(|u| dual_value(samples, u)).max().unwrap() + Rational::one();
    let (v0, y0) = &samples[0];
    let bottom = delta.vertices().iter().map(|u| u.dot(v0) - y0).min().unwrap() - Rational::one();

    let mut constraints: Vec<HalfSpace> = facets
        .into_iter()
        .map(|h| {
            let mut normal = h.normal;
            normal.push(Rational::zero());
            HalfSpace::new(normal, h.offset)
        })
        .collect();
    let mut up = vec![Rational::zero(); n + 1];
    up[n] = Rational::one();
    let down: Vec<Rational> = up.iter().map(|x| -x).collect();
    constraints.push(HalfSpace::new(down, -bottom.clone()));
    constraints.push(HalfSpace::new(up, top.clone()));

    let mut vertices = Vec::with_capacity(2 * delta.vertices().len());
    for u in delta.vertices() {
        for t in [&bottom, &top] {
            let mut x = u.coords().to_vec();
            x.push(t.clone());
            vertices.push(x);
        }
    }
    let mut dd = DoubleDescription::new(n + 1, constraints, vertices);
    for (v, y) in samples {
        let mut normal = v.coords().to_vec();
        normal.push(-Rational::one());
        dd.add(HalfSpace::new(normal, y.clone()));
    }

    let pieces = dd
        .vertices()
        .iter()
        .filter(|x| x.point[n] != top)
        .map(|x| {
            let u = Point::new(x.point[..n].to_vec());
            AffineFunctional::new(u, x.point[n].clone())
        })
        .collect();
    // Lower vertices of the epigraph are exposed with a strictly
    // negative last coordinate, hence each is the unique maximum somewhere.
    Ok(PLConvexFunction::from_irredundant(n, pieces))
}

/// `F(u) = max_i (<u, v_i> - y_i)`.
pub(crate) fn dual_value(samples: &[(Point, Rational)], u: &Point) -> Rational {
    samples.iter().map(|(v, y)| u.dot(v) - y).max().expect("nonempty samples")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_geometry::{breakpoints, support_function};
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> Point {
        Point::from_ints(c)
    }

    #[test]
    fn envelope_of_convex_data_is_identity() {
        let delta = Polytope::standard_simplex(2);
        let g = support_function(&delta).add_constant(&int(1));
        let samples: Vec<_> = breakpoints(&g)
            .into_iter()
            .map(|v| {
                let y = g.eval(&v).unwrap();
                (v, y)
            })
            .collect();
        assert_eq!(convex_envelope(&samples, &delta).unwrap(), g);
    }

    #[test]
    fn one_dimensional_hull() {
        // Samples of |v| - 1 at -1, 0, 1 with slopes in [-1, 1].
        let delta = Polytope::new(1, vec![p(&[-1]), p(&[1])]).unwrap();
        let samples = vec![(p(&[-1]), int(0)), (p(&[0]), int(-1)), (p(&[1]), int(0))];
        let h = convex_envelope(&samples, &delta).unwrap();
        assert_eq!(h, PLConvexFunction::from_pairs(1, vec![(p(&[-1]), int(1)), (p(&[1]), int(1))]).unwrap());
        // Restricting the slopes flattens the envelope.
        let narrow = Polytope::new(1, vec![Point::new(vec![rat(-1, 2)]), Point::new(vec![rat(1, 2)])]).unwrap();
        let h = convex_envelope(&samples, &narrow).unwrap();
        assert_eq!(h.eval(&p(&[1])).unwrap(), rat(-1, 2));
        assert_eq!(h.eval(&p(&[0])).unwrap(), int(-1));
    }

    #[test]
    fn single_sample_gives_translated_support_function() {
        let delta = Polytope::unit_cube(2);
        let h = convex_envelope(&[(p(&[1, 2]), int(3))], &delta).unwrap();
        let expected = support_function(&delta).translate(&p(&[1, 2])).unwrap().add_constant(&int(3));
        assert_eq!(h, expected);
    }

    #[test]
    fn errors() {
        let delta = Polytope::unit_cube(1);
        assert!(matches!(convex_envelope(&[], &delta), Err(Error::Empty(_))));
        assert!(convex_envelope(&[(p(&[1, 1]), int(0))], &delta).is_err());
    }
}
