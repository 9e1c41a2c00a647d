//! Exact rational scalars.
//!
//! Geometry, measures and energies are all computed over [`Rational`]
//! (arbitrary precision, always in lowest terms with a positive
//! denominator). Floating point is confined to the iterative solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num_rational::BigRational as Rational;

/// `numer / denom` as an exact rational. Panics if `denom == 0`.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(Rational::one(), |acc, k| acc * int(k as i64))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Ok(r) = s.parse::<Rational>() {
        if r.denom().is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(r);
    }
    parse_decimal(s).ok_or_else(|| Error::Parse(format!("not a rational number: {s:?}")))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.')?;
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = digits.parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// `"p"` when the denominator is one, `"p/q"` otherwise.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// The exact binary value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Best rational approximation of `x` with denominator at most `max_denom`
/// (last continued-fraction convergent or semiconvergent within the bound).
pub fn approximate(x: f64, max_denom: u64) -> Option<Rational> {
    let exact = from_f64(x)?;
    let max_denom = BigInt::from(max_denom.max(1));
    if exact.denom() <= &max_denom {
        return Some(exact);
    }
    // Continued fraction expansion of the exact binary value.
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rem = exact.clone();
    loop {
        let a = rem.floor().to_integer();
        let q2 = &a * &q1 + &q0;
        if q2 > max_denom {
            // Largest admissible semiconvergent.
            let k = (&max_denom - &q0).div_floor(&q1);
            let semi = Rational::new(&k * &p1 + &p0, &k * &q1 + &q0);
            let conv = Rational::new(p1.clone(), q1.clone());
            let d_semi = (&semi - &exact).abs();
            let d_conv = (&conv - &exact).abs();
            return Some(if d_semi < d_conv { semi } else { conv });
        }
        let p2 = &a * &p1 + &p0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rem - Rational::from_integer(a);
        if frac.is_zero() {
            return Some(Rational::new(p1, q1));
        }
        rem = frac.recip();
    }
}

/// Formats with 12 significant digits, the CSV rendering.
pub fn to_decimal(r: &Rational) -> String {
    let x = to_f64(r);
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", 11, x);
    // Prefer plain notation for moderate magnitudes.
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let plain = format!("{:.*}", decimals, x);
        let plain =
            if plain.contains('.') { plain.trim_end_matches('0').trim_end_matches('.').to_string() } else { plain };
        return plain;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse("-.5").unwrap(), rat(-1, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format(&rat(2, 4)), "1/2");
        assert_eq!(format(&rat(6, 3)), "2");
        assert_eq!(format(&rat(-1, 3)), "-1/3");
    }

    #[test]
    fn approximation_recovers_small_fractions() {
        assert_eq!(approximate(1.0 / 3.0, 1000).unwrap(), rat(1, 3));
        assert_eq!(approximate(-0.7142857142857143, 100).unwrap(), rat(-5, 7));
        let pi = approximate(std::f64::consts::PI, 120).unwrap();
        assert_eq!(pi, rat(355, 113));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 64)), "0.015625");
        assert_eq!(to_decimal(&rat(1, 3)), "0.333333333333");
        assert_eq!(to_decimal(&int(0)), "0");
    }
}
