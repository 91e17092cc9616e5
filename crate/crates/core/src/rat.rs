//! Arbitrary-precision rational scalars.
//!
//! `Rat` is the carrier for every exact quantity in the engine. Values are
//! always in lowest terms with positive denominator (guaranteed by
//! `num::BigRational`). Rationals are written `p/q` (or a bare integer) in
//! all file formats and reports.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Rational from an `i64`.
pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `p/q`; panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Parse `p/q`, `p`, or `-p/q` with arbitrary-precision parts.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rat::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(Rat::from_integer(p))
    }
}

/// Canonical `p/q` rendering (bare integer when the denominator is 1).
pub fn format_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of lossy parts for out-of-range big integers.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact floor as a big integer.
pub fn rat_floor(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// n! as a rational.
pub fn factorial(n: usize) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    Rat::from_integer(acc)
}

/// gcd of the numerators' absolute values, ignoring zeros.
fn gcd_numerators(values: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for v in values {
        g = num::integer::gcd(g, v.abs());
    }
    g
}

/// Scale a rational vector to the primitive integer vector pointing the same
/// way. Returns `(primitive, t)` with `primitive = t * v`, `t > 0`. The zero
/// vector maps to itself with `t = 1`.
pub fn primitive_vector(v: &[Rat]) -> (Vec<BigInt>, Rat) {
    let mut denom_lcm = BigInt::one();
    for x in v {
        denom_lcm = num::integer::lcm(denom_lcm, x.denom().clone());
    }
    let scaled: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let g = gcd_numerators(&scaled);
    if g.is_zero() {
        return (scaled, rat_one());
    }
    let prim: Vec<BigInt> = scaled.iter().map(|x| x / &g).collect();
    let t = Rat::new(denom_lcm, g);
    (prim, t)
}

/// Least positive integer m with m*v integral.
pub fn denominator_lcm(v: &[Rat]) -> BigInt {
    let mut m = BigInt::one();
    for x in v {
        m = num::integer::lcm(m, x.denom().clone());
    }
    m
}

pub fn is_negative(x: &Rat) -> bool {
    x.numer().sign() == Sign::Minus
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rat("3/4"), Some(rat(3, 4)));
        assert_eq!(parse_rat("-6/8"), Some(rat(-3, 4)));
        assert_eq!(parse_rat("5"), Some(rat_i(5)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(format_rat(&rat(10, 4)), "5/2");
        assert_eq!(format_rat(&rat_i(-7)), "-7");
    }

    #[test]
    fn primitive_scaling() {
        let v = vec![rat(1, 2), rat(-3, 4)];
        let (prim, t) = primitive_vector(&v);
        assert_eq!(prim, vec![BigInt::from(2), BigInt::from(-3)]);
        assert_eq!(t, rat_i(4));
        // primitive = t * v holds.
        for (p, x) in prim.iter().zip(&v) {
            assert_eq!(Rat::from_integer(p.clone()), &t * x);
        }
    }

    #[test]
    fn floor_and_factorial() {
        assert_eq!(rat_floor(&rat(7, 2)), BigInt::from(3));
        assert_eq!(rat_floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(factorial(5), rat_i(120));
    }
}
