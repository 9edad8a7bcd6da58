//! Exact scalars and coordinate vectors.
//!
//! Every quantity in the crate is an arbitrary-precision rational. Values are
//! always kept in lowest terms with a positive denominator, which is what
//! [`num_rational::BigRational`] guarantees after every operation.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{input, Result};

pub type Rational = num_rational::BigRational;

/// A point of a finite-dimensional coordinate space.
pub type Vector = Vec<Rational>;

pub fn q(numer: i64, denom: i64) -> Rational {
    assert!(denom != 0, "zero denominator");
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Integer coordinates to an exact vector.
pub fn ivec(coords: &[i64]) -> Vector {
    coords.iter().map(|&c| int(c)).collect()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Decimal points and exponents are rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let parse_int = |s: &str| -> Result<BigInt> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return input(format!("not an exact rational: {text:?}"));
        }
        s.parse::<BigInt>()
            .or_else(|_| input(format!("not an exact rational: {text:?}")))
    };
    let n = parse_int(num)?;
    let d = parse_int(den)?;
    if d.is_zero() {
        return input(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(n, d))
}

/// Parses a comma separated list such as `"1/2, 1/4"` (surrounding brackets allowed).
pub fn parse_vector(text: &str) -> Result<Vector> {
    let inner = text
        .trim()
        .trim_start_matches(['(', '['])
        .trim_end_matches([')', ']']);
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(parse_rational).collect()
}

pub fn fmt_vector(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Scales a nonzero vector to the primitive integer vector on the same ray.
pub fn primitive_ray(v: &[Rational]) -> Vector {
    use num_integer::Integer;
    let mut lcm = BigInt::one();
    for c in v {
        lcm = lcm.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|c| (c * &lcm).to_integer()).collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|c| Rational::from_integer(c / &g))
        .collect()
}
