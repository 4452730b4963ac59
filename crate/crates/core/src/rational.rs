//! Small helpers around [`num_rational::BigRational`].

use alloc::string::String;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

pub type Q = num_rational::BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let t = s.trim();
    let bad = || Error::Parse(alloc::format!("not a rational: {s:?}"));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Lowest terms, sign on the numerator, integers without a denominator.
pub fn fmt_q(x: &Q) -> String {
    alloc::format!("{x}")
}

pub fn floor(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Largest integer `n >= 0` with `n*n <= x`; zero for negative `x`.
pub fn floor_sqrt(x: &Q) -> BigInt {
    if !x.is_positive() {
        return BigInt::zero();
    }
    let mut n = floor(x).sqrt();
    // floor(sqrt(floor x)) == floor(sqrt x), but stay honest about it
    while Q::from_integer((&n + 1u32) * (&n + 1u32)) <= *x {
        n += 1u32;
    }
    n
}

pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-3", "5/2", "-1/3", "7/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("4/6").unwrap()), "2/3");
        assert_eq!(fmt_q(&parse_q("1/-2").unwrap()), "-1/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn integer_sqrt() {
        assert_eq!(floor_sqrt(&q(9, 4)), BigInt::from(1));
        assert_eq!(floor_sqrt(&qi(4)), BigInt::from(2));
        assert_eq!(floor_sqrt(&q(399, 100)), BigInt::from(1));
        assert_eq!(floor_sqrt(&q(-1, 2)), BigInt::from(0));
    }
}
