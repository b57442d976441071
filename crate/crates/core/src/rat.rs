//! Exact rational scalars and parsing/printing in the `p/q` wire format.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(int(v))
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(int(p), int(q))
}

/// Renders a rational as `p` or `p/q`, never as a float.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<Int> {
        t.trim()
            .parse::<Int>()
            .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rat::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
    }
}

/// lcm of two positive integers.
pub fn lcm_int(a: &Int, b: &Int) -> Int {
    num_integer::Integer::lcm(a, b)
}

/// lcm of the denominator of `r` with `acc`.
pub fn lcm_denom(acc: &Int, r: &Rat) -> Int {
    lcm_int(acc, &r.denom().abs())
}
