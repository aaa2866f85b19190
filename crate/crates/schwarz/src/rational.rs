//! Rational scalars and their text encoding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always kept in lowest terms.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d == 0`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"n"` or `"n/d"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse {
        pos: 0,
        msg: format!("not a rational: {s:?}"),
    };
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical `"n/d"` text, with the denominator dropped when it is 1.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `x^e` for a signed integer exponent.
pub fn q_pow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Binomial coefficient as a rational.
pub fn binom(n: usize, k: usize) -> Q {
    if k > n {
        return Q::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(acc)
}

/// Exact `k`-th root of a rational if it exists.
pub fn q_root(x: &Q, k: u32) -> Option<Q> {
    if k == 1 {
        return Some(x.clone());
    }
    if x.is_negative() && k.is_multiple_of(2) {
        return None;
    }
    let n = int_root(x.numer(), k)?;
    let d = int_root(x.denom(), k)?;
    Some(Q::new(n, d))
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let neg = n.is_negative();
    let r = n.abs().nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == n.abs() {
        Some(if neg { -r } else { r })
    } else {
        None
    }
}

/// `x^(p/r)` when it is rational.
pub fn q_rat_pow(x: &Q, e: &Q) -> Option<Q> {
    let r = e.denom().to_u32()?;
    let p = e.numer().to_i64()?;
    let root = q_root(x, r)?;
    if root.is_zero() && p < 0 {
        return None;
    }
    Some(q_pow(&root, p))
}

/// Serde adapters for rationals encoded as text.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
            let v = Vec::<String>::deserialize(d)?;
            v.iter().map(|s| parse_q(s).map_err(serde::de::Error::custom)).collect()
        }
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_some(&fmt_q(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
            let v = Option::<String>::deserialize(d)?;
            v.map(|s| parse_q(&s).map_err(serde::de::Error::custom)).transpose()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for s in ["0", "5", "-3/4", "12345678901234567890/7"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(fmt_q(&parse_q("6/8").unwrap()), "3/4");
        assert_eq!(fmt_q(&parse_q("4/-2").unwrap()), "-2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn roots_and_powers() {
        assert_eq!(q_root(&qf(9, 4), 2), Some(qf(3, 2)));
        assert_eq!(q_root(&qf(2, 1), 2), None);
        assert_eq!(q_root(&qf(-8, 27), 3), Some(qf(-2, 3)));
        assert_eq!(q_rat_pow(&qf(4, 9), &qf(-3, 2)), Some(qf(27, 8)));
        assert_eq!(binom(6, 2), q(15));
        assert_eq!(q_pow(&qf(2, 3), -2), qf(9, 4));
    }
}
