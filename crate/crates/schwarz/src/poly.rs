//! Dense univariate polynomials over ℚ.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{fmt_q, q, Q};

/// Polynomial with coefficients stored low degree first, trailing zeros stripped.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Q>,
}

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: vec![] }
    }

    pub fn one() -> Self {
        Poly { c: vec![Q::one()] }
    }

    pub fn constant(a: Q) -> Self {
        Poly::new(vec![a])
    }

    pub fn x() -> Self {
        Poly {
            c: vec![Q::zero(), Q::one()],
        }
    }

    /// `a·x^k`.
    pub fn monomial(a: Q, k: usize) -> Self {
        let mut c = vec![Q::zero(); k + 1];
        c[k] = a;
        Poly::new(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| q(v)).collect())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Q> {
        self.c
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Q {
        self.c.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> Q {
        self.c.last().cloned().unwrap_or_else(Q::zero)
    }

    /// Order of vanishing at 0; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.c.iter().position(|x| !x.is_zero())
    }

    pub fn scale(&self, a: &Q) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly {
            c: self.c.iter().map(|x| x * a).collect(),
        }
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); k];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * q(i as i64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    /// `self(g(x))` by Horner.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * g) + &Poly::constant(a.clone());
        }
        acc
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("polynomial division by zero");
        if self.degree().is_none_or(|n| n < dd) {
            return (Poly::zero(), self.clone());
        }
        let inv = d.lc().recip();
        let mut r = self.c.clone();
        let n = r.len() - 1;
        let mut quo = vec![Q::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let t = &r[k + dd] * &inv;
            if t.is_zero() {
                continue;
            }
            for (i, di) in d.c.iter().enumerate() {
                if !di.is_zero() {
                    r[k + i] -= &t * di;
                }
            }
            quo[k] = t;
        }
        r.truncate(dd);
        (Poly::new(quo), Poly::new(r))
    }

    /// Quotient of an exact division; panics if the remainder is nonzero.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let (qu, r) = self.divrem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        qu
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        let mut a = IntPoly::primitive_of(self);
        let mut b = IntPoly::primitive_of(other);
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b).primitive();
            a = b;
            b = r;
        }
        a.to_poly().monic()
    }

    /// Integer representation `(c, P)` with `self = P / c`, `P` integral and `c > 0`
    /// the least common denominator.
    pub fn clear_denominators(&self) -> (BigInt, Vec<BigInt>) {
        let mut l = BigInt::one();
        for a in &self.c {
            l = l.lcm(a.denom());
        }
        let v = self
            .c
            .iter()
            .map(|a| (a * Q::from_integer(l.clone())).to_integer())
            .collect();
        (l, v)
    }

    /// All distinct rational roots.
    pub fn rational_roots(&self) -> Vec<Q> {
        let mut out = vec![];
        if self.is_zero() {
            return out;
        }
        let mut p = self.clone();
        if p.coeff(0).is_zero() {
            out.push(Q::zero());
            let v = p.valuation().unwrap_or(0);
            p = Poly::new(p.c[v..].to_vec());
        }
        if p.is_constant() {
            return out;
        }
        let (_, ints) = p.clear_denominators();
        let a0 = ints[0].abs();
        let an = ints.last().unwrap().abs();
        let dn = divisors(&a0);
        let dd = divisors(&an);
        for n in &dn {
            for d in &dd {
                for s in [1i64, -1] {
                    let r = Q::new(n * BigInt::from(s), d.clone());
                    if p.eval(&r).is_zero() && !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = vec![];
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

/// Integer polynomial used by the primitive remainder sequence.
#[derive(Clone)]
struct IntPoly(Vec<BigInt>);

impl IntPoly {
    fn primitive_of(p: &Poly) -> IntPoly {
        IntPoly(p.clear_denominators().1).primitive()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn deg(&self) -> usize {
        self.0.len() - 1
    }

    fn trim(mut self) -> IntPoly {
        while self.0.last().is_some_and(|x| x.is_zero()) {
            self.0.pop();
        }
        self
    }

    fn primitive(self) -> IntPoly {
        let s = self.trim();
        if s.is_zero() {
            return s;
        }
        let mut g = BigInt::zero();
        for a in &s.0 {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        let neg = s.0.last().unwrap().is_negative();
        let g = if neg { -g } else { g };
        IntPoly(s.0.into_iter().map(|a| a / &g).collect())
    }

    fn prem(&self, b: &IntPoly) -> IntPoly {
        let mut r = self.0.clone();
        let db = b.deg();
        let lb = b.0[db].clone();
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for x in r.iter_mut() {
                *x *= &lb;
            }
            for (i, bi) in b.0.iter().enumerate() {
                r[dr - db + i] -= &lr * bi;
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        IntPoly(r)
    }

    fn to_poly(&self) -> Poly {
        Poly::new(self.0.iter().cloned().map(Q::from_integer).collect())
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::new(c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            c: self.c.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Poly::new(c)
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                (&self).$m(&o)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t {
                (&self).$m(o)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                self.$m(&o)
            }
        }
    };
}
pub(crate) use forward_owned;

forward_owned!(Poly, Add, add);
forward_owned!(Poly, Sub, sub);
forward_owned!(Poly, Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let m = a.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let coef = fmt_q(&m);
            let show_coef = i == 0 || !m.is_one();
            let wrap = show_coef && i > 0 && coef.contains('/');
            if show_coef {
                if wrap {
                    write!(f, "({coef})")?;
                } else {
                    write!(f, "{coef}")?;
                }
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::rational::serde_q::vec::serialize(&self.c, s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        crate::rational::serde_q::vec::deserialize(d).map(Poly::new)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn arithmetic_and_division() {
        let a = Poly::from_ints(&[-1, 0, 1]);
        let b = Poly::from_ints(&[-1, 1]);
        let (qu, r) = a.divrem(&b);
        assert_eq!(qu, Poly::from_ints(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(&qu * &b, a);
        assert_eq!((&a - &a).degree(), None);
    }

    #[test]
    fn gcd_is_monic() {
        let a = Poly::from_ints(&[-2, 0, 2]); // 2(x-1)(x+1)
        let b = Poly::from_ints(&[3, -6, 3]); // 3(x-1)^2
        assert_eq!(a.gcd(&b), Poly::from_ints(&[-1, 1]));
        let c = Poly::new(vec![qf(1, 3), qf(1, 2)]);
        assert_eq!(c.gcd(&Poly::zero()), Poly::new(vec![qf(2, 3), q(1)]));
    }

    #[test]
    fn compose_and_roots() {
        let p = Poly::from_ints(&[0, 0, 1]);
        let g = Poly::from_ints(&[1, 1]);
        assert_eq!(p.compose(&g), Poly::from_ints(&[1, 2, 1]));
        let r = Poly::from_ints(&[-6, 1, 1]).rational_roots(); // (x+3)(x-2)
        assert!(r.contains(&q(2)) && r.contains(&q(-3)));
        let r = Poly::from_ints(&[-1, 3, 0]).rational_roots();
        assert_eq!(r, vec![qf(1, 3)]);
    }

    #[test]
    fn display() {
        let p = Poly::new(vec![qf(1, 2), q(-1), q(3)]);
        assert_eq!(p.to_string(), "3*x^2 - x + 1/2");
    }
}
