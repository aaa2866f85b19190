//! Reduced rational functions over ℚ with monic denominators.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{forward_owned, Poly};
use crate::rational::{q, Q};

/// `num/den` with `gcd(num, den) = 1` and `den` monic, so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Reduce `num/den` to canonical form.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        Self::normalize_lc(num, den)
    }

    fn normalize_lc(num: Poly, den: Poly) -> Self {
        let l = den.lc();
        if l.is_one() {
            RatFunc { num, den }
        } else {
            let inv = l.recip();
            RatFunc {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(a: Q) -> Self {
        RatFunc {
            num: Poly::constant(a),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(q(n))
    }

    pub fn x() -> Self {
        RatFunc {
            num: Poly::x(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value if `self` is constant.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn scale(&self, a: &Q) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(a),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize_lc(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self * &o.inv()?)
    }

    pub fn derivative(&self) -> RatFunc {
        if self.den.is_constant() {
            return RatFunc::from_poly(self.num.derivative());
        }
        // (n/d)' = (n'd - nd')/d², with the common factor gcd(d, d') removed early.
        let dp = self.den.derivative();
        let g = self.den.gcd(&dp);
        let d1 = self.den.exact_div(&g);
        let num = &(&self.num.derivative() * &d1) - &(&self.num * &dp.exact_div(&g));
        Self::reduce(num, &d1 * &self.den)
    }

    /// `k`-th derivative.
    pub fn derivative_n(&self, k: usize) -> RatFunc {
        let mut f = self.clone();
        for _ in 0..k {
            f = f.derivative();
        }
        f
    }

    pub fn pow(&self, e: i64) -> RatFunc {
        if e >= 0 {
            RatFunc {
                num: self.num.pow(e as u32),
                den: self.den.pow(e as u32),
            }
        } else {
            self.inv().expect("negative power of the zero function").pow(-e)
        }
    }

    /// Value at a rational point, `None` at a pole.
    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    /// `self(y(x))`.
    pub fn compose(&self, y: &RatFunc) -> RatFunc {
        let m = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        let homog = |p: &Poly| -> Poly {
            let mut npow = vec![Poly::one()];
            let mut dpow = vec![Poly::one()];
            for _ in 0..m {
                npow.push(npow.last().unwrap() * &y.num);
                dpow.push(dpow.last().unwrap() * &y.den);
            }
            let mut acc = Poly::zero();
            for (i, a) in p.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    acc = &acc + &(&npow[i] * &dpow[m - i]).scale(a);
                }
            }
            acc
        };
        Self::reduce(homog(&self.num), homog(&self.den))
    }

    /// Order of vanishing at `x = 0` (negative for a pole), `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        let vd = self.den.valuation().unwrap_or(0) as i64;
        Some(vn - vd)
    }
}

impl Zero for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RatFunc {
    fn one() -> Self {
        RatFunc::one()
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = self.den.gcd(&o.den);
        let a = o.den.exact_div(&g);
        let b = self.den.exact_div(&g);
        let num = &(&self.num * &a) + &(&o.num * &b);
        RatFunc::reduce(num, &self.den * &a)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let n1 = if g1.is_one() {
            self.num.clone()
        } else {
            self.num.exact_div(&g1)
        };
        let d2 = if g1.is_one() {
            o.den.clone()
        } else {
            o.den.exact_div(&g1)
        };
        let n2 = if g2.is_one() {
            o.num.clone()
        } else {
            o.num.exact_div(&g2)
        };
        let d1 = if g2.is_one() {
            self.den.clone()
        } else {
            self.den.exact_div(&g2)
        };
        RatFunc::normalize_lc(&n1 * &n2, &d1 * &d2)
    }
}

impl Div for &RatFunc {
    type Output = RatFunc;
    fn div(self, o: &RatFunc) -> RatFunc {
        self.checked_div(o).expect("division by the zero function")
    }
}

forward_owned!(RatFunc, Add, add);
forward_owned!(RatFunc, Sub, sub);
forward_owned!(RatFunc, Mul, mul);
forward_owned!(RatFunc, Div, div);

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl From<Q> for RatFunc {
    fn from(a: Q) -> Self {
        RatFunc::constant(a)
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc::from_poly(p)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncRepr {
    num: Poly,
    den: Poly,
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncRepr {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

struct RatFuncVisitor;

impl<'de> serde::de::Visitor<'de> for RatFuncVisitor {
    type Value = RatFunc;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an expression string or {\"num\": [...], \"den\": [...]}")
    }

    fn visit_str<E: serde::de::Error>(self, v: &str) -> std::result::Result<RatFunc, E> {
        crate::expr::parse_ratfunc(v).map_err(E::custom)
    }

    fn visit_map<A: serde::de::MapAccess<'de>>(self, m: A) -> std::result::Result<RatFunc, A::Error> {
        let r = RatFuncRepr::deserialize(serde::de::value::MapAccessDeserializer::new(m))?;
        RatFunc::new(r.num, r.den).map_err(serde::de::Error::custom)
    }
}

/// Accepts `{"num": [...], "den": [...]}` or an expression string.
impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_any(RatFuncVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn x() -> RatFunc {
        RatFunc::x()
    }

    #[test]
    fn canonical_reduction() {
        let f = RatFunc::new(Poly::from_ints(&[-1, 0, 1]), Poly::from_ints(&[-1, 1])).unwrap();
        assert_eq!(f, RatFunc::from_poly(Poly::from_ints(&[1, 1])));
        let g = RatFunc::new(Poly::from_ints(&[2]), Poly::from_ints(&[0, 4])).unwrap();
        assert_eq!(g.den(), &Poly::x());
        assert_eq!(g.num(), &Poly::constant(qf(1, 2)));
        assert!(RatFunc::new(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn sum_of_reciprocals() {
        let inv = x().inv().unwrap();
        assert_eq!(&inv + &inv, RatFunc::int(2) * x().inv().unwrap());
    }

    #[test]
    fn derivative_of_reciprocal() {
        let inv = x().inv().unwrap();
        assert_eq!(inv.derivative(), -(x().pow(-2)));
        assert!(RatFunc::int(7).derivative().is_zero());
    }

    #[test]
    fn compose_square_with_reciprocal() {
        let f = x().pow(2);
        let y = x().inv().unwrap();
        assert_eq!(f.compose(&y), x().pow(-2));
    }

    #[test]
    fn valuation_and_eval() {
        let f = (x() - RatFunc::int(1)) / x().pow(3);
        assert_eq!(f.valuation(), Some(-3));
        assert_eq!(f.eval(&q(2)), Some(qf(1, 8)));
        assert_eq!(f.eval(&q(0)), None);
    }

    #[test]
    fn json_round_trip() {
        let f = (x() * RatFunc::constant(qf(3, 2)) - RatFunc::int(1)) / (x() * (RatFunc::int(1) - x()));
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"num":["1","-3/2"],"den":["0","-1","1"]}"#);
        let back: RatFunc = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }
}
