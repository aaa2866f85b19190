//! Truncated Laurent series over ℚ with tracked precision.
//!
//! A [`Series`] stores the coefficients of `x^val … x^order`; everything above
//! `order` is unknown. Every operation returns the largest order that is provably
//! exact given the orders of its inputs. Trailing zeros up to `order` are not
//! stored, so exact polynomials can carry the order [`EXACT`].

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::{forward_owned, Poly};
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, q_pow, q_rat_pow, Q};

/// Order used for series that are exact polynomials.
pub const EXACT: i64 = i64::MAX / 8;

/// Longest relative precision accepted by loops that run up to the order.
const MAX_TERMS: i64 = 1 << 20;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    /// Exponent of `c[0]`; equals `order + 1` for the zero series.
    val: i64,
    /// Coefficients from `x^val` on; `c[0]` and the last entry are nonzero, and
    /// missing entries up to `order` are zero.
    c: Vec<Q>,
    order: i64,
}

impl Series {
    /// Series with coefficients `coeffs[i]` at `x^(start+i)`, known through `x^order`.
    /// Missing coefficients up to `order` are zero; extra ones are dropped.
    pub fn from_coeffs(start: i64, coeffs: Vec<Q>, order: i64) -> Series {
        let mut c = coeffs;
        let want = (order.saturating_sub(start).saturating_add(1)).max(0);
        if (c.len() as i64) > want {
            c.truncate(want as usize);
        }
        while c.last().is_some_and(|a| a.is_zero()) {
            c.pop();
        }
        match c.iter().position(|a| !a.is_zero()) {
            None => Series::zero(order),
            Some(p) => {
                c.drain(..p);
                Series {
                    val: start + p as i64,
                    c,
                    order,
                }
            }
        }
    }

    pub fn zero(order: i64) -> Series {
        Series {
            val: order + 1,
            c: vec![],
            order,
        }
    }

    pub fn one(order: i64) -> Series {
        Series::monomial(Q::one(), 0, order)
    }

    pub fn constant(a: Q, order: i64) -> Series {
        Series::monomial(a, 0, order)
    }

    /// The variable `x`, exact through `x^order`.
    pub fn x(order: i64) -> Series {
        Series::monomial(Q::one(), 1, order)
    }

    pub fn monomial(a: Q, k: i64, order: i64) -> Series {
        Series::from_coeffs(k, vec![a], order)
    }

    pub fn from_poly(p: &Poly, order: i64) -> Series {
        Series::from_coeffs(0, p.coeffs().to_vec(), order)
    }

    /// Laurent expansion of a rational function at `x = 0` through `x^order`.
    pub fn from_ratfunc(f: &RatFunc, order: i64) -> Series {
        if f.is_zero() {
            return Series::zero(order);
        }
        let v = f.den().valuation().unwrap() as i64;
        let d0 = Poly::new(f.den().coeffs()[v as usize..].to_vec());
        // f = x^(-v) · num/d0 with d0(0) != 0
        let rel = order + v;
        if rel < 0 {
            return Series::zero(order);
        }
        let num = Series::from_poly(f.num(), rel);
        let den = Series::from_poly(&d0, rel);
        (&num * &den.inv().unwrap()).shift(-v)
    }

    /// Formal hypergeometric series `pFq(a; b; x)` through `x^order`.
    pub fn hypergeometric(a: &[Q], b: &[Q], order: i64) -> Series {
        let mut c = vec![Q::one()];
        let mut t = Q::one();
        for n in 0..order.max(0) {
            let nq = q(n);
            for ai in a {
                t *= ai + &nq;
            }
            for bi in b {
                t /= bi + &nq;
            }
            t /= q(n + 1);
            c.push(t.clone());
        }
        Series::from_coeffs(0, c, order)
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Valuation, `None` if zero to the known order.
    pub fn val(&self) -> Option<i64> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    /// Lowest exponent that may carry a nonzero coefficient.
    fn val_or_order(&self) -> i64 {
        self.val
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Leading coefficient, zero for the zero series.
    pub fn lead(&self) -> Q {
        self.c.first().cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of `x^k`. Panics if `k` is above the known order.
    pub fn coeff(&self, k: i64) -> Q {
        assert!(k <= self.order, "coefficient x^{k} beyond known order {}", self.order);
        if k < self.val {
            Q::zero()
        } else {
            self.c.get((k - self.val) as usize).cloned().unwrap_or_else(Q::zero)
        }
    }

    /// Coefficients of `x^from … x^to`.
    pub fn coeffs_range(&self, from: i64, to: i64) -> Vec<Q> {
        (from..=to).map(|k| self.coeff(k)).collect()
    }

    /// Drop everything above `x^order`.
    pub fn truncate(&self, order: i64) -> Series {
        if order >= self.order {
            return self.clone();
        }
        let keep = (order - self.val + 1).max(0) as usize;
        Series::from_coeffs(self.val, self.c[..keep.min(self.c.len())].to_vec(), order)
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: i64) -> Series {
        Series {
            val: self.val + k,
            c: self.c.clone(),
            order: self.order.saturating_add(k),
        }
    }

    /// Exponent of the last stored coefficient.
    fn end(&self) -> i64 {
        if self.c.is_empty() {
            i64::MIN / 2
        } else {
            self.val + self.c.len() as i64 - 1
        }
    }

    /// Relative precision `order - val`, bounded for loops.
    fn rel_terms(&self) -> Result<usize> {
        let r = self.order - self.val;
        if r > MAX_TERMS {
            return Err(Error::Series("operation needs a finite truncation order".into()));
        }
        Ok(r.max(0) as usize)
    }

    pub fn scale(&self, a: &Q) -> Series {
        if a.is_zero() {
            return Series::zero(self.order);
        }
        Series {
            val: self.val,
            c: self.c.iter().map(|x| x * a).collect(),
            order: self.order,
        }
    }

    /// Substitute `x → a·x`.
    pub fn scale_var(&self, a: &Q) -> Series {
        if a.is_zero() {
            return Series::constant(self.coeff(0), self.order);
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, x)| x * q_pow(a, self.val + i as i64))
            .collect();
        Series::from_coeffs(self.val, c, self.order)
    }

    pub fn derivative(&self) -> Series {
        let c = self
            .c
            .iter()
            .enumerate()
            .map(|(i, a)| a * q(self.val + i as i64))
            .collect();
        Series::from_coeffs(self.val - 1, c, self.order - 1)
    }

    /// Multiplicative inverse; errors on the zero series.
    pub fn inv(&self) -> Result<Series> {
        if self.is_zero() {
            return Err(Error::Series(format!(
                "inverse of a series that vanishes through x^{}",
                self.order
            )));
        }
        let u0inv = self.c[0].recip();
        if self.c.len() == 1 {
            return Ok(Series {
                val: -self.val,
                c: vec![u0inv],
                order: self.order.saturating_sub(2 * self.val),
            });
        }
        let r = self.rel_terms()?;
        let mut w: Vec<Q> = Vec::with_capacity(r + 1);
        w.push(u0inv.clone());
        for n in 1..=r {
            let mut s = Q::zero();
            for k in 1..=n.min(self.c.len() - 1) {
                if !self.c[k].is_zero() {
                    s += &self.c[k] * &w[n - k];
                }
            }
            w.push(-(s * &u0inv));
        }
        Ok(Series::from_coeffs(-self.val, w, -self.val + r as i64))
    }

    pub fn checked_div(&self, o: &Series) -> Result<Series> {
        Ok(self * &o.inv()?)
    }

    pub fn pow_int(&self, e: i64) -> Result<Series> {
        if e < 0 {
            return self.inv()?.pow_int(-e);
        }
        if e == 0 {
            return Ok(Series::one(self.order.saturating_sub(self.val)));
        }
        let mut acc: Option<Series> = None;
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc.unwrap())
    }

    /// Composition `self(g(x))`; requires `val(g) ≥ 1`.
    pub fn compose(&self, g: &Series) -> Result<Series> {
        let w = match g.val() {
            Some(w) if w >= 1 => w,
            Some(w) => {
                return Err(Error::Series(format!(
                    "composition needs an inner series of valuation ≥ 1, got {w}"
                )))
            }
            None => return Err(Error::Series("composition with a vanishing inner series".into())),
        };
        // Truncation of `self` contributes O(g^(order+1)).
        let cap = w.saturating_mul(self.order.saturating_add(1)) - 1;
        let mut out = Series::zero(cap);
        if self.is_zero() {
            return Ok(out);
        }
        // Non-negative part by Horner.
        let top = self.order;
        if top >= 0 {
            let mut acc = Series::zero(EXACT);
            let lo = self.val.max(0);
            for k in (lo..=top.min(self.end())).rev() {
                acc = &(&acc * g).truncate(cap) + &Series::constant(self.coeff(k), cap);
            }
            for _ in 0..lo {
                acc = (&acc * g).truncate(cap);
            }
            out = &out + &acc;
        }
        if self.val < 0 {
            let h = g.inv()?;
            let mut acc = Series::zero(EXACT);
            for k in self.val..0 {
                acc = &(&acc + &Series::constant(self.coeff(k), cap)) * &h;
                acc = acc.truncate(cap);
            }
            out = &out + &acc;
        }
        Ok(out)
    }

    /// Compositional inverse of a series `a·x + …` with `a ≠ 0`.
    pub fn reverse(&self) -> Result<Series> {
        if self.val() != Some(1) {
            return Err(Error::Series(format!(
                "reversion needs valuation 1, got {:?}",
                self.val()
            )));
        }
        let k = self.order;
        // Lagrange inversion: [x^n] g = (1/n) [x^(n-1)] (x/f)^n.
        let h = self.shift(-1).inv()?;
        let mut hp = Series::one(k - 1);
        let mut c = vec![Q::zero()];
        for n in 1..=k {
            hp = (&hp * &h).truncate(k - 1);
            c.push(hp.coeff(n - 1) / q(n));
        }
        Ok(Series::from_coeffs(0, c, k))
    }

    /// Formal exponential; the argument must have no terms of exponent ≤ 0.
    pub fn exp(&self) -> Result<Series> {
        if self.is_zero() {
            return Ok(Series::one(self.order));
        }
        if self.val < 1 {
            return Err(Error::Series(format!(
                "exp needs a series without terms x^k, k ≤ 0; coefficient of x^{} is {}",
                self.val,
                fmt_q(&self.c[0])
            )));
        }
        let k = self.order.clamp(0, MAX_TERMS + 1);
        if k > MAX_TERMS {
            return Err(Error::Series("exp needs a finite truncation order".into()));
        }
        let k = k as usize;
        let f: Vec<Q> = (0..=k as i64).map(|i| self.coeff(i)).collect();
        let mut g = vec![Q::one()];
        for n in 1..=k {
            let mut s = Q::zero();
            for j in 1..=n {
                if !f[j].is_zero() {
                    s += &f[j] * &g[n - j] * q(j as i64);
                }
            }
            g.push(s / q(n as i64));
        }
        Ok(Series::from_coeffs(0, g, k as i64))
    }

    /// Formal logarithm of a series `1 + O(x)`.
    pub fn log(&self) -> Result<Series> {
        if self.val() != Some(0) || !self.c[0].is_one() {
            return Err(Error::Series(format!(
                "log needs a series 1 + O(x); leading term is {}·x^{}",
                fmt_q(&self.lead()),
                self.val
            )));
        }
        let k = self.rel_terms()?;
        let f: Vec<Q> = (0..=k as i64).map(|i| self.coeff(i)).collect();
        let mut g = vec![Q::zero()];
        for n in 1..=k {
            let mut s = &f[n] * q(n as i64);
            for j in 1..n {
                if !f[n - j].is_zero() {
                    s -= &g[j] * &f[n - j] * q(j as i64);
                }
            }
            g.push(s / q(n as i64));
        }
        Ok(Series::from_coeffs(0, g, k as i64))
    }

    /// `self^e` for rational `e`: the leading term `c·x^v` needs `v·e ∈ ℤ` and a
    /// rational `c^e`.
    pub fn pow(&self, e: &Q) -> Result<Series> {
        let Some(v) = self.val() else {
            return Err(Error::Series("power of a vanishing series".into()));
        };
        let ve = q(v) * e;
        if !ve.is_integer() {
            return Err(Error::Series(format!(
                "power {} of a series with valuation {v} is not a Laurent series",
                fmt_q(e)
            )));
        }
        let lead = q_rat_pow(&self.c[0], e).ok_or_else(|| {
            Error::Series(format!(
                "leading coefficient {} has no rational power {}",
                fmt_q(&self.c[0]),
                fmt_q(e)
            ))
        })?;
        let r = self.rel_terms()?;
        let u: Vec<Q> = self.c.iter().map(|a| a / &self.c[0]).collect();
        let mut g = vec![Q::one()];
        for n in 1..=r {
            let mut s = Q::zero();
            for k in 1..=n.min(u.len() - 1) {
                if !u[k].is_zero() {
                    s += &u[k] * &g[n - k] * (e * q(k as i64) - q((n - k) as i64));
                }
            }
            g.push(s / q(n as i64));
        }
        let start = ve.to_integer().try_into().unwrap_or(0i64);
        Ok(Series::from_coeffs(start, g, start + r as i64).scale(&lead))
    }

    /// Termwise antiderivative with zero constant; the `x^-1` coefficient is
    /// returned separately as the coefficient of `log x`.
    pub fn integrate(&self) -> Integral {
        let mut log_coeff = Q::zero();
        let mut c = vec![];
        for (i, a) in self.c.iter().enumerate() {
            let e = self.val + i as i64;
            if e == -1 {
                log_coeff = a.clone();
                c.push(Q::zero());
            } else {
                c.push(a / q(e + 1));
            }
        }
        Integral {
            series: Series::from_coeffs(self.val + 1, c, self.order + 1),
            log_coeff,
        }
    }

    /// Coefficientwise product.
    pub fn hadamard(&self, o: &Series) -> Series {
        let order = self.order.min(o.order);
        let lo = self.val.max(o.val);
        let hi = order.min(self.end()).min(o.end());
        let c = (lo..=hi).map(|k| self.coeff(k) * o.coeff(k)).collect();
        Series::from_coeffs(lo, c, order)
    }

    /// `p(g)` for a polynomial `p`.
    pub fn poly_at(p: &Poly, g: &Series) -> Series {
        let mut acc = Series::zero(EXACT);
        for a in p.coeffs().iter().rev() {
            acc = &(&acc * g) + &Series::constant(a.clone(), EXACT);
        }
        if p.is_constant() {
            acc = acc.truncate(g.order.max(0));
        }
        acc
    }

    /// `f(g)` for a rational function `f`; the result may be Laurent.
    pub fn ratfunc_at(f: &RatFunc, g: &Series) -> Result<Series> {
        let n = Series::poly_at(f.num(), g);
        let d = Series::poly_at(f.den(), g);
        d.inv()
            .map_err(|_| Error::Series(format!("denominator of {f} vanishes identically through x^{}", d.order)))?;
        n.checked_div(&d)
    }

    /// Equal on every exponent up to `order` (both must be known there).
    pub fn agrees_to(&self, o: &Series, order: i64) -> bool {
        let lo = self.val.min(o.val);
        (lo..=order).all(|k| self.coeff(k) == o.coeff(k))
    }

    /// Vanishes through `x^order`.
    pub fn is_zero_to(&self, order: i64) -> bool {
        self.order >= order && (self.is_zero() || self.val > order)
    }
}

/// Result of [`Series::integrate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    #[serde(flatten)]
    pub series: Series,
    #[serde(with = "crate::rational::serde_q")]
    pub log_coeff: Q,
}

impl Add for &Series {
    type Output = Series;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, o: &Series) -> Series {
        let order = self.order.min(o.order);
        let lo = self.val.min(o.val);
        let hi = order.min(self.end().max(o.end()));
        if lo > hi {
            return Series::zero(order);
        }
        let c = (lo..=hi)
            .map(|k| {
                let a = if k >= self.val {
                    self.c.get((k - self.val) as usize)
                } else {
                    None
                };
                let b = if k >= o.val {
                    o.c.get((k - o.val) as usize)
                } else {
                    None
                };
                match (a, b) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => Q::zero(),
                }
            })
            .collect();
        Series::from_coeffs(lo, c, order)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            val: self.val,
            c: self.c.iter().map(|a| -a).collect(),
            order: self.order,
        }
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, o: &Series) -> Series {
        self + &(-o)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, o: &Series) -> Series {
        let va = self.val_or_order();
        let vb = o.val_or_order();
        let order = (self.order.saturating_add(vb)).min(o.order.saturating_add(va));
        if self.is_zero() || o.is_zero() {
            return Series::zero(order);
        }
        let lo = va + vb;
        if lo > order {
            return Series::zero(order);
        }
        let n = ((order - lo + 1) as usize).min(self.c.len() + o.c.len() - 1);
        let mut c = vec![Q::zero(); n];
        for (i, a) in self.c.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    c[i + j] += a * b;
                }
            }
        }
        Series::from_coeffs(lo, c, order)
    }
}

impl Div for &Series {
    type Output = Series;
    fn div(self, o: &Series) -> Series {
        self.checked_div(o).expect("division by a vanishing series")
    }
}

forward_owned!(Series, Add, add);
forward_owned!(Series, Sub, sub);
forward_owned!(Series, Mul, mul);
forward_owned!(Series, Div, div);

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let e = self.val + i as i64;
            parts.push(match e {
                0 => fmt_q(a),
                1 => format!("{}*x", fmt_q(a)),
                _ => format!("{}*x^{e}", fmt_q(a)),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{} + O(x^{})", parts.join(" + "), self.order + 1)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr {
    val: i64,
    #[serde(with = "crate::rational::serde_q::vec")]
    coeffs: Vec<Q>,
    order: i64,
}

impl Serialize for Series {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            val: self.val,
            coeffs: self.c.clone(),
            order: self.order,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::deserialize(d)?;
        Ok(Series::from_coeffs(r.val, r.coeffs, r.order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn s(c: &[i64], order: i64) -> Series {
        Series::from_coeffs(0, c.iter().map(|&v| q(v)).collect(), order)
    }

    #[test]
    fn compose_square() {
        let f = Series::monomial(q(1), 2, 10);
        let g = s(&[0, 1, 1], 10);
        let h = f.compose(&g).unwrap();
        assert_eq!(h, s(&[0, 0, 1, 2, 1], 10));
    }

    #[test]
    fn compose_laurent_with_power() {
        let f = Series::monomial(qf(-1, 2), -2, 6);
        let g = Series::monomial(q(1), 3, 20);
        let h = f.compose(&g).unwrap();
        assert_eq!(h.val(), Some(-6));
        assert_eq!(h.coeff(-6), qf(-1, 2));
        assert!(h.order() >= 6);
    }

    #[test]
    fn reverse_geometric() {
        let f = Series::from_coeffs(1, vec![q(1); 12], 12);
        let g = f.reverse().unwrap();
        for k in 1..=12 {
            assert_eq!(g.coeff(k), q(if k % 2 == 1 { 1 } else { -1 }));
        }
        assert!(Series::x(5).reverse().unwrap() == Series::x(5));
        assert!(s(&[1, 1], 5).reverse().is_err());
    }

    #[test]
    fn binomial_square_root() {
        let f = s(&[1, -1], 8).pow(&qf(1, 2)).unwrap();
        assert_eq!(f.coeffs_range(0, 3), vec![q(1), qf(-1, 2), qf(-1, 8), qf(-1, 16)]);
        assert_eq!(Series::zero(5).exp().unwrap(), Series::one(5));
        assert!(s(&[2, 1], 5).log().is_err());
        assert!(s(&[2, 1], 5).pow(&qf(1, 2)).is_err());
    }

    #[test]
    fn integrate_with_log() {
        let i = Series::x(5).integrate();
        assert_eq!(i.series.coeff(2), qf(1, 2));
        assert!(i.log_coeff.is_zero());
        let j = Series::monomial(q(1), -1, 5).integrate();
        assert_eq!(j.log_coeff, q(1));
        assert!(j.series.is_zero());
    }

    #[test]
    fn ratfunc_expansion_and_at_series() {
        let x = RatFunc::x();
        let f = x.pow(-2);
        let g = Series::monomial(q(3), 2, 12);
        let h = Series::ratfunc_at(&f, &g).unwrap();
        assert_eq!(h.val(), Some(-4));
        assert_eq!(h.coeff(-4), qf(1, 9));
        let geo = Series::from_ratfunc(&(RatFunc::one() - x).inv().unwrap(), 6);
        assert_eq!(geo, s(&[1, 1, 1, 1, 1, 1, 1], 6));
    }

    #[test]
    fn precision_tracking() {
        let a = Series::from_coeffs(2, vec![q(1), q(5)], 7);
        let b = Series::from_coeffs(-1, vec![q(2)], 3);
        let p = &a * &b;
        assert_eq!(p.order(), 5);
        assert_eq!(a.inv().unwrap().order(), 7 - 4);
        assert_eq!(a.derivative().order(), 6);
    }

    #[test]
    fn json_shape() {
        let f = Series::from_coeffs(-1, vec![qf(1, 2), q(0), q(3)], 2);
        let js = serde_json::to_string(&f).unwrap();
        assert_eq!(js, r#"{"val":-1,"coeffs":["1/2","0","3"],"order":2}"#);
        let back: Series = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        let i = Series::monomial(q(1), -1, 3).integrate();
        let js = serde_json::to_string(&i).unwrap();
        assert!(js.contains(r#""log_coeff":"1""#));
    }
}
