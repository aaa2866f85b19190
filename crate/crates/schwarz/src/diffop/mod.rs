//! Linear differential operators `Σ a_k(x)·D^k` and their transformations.

mod frobenius;
mod guess;
mod power;

pub use frobenius::{frobenius_mum_basis, FrobeniusBasis, LogSeries};
pub use guess::{guess_operator, guess_operator_at};
pub use power::{
    cyclic_annihilator, cyclic_order, ext2, power_order, sym2, sym_or_ext_power, sym_power_order2,
    sym_power_order2_cyclic, sym_power_order2_explicit, PowerKind, PowerResult,
};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{binom, q, Q};
use crate::series::Series;

/// Coefficient ring of an operator: a differential ring over ℚ.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn c_is_zero(&self) -> bool;
    fn c_add(&self, o: &Self) -> Self;
    fn c_sub(&self, o: &Self) -> Self;
    fn c_mul(&self, o: &Self) -> Self;
    fn c_neg(&self) -> Self;
    fn c_deriv(&self) -> Self;
    fn c_scale(&self, a: &Q) -> Self;
}

impl Coeff for RatFunc {
    fn zero_like(&self) -> Self {
        RatFunc::zero()
    }
    fn one_like(&self) -> Self {
        RatFunc::one()
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_deriv(&self) -> Self {
        self.derivative()
    }
    fn c_scale(&self, a: &Q) -> Self {
        self.scale(a)
    }
}

impl Coeff for Series {
    fn zero_like(&self) -> Self {
        Series::zero(self.order())
    }
    fn one_like(&self) -> Self {
        Series::one(self.order())
    }
    fn c_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_add(&self, o: &Self) -> Self {
        self + o
    }
    fn c_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn c_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn c_neg(&self) -> Self {
        -self
    }
    fn c_deriv(&self) -> Self {
        self.derivative()
    }
    fn c_scale(&self, a: &Q) -> Self {
        self.scale(a)
    }
}

/// Operator `Σ coeffs[k]·D^k`; never empty, top coefficient nonzero unless the
/// operator is zero.
#[derive(Clone, PartialEq)]
pub struct Operator<C: Coeff> {
    coeffs: Vec<C>,
}

/// Operator with rational-function coefficients.
pub type DiffOperator = Operator<RatFunc>;
/// Operator with truncated-series coefficients, compared up to the shared order.
pub type SeriesOperator = Operator<Series>;

impl<C: Coeff> Operator<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "operator needs at least one coefficient");
        while coeffs.len() > 1 && coeffs.last().unwrap().c_is_zero() {
            coeffs.pop();
        }
        Operator { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of `D^k` (zero above the order).
    pub fn coeff(&self, k: usize) -> C {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    pub fn lead(&self) -> &C {
        self.coeffs.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.c_is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Operator::new((0..n).map(|k| self.coeff(k).c_add(&o.coeff(k))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Operator::new((0..n).map(|k| self.coeff(k).c_sub(&o.coeff(k))).collect())
    }

    pub fn neg(&self) -> Self {
        Operator::new(self.coeffs.iter().map(|c| c.c_neg()).collect())
    }

    pub fn scale(&self, a: &Q) -> Self {
        Operator::new(self.coeffs.iter().map(|c| c.c_scale(a)).collect())
    }

    /// Left multiplication by a function: `f·L`.
    pub fn left_mul(&self, f: &C) -> Self {
        Operator::new(self.coeffs.iter().map(|c| f.c_mul(c)).collect())
    }

    /// Right multiplication by a function: `L·f` (Leibniz expanded).
    pub fn right_mul(&self, f: &C) -> Self {
        self.mul(&Operator::new(vec![f.clone()]))
    }

    /// Composition `self ∘ o`.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order();
        let m = o.order();
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n + m + 1];
        // derivs[j][k] = k-th derivative of o_j
        let derivs: Vec<Vec<C>> = o
            .coeffs
            .iter()
            .map(|b| {
                let mut v = vec![b.clone()];
                for _ in 0..n {
                    let d = v.last().unwrap().c_deriv();
                    v.push(d);
                }
                v
            })
            .collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.c_is_zero() {
                continue;
            }
            for (j, dj) in derivs.iter().enumerate() {
                for (k, dk) in dj.iter().enumerate().take(i + 1) {
                    if dk.c_is_zero() {
                        continue;
                    }
                    let t = a.c_mul(dk).c_scale(&binom(i, k));
                    out[i + j - k] = out[i + j - k].c_add(&t);
                }
            }
        }
        Operator::new(out)
    }

    /// Formal adjoint `Σ (-D)^k ∘ a_k`.
    pub fn adjoint(&self) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len()];
        for (k, a) in self.coeffs.iter().enumerate() {
            let sign = if k % 2 == 0 { q(1) } else { q(-1) };
            let mut d = a.clone();
            let mut ders = vec![d.clone()];
            for _ in 0..k {
                d = d.c_deriv();
                ders.push(d.clone());
            }
            // D^k ∘ a = Σ_m C(k, m) a^(k-m) D^m
            for (m, slot) in out.iter_mut().enumerate().take(k + 1) {
                let t = ders[k - m].c_scale(&(binom(k, m) * &sign));
                *slot = slot.c_add(&t);
            }
        }
        Operator::new(out)
    }

    /// Conjugation `(1/v)·L·v` for a function `v` known through `g = v'/v`.
    pub fn conjugate_by_logderiv(&self, g: &C) -> Self {
        let n = self.order();
        // h_i = v^(i)/v
        let mut h = vec![g.one_like()];
        for i in 0..n {
            let next = h[i].c_deriv().c_add(&g.c_mul(&h[i]));
            h.push(next);
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            if a.c_is_zero() {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                let t = a.c_mul(&h[k - j]).c_scale(&binom(k, j));
                *slot = slot.c_add(&t);
            }
        }
        Operator::new(out)
    }
}

/// A function `v` represented by its logarithmic derivative `v'/v`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gauge {
    pub log_deriv: RatFunc,
}

impl Gauge {
    pub fn new(log_deriv: RatFunc) -> Self {
        Gauge { log_deriv }
    }

    /// `v = f^e` for a rational function `f` and rational exponent `e`.
    pub fn power_of(f: &RatFunc, e: &Q) -> Self {
        Gauge::new((f.derivative() / f.clone()).scale(e))
    }

    /// Product of gauges.
    pub fn times(&self, o: &Gauge) -> Gauge {
        Gauge::new(&self.log_deriv + &o.log_deriv)
    }

    pub fn inverse(&self) -> Gauge {
        Gauge::new(-&self.log_deriv)
    }
}

impl DiffOperator {
    /// `D`.
    pub fn d() -> Self {
        Operator::new(vec![RatFunc::zero(), RatFunc::one()])
    }

    /// Multiplication operator by `f`.
    pub fn mult(f: RatFunc) -> Self {
        Operator::new(vec![f])
    }

    /// `θ^k` with `θ = x·D`.
    pub fn theta_pow(k: usize) -> Self {
        let theta = Operator::new(vec![RatFunc::zero(), RatFunc::x()]);
        let mut acc = DiffOperator::mult(RatFunc::one());
        for _ in 0..k {
            acc = acc.mul(&theta);
        }
        acc
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Self {
        let l = self.lead().clone();
        if l.is_one() || l.is_zero() {
            return self.clone();
        }
        let inv = l.inv().unwrap();
        Operator::new(self.coeffs.iter().map(|c| c * &inv).collect())
    }

    pub fn conjugate(&self, v: &Gauge) -> Self {
        self.conjugate_by_logderiv(&v.log_deriv)
    }

    /// Monic operator annihilating `f(y(x))` whenever `self` annihilates `f`.
    pub fn pullback(&self, y: &RatFunc) -> Result<Self> {
        Ok(self.substitute(y)?.monic())
    }

    /// `x → y(x)` with `D_x → D_x/y'`, without normalization.
    pub fn substitute(&self, y: &RatFunc) -> Result<Self> {
        if y.is_constant() {
            return Err(Error::Operator("pullback by a constant".into()));
        }
        let yp = y.derivative();
        let e = Operator::new(vec![RatFunc::zero(), yp.inv()?]);
        let mut ek = DiffOperator::mult(RatFunc::one());
        let mut acc = DiffOperator::mult(RatFunc::zero());
        for a in &self.coeffs {
            if !a.is_zero() {
                acc = acc.add(&ek.left_mul(&a.compose(y)));
            }
            ek = e.mul(&ek);
        }
        Ok(acc)
    }

    /// `L(f)` for a rational function.
    pub fn apply(&self, f: &RatFunc) -> RatFunc {
        let mut d = f.clone();
        let mut acc = RatFunc::zero();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            if !a.is_zero() {
                acc = &acc + &(a * &d);
            }
        }
        acc
    }

    /// `L(f)` for a Laurent series; coefficients are expanded far enough that
    /// the precision is limited by `f` only.
    pub fn apply_series(&self, f: &Series) -> Series {
        let margin = self.order() as i64 + 4 + f.val().unwrap_or(0).abs();
        let mut d = f.clone();
        let mut acc: Option<Series> = None;
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            if a.is_zero() {
                continue;
            }
            let pole = a.valuation().unwrap_or(0).min(0).abs();
            let ser = Series::from_ratfunc(a, f.order() + margin + pole);
            let t = &ser * &d;
            acc = Some(match acc {
                None => t,
                Some(s) => &s + &t,
            });
        }
        acc.unwrap_or_else(|| Series::zero(f.order()))
    }

    /// Expand every coefficient at `x = 0` through `x^order`.
    pub fn to_series(&self, order: i64) -> SeriesOperator {
        Operator::new(self.coeffs.iter().map(|c| Series::from_ratfunc(c, order)).collect())
    }
}

impl SeriesOperator {
    /// `L(f)` for a series argument.
    pub fn apply(&self, f: &Series) -> Series {
        let mut d = f.clone();
        let mut acc = self.coeffs[0].zero_like();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            acc = &acc + &(a * &d);
        }
        acc
    }

    /// Every coefficient of `self - o` vanishes through `x^order`.
    pub fn agrees_to(&self, o: &SeriesOperator, order: i64) -> bool {
        let n = self.coeffs.len().max(o.coeffs.len());
        (0..n).all(|k| {
            let d = self.coeff(k).c_sub(&o.coeff(k));
            d.order() >= order && d.is_zero_to(order)
        })
    }

    /// Lowest truncation order among the coefficients.
    pub fn min_order(&self) -> i64 {
        self.coeffs.iter().map(|c| c.order()).min().unwrap()
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (k, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let d = match k {
                0 => String::new(),
                1 => "D".into(),
                _ => format!("D^{k}"),
            };
            parts.push(match (a.is_one(), k) {
                (true, 0) => "1".into(),
                (true, _) => d,
                (false, 0) => format!("[{a}]"),
                (false, _) => format!("[{a}]*{d}"),
            });
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffOperator({self})")
    }
}

impl fmt::Debug for SeriesOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    var: String,
    coeffs: Vec<RatFunc>,
}

impl Serialize for DiffOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorRepr {
            var: "x".into(),
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = OperatorRepr::deserialize(d)?;
        if r.var != "x" {
            return Err(serde::de::Error::custom(format!(
                "unsupported variable {:?}, expected \"x\"",
                r.var
            )));
        }
        if r.coeffs.is_empty() {
            return Err(serde::de::Error::custom("operator without coefficients"));
        }
        Ok(Operator::new(r.coeffs))
    }
}

/// Monic `D^n + c_{n-1} D^{n-1} + … + c_0` from the low coefficients.
pub fn monic_from(low: Vec<RatFunc>) -> DiffOperator {
    let mut c = low;
    c.push(RatFunc::one());
    Operator::new(c)
}

/// Order-two operator `D² + a·D + b`.
pub fn order2(a: RatFunc, b: RatFunc) -> DiffOperator {
    monic_from(vec![b, a])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn x() -> RatFunc {
        RatFunc::x()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::int(n)
    }

    #[test]
    fn d_times_d() {
        let d = DiffOperator::d();
        assert_eq!(d.mul(&d), monic_from(vec![c(0), c(0)]));
    }

    #[test]
    fn adjoint_of_first_order() {
        let a = (x() + c(1)) / (x() - c(3));
        let l = Operator::new(vec![a.clone(), c(1)]);
        // adjoint(D + a) = -D + a
        assert_eq!(l.adjoint(), Operator::new(vec![a, c(-1)]));
    }

    #[test]
    fn adjoint_is_involution() {
        let l = Operator::new(vec![x().pow(2), x().inv().unwrap(), c(3), x() - c(1), c(1)]);
        assert_eq!(l.adjoint().adjoint(), l);
    }

    #[test]
    fn conjugate_second_derivative() {
        let g = (x() - c(2)).inv().unwrap();
        let l = monic_from(vec![c(0), c(0)]).conjugate(&Gauge::new(g.clone()));
        let expect = monic_from(vec![&g.derivative() + &(&g * &g), g.scale(&q(2))]);
        assert_eq!(l, expect);
    }

    #[test]
    fn pullback_by_square() {
        let d2 = monic_from(vec![c(0), c(0)]);
        let l = d2.pullback(&x().pow(2)).unwrap();
        assert_eq!(l, monic_from(vec![c(0), -x().inv().unwrap()]));
        assert!(l.apply(&x().pow(2)).is_zero());
        assert!(l.apply(&c(1)).is_zero());
    }

    #[test]
    fn theta_apply() {
        let t2 = DiffOperator::theta_pow(2);
        assert_eq!(t2.apply(&x().pow(3)), x().pow(3).scale(&q(9)));
        let s = Series::from_coeffs(0, vec![q(1), q(1), q(1)], 6);
        let r = t2.apply_series(&s);
        assert_eq!(r.coeff(2), q(4));
        assert_eq!(r.order(), 6);
        let _ = qf(1, 2);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let l = monic_from(vec![
            (x() - c(1)).inv().unwrap().scale(&qf(3, 16)),
            x().scale(&qf(-2, 7)),
        ]);
        let js = serde_json::to_string(&l).unwrap();
        let back: DiffOperator = serde_json::from_str(&js).unwrap();
        assert_eq!(back, l);
        assert_eq!(serde_json::to_string(&back).unwrap(), js);
        assert!(js.starts_with(r#"{"var":"x","coeffs":["#));
    }
}
