//! One-parameter commuting families, mirror maps and composition laws.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::solve_schwarzian_series;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, q_pow, qf, serde_q, Q};
use crate::series::{Integral, Series};

/// Series in `ε` with series coefficients in `x`, truncated after `ε^eps_order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsSeries {
    /// `terms[k]` is the coefficient of `ε^k`.
    pub terms: Vec<Series>,
}

impl EpsSeries {
    pub fn new(terms: Vec<Series>) -> Self {
        assert!(!terms.is_empty(), "an ε-series needs at least the ε^0 term");
        EpsSeries { terms }
    }

    /// `s` as an `ε`-constant.
    pub fn constant(s: Series, eps_order: usize) -> Self {
        let z = Series::zero(s.order());
        let mut terms = vec![s];
        terms.resize(eps_order + 1, z);
        EpsSeries { terms }
    }

    pub fn eps_order(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Series {
        &self.terms[k]
    }

    /// Lowest `x`-order among the terms.
    pub fn x_order(&self) -> i64 {
        self.terms.iter().map(|t| t.order()).min().unwrap()
    }

    fn zip(&self, o: &EpsSeries, f: impl Fn(&Series, &Series) -> Series) -> EpsSeries {
        let n = self.terms.len().min(o.terms.len());
        EpsSeries::new((0..n).map(|k| f(&self.terms[k], &o.terms[k])).collect())
    }

    pub fn add(&self, o: &EpsSeries) -> EpsSeries {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &EpsSeries) -> EpsSeries {
        self.zip(o, |a, b| a - b)
    }

    pub fn mul(&self, o: &EpsSeries) -> EpsSeries {
        let n = self.terms.len().min(o.terms.len());
        let terms = (0..n)
            .map(|k| {
                (0..=k)
                    .map(|i| &self.terms[i] * &o.terms[k - i])
                    .reduce(|a, b| &a + &b)
                    .unwrap()
            })
            .collect();
        EpsSeries::new(terms)
    }

    pub fn scale(&self, a: &Q) -> EpsSeries {
        EpsSeries::new(self.terms.iter().map(|t| t.scale(a)).collect())
    }

    /// Multiply every term by the series `s`.
    pub fn times_series(&self, s: &Series) -> EpsSeries {
        EpsSeries::new(self.terms.iter().map(|t| t * s).collect())
    }

    /// `d/dx`, termwise.
    pub fn derivative(&self) -> EpsSeries {
        EpsSeries::new(self.terms.iter().map(|t| t.derivative()).collect())
    }

    /// Inverse of an ε-series whose `ε^0` term is invertible.
    pub fn inv(&self) -> Result<EpsSeries> {
        let h = self.terms[0].inv()?;
        let mut out = vec![h.clone()];
        for k in 1..self.terms.len() {
            let s = (1..=k)
                .map(|j| &self.terms[j] * &out[k - j])
                .reduce(|a, b| &a + &b)
                .unwrap();
            out.push(-(&s * &h));
        }
        Ok(EpsSeries::new(out))
    }

    /// Every `ε`-coefficient vanishes through `x^order`.
    pub fn is_zero_to(&self, order: i64) -> bool {
        self.terms.iter().all(|t| t.is_zero_to(order))
    }

    /// `f(x + δ) = Σ_j f^(j)(x)·δ^j/j!` for `δ = self − x` with vanishing `ε^0` term.
    fn taylor_at(&self, derivs: &[Series]) -> EpsSeries {
        let n = self.eps_order();
        let mut delta = self.clone();
        delta.terms[0] = Series::zero(self.terms[0].order());
        let mut pw = EpsSeries::constant(Series::one(crate::series::EXACT), n);
        let mut acc = EpsSeries::constant(derivs[0].clone(), n);
        let mut fact = Q::one();
        for (j, dj) in derivs.iter().enumerate().take(n + 1).skip(1) {
            pw = pw.mul(&delta);
            fact *= q(j as i64);
            acc = acc.add(&pw.times_series(dj).scale(&fact.recip()));
        }
        acc
    }
}

/// `y_ε(x) = x + Σ ε^n/n!·Q_n(x)` with `Q_1 = F`, `Q_{n+1} = F·Q_n'`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OneParamFamily {
    pub f: Series,
    /// `Q_1, Q_2, …`
    pub q: Vec<Series>,
    pub y: EpsSeries,
}

/// One-parameter commuting family generated by `F` through `ε^eps_order`.
pub fn one_param_family(f: &Series, eps_order: usize) -> Result<OneParamFamily> {
    if f.val() != Some(1) {
        return Err(Error::Invalid(format!(
            "the generator F must have valuation 1, got {:?}",
            f.val()
        )));
    }
    let mut qs = vec![f.clone()];
    for _ in 1..eps_order {
        let next = f * &qs.last().unwrap().derivative();
        qs.push(next);
    }
    let mut terms = vec![Series::x(f.order())];
    let mut fact = Q::one();
    for (n, qn) in qs.iter().enumerate() {
        fact *= q(n as i64 + 1);
        terms.push(qn.scale(&fact.recip()));
    }
    terms.truncate(eps_order + 1);
    Ok(OneParamFamily {
        f: f.clone(),
        q: qs,
        y: EpsSeries::new(terms),
    })
}

impl OneParamFamily {
    fn derivs(s: &Series, n: usize) -> Vec<Series> {
        let mut v = vec![s.clone()];
        for _ in 0..n {
            let d = v.last().unwrap().derivative();
            v.push(d);
        }
        v
    }

    /// `F(x)·y_ε'(x) − F(y_ε(x))`.
    pub fn functional_residual(&self) -> EpsSeries {
        let n = self.y.eps_order();
        let lhs = self.y.derivative().times_series(&self.f);
        let rhs = self.y.taylor_at(&Self::derivs(&self.f, n));
        lhs.sub(&rhs)
    }

    /// `W(x) − W(y_ε)·y_ε'² + {y_ε, x}` order by order in `ε`.
    pub fn schwarzian_residual(&self, w: &RatFunc) -> Result<EpsSeries> {
        let n = self.y.eps_order();
        let k = self.f.order();
        let wd: Vec<Series> = (0..=n).map(|j| Series::from_ratfunc(&w.derivative_n(j), k)).collect();
        let d1 = self.y.derivative();
        let d2 = d1.derivative();
        let d3 = d2.derivative();
        let inv = d1.inv()?;
        let r = d2.mul(&inv);
        let schw = d3.mul(&inv).sub(&r.mul(&r).scale(&qf(3, 2)));
        let wy = self.y.taylor_at(&wd);
        let wx = EpsSeries::constant(wd[0].clone(), n);
        Ok(wx.sub(&wy.mul(&d1).mul(&d1)).add(&schw))
    }

    /// Compare with the `n = 1` solver at `a_1 = e^ε`: for each `m ≤ x_order`
    /// the `x^m` coefficient of `y_1(a_1, x)` is interpolated as a polynomial in
    /// `a_1` and re-expanded in `ε`. Returns the mismatching `(m, k)` pairs.
    pub fn solver_mismatches(&self, w: &RatFunc, x_order: i64) -> Result<Vec<(i64, usize)>> {
        if self.f.coeff(1) != Q::one() {
            return Err(Error::Invalid(format!(
                "F must start with x, got {}·x",
                fmt_q(&self.f.coeff(1))
            )));
        }
        let pts: Vec<Q> = (1..=x_order + 1).map(q).collect();
        let mut sols = vec![];
        for a in &pts {
            let s = solve_schwarzian_series(w, 1, a, x_order)?;
            if let Some(k) = s.inconsistent_at {
                return Err(Error::Invalid(format!("n = 1 solver inconsistent at step {k}")));
            }
            sols.push(s.tail);
        }
        let mut bad = vec![];
        for m in 1..=x_order {
            let vals: Vec<Q> = sols.iter().map(|s| s.coeff(m)).collect();
            let p = lagrange(&pts, &vals);
            let mut fact = Q::one();
            for (k, t) in self.y.terms.iter().enumerate() {
                if k > 0 {
                    fact *= q(k as i64);
                }
                if t.order() < m {
                    continue;
                }
                // [ε^k] Σ_j c_j e^{jε} = Σ_j c_j j^k / k!
                let via_solver = p
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * q_pow(&q(j as i64), k as i64))
                    .fold(Q::zero(), |a, b| a + b)
                    / &fact;
                if via_solver != t.coeff(m) {
                    bad.push((m, k));
                }
            }
        }
        Ok(bad)
    }
}

fn lagrange(xs: &[Q], ys: &[Q]) -> Poly {
    let mut acc = Poly::zero();
    for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
        if yi.is_zero() {
            continue;
        }
        let mut basis = Poly::constant(yi.clone());
        for (j, xj) in xs.iter().enumerate() {
            if j != i {
                basis = &basis * &Poly::new(vec![-xj, Q::one()]).scale(&(xi - xj).recip());
            }
        }
        acc = &acc + &basis;
    }
    acc
}

/// `Θ = ∫dx/F`, `Q = exp(Θ)` and its compositional inverse `P`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MirrorMaps {
    pub f: Series,
    pub theta: Integral,
    pub q: Series,
    pub p: Series,
}

/// Mirror maps of a generator `F = x + O(x²)`.
pub fn mirror_maps(f: &Series) -> Result<MirrorMaps> {
    if f.val() != Some(1) || !f.coeff(1).is_one() {
        return Err(Error::Invalid(format!(
            "mirror maps need F = x + O(x²), got leading term {}·x^{:?}",
            fmt_q(&f.lead()),
            f.val()
        )));
    }
    let theta = f.inv()?.integrate();
    let qs = theta.series.exp()?.shift(1);
    let p = qs.reverse()?;
    Ok(MirrorMaps {
        f: f.clone(),
        theta,
        q: qs,
        p,
    })
}

impl MirrorMaps {
    /// `P(a·Q(x)^n)`.
    pub fn evaluate(&self, a: &Q, n: u32) -> Result<Series> {
        let inner = self.q.pow_int(n as i64)?.scale(a);
        self.p.compose(&inner)
    }

    /// `Q∘P − x` and `P∘Q − x`.
    pub fn inverse_residuals(&self) -> Result<(Series, Series)> {
        let x = Series::x(crate::series::EXACT);
        Ok((&self.q.compose(&self.p)? - &x, &self.p.compose(&self.q)? - &x))
    }

    /// `x·P' − F(P)`.
    pub fn p_residual(&self) -> Result<Series> {
        Ok(&self.p.derivative().shift(1) - &self.f.compose(&self.p)?)
    }
}

/// `y_n(a_n, y_m(a_m, x)) − y_{nm}(a_n·a_m^n, x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionReport {
    pub n: u32,
    pub m: u32,
    #[serde(with = "serde_q")]
    pub a_n: Q,
    #[serde(with = "serde_q")]
    pub a_m: Q,
    #[serde(with = "serde_q")]
    pub a_nm: Q,
    pub difference: Series,
    /// Highest exponent through which the difference is known.
    pub order: i64,
    pub holds: bool,
}

/// Solver for `y_n(a_n, x)` through `x^order` from the Schwarzian condition of `W`.
pub fn schwarzian_family(w: &RatFunc) -> impl Fn(u32, &Q, i64) -> Result<Series> + '_ {
    move |n, a, order| {
        let s = solve_schwarzian_series(w, n, a, order)?;
        match s.inconsistent_at {
            Some(k) => Err(Error::Invalid(format!(
                "no solution y_{n} = {}·x^{n} + …: inconsistent at step {k}",
                fmt_q(a)
            ))),
            None => Ok(s.tail),
        }
    }
}

/// Check the composition law with every `y` computed through `x^order` by `solve`.
pub fn composition_law_check<S>(solve: S, n: u32, m: u32, a_n: &Q, a_m: &Q, order: i64) -> Result<CompositionReport>
where
    S: Fn(u32, &Q, i64) -> Result<Series>,
{
    let ym = solve(m, a_m, order)?;
    let yn = solve(n, a_n, order)?;
    let composed = yn.compose(&ym)?;
    let a_nm = a_n * q_pow(a_m, n as i64);
    let ynm = solve(n * m, &a_nm, composed.order())?;
    let difference = &composed - &ynm;
    let order = difference.order();
    Ok(CompositionReport {
        n,
        m,
        a_n: a_n.clone(),
        a_m: a_m.clone(),
        holds: difference.is_zero_to(order),
        a_nm,
        difference,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w_modular() -> RatFunc {
        let x = RatFunc::x();
        let num = &(&x.pow(2).scale(&q(32)) - &x.scale(&q(41))) + &RatFunc::int(36);
        -(num / (x.pow(2) * (x - RatFunc::int(1)).pow(2)).scale(&q(72)))
    }

    fn f_modular(k: i64) -> Series {
        let h = Series::hypergeometric(&[qf(1, 12), qf(5, 12)], &[q(1)], k);
        let s = Series::from_coeffs(0, vec![q(1), q(-1)], k).pow(&qf(1, 2)).unwrap();
        &(&h * &h) * &s.shift(1)
    }

    #[test]
    fn linear_generator_scales() {
        let fam = one_param_family(&Series::x(10), 5).unwrap();
        let mut fact = Q::one();
        for (k, t) in fam.y.terms.iter().enumerate() {
            if k > 0 {
                fact *= q(k as i64);
            }
            assert_eq!(t, &Series::monomial(fact.recip(), 1, 10));
        }
        assert!(fam.functional_residual().is_zero_to(8));
    }

    #[test]
    fn recursion_heads() {
        let f = f_modular(12);
        let fam = one_param_family(&f, 3).unwrap();
        let fp = f.derivative();
        assert_eq!(fam.q[1], &f * &fp);
        let q3 = &f * &(&(&f * &fp.derivative()) + &(&fp * &fp));
        assert!(fam.q[2].agrees_to(&q3, 11));
    }

    #[test]
    fn modular_family_solves_everything() {
        let fam = one_param_family(&f_modular(12), 4).unwrap();
        assert!(fam.functional_residual().is_zero_to(10));
        assert!(fam.schwarzian_residual(&w_modular()).unwrap().is_zero_to(8));
        assert!(fam.solver_mismatches(&w_modular(), 6).unwrap().is_empty());
    }

    #[test]
    fn mirror_map_heads() {
        let mm = mirror_maps(&f_modular(6)).unwrap();
        let qs = mm.q.scale_var(&q(1728)).scale(&qf(1, 1728));
        let expect = [744i64, 750420, 872769632, 1102652742882];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(qs.coeff(i as i64 + 2), q(*e));
        }
        let (a, b) = mm.inverse_residuals().unwrap();
        assert!(a.is_zero_to(5) && b.is_zero_to(5));
        assert!(mm.p_residual().unwrap().is_zero_to(5));
    }

    #[test]
    fn identity_generator_mirror_maps() {
        let mm = mirror_maps(&Series::x(10)).unwrap();
        assert_eq!(mm.q, Series::x(10));
        assert_eq!(mm.p, Series::x(10));
    }

    #[test]
    fn composition_law_small_cases() {
        let w = w_modular();
        let solve = schwarzian_family(&w);
        for (n, m) in [(1, 1), (1, 2), (2, 1)] {
            let r = composition_law_check(&solve, n, m, &q(2), &qf(1, 3), 8).unwrap();
            assert!(r.holds && r.order >= 8, "{n},{m}: {:?}", r.difference);
        }
    }

    #[test]
    fn solver_matches_mirror_evaluator() {
        let mm = mirror_maps(&f_modular(8)).unwrap();
        let y = mm.evaluate(&qf(3, 2), 1).unwrap();
        let s = solve_schwarzian_series(&w_modular(), 1, &qf(3, 2), 8).unwrap();
        assert!(y.agrees_to(&s.tail, 8));
    }
}
