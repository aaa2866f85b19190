//! The factorizable subcase `W = A_R' + A_R²/2`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::solve::{solve_affine, SolutionFamily};
use crate::diffop::{DiffOperator, Operator};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, qf, serde_q, Q};
use crate::series::Series;

/// `w = Π f_i^{e_i}` with polynomial factors and rational exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerProduct {
    pub factors: Vec<PowerFactor>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFactor {
    pub base: Poly,
    #[serde(with = "serde_q")]
    pub exponent: Q,
}

impl PowerProduct {
    pub fn new(factors: Vec<(Poly, Q)>) -> Self {
        PowerProduct {
            factors: factors
                .into_iter()
                .map(|(base, exponent)| PowerFactor { base, exponent })
                .collect(),
        }
    }

    /// `A_R = −w'/w = −Σ e_i f_i'/f_i`.
    pub fn a_r(&self) -> RatFunc {
        self.factors.iter().fold(RatFunc::zero(), |acc, pf| {
            let fr = RatFunc::from_poly(pf.base.clone());
            &acc - &(&RatFunc::from_poly(pf.base.derivative()) / &fr).scale(&pf.exponent)
        })
    }

    /// `w(x)/w(y) = Π (f_i(x)/f_i(y))^{e_i}` as a series.
    pub fn ratio(&self, y: &Series) -> Result<Series> {
        let x = Series::x(y.order().max(1));
        let mut acc: Option<Series> = None;
        for pf in &self.factors {
            let fx = Series::poly_at(&pf.base, &x);
            let fy = Series::poly_at(&pf.base, y);
            let r = fx.checked_div(&fy)?.pow(&pf.exponent)?;
            acc = Some(match acc {
                None => r,
                Some(a) => &a * &r,
            });
        }
        Ok(acc.unwrap_or_else(|| Series::one(crate::series::EXACT)))
    }
}

/// Checks of a generator `F` against `A_R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FCheck {
    /// `F'' − A_R·F' − A_R'·F`.
    pub linear_residual: Series,
    /// `μ` read off the constant term of `A_R·F − F'`.
    #[serde(with = "serde_q")]
    pub mu: Q,
    /// `A_R − F'/F − μ/F`.
    pub converse_residual: Series,
    /// `λ = μ²/2`.
    #[serde(with = "serde_q")]
    pub lambda: Q,
}

/// Toolkit attached to a rational `A_R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankTwo {
    pub a_r: RatFunc,
    /// `A_R' + A_R²/2`.
    pub w: RatFunc,
}

pub fn ranktwo_subcase(a_r: &RatFunc) -> RankTwo {
    RankTwo {
        a_r: a_r.clone(),
        w: &a_r.derivative() + &(a_r * a_r).scale(&qf(1, 2)),
    }
}

impl RankTwo {
    /// `(D + A_R + C)·(D + C)`, whose W is `A_R' + A_R²/2` for every `C`.
    pub fn factored(&self, c: &RatFunc) -> DiffOperator {
        let left = Operator::new(vec![&self.a_r + c, RatFunc::one()]);
        let right = Operator::new(vec![c.clone(), RatFunc::one()]);
        left.mul(&right)
    }

    /// `D² − A_R·D − A_R' = D·(D − A_R)`.
    pub fn f_operator(&self) -> DiffOperator {
        Operator::new(vec![-self.a_r.derivative(), -self.a_r.clone(), RatFunc::one()])
    }

    /// `(D + A_R)·D`, the adjoint of [`RankTwo::f_operator`].
    pub fn omega(&self) -> DiffOperator {
        Operator::new(vec![RatFunc::zero(), self.a_r.clone(), RatFunc::one()])
    }

    /// `y'' − A_R(y)·y'² + A_R(x)·y'`.
    pub fn residual(&self, y: &Series) -> Result<Series> {
        if y.val().is_none_or(|v| v < 1) {
            return Err(Error::Series("residual needs a pullback with y(0) = 0".into()));
        }
        let d1 = y.derivative();
        let ay = Series::ratfunc_at(&self.a_r, y)?;
        let part = &d1.derivative() - &(&ay * &(&d1 * &d1));
        let pole = self.a_r.valuation().unwrap_or(0).min(0).abs();
        let ax = Series::from_ratfunc(&self.a_r, d1.order() + pole);
        Ok(&part + &(&ax * &d1))
    }

    /// Series solution of `y'' = A_R(y)y'² − A_R(x)y'` with `y = a_n x^n + …`.
    pub fn solve(&self, n: u32, a_n: &Q, order: i64) -> Result<SolutionFamily> {
        solve_affine(n, a_n, order, n as i64 - 2, &BTreeMap::new(), |y| self.residual(y))
    }

    /// Series solution of the integrated form `y' = c_1·w(x)/w(y)` where
    /// `A_R = −w'/w`; `c_1` is fixed by the leading term.
    pub fn solve_integrated(&self, w: &PowerProduct, n: u32, a_n: &Q, order: i64) -> Result<(Q, SolutionFamily)> {
        if w.a_r() != self.a_r {
            return Err(Error::Invalid(format!(
                "−w'/w = {} differs from A_R = {}",
                w.a_r(),
                self.a_r
            )));
        }
        let head = Series::monomial(a_n.clone(), n as i64, n as i64 + 1);
        let r = w.ratio(&head)?;
        if r.val() != Some(n as i64 - 1) {
            return Err(Error::Invalid(format!(
                "w(x)/w(y) for y = {}·x^{n} starts at x^{:?}, not x^{}",
                fmt_q(a_n),
                r.val(),
                n as i64 - 1
            )));
        }
        let c1 = q(n as i64) * a_n / r.lead();
        let sol = solve_affine(n, a_n, order, n as i64 - 1, &BTreeMap::new(), |y| {
            Ok(&y.derivative() - &w.ratio(y)?.scale(&c1))
        })?;
        Ok((c1, sol))
    }

    /// Linear equation on `F` plus the converse expression `A_R = F'/F + μ/F`,
    /// with `μ` from the `x^0` balance of `A_R·F − F'`.
    pub fn f_check(&self, f: &Series) -> Result<FCheck> {
        let pole = self.a_r.valuation().unwrap_or(0).min(0).abs();
        let ar = Series::from_ratfunc(&self.a_r, f.order() + pole);
        let d1 = f.derivative();
        let ard = Series::from_ratfunc(&self.a_r.derivative(), f.order() + pole + 1);
        let linear_residual = &(&d1.derivative() - &(&ar * &d1)) - &(&ard * f);
        let mu_series = &(&ar * f) - &d1;
        if mu_series.order() < 0 {
            return Err(Error::Series("F known to too low an order for μ".into()));
        }
        let mu = mu_series.coeff(0);
        let fi = f.inv()?;
        let converse_residual = &(&ar - &(&d1 * &fi)) - &fi.scale(&mu);
        Ok(FCheck {
            linear_residual,
            lambda: &mu * &mu / q(2),
            mu,
            converse_residual,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarzian::{schwarzian_residual, w_function};

    fn x() -> RatFunc {
        RatFunc::x()
    }

    fn ar_good(a: &Q, beta: &Q, delta: &Q) -> PowerProduct {
        PowerProduct::new(vec![
            (Poly::x(), q(-1)),
            (Poly::new(vec![q(-1), q(1)]), -delta.clone()),
            (Poly::new(vec![-a.clone(), q(1)]), -(beta - delta)),
        ])
    }

    #[test]
    fn theta_squared_case() {
        let rt = ranktwo_subcase(&x().inv().unwrap());
        assert_eq!(rt.w, x().pow(-2).scale(&qf(-1, 2)));
        for n in 1..5 {
            let s = rt.solve(n, &qf(2, 7), 10).unwrap();
            assert_eq!(s.tail, Series::monomial(qf(2, 7), n as i64, 10));
        }
        assert_eq!(rt.omega(), crate::diffop::DiffOperator::theta_pow(2).monic());
    }

    #[test]
    fn factored_operator_has_w() {
        let ar = (x() - RatFunc::int(3)) / (x() * (x() + RatFunc::int(2)));
        let rt = ranktwo_subcase(&ar);
        let c = RatFunc::int(1) / (x() - RatFunc::int(5));
        assert_eq!(w_function(&rt.factored(&c)).unwrap(), rt.w);
        assert_eq!(rt.f_operator().adjoint(), rt.omega());
    }

    #[test]
    fn ar_good_y1_and_y2() {
        let (a, beta, delta) = (q(2), qf(1, 3), qf(1, 5));
        let pp = ar_good(&a, &beta, &delta);
        let rt = ranktwo_subcase(&pp.a_r());
        let expect_ar = &(&x().inv().unwrap() + &(RatFunc::constant(delta.clone()) / (x() - RatFunc::int(1))))
            + &(RatFunc::constant(&beta - &delta) / (x() - RatFunc::int(2)));
        assert_eq!(rt.a_r, expect_ar);
        let k = (&a * &delta + &beta - &delta) / &a;
        for a1 in [q(2), q(3), qf(1, 2)] {
            let (c1, s) = rt.solve_integrated(&pp, 1, &a1, 8).unwrap();
            assert_eq!(c1, q(1));
            assert_eq!(s.tail.coeff(2), -(&a1 * (&a1 - q(1)) * &k));
            let direct = rt.solve(1, &a1, 8).unwrap();
            assert_eq!(direct.tail, s.tail);
            assert!(schwarzian_residual(&rt.w, &s.tail).unwrap().is_zero_to(5));
        }
        let (c1, s) = rt.solve_integrated(&pp, 2, &q(5), 8).unwrap();
        assert_eq!(c1, q(2));
        assert_eq!(s.tail.coeff(3), q(2) * &k * q(5));
    }
}
