//! Schwarzian conditions attached to pullback symmetries of linear operators.

mod family;
mod heun;
mod ranktwo;
mod solve;

pub use family::{
    composition_law_check, mirror_maps, one_param_family, schwarzian_family, CompositionReport, EpsSeries, MirrorMaps,
    OneParamFamily,
};
pub use heun::{heun_scan, HeunFactorization, HeunParams, HeunReport};
pub use ranktwo::{ranktwo_subcase, FCheck, PowerFactor, PowerProduct, RankTwo};
pub use solve::{solve_affine, solve_schwarzian_series, solve_schwarzian_series_with, SolutionFamily};

use serde::{Deserialize, Serialize};

use crate::diffop::{order2, sym_power_order2, DiffOperator, Gauge, Operator};
use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{q, qf, serde_q, Q};
use crate::series::Series;

/// `{y, x} = y'''/y' − (3/2)(y''/y')²` for a series.
pub fn schwarzian_derivative(y: &Series) -> Result<Series> {
    let d1 = y.derivative();
    if d1.is_zero() {
        return Err(Error::Invalid("Schwarzian derivative of a constant".into()));
    }
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let r = d2.checked_div(&d1)?;
    Ok(&d3.checked_div(&d1)? - &(&r * &r).scale(&qf(3, 2)))
}

/// `{y, x}` for a rational function.
pub fn schwarzian_derivative_rat(y: &RatFunc) -> Result<RatFunc> {
    let d1 = y.derivative();
    if d1.is_zero() {
        return Err(Error::Invalid("Schwarzian derivative of a constant".into()));
    }
    let d2 = d1.derivative();
    let d3 = d2.derivative();
    let r = d2.checked_div(&d1)?;
    Ok(&d3.checked_div(&d1)? - &(&r * &r).scale(&qf(3, 2)))
}

/// `W = 6p'/((N+1)N) + 6p²/((N+1)N²) − 12q/((N+1)N(N−1))` for the monic
/// normalization `D^N + p·D^(N-1) + q·D^(N-2) + …`.
pub fn w_function(l: &DiffOperator) -> Result<RatFunc> {
    let n = l.order();
    if n < 2 {
        return Err(Error::Operator(format!("W needs order ≥ 2, got {n}")));
    }
    let l = l.monic();
    let p = l.coeff(n - 1);
    let qq = l.coeff(n - 2);
    let n = n as i64;
    Ok(
        &(&p.derivative().scale(&qf(6, (n + 1) * n)) + &(&p * &p).scale(&qf(6, (n + 1) * n * n)))
            - &qq.scale(&qf(12, (n + 1) * n * (n - 1))),
    )
}

/// `W(x) − W(y)·y'² + {y, x}` as a Laurent series.
pub fn schwarzian_residual(w: &RatFunc, y: &Series) -> Result<Series> {
    if y.val().is_none_or(|v| v < 1) {
        return Err(Error::Series("residual needs a pullback with y(0) = 0".into()));
    }
    let d1 = y.derivative();
    let wy = Series::ratfunc_at(w, y)?;
    let part = &schwarzian_derivative(y)? - &(&wy * &(&d1 * &d1));
    let wx = Series::from_ratfunc(w, part.order().max(-2));
    Ok(&wx + &part)
}

/// `W(x) − W(y)·y'² + {y, x}` as an exact rational function.
pub fn schwarzian_residual_rat(w: &RatFunc, y: &RatFunc) -> Result<RatFunc> {
    let d1 = y.derivative();
    Ok(&(w - &(&w.compose(y) * &(&d1 * &d1))) + &schwarzian_derivative_rat(y)?)
}

/// Coefficientwise comparison of `(1/v)·L·v` and the normalized pullback.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PullbackReport {
    pub gauge: Gauge,
    /// `coefficient_match[k]` compares the `D^k` coefficients.
    pub coefficient_match: Vec<bool>,
    /// `conjugate − pullback`, per coefficient.
    pub differences: Vec<RatFunc>,
    pub schwarzian_residual: RatFunc,
}

impl PullbackReport {
    pub fn full_match(&self) -> bool {
        self.coefficient_match.iter().all(|&b| b)
    }

    /// Indices of the mismatching coefficients.
    pub fn mismatches(&self) -> Vec<usize> {
        (0..self.coefficient_match.len())
            .filter(|&k| !self.coefficient_match[k])
            .collect()
    }
}

/// Gauge `v` with `v'/v = −(N−1)/2·y''/y' + (1/N)(w'/w − (w'/w)∘y·y')`, where
/// `w'/w = −p`.
pub fn pullback_gauge(l: &DiffOperator, y: &RatFunc) -> Result<Gauge> {
    let n = l.order();
    if n < 1 {
        return Err(Error::Operator("gauge needs order ≥ 1".into()));
    }
    let l = l.monic();
    let wl = -l.coeff(n - 1);
    let d1 = y.derivative();
    let d2 = d1.derivative();
    let nn = n as i64;
    let first = d2.checked_div(&d1)?.scale(&qf(-(nn - 1), 2));
    let second = (&wl - &(&wl.compose(y) * &d1)).scale(&qf(1, nn));
    Ok(Gauge::new(&first + &second))
}

/// Compare the gauge conjugate of `L` with its normalized pullback by `y`.
pub fn pullback_symmetry_check(l: &DiffOperator, y: &RatFunc) -> Result<PullbackReport> {
    let n = l.order();
    if n < 2 {
        return Err(Error::Operator(format!("pullback check needs order ≥ 2, got {n}")));
    }
    let l = l.monic();
    let gauge = pullback_gauge(&l, y)?;
    let conj = l.conjugate(&gauge);
    let pb = l.pullback(y)?;
    let differences: Vec<RatFunc> = (0..=n).map(|k| &conj.coeff(k) - &pb.coeff(k)).collect();
    let coefficient_match = differences.iter().map(|d| d.is_zero()).collect();
    let w = w_function(&l)?;
    Ok(PullbackReport {
        gauge,
        coefficient_match,
        differences,
        schwarzian_residual: schwarzian_residual_rat(&w, y)?,
    })
}

/// Laurent head of `W` at `x = 0` and the pre-modular verdict.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PremodularReport {
    pub pass: bool,
    /// Valuation of `W` at 0 (`None` when `W = 0`).
    pub valuation: Option<i64>,
    /// Coefficient of `x^-2`.
    #[serde(with = "serde_q")]
    pub head: Q,
    /// Coefficient of `x^-1`.
    #[serde(with = "serde_q")]
    pub residue: Q,
    /// Coefficients from `x^val` through `x^0`.
    pub laurent: Series,
}

/// Passes iff `W + 1/(2x²)` has at most a simple pole at 0.
pub fn premodular_test(w: &RatFunc) -> PremodularReport {
    let valuation = w.valuation();
    let laurent = Series::from_ratfunc(w, 0);
    let shifted = w + &RatFunc::x().pow(-2).scale(&qf(1, 2));
    let pass = shifted.valuation().is_none_or(|v| v >= -1);
    PremodularReport {
        head: laurent.coeff(-2),
        residue: laurent.coeff(-1),
        pass,
        valuation,
        laurent,
    }
}

/// Order-three operator satisfied by the infinitesimal generator `F`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FEquation {
    /// `D³ − 2W·D − W'`.
    pub operator: DiffOperator,
    /// `D² − W/2`, whose symmetric square should be `operator`.
    pub order_two: DiffOperator,
    pub is_sym2: bool,
}

pub fn f_equation(w: &RatFunc) -> Result<FEquation> {
    let operator = Operator::new(vec![-w.derivative(), w.scale(&q(-2)), RatFunc::zero(), RatFunc::one()]);
    let l2 = order2(RatFunc::zero(), w.scale(&qf(-1, 2)));
    let sym2_of = sym_power_order2(&l2, 2)?;
    Ok(FEquation {
        is_sym2: sym2_of == operator,
        operator,
        order_two: l2,
    })
}

/// `W = F''/F − (1/2)(F'/F)² + λ/F²`.
pub fn w_from_f(f: &Series, lambda: &Q) -> Result<Series> {
    if f.is_zero() {
        return Err(Error::Invalid("F vanishes to the working order".into()));
    }
    let fi = f.inv()?;
    let d1 = f.derivative();
    let r1 = &d1 * &fi;
    let r2 = &d1.derivative() * &fi;
    Ok(&(&r2 - &(&r1 * &r1).scale(&qf(1, 2))) + &(&fi * &fi).scale(lambda))
}

/// `F·F'' − (1/2)F'² + λ − F²·W`.
pub fn casimir_residual(f: &Series, lambda: &Q, w: &RatFunc) -> Result<Series> {
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let pole = w.valuation().unwrap_or(0).min(0).abs();
    let ws = Series::from_ratfunc(w, f.order() + pole);
    let lhs = &(&(f * &d2) - &(&d1 * &d1).scale(&qf(1, 2))) + &Series::constant(lambda.clone(), f.order());
    Ok(&lhs - &(&(f * f) * &ws))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::monic_from;

    fn x() -> RatFunc {
        RatFunc::x()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::int(n)
    }

    fn w_modular() -> RatFunc {
        let num = &(&x().pow(2).scale(&q(32)) - &x().scale(&q(41))) + &c(36);
        -(num / (x().pow(2) * (x() - c(1)).pow(2)).scale(&q(72)))
    }

    #[test]
    fn schwarzian_of_affine_and_power() {
        let y = Series::from_coeffs(0, vec![q(3), q(2)], 20);
        assert!(schwarzian_derivative(&y).unwrap().is_zero_to(15));
        for n in 2..5 {
            let s = schwarzian_derivative_rat(&x().pow(n)).unwrap();
            assert_eq!(s, x().pow(-2).scale(&qf(1 - n * n, 2)));
        }
        let e = Series::x(20).exp().unwrap();
        let s = schwarzian_derivative(&e).unwrap();
        assert!((&s - &Series::constant(qf(-1, 2), s.order())).is_zero_to(15));
    }

    #[test]
    fn w_of_hypergeometric_operator() {
        // x(1−x)D² + (1 − 3x/2)D − 5/144
        let a = (c(1) - x().scale(&qf(3, 2))) / (x() * (c(1) - x()));
        let b = RatFunc::constant(qf(-5, 144)) / (x() * (c(1) - x()));
        assert_eq!(w_function(&order2(a, b)).unwrap(), w_modular());
        assert!(w_function(&monic_from(vec![c(0); 4])).unwrap().is_zero());
    }

    #[test]
    fn trivial_family_for_minus_half() {
        let w = x().pow(-2).scale(&qf(-1, 2));
        let y = Series::monomial(q(7), 3, 20);
        assert!(schwarzian_residual(&w, &y).unwrap().is_zero_to(15));
        assert!(schwarzian_residual_rat(&w, &x().pow(3).scale(&q(7))).unwrap().is_zero());
    }

    #[test]
    fn premodular_verdicts() {
        assert!(premodular_test(&w_modular()).pass);
        let w = (x().pow(2) - c(5)).scale(&qf(3, 2)) / (x().pow(2) * (x().pow(2) - c(1)));
        let r = premodular_test(&w);
        assert!(!r.pass);
        assert_eq!(r.head, qf(15, 2));
    }

    #[test]
    fn f_equation_is_sym2() {
        let fe = f_equation(&w_modular()).unwrap();
        assert!(fe.is_sym2);
        assert_eq!(
            f_equation(&RatFunc::zero()).unwrap().operator,
            monic_from(vec![c(0); 3])
        );
    }

    #[test]
    fn w_from_linear_f() {
        let f = Series::x(20);
        assert!(w_from_f(&f, &qf(1, 2)).unwrap().is_zero_to(10));
    }

    #[test]
    fn pullback_check_identity_and_theta() {
        let theta2 = order2(x().inv().unwrap(), c(0));
        let r = pullback_symmetry_check(&theta2, &x()).unwrap();
        assert!(r.full_match());
        let r = pullback_symmetry_check(&theta2, &x().pow(2)).unwrap();
        assert!(r.full_match());
        assert!(r.schwarzian_residual.is_zero());
    }
}
