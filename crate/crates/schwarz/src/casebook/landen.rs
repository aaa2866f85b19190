//! The two-particle term of the Ising susceptibility under the Landen
//! transformation, its annihilator and the Schwarzian series it admits.

use serde::Deserialize;

use super::{ser, sources, Check};
use crate::diffop::{Gauge, Operator};
use crate::error::Result;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, serde_q, Q};
use crate::schwarzian::{premodular_test, solve_schwarzian_series, w_function};
use crate::series::Series;

const DATA: &str = include_str!("../../data/landen-chi2.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    chi: Chi,
    landen: Landen,
    operator: Op,
}

#[derive(Deserialize)]
struct Chi {
    #[serde(with = "serde_q::vec")]
    hypergeometric_a: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    hypergeometric_b: Vec<Q>,
    #[serde(with = "serde_q")]
    prefactor: Q,
    shift: i64,
    order: i64,
}

#[derive(Deserialize)]
struct Landen {
    landen: RatFunc,
    automat_factor: RatFunc,
    automat2_d: RatFunc,
    automat2_c: RatFunc,
    #[serde(with = "serde_q")]
    automat2_scale: Q,
    #[serde(with = "serde_q::vec")]
    inverse_head: Vec<Q>,
    automat3_c0_num: RatFunc,
    automat3_c1: RatFunc,
}

#[derive(Deserialize)]
struct Op {
    hypergeometric_coeffs: Vec<RatFunc>,
    #[serde(with = "serde_q")]
    gauge_power: Q,
    w: RatFunc,
    #[serde(with = "serde_q::vec")]
    w_laurent: Vec<Q>,
    #[serde(with = "serde_q")]
    a1: Q,
    inconsistent_n1: usize,
    inconsistent_n2: usize,
}

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("landen-chi2", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];
    let c = &b.chi;
    let k = c.order;
    let x2 = Series::monomial(q(1), 2, k);
    let chi = Series::hypergeometric(&c.hypergeometric_a, &c.hypergeometric_b, k)
        .compose(&x2)?
        .shift(c.shift)
        .scale(&c.prefactor);
    let dchi = chi.derivative();

    let l = &b.landen;
    let g = chi.compose(&ser(&l.landen, k))?;
    let rhs = &ser(&l.automat_factor, k) * &dchi.compose(&x2)?;
    checks.push(Check::zero_series(
        "χ(2m/(1+m²)) = 4(1+m²)/m²·χ'(m²)",
        &(&g - &rhs),
        k - 6,
    ));
    let rhs = (&(&ser(&l.automat2_d, k) * &g.derivative()) + &(&ser(&l.automat2_c, k) * &g)).scale(&l.automat2_scale);
    checks.push(Check::zero_series(
        "χ(m²) from G = χ(2m/(1+m²)) and G'",
        &(&chi.compose(&x2)? - &rhs),
        k - 6,
    ));

    let one = Series::one(k);
    let s = ser(&(RatFunc::one() - RatFunc::x().pow(2)), k).pow(&Q::new(1.into(), 2.into()))?;
    let inv = (&one - &s).checked_div(&(&one + &s))?;
    let n = l.inverse_head.len() as i64;
    checks.push(Check::equal(
        "inverse Landen map (1−k')/(1+k') head",
        &l.inverse_head.iter().map(fmt_q).collect::<Vec<_>>().join(", "),
        &(1..=n).map(|j| fmt_q(&inv.coeff(2 * j))).collect::<Vec<_>>().join(", "),
    ));
    let c0 = (&(&ser(&l.automat3_c0_num, k) * &s) + &Series::constant(q(2), k)).checked_div(&Series::monomial(
        q(4),
        2,
        k,
    ))?;
    let c1 = &ser(&l.automat3_c1, k) * &(&one - &s);
    let d = &chi.compose(&inv)? - &(&(&c0 * &chi) + &(&c1 * &dchi));
    checks.push(Check::zero_series(
        "χ at the inverse Landen map from χ and χ'",
        &d,
        k - 8,
    ));

    let o = &b.operator;
    let lk = Operator::new(o.hypergeometric_coeffs.clone())
        .pullback(&RatFunc::x().pow(2))?
        .conjugate(&Gauge::power_of(&RatFunc::x(), &o.gauge_power));
    checks.push(Check::zero_series(
        "operator annihilates χ",
        &lk.apply_series(&chi),
        k - 6,
    ));
    let w = w_function(&lk)?;
    checks.push(Check::equal("W of the operator", &o.w, &w));
    let pm = premodular_test(&w);
    let n = o.w_laurent.len() as i64;
    let laurent = ser(&w, n).coeffs_range(-2, n - 3);
    let fmt = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>().join(", ");
    checks.push(Check::equal(
        "Laurent expansion of W from x^-2",
        &fmt(&o.w_laurent),
        &fmt(&laurent),
    ));
    checks.push(Check::holds(
        "W is not pre-modular",
        !pm.pass,
        format!("head {}", fmt_q(&pm.head)),
    ));
    for (nn, a, at) in [(1u32, &o.a1, o.inconsistent_n1), (2, &q(1), o.inconsistent_n2)] {
        let sol = solve_schwarzian_series(&w, nn, a, 10)?;
        checks.push(Check::equal(
            format!("y_{nn} with a = {} breaks down at step", fmt_q(a)),
            &at.to_string(),
            &sol.inconsistent_at.map_or("never".into(), |s| s.to_string()),
        ));
    }
    Ok((sources("landen-chi2", DATA)?, checks))
}
