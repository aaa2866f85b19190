//! Heun operators: the Laurent head of `W`, factorizations `(D + A_R)·D`
//! and the series pullbacks available once `W` is pre-modular.

use serde::Deserialize;

use super::{sources, Check};
use crate::error::Result;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, serde_q, Q};
use crate::schwarzian::{heun_scan, solve_schwarzian_series, HeunParams};

const DATA: &str = include_str!("../../data/heun-premodular.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    factorized: Factorized,
    premodular: Premodular,
    scan: Scan,
}

#[derive(Deserialize)]
struct Factorized {
    #[serde(with = "serde_q::vec")]
    m_values: Vec<Q>,
    #[serde(with = "serde_q")]
    alpha: Q,
    #[serde(with = "serde_q")]
    beta: Q,
    #[serde(with = "serde_q")]
    gamma: Q,
    #[serde(with = "serde_q")]
    delta: Q,
    #[serde(with = "serde_q::vec")]
    uvw: Vec<Q>,
    condition: String,
}

#[derive(Deserialize)]
struct Premodular {
    instances: Vec<(String, String, String)>,
    #[serde(with = "serde_q::vec")]
    samples: Vec<Q>,
    order: i64,
}

#[derive(Deserialize)]
struct Scan {
    instances: Vec<HeunParams>,
    exponents: Vec<u32>,
    order: i64,
}

fn parse(s: &str) -> Result<Q> {
    crate::rational::parse_q(s)
}

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("heun-premodular", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];

    let f = &b.factorized;
    for m in &f.m_values {
        let p = HeunParams::new(
            m.clone(),
            (m + q(1)) / q(4),
            f.alpha.clone(),
            f.beta.clone(),
            f.gamma.clone(),
            f.delta.clone(),
        );
        let r = heun_scan(&p);
        let found = r
            .factorizations
            .iter()
            .find(|h| [&h.u, &h.v, &h.w].into_iter().eq(f.uvw.iter()));
        checks.push(Check::holds(
            format!("M = {}: W = A_R' + A_R²/2 with u = v = w = 1/2", fmt_q(m)),
            found.is_some(),
            format!("{} factorizations", r.factorizations.len()),
        ));
        checks.push(Check::equal(
            format!("M = {}: on the branch γ − 2 + v = 0", fmt_q(m)),
            &"0".to_string(),
            &found.map_or("none".into(), |h| fmt_q(&h.branch)),
        ));
        let cond = r.special_conditions.iter().find(|(n, _)| *n == f.condition);
        checks.push(Check::equal(
            format!("M = {}: {} = 0", fmt_q(m), f.condition),
            &"0".to_string(),
            &cond.map_or("missing".into(), |(_, v)| v.clone()),
        ));
        checks.push(Check::holds(
            format!("M = {}: W is not pre-modular", fmt_q(m)),
            !r.premodular,
            format!("head {}", fmt_q(&r.head)),
        ));
    }

    let pm = &b.premodular;
    for (a, beta, delta) in &pm.instances {
        let (a, beta, delta) = (parse(a)?, parse(beta)?, parse(delta)?);
        let tag = format!("(a, β, δ) = ({}, {}, {})", fmt_q(&a), fmt_q(&beta), fmt_q(&delta));
        let p = HeunParams::new(a.clone(), q(0), q(0), beta.clone(), q(1), delta.clone());
        let r = heun_scan(&p);
        checks.push(Check::holds(
            format!("{tag}: W is pre-modular"),
            r.premodular,
            format!("head {}", fmt_q(&r.head)),
        ));
        let x = RatFunc::x();
        let a_r = &(&x.inv()? + &(RatFunc::constant(delta.clone()) / (&x - &RatFunc::one())))
            + &(RatFunc::constant(&beta - &delta) / (&x - &RatFunc::constant(a.clone())));
        checks.push(Check::holds(
            format!("{tag}: A_R = 1/x + δ/(x−1) + (β−δ)/(x−a)"),
            r.factorizations.iter().any(|h| h.a_r == a_r),
            format!("{} factorizations", r.factorizations.len()),
        ));
        checks.push(Check::equal(
            format!("{tag}: the operator is (D + A_R)·D"),
            &a_r,
            &p.operator().coeff(1),
        ));
        let c = (&a * &delta + &beta - &delta) / &a;
        checks.push(Check::equal(
            format!("{tag}: residue of W"),
            &fmt_q(&-c.clone()),
            &fmt_q(&r.residue),
        ));
        for s in &pm.samples {
            let y1 = solve_schwarzian_series(&r.w, 1, s, pm.order)?;
            checks.push(Check::equal(
                format!("{tag}: x² coefficient of y_1 at a_1 = {}", fmt_q(s)),
                &fmt_q(&-(s * (s - q(1)) * &c)),
                &fmt_q(&y1.tail.coeff(2)),
            ));
            let y2 = solve_schwarzian_series(&r.w, 2, s, pm.order)?;
            checks.push(Check::equal(
                format!("{tag}: x³ coefficient of y_2 at a_2 = {}", fmt_q(s)),
                &fmt_q(&(q(2) * &c * s)),
                &fmt_q(&y2.tail.coeff(3)),
            ));
        }
    }

    let sc = &b.scan;
    for p in &sc.instances {
        let r = heun_scan(p);
        let tag = format!(
            "(a, q, α, β, γ, δ) = ({})",
            [&p.a, &p.q, &p.alpha, &p.beta, &p.gamma, &p.delta]
                .map(fmt_q)
                .join(", ")
        );
        checks.push(Check::equal(
            format!("{tag}: head γ(γ−2)/2"),
            &fmt_q(&r.head_formula),
            &fmt_q(&r.head),
        ));
        checks.push(Check::equal(
            format!("{tag}: residue"),
            &r.residue_formula.as_ref().map_or("none".into(), fmt_q),
            &fmt_q(&r.residue),
        ));
        checks.push(Check::holds(
            format!("{tag}: pre-modular iff γ = 1"),
            r.premodular == (p.gamma == q(1)),
            r.premodular.to_string(),
        ));
        for &n in &sc.exponents {
            let s = solve_schwarzian_series(&r.w, n, &q(2), sc.order)?;
            checks.push(Check::holds(
                format!("{tag}: y_{n} exists iff pre-modular"),
                s.is_consistent() == r.premodular,
                s.inconsistent_at
                    .map_or("consistent".into(), |k| format!("inconsistent at step {k}")),
            ));
        }
    }
    Ok((sources("heun-premodular", DATA)?, checks))
}
