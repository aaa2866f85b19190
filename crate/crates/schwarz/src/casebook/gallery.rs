//! Symmetric powers and products of order-two operators: Calabi-Yau type
//! conditions, exterior squares, symmetric-power detection, adjoint exponents
//! and the rank-two factorizations of the F-equation.

use serde::Deserialize;

use super::{sources, Check};
use crate::cy::{
    adjoint_conjugation_check, adjoint_exponent_search, calabi_residual, detect_sym_power, order5_residuals,
    s_condition_residual, symcy3_residual,
};
use crate::diffop::{ext2, order2, sym2, sym_power_order2, DiffOperator, Operator};
use crate::error::Result;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, qf, serde_q, Q};
use crate::schwarzian::{f_equation, ranktwo_subcase, w_function};

const DATA: &str = include_str!("../../data/sym-power-gallery.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    order_two: OrderTwo,
    rank_two: RankTwoBlock,
}

#[derive(Deserialize)]
struct OrderTwo {
    operators: Vec<(RatFunc, RatFunc)>,
    #[serde(with = "serde_q::vec")]
    adjoint_exponents: Vec<Q>,
    pullback: RatFunc,
}

#[derive(Deserialize)]
struct RankTwoBlock {
    a_r: Vec<RatFunc>,
}

fn same(description: String, a: &DiffOperator, b: &DiffOperator) -> Check {
    let diff = a.sub(b);
    Check::holds(
        description,
        diff.is_zero(),
        if diff.is_zero() {
            "identical".into()
        } else {
            format!("difference {diff}")
        },
    )
}

fn d_plus(f: &RatFunc) -> DiffOperator {
    Operator::new(vec![f.clone(), RatFunc::one()])
}

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("sym-power-gallery", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];

    let o = &b.order_two;
    for (p, qq) in &o.operators {
        let l2 = order2(p.clone(), qq.clone());
        let tag = format!("L₂ = D² + ({p})·D + ({qq})");
        let w2 = w_function(&l2)?;

        let s2 = sym_power_order2(&l2, 2)?;
        let r = symcy3_residual(&s2)?;
        checks.push(Check::holds(
            format!("{tag}: Sym² satisfies the order-three condition"),
            r.holds,
            r.residual.to_string(),
        ));
        let s3 = sym_power_order2(&l2, 3)?;
        let c = calabi_residual(&s3)?;
        checks.push(Check::holds(
            format!("{tag}: Sym³ satisfies the Calabi-Yau condition"),
            c.holds,
            c.residual.to_string(),
        ));
        let s = s_condition_residual(&s3)?;
        checks.push(Check::holds(
            format!("{tag}: Sym³ satisfies the s(x) condition"),
            s.holds,
            s.residual.to_string(),
        ));
        let s4 = sym_power_order2(&l2, 4)?;
        for r in order5_residuals(&s4)? {
            checks.push(Check::holds(
                format!("{tag}: Sym⁴ satisfies {}", r.name),
                r.holds,
                r.residual.to_string(),
            ));
        }
        for (m, sm) in [(2usize, &s2), (3, &s3), (4, &s4)] {
            let det = detect_sym_power(sm)?;
            checks.push(Check::holds(
                format!("{tag}: Sym^{m} is detected and L₂ recovered"),
                det.is_sym_power && det.l2 == l2.monic(),
                format!("mismatches {:?}", det.mismatches),
            ));
            let w = w_function(sm)?;
            checks.push(Check::equal(format!("{tag}: W of Sym^{m} equals W of L₂"), &w2, &w));
        }
        for (m, sm) in [(1usize, &l2), (2, &s2), (3, &s3), (4, &s4)] {
            let alpha = qf(2, m as i64 + 1);
            let c = adjoint_conjugation_check(sm, &alpha);
            checks.push(Check::holds(
                format!("{tag}: Sym^{m}·w^{} is the signed adjoint", fmt_q(&alpha)),
                c.holds,
                format!(
                    "first candidate found {}",
                    adjoint_exponent_search(sm, &o.adjoint_exponents).map_or("none".into(), |e| fmt_q(&e))
                ),
            ));
        }

        let l4 = l2.mul(&l2);
        let two_p = p.scale(&q(2));
        checks.push(Check::equal(
            format!("{tag}: D³ coefficient of L₂² is 2p"),
            &two_p,
            &l4.coeff(3),
        ));
        let qr = &(&(p * p) + &qq.scale(&q(2))) + &p.derivative().scale(&q(2));
        checks.push(Check::equal(
            format!("{tag}: D² coefficient of L₂² is p² + 2q + 2p'"),
            &qr,
            &l4.coeff(2),
        ));
        let c = calabi_residual(&l4)?;
        checks.push(Check::holds(
            format!("{tag}: L₂² satisfies the Calabi-Yau condition"),
            c.holds,
            c.residual.to_string(),
        ));
        let e = ext2(&l4)?;
        checks.push(Check::equal(
            format!("{tag}: exterior square of L₂² has order 5"),
            &5,
            &e.operator.order(),
        ));
        let rhs = d_plus(p).mul(&sym2(&l2)?.operator).mul(&d_plus(p));
        checks.push(same(
            format!("{tag}: Ext²(L₂²) = (D + p)·Sym²(L₂)·(D + p)"),
            &e.operator,
            &rhs.monic(),
        ));
        checks.push(Check::equal(
            format!("{tag}: W(L₂²) = W(L₂)/5"),
            &w2.scale(&qf(1, 5)),
            &w_function(&l4)?,
        ));
        let y = &o.pullback;
        checks.push(same(
            format!("{tag}: substitution commutes with squaring"),
            &l4.substitute(y)?,
            &l2.substitute(y)?.mul(&l2.substitute(y)?),
        ));
    }

    for a_r in &b.rank_two.a_r {
        let tag = format!("A_R = {a_r}");
        let rt = ranktwo_subcase(a_r);
        let half = a_r.scale(&qf(1, 2));
        let m2 = order2(RatFunc::zero(), rt.w.scale(&qf(-1, 2)));
        checks.push(same(
            format!("{tag}: D² − W/2 = (D + A_R/2)(D − A_R/2)"),
            &m2,
            &d_plus(&half).mul(&d_plus(&-half.clone())),
        ));
        let three = d_plus(a_r).mul(&DiffOperator::d()).mul(&d_plus(&-a_r.clone()));
        let fe = f_equation(&rt.w)?;
        checks.push(same(
            format!("{tag}: F-equation = (D + A_R)·D·(D − A_R)"),
            &fe.operator,
            &three,
        ));
        checks.push(same(
            format!("{tag}: Sym²(D² − W/2) = (D + A_R)·D·(D − A_R)"),
            &sym2(&m2)?.operator,
            &three,
        ));
        checks.push(same(
            format!("{tag}: Ω is the adjoint of D·(D − A_R)"),
            &rt.omega(),
            &rt.f_operator().adjoint(),
        ));
        let c = RatFunc::x().inv()?;
        checks.push(Check::equal(
            format!("{tag}: W of (D + A_R + 1/x)(D + 1/x)"),
            &rt.w,
            &w_function(&rt.factored(&c))?,
        ));
    }

    Ok((sources("sym-power-gallery", DATA)?, checks))
}
