//! `₂F₁([−1/4, 3/4], [1])` at two pullbacks related by a modular equation of
//! order three, the intertwiners between them and the analogous order-nine pair.

use serde::Deserialize;

use super::{op, pw, ser, sources, vanishes, Check};
use crate::bivariate::{resultant_in_second_var, BiPoly};
use crate::diffop::{DiffOperator, Gauge, Operator, SeriesOperator};
use crate::error::Result;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, serde_q, Q};
use crate::schwarzian::w_function;
use crate::series::Series;

const DATA: &str = include_str!("../../data/avoiding-permutations.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    operator: Base,
    modular_equation: ModularEquation,
    intertwiners: Intertwiners,
    rational_intertwiners: RationalIntertwiners,
    order_nine: OrderNine,
}

#[derive(Deserialize)]
struct Base {
    l2: Vec<RatFunc>,
    #[serde(with = "serde_q::vec")]
    hypergeometric_a: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    hypergeometric_b: Vec<Q>,
    p1: RatFunc,
    p2: RatFunc,
    hauptmodul1: RatFunc,
    hauptmodul2: RatFunc,
    rescale1: RatFunc,
    rescale2: RatFunc,
    involution: RatFunc,
    w_printed: RatFunc,
    #[serde(with = "serde_q::vec")]
    w_laurent_printed: Vec<Q>,
    order: i64,
}

#[derive(Deserialize)]
struct ModularEquation {
    gamma3: Vec<Term>,
}

#[derive(Deserialize)]
struct Term(usize, usize, #[serde(with = "serde_q")] Q);

fn bipoly(terms: &[Term]) -> BiPoly {
    let t: Vec<(usize, usize, Q)> = terms.iter().map(|Term(i, j, c)| (*i, *j, c.clone())).collect();
    BiPoly::from_terms(&t)
}

/// `f·Π g_i^(e_i)`.
#[derive(Deserialize)]
struct Factor(RatFunc, #[serde(with = "serde_q")] Q);

#[derive(Deserialize)]
struct SqrtCoeff {
    d0: RatFunc,
    d0_powers: Vec<Factor>,
    d1: RatFunc,
    d1_powers: Vec<Factor>,
}

fn product(f: &RatFunc, powers: &[Factor], k: i64) -> Result<Series> {
    powers
        .iter()
        .try_fold(ser(f, k), |acc, Factor(g, e)| Ok(&acc * &pw(g, e, k)?))
}

impl SqrtCoeff {
    fn operator(&self, k: i64) -> Result<SeriesOperator> {
        Ok(Operator::new(vec![
            product(&self.d0, &self.d0_powers, k)?,
            product(&self.d1, &self.d1_powers, k)?,
        ]))
    }
}

#[derive(Deserialize)]
struct Intertwiners {
    m1: Vec<RatFunc>,
    l1: Vec<RatFunc>,
    alpha_log_derivative: RatFunc,
    series_l1: SqrtCoeff,
    series_l2: SqrtCoeff,
    h1_printed: Vec<RatFunc>,
    product_factor: RatFunc,
    product_order: i64,
}

#[derive(Deserialize)]
struct RationalIntertwiners {
    xi1_powers: Vec<Factor>,
    xi1_shift: i64,
    xi2_powers: Vec<Factor>,
    xi2_shift: i64,
    #[serde(with = "serde_q::vec")]
    xi2_head: Vec<Q>,
    mm1: Vec<RatFunc>,
    mm2: Vec<RatFunc>,
    n1: Vec<RatFunc>,
    omega2: Vec<RatFunc>,
    #[serde(with = "serde_q")]
    involution_factor: Q,
    product_factor: RatFunc,
}

#[derive(Deserialize)]
struct OrderNine {
    q1: RatFunc,
    q2: RatFunc,
    involution: RatFunc,
    a: RatFunc,
    b: RatFunc,
    q2_from_p2: RatFunc,
    curve: Vec<Term>,
    hat_l1: Vec<RatFunc>,
    hat_l2: Vec<RatFunc>,
    hat_h1: Vec<RatFunc>,
    r12: RatFunc,
    #[serde(with = "serde_q")]
    involution_factor_printed: Q,
    order: i64,
}

/// `1 − c·H` as an operator.
fn one_minus(c: &RatFunc, h: &DiffOperator) -> DiffOperator {
    DiffOperator::mult(RatFunc::one()).sub(&h.left_mul(c))
}

fn same(description: &str, a: &DiffOperator, b: &DiffOperator) -> Check {
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

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("avoiding-permutations", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];

    let base = &b.operator;
    let k = base.order;
    let l2 = op(&base.l2);
    let (p1, p2) = (&base.p1, &base.p2);
    checks.push(Check::equal(
        "p₁ = P₁(−27x)",
        p1,
        &base.hauptmodul1.compose(&base.rescale1),
    ));
    checks.push(Check::equal(
        "p₂ = P₂(−243x)",
        p2,
        &base.hauptmodul2.compose(&base.rescale2),
    ));
    checks.push(Check::equal("p₂ = p₁(1/(9x))", p2, &p1.compose(&base.involution)));
    let g3 = bipoly(&b.modular_equation.gamma3);
    checks.push(Check::holds("Γ₃(p₁, p₂) = 0", g3.vanishes_on(p1, p2), "exact"));

    let w = w_function(&l2)?;
    let derived = RatFunc::x() - RatFunc::int(4);
    let derived =
        derived / (RatFunc::x().pow(2) * (RatFunc::x() - RatFunc::one()).pow(2)).scale(&Q::from_integer(8.into()));
    checks.push(Check::equal("W of the order-two operator", &derived, &w));
    checks.push(Check::holds(
        "misprint: the printed closed form of W lacks the squares in the denominator",
        w != base.w_printed,
        format!("printed {}, derived {}", base.w_printed, w),
    ));
    let n = base.w_laurent_printed.len() as i64;
    let fmt = |v: &[Q]| v.iter().map(fmt_q).collect::<Vec<_>>().join(", ");
    checks.push(Check::equal(
        "Laurent expansion of W from x^-2",
        &fmt(&base.w_laurent_printed),
        &fmt(&ser(&w, n).coeffs_range(-2, n - 3)),
    ));

    let it = &b.intertwiners;
    let h1 = l2.pullback(p1)?;
    let h2 = l2.pullback(p2)?;
    let lhs = h1
        .mul(&op(&it.l1))
        .conjugate(&Gauge::new(it.alpha_log_derivative.clone()));
    checks.push(same("α⁻¹·H₁·L₁·α = M₁·H₂", &lhs, &op(&it.m1).mul(&h2)));
    let lhs_raw = l2
        .substitute(p1)?
        .mul(&op(&it.l1))
        .conjugate(&Gauge::new(it.alpha_log_derivative.clone()));
    let rhs_raw = op(&it.m1).mul(&l2.substitute(p2)?);
    checks.push(Check::holds(
        "the intertwining needs monic pullbacks",
        lhs_raw != rhs_raw,
        format!("raw leading ratio {}", lhs_raw.lead() / rhs_raw.lead()),
    ));
    let hyp = Series::hypergeometric(&base.hypergeometric_a, &base.hypergeometric_b, k);
    let f1 = hyp.compose(&ser(p1, k))?;
    let f2 = hyp.compose(&ser(p2, k))?;
    let cl1 = it.series_l1.operator(k)?;
    let cl2 = it.series_l2.operator(k)?;
    checks.push(Check::zero_series("F(p₁) = ℒ₁·F(p₂)", &(&f1 - &cl1.apply(&f2)), k - 4));
    checks.push(Check::zero_series("F(p₂) = ℒ₂·F(p₁)", &(&f2 - &cl2.apply(&f1)), k - 4));
    checks.push(Check::zero_series("H₁·F(p₁)", &h1.apply_series(&f1), k - 4));
    let printed = op(&it.h1_printed);
    let sign_flip = printed.coeff(0) == -h1.coeff(0) && printed.coeff(1) == h1.coeff(1);
    checks.push(Check::holds(
        "misprint: printed H₁ has the opposite sign of its D⁰ coefficient",
        sign_flip && printed != h1,
        format!("derived D⁰ coefficient {}", h1.coeff(0)),
    ));
    let po = it.product_order;
    let prod12 = cl1.mul(&cl2);
    let ok = prod12.agrees_to(&one_minus(&it.product_factor, &h1).to_series(k), po);
    checks.push(Check::holds(
        format!("ℒ₁ℒ₂ = 1 − 64x²/9·H₁ through x^{po}"),
        ok,
        ok.to_string(),
    ));
    let bad = prod12.agrees_to(&one_minus(&it.product_factor, &printed).to_series(k), po);
    checks.push(Check::holds(
        "misprint: with the printed H₁ the product relation fails",
        !bad,
        bad.to_string(),
    ));
    let ok = cl2
        .mul(&cl1)
        .agrees_to(&one_minus(&it.product_factor, &h2).to_series(k), po);
    checks.push(Check::holds(
        format!("ℒ₂ℒ₁ = 1 − 64x²/9·H₂ through x^{po}"),
        ok,
        ok.to_string(),
    ));

    let ri = &b.rational_intertwiners;
    let xi1 = (&product(&RatFunc::one(), &ri.xi1_powers, k)? * &f1).shift(ri.xi1_shift);
    let xi2 = (&product(&RatFunc::one(), &ri.xi2_powers, k)? * &f2).shift(ri.xi2_shift);
    let n = ri.xi2_head.len() as i64;
    checks.push(Check::equal(
        "Ξ₂ coefficients",
        &fmt(&ri.xi2_head),
        &fmt(&xi2.coeffs_range(ri.xi2_shift, ri.xi2_shift + n - 1)),
    ));
    let (mm1, mm2, om2) = (op(&ri.mm1), op(&ri.mm2), op(&ri.omega2));
    checks.push(Check::holds(
        "Ξ₁ = ℳ₁Ξ₂",
        vanishes(&(&xi1 - &mm1.apply_series(&xi2))),
        "series",
    ));
    checks.push(Check::holds(
        "Ξ₂ = ℳ₂Ξ₁",
        vanishes(&(&xi2 - &mm2.apply_series(&xi1))),
        "series",
    ));
    checks.push(Check::zero_series("Ω₂Ξ₂", &om2.apply_series(&xi2), k - 4));
    let inv9 = &base.involution;
    checks.push(same(
        "Ω₂(1/(9x))·ℳ₁ = 𝒩₁·Ω₂",
        &om2.pullback(inv9)?.mul(&mm1),
        &op(&ri.n1).mul(&om2),
    ));
    let f = &ri.involution_factor;
    checks.push(same("ℳ₁ = 6561·ℳ₂(1/(9x))", &mm1, &mm2.substitute(inv9)?.scale(f)));
    checks.push(same("6561·ℳ₂ = ℳ₁(1/(9x))", &mm2.scale(f), &mm1.substitute(inv9)?));
    checks.push(same(
        "ℳ₂ℳ₁ = 1 − 64x²/9·Ω₂",
        &mm2.mul(&mm1),
        &one_minus(&ri.product_factor, &om2),
    ));
    let c = DiffOperator::mult(RatFunc::one()).sub(&mm1.mul(&mm2));
    checks.push(Check::equal(
        "leading coefficient of 1 − ℳ₁ℳ₂",
        &ri.product_factor,
        c.lead(),
    ));
    checks.push(Check::zero_series(
        "Ω₁Ξ₁ with Ω₁ the monic part of 1 − ℳ₁ℳ₂",
        &c.monic().apply_series(&xi1),
        k - 6,
    ));

    let o9 = &b.order_nine;
    let k = o9.order;
    let (q1, q2) = (&o9.q1, &o9.q2);
    checks.push(Check::equal("q₂ = q₁(1/(2187x))", q2, &q1.compose(&o9.involution)));
    checks.push(Check::equal("q₁ = p₁(A)", q1, &p1.compose(&o9.a)));
    checks.push(Check::equal(
        "q₂ = p₂(19683x³/(1−81x+2187x²))",
        q2,
        &p2.compose(&o9.q2_from_p2),
    ));
    checks.push(Check::equal("q₂ = p₁(B)", q2, &p1.compose(&o9.b)));
    checks.push(Check::holds(
        "(A, B) lies on the curve",
        bipoly(&o9.curve).vanishes_on(&o9.a, &o9.b),
        "exact",
    ));
    let g9 = resultant_in_second_var(&g3, &g3)?;
    checks.push(Check::holds(
        "Γ₉ = Res(Γ₃, Γ₃) vanishes on (q₁, q₂)",
        g9.vanishes_on(q1, q2),
        format!("bidegree ({:?}, {:?})", g9.deg_x(), g9.deg_y()),
    ));
    let hyp = Series::hypergeometric(&base.hypergeometric_a, &base.hypergeometric_b, k);
    let fq1 = hyp.compose(&ser(q1, k))?;
    let fq2 = hyp.compose(&ser(q2, k))?;
    let (lh1, lh2) = (op(&o9.hat_l1), op(&o9.hat_l2));
    checks.push(Check::zero_series(
        "F(q₁) = L̂₁·F(q₂)",
        &(&fq1 - &lh1.apply_series(&fq2)),
        k - 4,
    ));
    checks.push(Check::zero_series(
        "F(q₂) = L̂₂·F(q₁)",
        &(&fq2 - &lh2.apply_series(&fq1)),
        k - 4,
    ));
    let hh1 = l2.pullback(q1)?;
    checks.push(same("Ĥ₁ is the pullback by q₁", &op(&o9.hat_h1), &hh1));
    let one = DiffOperator::mult(RatFunc::one());
    checks.push(same(
        "L̂₁L̂₂ = 1 + R₁₂·Ĥ₁",
        &lh1.mul(&lh2),
        &one.add(&hh1.left_mul(&o9.r12)),
    ));
    let hh2 = l2.pullback(q2)?;
    checks.push(same(
        "L̂₂L̂₁ = 1 + R₁₂·Ĥ₂",
        &lh2.mul(&lh1),
        &one.add(&hh2.left_mul(&o9.r12)),
    ));
    let sub2 = lh2.substitute(&o9.involution)?;
    let nine = Q::from_integer(9.into());
    checks.push(same("9·L̂₂(1/(2187x)) = L̂₁", &sub2.scale(&nine), &lh1));
    let sub1 = lh1.substitute(&o9.involution)?;
    checks.push(same("9·L̂₂ = L̂₁(1/(2187x))", &lh2.scale(&nine), &sub1));
    let pf = &o9.involution_factor_printed;
    let printed_holds = lh1.scale(pf) == sub2 || lh2 == sub1.scale(pf);
    checks.push(Check::holds(
        format!("misprint: the involution factor {} fails", fmt_q(pf)),
        !printed_holds,
        "L̂₂(1/(2187x)) = L̂₁/9".to_string(),
    ));

    Ok((sources("avoiding-permutations", DATA)?, checks))
}
