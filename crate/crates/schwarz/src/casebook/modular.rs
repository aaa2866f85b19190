//! Modular forms of weight one for `₂F₁([1/12, 5/12], [1], x)`: generator,
//! mirror maps, modular correspondences and a pair of Hauptmodul pullbacks.

use serde::Deserialize;

use super::{pw, ser, sources, vanishes, Check};
use crate::error::Result;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, serde_q, Q};
use crate::schwarzian::{
    casimir_residual, composition_law_check, f_equation, mirror_maps, premodular_test, schwarzian_derivative,
    schwarzian_family, solve_schwarzian_series, w_from_f,
};
use crate::series::Series;

const DATA: &str = include_str!("../../data/modular-j.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    generator: Generator,
    mirror: Mirror,
    family: Family,
    hauptmoduls: Hauptmoduls,
}

#[derive(Deserialize)]
struct Generator {
    #[serde(with = "serde_q::vec")]
    hypergeometric_a: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    hypergeometric_b: Vec<Q>,
    w: RatFunc,
    order: i64,
}

#[derive(Deserialize)]
struct Mirror {
    #[serde(with = "serde_q")]
    scale: Q,
    #[serde(with = "serde_q::vec")]
    q_scaled: Vec<Q>,
    #[serde(with = "serde_q::vec")]
    p_scaled: Vec<Q>,
}

#[derive(Deserialize)]
struct Family {
    #[serde(with = "serde_q")]
    y1_x2_factor: Q,
    #[serde(with = "serde_q::vec")]
    a1_samples: Vec<Q>,
    composition: Vec<(u32, u32)>,
    #[serde(with = "serde_q")]
    a_n: Q,
    #[serde(with = "serde_q")]
    a_m: Q,
    order: i64,
}

#[derive(Deserialize)]
struct Hauptmoduls {
    p1: RatFunc,
    p2: RatFunc,
    a1_base: RatFunc,
    a2_base: RatFunc,
    #[serde(with = "serde_q")]
    exponent: Q,
    order: i64,
}

/// `f(c·x)/c`, so that `Q(1728x)/1728` has integer coefficients.
fn rescaled(f: &Series, c: &Q) -> Series {
    f.scale_var(c).scale(&(q(1) / c))
}

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("modular-j", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];

    let g = &b.generator;
    let k = g.order;
    let w = &g.w;
    let h = Series::hypergeometric(&g.hypergeometric_a, &g.hypergeometric_b, k);
    let f = (&(&h * &h) * &pw(&(RatFunc::one() - RatFunc::x()), &Q::new(1.into(), 2.into()), k)?).shift(1);
    let pm = premodular_test(w);
    checks.push(Check::holds(
        "W is pre-modular",
        pm.pass,
        format!("head {}", fmt_q(&pm.head)),
    ));
    let fe = f_equation(w)?;
    checks.push(Check::holds(
        "F-equation is the symmetric square of D² − W/2",
        fe.is_sym2,
        fe.is_sym2.to_string(),
    ));
    checks.push(Check::zero_series(
        "F-equation annihilates F",
        &fe.operator.apply_series(&f),
        k - 4,
    ));
    checks.push(Check::zero_series(
        "F·F'' − F'²/2 − F²·W",
        &casimir_residual(&f, &q(0), w)?,
        k - 4,
    ));
    let wf = w_from_f(&f, &q(0))?;
    checks.push(Check::zero_series("W recovered from F", &(&wf - &ser(w, k)), k - 4));

    let mm = mirror_maps(&f)?;
    let m = &b.mirror;
    let n = m.q_scaled.len() as i64;
    let qs = rescaled(&mm.q, &m.scale);
    let ps = rescaled(&mm.p, &m.scale);
    checks.push(Check::equal(
        "Q(1728x)/1728 coefficients",
        &fmt_list(&m.q_scaled),
        &fmt_list(&qs.coeffs_range(1, n)),
    ));
    checks.push(Check::equal(
        "P(1728x)/1728 coefficients",
        &fmt_list(&m.p_scaled),
        &fmt_list(&ps.coeffs_range(1, n)),
    ));
    let (r1, r2) = mm.inverse_residuals()?;
    checks.push(Check::zero_series("Q∘P − x", &r1, k - 4));
    checks.push(Check::zero_series("P∘Q − x", &r2, k - 4));
    checks.push(Check::zero_series("x·P' − F(P)", &mm.p_residual()?, k - 4));
    let dq = mm.q.derivative();
    let ratio = dq.checked_div(&mm.q)?;
    let lhs = &(&ser(w, k) + &schwarzian_derivative(&mm.q)?) + &(&ratio * &ratio).scale(&Q::new(1.into(), 2.into()));
    checks.push(Check::zero_series("W + {Q, x} + (Q'/Q)²/2", &lhs, k - 6));
    let gi = f.inv()?;
    let r1 = gi.derivative().checked_div(&gi)?;
    let r2 = gi.derivative().derivative().checked_div(&gi)?;
    let ln_form = &(&ser(w, k) + &r2) - &(&r1 * &r1).scale(&Q::new(3.into(), 2.into()));
    checks.push(Check::zero_series("W + {ln Q, x}", &ln_form, k - 6));
    let dp = mm.p.derivative();
    let p_form = &(&schwarzian_derivative(&mm.p)? - &Series::monomial(Q::new(1.into(), 2.into()), -2, k))
        - &(&Series::ratfunc_at(w, &mm.p)? * &(&dp * &dp));
    checks.push(Check::zero_series("{P, x} − 1/(2x²) − W(P)·P'²", &p_form, k - 6));

    let fam = &b.family;
    let ko = fam.order;
    for a in &fam.a1_samples {
        let s = solve_schwarzian_series(w, 1, a, ko)?;
        let expected = &fam.y1_x2_factor * a * (a - q(1));
        checks.push(Check::equal(
            format!("x² coefficient of y_1 at a_1 = {}", fmt_q(a)),
            &fmt_q(&expected),
            &fmt_q(&s.tail.coeff(2)),
        ));
        let d = &mm.evaluate(a, 1)? - &s.tail;
        checks.push(Check::zero_series(
            format!("y_1 = P(a_1·Q) at a_1 = {}", fmt_q(a)),
            &d,
            ko,
        ));
    }
    let s2 = solve_schwarzian_series(w, 2, &fam.a_n, ko)?;
    checks.push(Check::holds(
        "y_2 exists",
        s2.is_consistent(),
        format!("{:?}", s2.inconsistent_at),
    ));
    let d = &mm.evaluate(&fam.a_n, 2)? - &s2.tail;
    checks.push(Check::zero_series(
        format!("y_2 = P(a_2·Q²) at a_2 = {}", fmt_q(&fam.a_n)),
        &d,
        ko,
    ));
    for &(n, m) in &fam.composition {
        let r = composition_law_check(schwarzian_family(w), n, m, &fam.a_n, &fam.a_m, ko)?;
        checks.push(Check::zero_series(
            format!("y_{n}(a, y_{m}(b, x)) − y_{}(a·b^{n}, x)", n * m),
            &r.difference,
            ko,
        ));
    }

    let hm = &b.hauptmoduls;
    let k = hm.order;
    let h = Series::hypergeometric(&g.hypergeometric_a, &g.hypergeometric_b, k + 4);
    let phi = h.derivative();
    let (s1, s2) = (ser(&hm.p1, k), ser(&hm.p2, k));
    let a1 = pw(&hm.a1_base, &hm.exponent, k)?;
    let a2 = pw(&hm.a2_base, &hm.exponent, k)?;
    let left = &a1 * &h.compose(&s1)?;
    let d = &left - &(&a2 * &h.compose(&s2)?);
    checks.push(Check::zero_series("A₁·F(p₁) = A₂·F(p₂)", &d, k));
    let d = &left - &(&a1 * &h.compose(&s2)?);
    checks.push(Check::holds(
        "misprint: A₁·F(p₁) = A₁·F(p₂) fails",
        !vanishes(&d),
        format!("difference starts at x^{}", d.val().unwrap_or(d.order())),
    ));
    let side = |p: &RatFunc, s: &Series, a: &Series, factor: &Series| -> Result<Series> {
        let da = a.derivative();
        let c1 = &ser(&(p * &(p - &RatFunc::one())).scale(&q(144)), k) * &da;
        let c2 = &(&ser(&(&p.scale(&q(3)) - &RatFunc::int(2)).scale(&q(72)), k) * &da)
            - &(&factor.scale(&q(5)) * &ser(&p.derivative(), k));
        Ok(&(&c1 * &phi.derivative().compose(s)?) + &(&c2 * &phi.compose(s)?))
    };
    let lhs = side(&hm.p1, &s1, &a1, &a1)?;
    let d = &lhs - &side(&hm.p2, &s2, &a2, &a2)?;
    checks.push(Check::zero_series(
        "derivative identity with A₂ on the right",
        &d,
        k - 2,
    ));
    let d = &lhs - &side(&hm.p2, &s2, &a2, &a1)?;
    checks.push(Check::holds(
        "misprint: derivative identity with A₁ in the −5·A·p₂' term fails",
        !vanishes(&d),
        format!("difference starts at x^{}", d.val().unwrap_or(d.order())),
    ));

    Ok((sources("modular-j", DATA)?, checks))
}

fn fmt_list(v: &[Q]) -> String {
    v.iter().map(fmt_q).collect::<Vec<_>>().join(", ")
}
