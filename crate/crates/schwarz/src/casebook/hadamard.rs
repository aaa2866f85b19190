//! Calabi-Yau operator annihilating a Hadamard product of two `₂F₁`, its
//! relation to an exterior square root by pullback, and its nome and Yukawa
//! coupling against printed `s, p`-polynomials.

use num_traits::Zero;
use serde::Deserialize;

use super::{sources, Check};
use crate::cy::calabi_residual;
use crate::diffop::{frobenius_mum_basis, monic_from, DiffOperator, Gauge};
use crate::error::Result;
use crate::mirror::{hadamard_operator, hadamard_params, mum_data, pair_schwarzian_residual};
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q_pow, serde_q, Q};
use crate::series::Series;

const DATA: &str = include_str!("../../data/hadamard-cy.json");

#[derive(Deserialize)]
struct Data {
    blocks: Blocks,
}

#[derive(Deserialize)]
struct Blocks {
    operators: Operators,
    yukawa: Yukawa,
}

#[derive(Deserialize)]
struct Operators {
    l4_p: RatFunc,
    l4_q_base: RatFunc,
    l4_q_s: RatFunc,
    yy_p: RatFunc,
    yy_q_base: RatFunc,
    yy_q_s: RatFunc,
    hat_p: RatFunc,
    hat_q_base: RatFunc,
    hat_q_s: RatFunc,
    pullback: RatFunc,
    v_base: RatFunc,
    #[serde(with = "serde_q")]
    v_exponent: Q,
    u_log_derivative: RatFunc,
    #[serde(with = "serde_q::vec")]
    s_samples: Vec<Q>,
}

/// `(Σ c·p^i·s^j)/divisor`.
#[derive(Deserialize)]
struct SpPoly {
    #[serde(with = "serde_q")]
    divisor: Q,
    terms: Vec<(i64, i64, i64)>,
}

impl SpPoly {
    fn eval(&self, s: &Q, p: &Q) -> Q {
        let sum = self.terms.iter().fold(Q::zero(), |acc, &(c, i, j)| {
            acc + Q::from_integer(c.into()) * q_pow(p, i) * q_pow(s, j)
        });
        sum / &self.divisor
    }
}

#[derive(Deserialize)]
struct Yukawa {
    #[serde(with = "serde_q")]
    a: Q,
    #[serde(with = "serde_q")]
    b: Q,
    #[serde(with = "serde_q")]
    s: Q,
    #[serde(with = "serde_q")]
    p: Q,
    nome: Vec<SpPoly>,
    k_x: Vec<SpPoly>,
    k_q: Vec<SpPoly>,
}

/// Truncated operator `D⁴ + P·D³ + (Q₀ + s·Q₁)·D²`.
fn top_two(p: &RatFunc, q0: &RatFunc, q1: &RatFunc, s: &Q) -> DiffOperator {
    monic_from(vec![RatFunc::zero(), RatFunc::zero(), q0 + &q1.scale(s), p.clone()])
}

/// `c_0 + c_1·x + …` with `c_0` given and the rest from printed polynomials.
fn printed_series(head: Q, tail: &[SpPoly], s: &Q, p: &Q, start: i64) -> Series {
    let mut c = vec![head];
    c.extend(tail.iter().map(|t| t.eval(s, p)));
    let order = start + c.len() as i64 - 1;
    Series::from_coeffs(start, c, order)
}

pub(super) fn run() -> Result<(Vec<String>, Vec<Check>)> {
    let data: Data = super::load("hadamard-cy", DATA)?;
    let b = data.blocks;
    let mut checks = vec![];

    let o = &b.operators;
    let v = Gauge::power_of(&o.v_base, &o.v_exponent);
    let u = Gauge::new(o.u_log_derivative.clone());
    for s in &o.s_samples {
        let tag = format!("s = {}", fmt_q(s));
        let l4 = top_two(&o.l4_p, &o.l4_q_base, &o.l4_q_s, s);
        let yy = top_two(&o.yy_p, &o.yy_q_base, &o.yy_q_s, s);
        let hat = top_two(&o.hat_p, &o.hat_q_base, &o.hat_q_s, s);
        let lhs = hat.conjugate(&v.inverse());
        let rhs = l4.pullback(&o.pullback)?;
        checks.push(Check::holds(
            format!("{tag}: v·𝓛₄·v⁻¹ and the pullback of L₄ share D³, D²"),
            lhs.coeff(3) == rhs.coeff(3) && lhs.coeff(2) == rhs.coeff(2),
            format!(
                "D³ {}, D² {}",
                lhs.coeff(3) == rhs.coeff(3),
                lhs.coeff(2) == rhs.coeff(2)
            ),
        ));
        let c = l4.conjugate(&u.inverse());
        checks.push(Check::holds(
            format!("{tag}: u·L₄·u⁻¹ has the D³, D² of M₄"),
            c.coeff(3) == yy.coeff(3) && c.coeff(2) == yy.coeff(2),
            format!("D³ {}, D² {}", c.coeff(3) == yy.coeff(3), c.coeff(2) == yy.coeff(2)),
        ));
        for (name, m) in [("L₄", &l4), ("M₄", &yy)] {
            let r = pair_schwarzian_residual(m, &hat, &o.pullback)?;
            checks.push(Check::equal(
                format!("{tag}: Û(x) − U_{name}(y)·y'² + {{y, x}}"),
                &RatFunc::zero(),
                &r,
            ));
        }
    }

    let yk = &b.yukawa;
    let (s, p) = hadamard_params(&yk.a, &yk.b);
    checks.push(Check::equal(
        "(s, p) at (a, b)",
        &format!("{}, {}", fmt_q(&yk.s), fmt_q(&yk.p)),
        &format!("{}, {}", fmt_q(&s), fmt_q(&p)),
    ));
    let op = hadamard_operator(&yk.a, &yk.b)?;
    let hat = top_two(&o.hat_p, &o.hat_q_base, &o.hat_q_s, &s);
    checks.push(Check::equal(
        "D³ coefficient of the Hadamard operator",
        &hat.coeff(3),
        &op.coeff(3),
    ));
    checks.push(Check::equal(
        "D² coefficient of the Hadamard operator",
        &hat.coeff(2),
        &op.coeff(2),
    ));
    let cy = calabi_residual(&op)?;
    checks.push(Check::holds(
        "Hadamard operator satisfies the Calabi-Yau condition",
        cy.holds,
        cy.residual.to_string(),
    ));
    let n = yk.k_q.len() as i64;
    let fb = frobenius_mum_basis(&op, n)?;
    checks.push(Check::equal(
        "indicial polynomial at 0 has the single root 0",
        &"θ^4".to_string(),
        &if fb.indicial.coeffs()[..4].iter().all(|c| c.is_zero()) {
            "θ^4".into()
        } else {
            fb.indicial.to_string()
        },
    ));
    let d = mum_data(&op, n + 1)?;
    let nome = printed_series(Q::from_integer(1.into()), &yk.nome, &s, &p, 1);
    for (j, t) in yk.nome.iter().enumerate() {
        let e = j as i64 + 2;
        checks.push(Check::equal(
            format!("x^{e} coefficient of q_x"),
            &fmt_q(&t.eval(&s, &p)),
            &fmt_q(&d.q_x.coeff(e)),
        ));
    }
    for (name, printed, computed) in [("K_x", &yk.k_x, &d.k_x), ("K_q", &yk.k_q, &d.k_q)] {
        for (j, t) in printed.iter().enumerate() {
            let e = j as i64 + 1;
            checks.push(Check::equal(
                format!("{name} coefficient {e} against the printed value"),
                &fmt_q(&t.eval(&s, &p)),
                &fmt_q(&computed.coeff(e)),
            ));
        }
    }
    let kx = printed_series(Q::from_integer(1.into()), &yk.k_x, &s, &p, 0);
    let kq = printed_series(Q::from_integer(1.into()), &yk.k_q, &s, &p, 0);
    let kq_from_x = kx.compose(&nome.reverse()?)?;
    checks.push(Check::zero_series(
        "printed K_x composed with the inverse printed nome gives the printed K_q",
        &(&kq_from_x - &kq),
        n,
    ));
    Ok((sources("hadamard-cy", DATA)?, checks))
}
