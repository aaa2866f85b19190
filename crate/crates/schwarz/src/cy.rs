//! Structural conditions on operators of order three to five: Calabi-Yau
//! type order drops, symmetric-power detection, self-adjoint decompositions
//! and reducible products.

use serde::{Deserialize, Serialize};

use crate::diffop::{order2, power_order, sym_power_order2, DiffOperator, Gauge, Operator, PowerKind};
use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{q, qf, serde_q, Q};
use crate::schwarzian::schwarzian_residual_rat;

/// `residual = 0` iff the named condition holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub holds: bool,
    pub residual: RatFunc,
}

impl ConditionReport {
    pub fn new(name: &str, residual: RatFunc) -> Self {
        ConditionReport {
            name: name.to_string(),
            holds: residual.is_zero(),
            residual,
        }
    }
}

/// Coefficients `p, q, r, …` of the monic form `D^N + p·D^(N-1) + q·D^(N-2) + …`,
/// with derivatives up to order four.
struct Coeffs {
    c: Vec<RatFunc>,
    p: [RatFunc; 5],
    q: [RatFunc; 4],
}

impl Coeffs {
    fn of(l: &DiffOperator, n: usize) -> Result<Coeffs> {
        if l.order() != n {
            return Err(Error::Operator(format!(
                "expected an operator of order {n}, got order {}",
                l.order()
            )));
        }
        let l = l.monic();
        let c: Vec<RatFunc> = (1..=n).map(|i| l.coeff(n - i)).collect();
        let derivs = |f: &RatFunc, k: usize| -> Vec<RatFunc> {
            let mut v = vec![f.clone()];
            for _ in 0..k {
                let d = v.last().unwrap().derivative();
                v.push(d);
            }
            v
        };
        let p = derivs(&c[0], 4);
        let qv = if n >= 2 {
            derivs(&c[1], 3)
        } else {
            vec![RatFunc::zero(); 4]
        };
        Ok(Coeffs {
            p: p.try_into().unwrap(),
            q: qv.try_into().unwrap(),
            c,
        })
    }
}

/// `Σ c·Π f` over the listed monomials.
fn combo(terms: &[(Q, Vec<&RatFunc>)]) -> RatFunc {
    terms.iter().fold(RatFunc::zero(), |acc, (c, fs)| {
        let prod = fs.iter().fold(RatFunc::constant(c.clone()), |a, f| &a * *f);
        &acc + &prod
    })
}

/// `r − (pq/2 − p³/8 + q' − (3/4)pp' − p''/2)` for a monic order-four operator.
pub fn calabi_residual(l4: &DiffOperator) -> Result<ConditionReport> {
    let k = Coeffs::of(l4, 4)?;
    let (p, q_) = (&k.p, &k.q);
    let rhs = combo(&[
        (qf(1, 2), vec![&p[0], &q_[0]]),
        (qf(-1, 8), vec![&p[0], &p[0], &p[0]]),
        (q(1), vec![&q_[1]]),
        (qf(-3, 4), vec![&p[0], &p[1]]),
        (qf(-1, 2), vec![&p[2]]),
    ]);
    Ok(ConditionReport::new("calabi-yau", &k.c[2] - &rhs))
}

/// `s − S(p, q)` with `S` the polynomial expression in `p, q` and derivatives.
pub fn s_condition_residual(l4: &DiffOperator) -> Result<ConditionReport> {
    let k = Coeffs::of(l4, 4)?;
    let (p, q_) = (&k.p, &k.q);
    let rhs = combo(&[
        (qf(9, 100), vec![&q_[0], &q_[0]]),
        (qf(-1, 200), vec![&q_[0], &p[0], &p[0]]),
        (qf(1, 4), vec![&p[0], &q_[1]]),
        (qf(-1, 50), vec![&q_[0], &p[1]]),
        (qf(3, 10), vec![&q_[2]]),
        (qf(-11, 1600), vec![&p[0], &p[0], &p[0], &p[0]]),
        (qf(-9, 50), vec![&p[0], &p[0], &p[1]]),
        (qf(-21, 100), vec![&p[1], &p[1]]),
        (qf(-1, 5), vec![&p[3]]),
        (qf(-7, 20), vec![&p[0], &p[2]]),
    ]);
    Ok(ConditionReport::new("s-condition", &k.c[3] - &rhs))
}

/// Symmetric Calabi-Yau condition for a monic order-three operator.
pub fn symcy3_residual(l3: &DiffOperator) -> Result<ConditionReport> {
    let k = Coeffs::of(l3, 3)?;
    let (p, q_) = (&k.p, &k.q);
    let rhs = combo(&[
        (qf(-2, 27), vec![&p[0], &p[0], &p[0]]),
        (qf(1, 3), vec![&p[0], &q_[0]]),
        (qf(-1, 3), vec![&p[0], &p[1]]),
        (qf(1, 2), vec![&q_[1]]),
        (qf(-1, 6), vec![&p[2]]),
    ]);
    Ok(ConditionReport::new("symmetric-calabi-yau", &k.c[2] - &rhs))
}

/// The three conditions expressing `r, s, t` of an order-five operator through
/// `p, q`, which hold for symmetric fourth powers.
pub fn order5_residuals(l5: &DiffOperator) -> Result<[ConditionReport; 3]> {
    let k = Coeffs::of(l5, 5)?;
    let (p, q_) = (&k.p, &k.q);
    let p0 = &p[0];
    let r = combo(&[
        (qf(-4, 25), vec![p0, p0, p0]),
        (qf(-6, 5), vec![p0, &p[1]]),
        (qf(3, 5), vec![p0, &q_[0]]),
        (q(-1), vec![&p[2]]),
        (qf(3, 2), vec![&q_[1]]),
    ]);
    let s = combo(&[
        (qf(-9, 625), vec![p0, p0, p0, p0]),
        (qf(-58, 125), vec![p0, p0, &p[1]]),
        (qf(-1, 125), vec![p0, p0, &q_[0]]),
        (qf(-28, 25), vec![p0, &p[2]]),
        (qf(3, 5), vec![p0, &q_[1]]),
        (qf(-17, 25), vec![&p[1], &p[1]]),
        (qf(-1, 25), vec![&p[1], &q_[0]]),
        (qf(4, 25), vec![&q_[0], &q_[0]]),
        (qf(-4, 5), vec![&p[3]]),
        (qf(9, 10), vec![&q_[2]]),
    ]);
    let t = combo(&[
        (qf(-11, 25), vec![&p[1], &p[2]]),
        (qf(-8, 25), vec![p0, &p[3]]),
        (qf(4, 625), vec![p0, p0, p0, &p[1]]),
        (qf(-11, 625), vec![p0, p0, p0, &q_[0]]),
        (qf(-17, 125), vec![p0, p0, &p[2]]),
        (qf(-1, 250), vec![p0, p0, &q_[1]]),
        (qf(-3, 25), vec![p0, &p[1], &p[1]]),
        (qf(4, 125), vec![p0, &q_[0], &q_[0]]),
        (qf(9, 50), vec![p0, &q_[2]]),
        (qf(-1, 50), vec![&p[1], &q_[1]]),
        (qf(-3, 25), vec![&q_[0], &p[2]]),
        (qf(4, 25), vec![&q_[0], &q_[1]]),
        (qf(-17, 125), vec![p0, &q_[0], &p[1]]),
        (qf(-1, 5), vec![&p[4]]),
        (qf(1, 5), vec![&q_[3]]),
        (qf(7, 3125), vec![p0, p0, p0, p0, p0]),
    ]);
    Ok([
        ConditionReport::new("order5-r", &k.c[2] - &r),
        ConditionReport::new("order5-s", &k.c[3] - &s),
        ConditionReport::new("order5-t", &k.c[4] - &t),
    ])
}

/// Outcome of reconstructing `L_2` from the two top coefficients.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SymPowerDetection {
    pub is_sym_power: bool,
    /// `D² + A·D + B` with `A = 2p/(N(N−1))` and `B` read from `p, q`.
    pub l2: DiffOperator,
    /// Indices `k` where the `D^k` coefficients of `Sym^(N−1)(L_2)` and `L` differ.
    pub mismatches: Vec<usize>,
}

/// Decide whether a monic order-`N` operator is the symmetric `(N−1)`-th power
/// of an order-two operator.
pub fn detect_sym_power(l: &DiffOperator) -> Result<SymPowerDetection> {
    let n = l.order();
    if n < 2 {
        return Err(Error::Operator(format!("order {n} is below 2")));
    }
    let l = l.monic();
    let k = Coeffs::of(&l, n)?;
    let nn = n as i64;
    let a = k.p[0].scale(&qf(2, nn * (nn - 1)));
    let b = &(&k.q[0].scale(&qf(6, (nn + 1) * nn * (nn - 1)))
        - &(&k.p[0] * &k.p[0]).scale(&qf((3 * nn - 1) * (nn - 2), (nn + 1) * nn * nn * (nn - 1) * (nn - 1))))
        - &k.p[1].scale(&qf(2 * (nn - 2), (nn + 1) * nn * (nn - 1)));
    let l2 = order2(a, b);
    let rebuilt = sym_power_order2(&l2, n - 1)?;
    let mismatches: Vec<usize> = (0..=n).filter(|&i| rebuilt.coeff(i) != l.coeff(i)).collect();
    Ok(SymPowerDetection {
        is_sym_power: mismatches.is_empty(),
        l2,
        mismatches,
    })
}

/// `c·D + c'/2`.
pub fn self_adjoint_order1(c: &RatFunc) -> DiffOperator {
    Operator::new(vec![c.derivative().scale(&qf(1, 2)), c.clone()])
}

/// `a·D³ + (3/2)a'·D² + b·D + b'/2 − a'''/4`.
pub fn self_adjoint_order3(a: &RatFunc, b: &RatFunc) -> DiffOperator {
    Operator::new(vec![
        &b.derivative().scale(&qf(1, 2)) - &a.derivative_n(3).scale(&qf(1, 4)),
        b.clone(),
        a.derivative().scale(&qf(3, 2)),
        a.clone(),
    ])
}

/// Parameter functions of a self-adjoint decomposition.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SelfAdjointKind {
    /// `(U_1·U_3 + 1)·d`.
    Order4 {
        a: RatFunc,
        b: RatFunc,
        c: RatFunc,
        d: RatFunc,
    },
    /// `(U_1·V_1·U_3 + U_1 + U_3)·d` with `V_1 = e·D + e'/2`.
    Order5 {
        a: RatFunc,
        b: RatFunc,
        c: RatFunc,
        d: RatFunc,
        e: RatFunc,
    },
}

/// Monic operator of the decomposition, built by multiplying the factors.
pub fn selfadjoint_decomposition_build(kind: &SelfAdjointKind) -> Result<DiffOperator> {
    let nonzero = |name: &str, f: &RatFunc| {
        if f.is_zero() {
            Err(Error::Invalid(format!("parameter function {name} must be nonzero")))
        } else {
            Ok(())
        }
    };
    let op = match kind {
        SelfAdjointKind::Order4 { a, b, c, d } => {
            nonzero("a", a)?;
            nonzero("c", c)?;
            nonzero("d", d)?;
            let u1 = self_adjoint_order1(c);
            let u3 = self_adjoint_order3(a, b);
            u1.mul(&u3).add(&DiffOperator::mult(RatFunc::one())).right_mul(d)
        }
        SelfAdjointKind::Order5 { a, b, c, d, e } => {
            nonzero("a", a)?;
            nonzero("c", c)?;
            nonzero("d", d)?;
            nonzero("e", e)?;
            let u1 = self_adjoint_order1(c);
            let v1 = self_adjoint_order1(e);
            let u3 = self_adjoint_order3(a, b);
            u1.mul(&v1).mul(&u3).add(&u1).add(&u3).right_mul(d)
        }
    };
    Ok(op.monic())
}

/// `D^(N−1)` coefficient predicted from the parameters:
/// `(5/2)a'/a + (1/2)c'/c + 4d'/d` at order four and
/// `(7/2)a'/a + (1/2)c'/c + 5d'/d + (3/2)e'/e` at order five.
pub fn selfadjoint_p(kind: &SelfAdjointKind) -> RatFunc {
    let ld = |f: &RatFunc| &f.derivative() / f;
    match kind {
        SelfAdjointKind::Order4 { a, c, d, .. } => {
            combo(&[(qf(5, 2), vec![&ld(a)]), (qf(1, 2), vec![&ld(c)]), (q(4), vec![&ld(d)])])
        }
        SelfAdjointKind::Order5 { a, c, d, e, .. } => combo(&[
            (qf(7, 2), vec![&ld(a)]),
            (qf(1, 2), vec![&ld(c)]),
            (q(5), vec![&ld(d)]),
            (qf(3, 2), vec![&ld(e)]),
        ]),
    }
}

/// Order of the symmetric square of an order-four operator; below 10 is the
/// symmetric Calabi-Yau situation.
pub fn symmetric_cy_order4(l4: &DiffOperator) -> Result<(usize, bool)> {
    if l4.order() != 4 {
        return Err(Error::Operator(format!("expected order 4, got {}", l4.order())));
    }
    let o = power_order(l4, PowerKind::Sym2)?;
    Ok((o, o < 10))
}

/// Result of comparing `(1/w^α)·L·w^α` with `(−1)^N·adjoint(L)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdjointConjugation {
    #[serde(with = "serde_q")]
    pub alpha: Q,
    pub holds: bool,
    /// Conjugate minus signed adjoint.
    pub difference: DiffOperator,
}

/// `L·w^α = (−1)^N·w^α·adjoint(L)` with `w'/w = −p` the wronskian.
pub fn adjoint_conjugation_check(l: &DiffOperator, alpha: &Q) -> AdjointConjugation {
    let l = l.monic();
    let n = l.order();
    let p = if n >= 1 { l.coeff(n - 1) } else { RatFunc::zero() };
    let g = Gauge::new(p.scale(&-alpha.clone()));
    let conj = l.conjugate(&g);
    let adj = l.adjoint();
    let signed = if n.is_multiple_of(2) { adj } else { adj.neg() };
    let difference = conj.sub(&signed);
    AdjointConjugation {
        alpha: alpha.clone(),
        holds: difference.is_zero(),
        difference,
    }
}

/// First exponent among `candidates` for which the adjoint conjugation holds.
pub fn adjoint_exponent_search(l: &DiffOperator, candidates: &[Q]) -> Option<Q> {
    candidates
        .iter()
        .find(|a| adjoint_conjugation_check(l, a).holds)
        .cloned()
}

/// Relations attached to the product `M_2·L_2` and a pullback `y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReducibleReport {
    pub product: DiffOperator,
    /// `W(x) − W(y)y'² + {y, x}` for `L_2`.
    pub schwarzian_l: RatFunc,
    /// Same with `W̃` of `M_2`.
    pub schwarzian_m: RatFunc,
    /// `4y''/y' + p̃ − p − (p̃∘y − p∘y)·y'`.
    pub coupling: RatFunc,
    /// `2ΔW' − (p − p̃)ΔW` with `ΔW = W − W̃`.
    pub delta_w: RatFunc,
    pub calabi: ConditionReport,
    /// Whether the product's `D³, D²` coefficients are `p + p̃` and
    /// `p̃p + q̃ + 2p' + q`.
    pub top_coefficients_match: bool,
}

fn w2(l: &DiffOperator) -> RatFunc {
    let (p, q_) = (l.coeff(1), l.coeff(0));
    &(&p.derivative() + &(&p * &p).scale(&qf(1, 2))) - &q_.scale(&q(2))
}

pub fn reducible_relations(l2: &DiffOperator, m2: &DiffOperator, y: &RatFunc) -> Result<ReducibleReport> {
    if l2.order() != 2 || m2.order() != 2 {
        return Err(Error::Operator("both factors must have order two".into()));
    }
    let (l2, m2) = (l2.monic(), m2.monic());
    let product = m2.mul(&l2);
    let (p, q_) = (l2.coeff(1), l2.coeff(0));
    let (pt, qt) = (m2.coeff(1), m2.coeff(0));
    let (w, wt) = (w2(&l2), w2(&m2));
    let d1 = y.derivative();
    let coupling =
        &(&(&d1.derivative().checked_div(&d1)?.scale(&q(4)) + &pt) - &p) - &(&(&pt.compose(y) - &p.compose(y)) * &d1);
    let dw = &w - &wt;
    let delta_w = &dw.derivative().scale(&q(2)) - &(&(&p - &pt) * &dw);
    let top_coefficients_match = product.coeff(3) == &p + &pt
        && product.coeff(2) == &(&(&(&pt * &p) + &qt) + &p.derivative().scale(&q(2))) + &q_;
    Ok(ReducibleReport {
        schwarzian_l: schwarzian_residual_rat(&w, y)?,
        schwarzian_m: schwarzian_residual_rat(&wt, y)?,
        calabi: calabi_residual(&product)?,
        product,
        coupling,
        delta_w,
        top_coefficients_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::{ext2, monic_from};

    fn x() -> RatFunc {
        RatFunc::x()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::int(n)
    }

    fn sample_l2() -> DiffOperator {
        order2((&x() + &c(2)) / (x() * (x() - c(3))), &c(1) / &(&x().pow(2) + &c(1)))
    }

    #[test]
    fn trivial_powers_of_d() {
        for n in 3..=5 {
            let d = monic_from(vec![RatFunc::zero(); n]);
            match n {
                3 => assert!(symcy3_residual(&d).unwrap().holds),
                4 => {
                    assert!(calabi_residual(&d).unwrap().holds);
                    assert!(s_condition_residual(&d).unwrap().holds);
                }
                _ => assert!(order5_residuals(&d).unwrap().iter().all(|r| r.holds)),
            }
        }
    }

    #[test]
    fn symmetric_powers_satisfy_conditions() {
        let l2 = sample_l2();
        assert!(symcy3_residual(&sym_power_order2(&l2, 2).unwrap()).unwrap().holds);
        let l4 = sym_power_order2(&l2, 3).unwrap();
        assert!(calabi_residual(&l4).unwrap().holds);
        assert!(s_condition_residual(&l4).unwrap().holds);
        let l5 = sym_power_order2(&l2, 4).unwrap();
        assert!(order5_residuals(&l5).unwrap().iter().all(|r| r.holds));
    }

    #[test]
    fn symcy3_fails_on_inhomogeneous_tail() {
        let l = monic_from(vec![x().inv().unwrap(), c(0), c(0)]);
        assert!(!symcy3_residual(&l).unwrap().holds);
    }

    #[test]
    fn detect_round_trip() {
        let l2 = sample_l2();
        for n in 3..=5 {
            let d = detect_sym_power(&sym_power_order2(&l2, n - 1).unwrap()).unwrap();
            assert!(d.is_sym_power);
            assert_eq!(d.l2, l2);
        }
        let d = detect_sym_power(&monic_from(vec![c(0), c(-4), c(0)])).unwrap();
        assert!(d.is_sym_power);
        assert_eq!(d.l2, order2(c(0), c(-1)));
    }

    #[test]
    fn selfadjoint_order4_p_and_ranks() {
        let kind = SelfAdjointKind::Order4 {
            a: &x() + &c(1),
            b: x(),
            c: &x() - &c(2),
            d: x().pow(2) + c(3),
        };
        let l4 = selfadjoint_decomposition_build(&kind).unwrap();
        assert_eq!(l4.coeff(3), selfadjoint_p(&kind));
        let (o, sym_cy) = symmetric_cy_order4(&l4).unwrap();
        assert_eq!(o, 9);
        assert!(sym_cy);
        assert_eq!(ext2(&l4).unwrap().order, 6);
        let unit = SelfAdjointKind::Order4 {
            a: c(1),
            b: c(0),
            c: c(1),
            d: c(1),
        };
        assert!(selfadjoint_decomposition_build(&unit).unwrap().coeff(3).is_zero());
    }

    #[test]
    fn selfadjoint_order5_p() {
        let kind = SelfAdjointKind::Order5 {
            a: &x() + &c(1),
            b: x(),
            c: &x() - &c(2),
            d: x().pow(2) + c(3),
            e: &x() + &c(5),
        };
        let l5 = selfadjoint_decomposition_build(&kind).unwrap();
        assert_eq!(l5.coeff(4), selfadjoint_p(&kind));
    }

    #[test]
    fn adjoint_exponents() {
        let l2 = sample_l2();
        assert!(adjoint_conjugation_check(&l2, &q(1)).holds);
        for (m, alpha) in [(2, qf(2, 3)), (3, qf(1, 2)), (4, qf(2, 5))] {
            let l = sym_power_order2(&l2, m).unwrap();
            assert!(adjoint_conjugation_check(&l, &alpha).holds, "m = {m}");
            assert!(!adjoint_conjugation_check(&l, &q(1)).holds);
        }
    }

    #[test]
    fn reducible_square() {
        let l2 = sample_l2();
        let r = reducible_relations(&l2, &l2, &x()).unwrap();
        assert!(r.schwarzian_l.is_zero() && r.schwarzian_m.is_zero());
        assert!(r.coupling.is_zero() && r.delta_w.is_zero());
        assert!(r.calabi.holds && r.top_coefficients_match);
    }

    #[test]
    fn equal_w_gives_calabi() {
        // same W, different p: q̃ = q + (p̃' − p')/2 + (p̃² − p²)/4
        let l2 = sample_l2();
        let (p, q_) = (l2.coeff(1), l2.coeff(0));
        let pt = &p + &(&c(1) / &(&x() - &c(7)));
        let qt = &(&q_ + &(&pt.derivative() - &p.derivative()).scale(&qf(1, 2)))
            + &(&(&pt * &pt) - &(&p * &p)).scale(&qf(1, 4));
        let m2 = order2(pt, qt);
        let r = reducible_relations(&l2, &m2, &x()).unwrap();
        assert!(r.delta_w.is_zero());
        assert!(r.calabi.holds);
        assert!(r.top_coefficients_match);
        let m3 = order2(&l2.coeff(1) + &c(1), l2.coeff(0));
        let r = reducible_relations(&l2, &m3, &x()).unwrap();
        assert!(!r.calabi.holds);
    }

    #[test]
    fn ext2_drop_iff_calabi() {
        let l2 = sample_l2();
        let ops = vec![
            sym_power_order2(&l2, 3).unwrap(),
            monic_from(vec![c(1), x(), c(0), x().inv().unwrap()]),
            sample_l2().mul(&sample_l2()),
            order2(x(), c(2)).mul(&sample_l2()),
        ];
        for l in ops {
            let calabi = calabi_residual(&l).unwrap().holds;
            assert_eq!(ext2(&l).unwrap().order == 5, calabi);
        }
    }
}
