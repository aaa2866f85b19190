//! Nome and Yukawa coupling at a point of maximal unipotent monodromy, and
//! their behaviour under pullback and conjugation.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::diffop::{frobenius_mum_basis, DiffOperator, Gauge};
use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, q, qf, serde_q, Q};
use crate::schwarzian::{schwarzian_derivative, schwarzian_derivative_rat, w_function};
use crate::series::Series;

/// Nome and Yukawa series of an order-four MUM operator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MumData {
    pub operator: DiffOperator,
    /// `q_x = x·exp(ỹ_1/y_0)`.
    pub q_x: Series,
    /// Yukawa coupling in the variable `x`.
    pub k_x: Series,
    /// Yukawa coupling in the nome `q`.
    pub k_q: Series,
}

fn check_order4(l: &DiffOperator) -> Result<()> {
    if l.order() != 4 {
        return Err(Error::Operator(format!(
            "nome and Yukawa are computed for order 4, got order {}",
            l.order()
        )));
    }
    Ok(())
}

/// `q_x = exp(y_1/y_0)` through `x^k`, with `y_1 = log(x)·y_0 + ỹ_1`.
pub fn nome_series(l: &DiffOperator, k: i64) -> Result<Series> {
    Ok(mum_data(l, k)?.q_x)
}

/// `(K_x, K_q)` with `K_q = (q·d/dq)²(y_2/y_0)` and `K_x = K_q∘q_x`.
pub fn yukawa(l: &DiffOperator, k: i64) -> Result<(Series, Series)> {
    let d = mum_data(l, k)?;
    Ok((d.k_x, d.k_q))
}

/// Nome and Yukawa through `x^k` (and `q^k`).
pub fn mum_data(l: &DiffOperator, k: i64) -> Result<MumData> {
    check_order4(l)?;
    let fb = frobenius_mum_basis(l, k)?;
    let f0 = fb.parts[0].clone();
    let t1 = fb.parts[1].checked_div(&f0)?;
    let t2 = fb.parts[2].checked_div(&f0)?;
    let q_x = t1.exp()?.shift(1).truncate(k);
    // y_2/y_0 = t²/2 + G with t = log(q)
    let g = &t2 - &(&t1 * &t1).scale(&qf(1, 2));
    let dt = &Series::one(k) + &t1.derivative().shift(1);
    let theta_q = |f: &Series| f.derivative().shift(1).checked_div(&dt);
    let k_x = (&Series::one(k) + &theta_q(&theta_q(&g)?)?).truncate(k);
    let k_q = k_x.compose(&q_x.reverse()?)?.truncate(k);
    Ok(MumData {
        operator: l.clone(),
        q_x,
        k_x,
        k_q,
    })
}

/// Coefficientwise product through the shared truncation order.
pub fn hadamard(f: &Series, g: &Series) -> Series {
    f.hadamard(g)
}

/// `W(M, x) − W(L, y)·y'² + {y, x}` as an exact rational function.
pub fn pair_schwarzian_residual(l: &DiffOperator, m: &DiffOperator, y: &RatFunc) -> Result<RatFunc> {
    if l.order() != m.order() {
        return Err(Error::Operator(format!(
            "orders {} and {} differ",
            l.order(),
            m.order()
        )));
    }
    let (wl, wm) = (w_function(l)?, w_function(m)?);
    let d1 = y.derivative();
    Ok(&(&wm - &(&wl.compose(y) * &(&d1 * &d1))) + &schwarzian_derivative_rat(y)?)
}

/// Series form of [`pair_schwarzian_residual`] for a pullback `y = O(x)`.
pub fn pair_schwarzian_residual_series(l: &DiffOperator, m: &DiffOperator, y: &Series) -> Result<Series> {
    if l.order() != m.order() {
        return Err(Error::Operator(format!(
            "orders {} and {} differ",
            l.order(),
            m.order()
        )));
    }
    let (wl, wm) = (w_function(l)?, w_function(m)?);
    let d1 = y.derivative();
    let part = &schwarzian_derivative(y)? - &(&Series::ratfunc_at(&wl, y)? * &(&d1 * &d1));
    let pole = wm.valuation().unwrap_or(0).min(0);
    let wmx = Series::from_ratfunc(&wm, part.order().max(pole));
    Ok(&wmx + &part)
}

/// First exponent where two series differ through `order`.
fn first_mismatch(a: &Series, b: &Series, order: i64) -> Option<i64> {
    let lo = a.val().unwrap_or(0).min(b.val().unwrap_or(0));
    (lo..=order).find(|&e| a.coeff(e) != b.coeff(e))
}

/// Comparison of nome and Yukawa data for `v·M·v⁻¹ = pullback(L, y)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct YukawaPullbackReport {
    #[serde(with = "serde_q")]
    pub lambda: Q,
    pub n: u32,
    /// Order checked through.
    pub order: i64,
    /// `D^k` index of the first coefficient where `v·M·v⁻¹` and the pullback differ.
    pub precondition_mismatch: Option<usize>,
    /// First exponent where `q_x(M)^n` and `q_x(L)∘y/λ` differ.
    pub nome_mismatch: Option<i64>,
    /// First exponent where `K_x(M)` and `K_x(L)∘y` differ.
    pub k_x_mismatch: Option<i64>,
    /// First exponent where `K_q(M)(q)` and `K_q(L)(λ·q^n)` differ.
    pub k_q_mismatch: Option<i64>,
}

impl YukawaPullbackReport {
    pub fn holds(&self) -> bool {
        self.precondition_mismatch.is_none()
            && self.nome_mismatch.is_none()
            && self.k_x_mismatch.is_none()
            && self.k_q_mismatch.is_none()
    }
}

/// Check the relations between the nome and Yukawa data of `L` and `M` when
/// `v·M·v⁻¹` is the normalized pullback of `L` by `y = λ·x^n + …`.
pub fn yukawa_pullback_relation_check(
    l: &DiffOperator,
    m: &DiffOperator,
    y: &RatFunc,
    v: &Gauge,
    k: i64,
) -> Result<YukawaPullbackReport> {
    let ys = Series::from_ratfunc(y, k + 2);
    let n = match ys.val() {
        Some(n) if n >= 1 => n,
        _ => return Err(Error::Invalid(format!("the pullback {y} must vanish at 0"))),
    };
    let lambda = ys.lead();
    let pb = l.pullback(y)?;
    let lhs = m.monic().conjugate(&v.inverse());
    let precondition_mismatch = (0..=pb.order().max(lhs.order())).find(|&i| pb.coeff(i) != lhs.coeff(i));
    let mut report = YukawaPullbackReport {
        lambda: lambda.clone(),
        n: n as u32,
        order: k,
        precondition_mismatch,
        nome_mismatch: None,
        k_x_mismatch: None,
        k_q_mismatch: None,
    };
    if precondition_mismatch.is_some() {
        return Ok(report);
    }
    let dl = mum_data(l, k)?;
    let dm = mum_data(m, k)?;
    let q_m_n = dm.q_x.pow_int(n)?;
    let q_l_y = dl.q_x.compose(&ys)?.scale(&(q(1) / &lambda));
    report.nome_mismatch = first_mismatch(&q_m_n, &q_l_y, k);
    let kx_l_y = dl.k_x.compose(&ys)?;
    report.k_x_mismatch = first_mismatch(&dm.k_x, &kx_l_y, k);
    let scaled = Series::monomial(lambda, n, k);
    let kq_l = dl.k_q.compose(&scaled)?;
    report.k_q_mismatch = first_mismatch(&dm.k_q, &kq_l, k);
    Ok(report)
}

/// Symmetric functions `s = a(1−a) + b(1−b)` and `p = a·b·(1−a)(1−b)`.
pub fn hadamard_params(a: &Q, b: &Q) -> (Q, Q) {
    let ua = a * (q(1) - a);
    let ub = b * (q(1) - b);
    (&ua + &ub, ua * ub)
}

/// `(1/(1−x))·₂F₁([a, 1−a], [1], x/(x−1))` through `x^k`, whose coefficients
/// are the binomial transforms `Σ_j C(n, j)(−1)^j·u_j` of the hypergeometric
/// coefficients `u_j`.
pub fn hadamard_factor(a: &Q, k: i64) -> Series {
    let u = Series::hypergeometric(&[a.clone(), q(1) - a], &[q(1)], k);
    let signed: Vec<Q> = (0..=k)
        .map(|j| if j % 2 == 0 { u.coeff(j) } else { -u.coeff(j) })
        .collect();
    let mut binom_row = vec![BigInt::one()];
    let mut c = vec![];
    for n in 0..=k as usize {
        if n > 0 {
            let mut next = vec![BigInt::one(); n + 1];
            for j in 1..n {
                next[j] = &binom_row[j - 1] + &binom_row[j];
            }
            binom_row = next;
        }
        let h: Q = binom_row
            .iter()
            .zip(&signed)
            .map(|(b, uj)| uj * Q::from_integer(b.clone()))
            .sum();
        c.push(h);
    }
    Series::from_coeffs(0, c, k)
}

/// Hadamard product of the two factors for parameters `a, b`.
pub fn hadamard_series(a: &Q, b: &Q, k: i64) -> Series {
    hadamard(&hadamard_factor(a, k), &hadamard_factor(b, k))
}

/// Guessed order-four annihilator of [`hadamard_series`], verified on
/// coefficients beyond those used for guessing.
pub fn hadamard_operator(a: &Q, b: &Q) -> Result<DiffOperator> {
    const GUESS: i64 = 70;
    const CHECK: i64 = 90;
    let f = hadamard_series(a, b, CHECK);
    let op = crate::diffop::guess_operator_at(&f.truncate(GUESS), 4, 9)?.ok_or_else(|| {
        Error::Insufficient(format!(
            "no operator of order 4 and degree 9 for a = {}, b = {}",
            fmt_q(a),
            fmt_q(b)
        ))
    })?;
    if !op.apply_series(&f).is_zero_to(CHECK - 12) {
        return Err(Error::Insufficient(
            "guessed operator fails beyond the guessing window".into(),
        ));
    }
    Ok(op.monic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::{monic_from, order2, sym_power_order2, Operator};
    use crate::poly::Poly;
    use num_traits::Zero;

    fn x() -> RatFunc {
        RatFunc::x()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::int(n)
    }

    #[test]
    fn theta4_trivial() {
        let d = mum_data(&DiffOperator::theta_pow(4), 10).unwrap();
        assert_eq!(d.q_x, Series::x(10));
        assert_eq!(d.k_q, Series::one(10));
        assert_eq!(d.k_x, Series::one(10));
    }

    #[test]
    fn sym3_yukawa_is_one() {
        // θ² − x(θ + 1/2)² in D-form
        let l2 = order2(
            (&c(1) - &x().scale(&q(2))) / (x() * (&c(1) - &x())),
            RatFunc::constant(qf(-1, 4)) / (x() * (&c(1) - &x())),
        );
        let l4 = sym_power_order2(&l2, 3).unwrap();
        let d = mum_data(&l4, 8).unwrap();
        assert_eq!(d.k_q, Series::one(8));
        let fb = frobenius_mum_basis(&l2, 8).unwrap();
        let nome2 = fb.parts[1].checked_div(&fb.parts[0]).unwrap().exp().unwrap().shift(1);
        assert!(d.q_x.agrees_to(&nome2, 8));
    }

    #[test]
    fn hadamard_factor_is_transformed_hypergeometric() {
        let a = qf(1, 3);
        let k = 12;
        let f = Series::hypergeometric(&[a.clone(), q(1) - &a], &[q(1)], k);
        let geo = Series::from_ratfunc(&(&c(1) - &x()).inv().unwrap(), k);
        let arg = (&Series::x(k) * &geo).scale(&q(-1));
        let direct = (&geo * &f.compose(&arg).unwrap()).truncate(k);
        assert_eq!(hadamard_factor(&a, k), direct);
    }

    #[test]
    fn hadamard_of_geometric() {
        let g = Series::from_ratfunc(&(&c(1) - &x()).inv().unwrap(), 12);
        assert_eq!(hadamard(&g, &g), g);
    }

    #[test]
    fn pair_residual_trivial_pullback() {
        let l = monic_from(vec![c(0), c(0), x().inv().unwrap(), c(1)]);
        let m = monic_from(vec![c(0), c(0), c(2), x()]);
        let r = pair_schwarzian_residual(&l, &m, &x()).unwrap();
        assert_eq!(r, &w_function(&m).unwrap() - &w_function(&l).unwrap());
    }

    #[test]
    fn pair_residual_of_pullback_vanishes() {
        let l = monic_from(vec![x(), c(1), x().inv().unwrap(), &c(1) / &(&x() - &c(2))]);
        let y = &x() / &(&c(1) + &x());
        let m = l.pullback(&y).unwrap();
        assert!(pair_schwarzian_residual(&l, &m, &y).unwrap().is_zero());
        let ys = Series::from_ratfunc(&y, 12);
        assert!(pair_schwarzian_residual_series(&l, &m, &ys).unwrap().is_zero_to(8));
    }

    #[test]
    fn yukawa_relations_under_pullback() {
        // θ⁴ − x·(θ+1/2)⁴-type operator with a gauge on top
        let t = DiffOperator::theta_pow(4);
        let shift = Operator::new(vec![RatFunc::constant(qf(1, 2)), x()]);
        let mut s4 = DiffOperator::mult(RatFunc::one());
        for _ in 0..4 {
            s4 = s4.mul(&shift);
        }
        let l = t.sub(&s4.left_mul(&x())).monic();
        for (y, lam) in [(&x() / &(&c(1) + &x()), q(1)), (x().scale(&q(3)), q(3))] {
            let m = l.pullback(&y).unwrap();
            let v = Gauge::new(RatFunc::zero());
            let r = yukawa_pullback_relation_check(&l, &m, &y, &v, 7).unwrap();
            assert_eq!(r.lambda, lam);
            assert!(r.holds(), "{r:?}");
            let g = Gauge::new(&c(1) / &(&c(1) - &x()));
            let mg = m.conjugate(&g);
            let r = yukawa_pullback_relation_check(&l, &mg, &y, &g, 7).unwrap();
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn hadamard_params_sample() {
        assert_eq!(hadamard_params(&qf(1, 3), &qf(1, 5)), (qf(86, 225), qf(8, 225)));
    }

    /// Yukawa from `y_0`, `y_1` and the `D³` coefficient alone:
    /// `K_x = Y/(y_0²·(θt)³)` with `θY/Y = −(x·p − 6)/2`, `Y(0) = 1`.
    fn yukawa_oracle(l: &DiffOperator, k: i64) -> Series {
        let fb = frobenius_mum_basis(l, k).unwrap();
        let f0 = &fb.parts[0];
        let t1 = fb.parts[1].checked_div(f0).unwrap();
        let dt = &Series::one(k) + &t1.derivative().shift(1);
        let pl = &l.monic().coeff(3) - &x().inv().unwrap().scale(&q(6));
        let log_y = Series::from_ratfunc(&pl.scale(&qf(-1, 2)), k).integrate().series;
        let y = log_y.exp().unwrap();
        let den = &(f0 * f0) * &(&(&dt * &dt) * &dt);
        y.checked_div(&den).unwrap().truncate(k)
    }

    #[test]
    fn yukawa_matches_oracle() {
        let t = DiffOperator::theta_pow(4);
        let mut s4 = DiffOperator::mult(RatFunc::one());
        for a in [qf(1, 3), qf(2, 3), qf(1, 4), qf(3, 4)] {
            s4 = s4.mul(&Operator::new(vec![RatFunc::constant(a), x()]));
        }
        let l = t.sub(&s4.left_mul(&x().scale(&q(2)))).monic();
        assert!(crate::cy::calabi_residual(&l).unwrap().holds);
        assert_eq!(mum_data(&l, 6).unwrap().k_x, yukawa_oracle(&l, 6));
    }

    fn sp_poly(terms: &[(i64, i64, i64)], s: &Q, p: &Q) -> Q {
        terms.iter().fold(Q::zero(), |acc, &(c, ep, es)| {
            acc + q(c) * crate::rational::q_pow(p, ep) * crate::rational::q_pow(s, es)
        })
    }

    #[test]
    fn hadamard_pipeline_sample() {
        let (a, b) = (qf(1, 3), qf(1, 5));
        let (s, p) = hadamard_params(&a, &b);
        let op = hadamard_operator(&a, &b).unwrap();
        assert_eq!(op.order(), 4);
        let hat_p =
            (&(&x().pow(2).scale(&q(10)) + &x().scale(&q(8))) - &c(6)) / (x() * (&x() + &c(1)) * (&x() - &c(1)));
        assert_eq!(op.coeff(3), hat_p);
        let num = Poly::new(vec![q(7), q(-32), q(-16), q(40), q(25)]);
        let hat_q = &(RatFunc::constant(q(2) * &s) / (x() * (&x() - &c(1)).pow(2)))
            + &(RatFunc::from_poly(num) / (x().pow(2) * (&x() + &c(1)).pow(2) * (&x() - &c(1)).pow(2)));
        assert_eq!(op.coeff(2), hat_q);
        let d = mum_data(&op, 4).unwrap();
        let n2 = sp_poly(&[(-4, 1, 0), (2, 0, 1)], &s, &p);
        let n3 = sp_poly(&[(93, 2, 0), (-98, 1, 1), (26, 0, 2), (-16, 1, 0), (4, 0, 1)], &s, &p) / q(8);
        let n4 = -sp_poly(
            &[
                (27748, 3, 0),
                (-45289, 2, 1),
                (24798, 1, 2),
                (-4554, 0, 3),
                (9708, 1, 1),
                (-12038, 2, 0),
                (-1764, 0, 2),
                (1080, 1, 0),
                (-216, 0, 1),
            ],
            &s,
            &p,
        ) / q(972);
        assert_eq!(d.q_x.coeff(2), qf(28, 45));
        assert_eq!((d.q_x.coeff(2), d.q_x.coeff(3), d.q_x.coeff(4)), (n2, n3, n4));
        assert_eq!(d.k_x, yukawa_oracle(&op, 4));
        // twice 5p − 2s + 1 at this (s, p)
        assert_eq!(
            d.k_x.coeff(1),
            q(2) * sp_poly(&[(5, 1, 0), (-2, 0, 1), (1, 0, 0)], &s, &p)
        );
        assert_eq!(d.k_q.coeff(1), qf(62, 75));
    }
}
