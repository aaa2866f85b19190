//! Heun operators: Laurent head of W, pre-modular verdict and the
//! factorization ansatz `A_R = u/(x−a) + v/x + w/(x−1)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{premodular_test, ranktwo_subcase};
use crate::diffop::{order2, DiffOperator};
use crate::ratfunc::RatFunc;
use crate::rational::{q, qf, serde_q, Q};

/// Parameters `(a, q, α, β, γ, δ)` of the Heun operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeunParams {
    #[serde(with = "serde_q")]
    pub a: Q,
    #[serde(with = "serde_q")]
    pub q: Q,
    #[serde(with = "serde_q")]
    pub alpha: Q,
    #[serde(with = "serde_q")]
    pub beta: Q,
    #[serde(with = "serde_q")]
    pub gamma: Q,
    #[serde(with = "serde_q")]
    pub delta: Q,
}

impl HeunParams {
    pub fn new(a: Q, q: Q, alpha: Q, beta: Q, gamma: Q, delta: Q) -> Self {
        HeunParams {
            a,
            q,
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    /// `ε = α + β + 1 − γ − δ`.
    pub fn epsilon(&self) -> Q {
        &self.alpha + &self.beta + q(1) - &self.gamma - &self.delta
    }

    fn denom(&self) -> RatFunc {
        let x = RatFunc::x();
        &(&x * &(&x - &RatFunc::one())) * &(&x - &RatFunc::constant(self.a.clone()))
    }

    /// `D² + A·D + B`.
    pub fn operator(&self) -> DiffOperator {
        let x = RatFunc::x();
        let (a, al, be, ga, de) = (&self.a, &self.alpha, &self.beta, &self.gamma, &self.delta);
        let c2 = al + be + q(1);
        let c1 = -((de + ga) * a + al - de + be + q(1));
        let c0 = ga * a;
        let num = &(&x.pow(2).scale(&c2) + &x.scale(&c1)) + &RatFunc::constant(c0);
        let den = self.denom();
        let aa = &num / &den;
        let bb = &(&x.scale(&(al * be)) - &RatFunc::constant(self.q.clone())) / &den;
        order2(aa, bb)
    }

    /// `W = A' + A²/2 − 2B`.
    pub fn w(&self) -> RatFunc {
        let l = self.operator();
        let (a, b) = (l.coeff(1), l.coeff(0));
        &(&a.derivative() + &(&a * &a).scale(&qf(1, 2))) - &b.scale(&q(2))
    }
}

/// One exact solution `(u, v, w)` of the factorization ansatz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeunFactorization {
    #[serde(with = "serde_q")]
    pub u: Q,
    #[serde(with = "serde_q")]
    pub v: Q,
    #[serde(with = "serde_q")]
    pub w: Q,
    pub a_r: RatFunc,
    /// `a²(γ − v)(γ − 2 + v)`.
    #[serde(with = "serde_q")]
    pub branch: Q,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeunReport {
    pub params: HeunParams,
    pub w: RatFunc,
    /// Coefficient of `x^-2` in `W`.
    #[serde(with = "serde_q")]
    pub head: Q,
    /// `γ(γ−2)/2`.
    #[serde(with = "serde_q")]
    pub head_formula: Q,
    /// Coefficient of `x^-1` in `W`.
    #[serde(with = "serde_q")]
    pub residue: Q,
    /// `−(aδγ + αγ + βγ − δγ − γ² + γ − 2q)/a`, when `a ≠ 0`.
    #[serde(with = "serde_q::opt")]
    pub residue_formula: Option<Q>,
    pub premodular: bool,
    pub factorizations: Vec<HeunFactorization>,
    /// The six special linear conditions and their values.
    pub special_conditions: Vec<(String, String)>,
    pub degenerate: Option<String>,
}

/// Candidates `v ∈ {γ, 2−γ}`, `w ∈ {δ, 2−δ}`, `u ∈ {ε, 2−ε}` are the only
/// residues matching the double poles at `0, 1, a`; each is tested exactly.
pub fn heun_scan(p: &HeunParams) -> HeunReport {
    let w = p.w();
    let pm = premodular_test(&w);
    let (ga, de, al, be, a) = (&p.gamma, &p.delta, &p.alpha, &p.beta, &p.a);
    let head_formula = ga * (ga - q(2)) / q(2);
    let residue_formula =
        (!a.is_zero()).then(|| -((a * de * ga) + al * ga + be * ga - de * ga - ga * ga + ga - q(2) * &p.q) / a);
    let eps = p.epsilon();
    let pair = |t: &Q| {
        let mut v = vec![t.clone()];
        let other = q(2) - t;
        if other != *t {
            v.push(other);
        }
        v
    };
    let x = RatFunc::x();
    let mut factorizations = vec![];
    for u in pair(&eps) {
        for v in pair(ga) {
            for wv in pair(de) {
                let a_r = &(&(RatFunc::constant(u.clone()) / (&x - &RatFunc::constant(a.clone())))
                    + &(RatFunc::constant(v.clone()) / x.clone()))
                    + &(RatFunc::constant(wv.clone()) / (&x - &RatFunc::one()));
                if ranktwo_subcase(&a_r).w == w {
                    factorizations.push(HeunFactorization {
                        branch: a * a * (ga - &v) * (ga - q(2) + &v),
                        u: u.clone(),
                        v: v.clone(),
                        w: wv.clone(),
                        a_r,
                    });
                }
            }
        }
    }
    let one = Q::one();
    let conds = [
        ("α − γ + 1", al - ga + &one),
        ("β − δ − 1", be - de - &one),
        ("α − δ − γ + 2", al - de - ga + q(2)),
        ("α − γ − 1", al - ga - &one),
        ("α − δ − γ", al - de - ga),
        ("β − δ + 1", be - de + &one),
    ];
    let special_conditions = conds
        .into_iter()
        .map(|(n, v)| (n.to_string(), crate::rational::fmt_q(&v)))
        .collect();
    let degenerate = if a.is_zero() {
        Some("a = 0: the singularities 0 and a merge".to_string())
    } else if a.is_one() {
        Some("a = 1: the singularities 1 and a merge".to_string())
    } else {
        None
    };
    HeunReport {
        params: p.clone(),
        head: pm.head.clone(),
        residue: pm.residue.clone(),
        premodular: pm.pass,
        w,
        head_formula,
        residue_formula,
        factorizations,
        special_conditions,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schwarzian::w_function;

    fn example(m: i64) -> HeunParams {
        HeunParams::new(q(m), qf(m + 1, 4), qf(1, 2), q(1), qf(3, 2), qf(1, 2))
    }

    #[test]
    fn w_matches_general_formula() {
        let p = example(3);
        assert_eq!(p.w(), w_function(&p.operator()).unwrap());
    }

    #[test]
    fn laurent_head_and_residue() {
        let p = HeunParams::new(qf(5, 2), qf(1, 7), qf(2, 3), qf(-1, 5), qf(5, 3), qf(3, 4));
        let r = heun_scan(&p);
        assert_eq!(r.head, r.head_formula);
        assert_eq!(r.head, qf(-5, 18));
        assert_eq!(Some(r.residue.clone()), r.residue_formula);
        assert!(!r.premodular);
    }

    #[test]
    fn factorization_example() {
        let r = heun_scan(&example(3));
        let half = qf(1, 2);
        assert!(r
            .factorizations
            .iter()
            .any(|f| f.u == half && f.v == half && f.w == half && f.branch.is_zero()));
        assert_eq!(r.special_conditions[0].1, "0");
        assert!(r.degenerate.is_none());
    }

    #[test]
    fn gamma_one_is_premodular() {
        let p = HeunParams::new(q(3), qf(1, 2), qf(1, 3), qf(2, 5), q(1), qf(1, 7));
        let r = heun_scan(&p);
        assert!(r.premodular);
        assert_eq!(r.head, qf(-1, 2));
    }
}
