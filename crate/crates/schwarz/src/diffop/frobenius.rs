//! Frobenius solutions at a point of maximal unipotent monodromy.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::DiffOperator;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::rational::{q, Q};
use crate::series::Series;

/// `Σ_i terms[i]·log(x)^i` with series coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogSeries {
    pub terms: Vec<Series>,
}

impl LogSeries {
    pub fn new(terms: Vec<Series>) -> Self {
        LogSeries { terms }
    }

    /// Coefficient of `log(x)^i`.
    pub fn log_coeff(&self, i: usize) -> Option<&Series> {
        self.terms.get(i)
    }

    pub fn order(&self) -> i64 {
        self.terms.iter().map(|t| t.order()).min().unwrap_or(i64::MAX)
    }

    /// `d/dx`, using `D(T·log^i) = T'·log^i + i·T·x^(-1)·log^(i-1)`.
    pub fn derivative(&self) -> LogSeries {
        let mut out: Vec<Series> = self.terms.iter().map(|t| t.derivative()).collect();
        for (i, t) in self.terms.iter().enumerate().skip(1) {
            let extra = t.shift(-1).scale(&q(i as i64));
            out[i - 1] = &out[i - 1] + &extra;
        }
        LogSeries::new(out)
    }

    /// `L(self)` with the coefficients of `L` expanded at `x = 0`.
    pub fn apply(&self, l: &DiffOperator) -> LogSeries {
        let margin = l.order() as i64 + 4;
        let mut d = self.clone();
        let mut acc: Option<Vec<Series>> = None;
        for (k, a) in l.coeffs().iter().enumerate() {
            if k > 0 {
                d = d.derivative();
            }
            if a.is_zero() {
                continue;
            }
            let pole = a.valuation().unwrap_or(0).min(0).abs();
            let ser = Series::from_ratfunc(a, self.order() + margin + pole);
            let t: Vec<Series> = d.terms.iter().map(|s| &ser * s).collect();
            acc = Some(match acc {
                None => t,
                Some(prev) => prev.iter().zip(&t).map(|(u, v)| u + v).collect(),
            });
        }
        LogSeries::new(acc.unwrap_or_default())
    }

    pub fn is_zero_to(&self, order: i64) -> bool {
        self.terms.iter().all(|t| t.order() >= order && t.is_zero_to(order))
    }
}

/// Frobenius basis `y_0, …, y_{N-1}` at a MUM point `x = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrobeniusBasis {
    /// Indicial polynomial in `θ`, normalized monic.
    pub indicial: Poly,
    /// `f_t` with `y_k = Σ_{s+t=k} log(x)^s/s! · f_t`; `f_0 = y_0`.
    pub parts: Vec<Series>,
    pub solutions: Vec<LogSeries>,
}

impl FrobeniusBasis {
    /// Holomorphic solution `y_0 = 1 + O(x)`.
    pub fn y0(&self) -> &Series {
        &self.parts[0]
    }
}

/// Polynomial `Π_{i<k} (θ − i)`.
fn falling_poly(k: usize) -> Poly {
    (0..k).fold(Poly::one(), |acc, i| &acc * &Poly::new(vec![q(-(i as i64)), q(1)]))
}

/// `p(m + ε) mod ε^n` as a coefficient vector.
fn shifted(p: &Poly, m: i64, n: usize) -> Vec<Q> {
    let s = p.compose(&Poly::new(vec![q(m), q(1)]));
    (0..n).map(|i| s.coeff(i)).collect()
}

fn eps_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len();
    let mut out = vec![Q::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn eps_inv(a: &[Q]) -> Vec<Q> {
    let n = a.len();
    let a0inv = a[0].recip();
    let mut out = vec![Q::zero(); n];
    out[0] = a0inv.clone();
    for k in 1..n {
        let mut s = Q::zero();
        for j in 1..=k {
            s += &a[j] * &out[k - j];
        }
        out[k] = -s * &a0inv;
    }
    out
}

/// Frobenius basis through `x^k` for an operator whose indicial polynomial at
/// `x = 0` is `θ^N`.
pub fn frobenius_mum_basis(l: &DiffOperator, k: i64) -> Result<FrobeniusBasis> {
    let n = l.order();
    if n == 0 {
        return Err(Error::Operator("operator of order zero".into()));
    }
    // a_j·x^(-j) = x^m·c_j(x) with c_j power series
    let shifted_vals: Vec<Option<i64>> = l
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, a)| a.valuation().map(|v| v - j as i64))
        .collect();
    let m = shifted_vals.iter().flatten().min().copied().unwrap();
    let cs: Vec<Series> = l
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let e = Series::from_ratfunc(a, k + m + j as i64);
            e.shift(-(j as i64) - m)
        })
        .collect();
    let falls: Vec<Poly> = (0..=n).map(falling_poly).collect();
    // P_t(θ) = Σ_j [x^t]c_j · [θ]_j
    let pt: Vec<Poly> = (0..=k)
        .map(|t| {
            cs.iter().enumerate().fold(Poly::zero(), |acc, (j, c)| {
                let a = c.coeff(t);
                if a.is_zero() {
                    acc
                } else {
                    &acc + &falls[j].scale(&a)
                }
            })
        })
        .collect();
    let p0 = pt[0].clone();
    let mum = p0.degree() == Some(n) && p0.monic() == Poly::monomial(Q::one(), n);
    if !mum {
        return Err(Error::NotMum {
            indicial: p0.monic().to_string(),
        });
    }
    let mut cm: Vec<Vec<Q>> = vec![{
        let mut v = vec![Q::zero(); n];
        v[0] = Q::one();
        v
    }];
    for mm in 1..=k {
        let mut s = vec![Q::zero(); n];
        for t in 1..=mm {
            let p = &pt[t as usize];
            if p.is_zero() {
                continue;
            }
            let prev = &cm[(mm - t) as usize];
            if prev.iter().all(|c| c.is_zero()) {
                continue;
            }
            let term = eps_mul(&shifted(p, mm - t, n), prev);
            for (si, ti) in s.iter_mut().zip(term) {
                *si += ti;
            }
        }
        let denom: Vec<Q> = shifted(&p0, mm, n);
        let inv = eps_inv(&denom);
        let c: Vec<Q> = eps_mul(&inv, &s).into_iter().map(|a| -a).collect();
        cm.push(c);
    }
    let parts: Vec<Series> = (0..n)
        .map(|t| Series::from_coeffs(0, cm.iter().map(|c| c[t].clone()).collect(), k))
        .collect();
    let mut fact = Q::one();
    let mut inv_fact = vec![Q::one()];
    for s in 1..n {
        fact *= q(s as i64);
        inv_fact.push(fact.recip());
    }
    let solutions = (0..n)
        .map(|kk| LogSeries::new((0..=kk).map(|s| parts[kk - s].scale(&inv_fact[s])).collect()))
        .collect();
    Ok(FrobeniusBasis {
        indicial: p0.monic(),
        parts,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::{monic_from, order2};
    use crate::ratfunc::RatFunc;
    use crate::rational::qf;

    #[test]
    fn theta_four_gives_pure_logs() {
        let l = DiffOperator::theta_pow(4);
        let b = frobenius_mum_basis(&l, 10).unwrap();
        for (i, y) in b.solutions.iter().enumerate() {
            assert_eq!(y.terms.len(), i + 1);
            for (s, t) in y.terms.iter().enumerate() {
                if s == i {
                    let mut f = Q::one();
                    for j in 1..=i {
                        f *= q(j as i64);
                    }
                    assert_eq!(t, &Series::constant(f.recip(), 10));
                } else {
                    assert!(t.is_zero());
                }
            }
        }
    }

    #[test]
    fn hypergeometric_order_two() {
        // θ² − x(θ + 1/2)²: y_0 = 2F1(1/2,1/2;1;x)
        let x = RatFunc::x();
        let one = RatFunc::one();
        let l = order2(
            (one.clone() - x.scale(&q(2))) / (x.clone() * (one.clone() - x.clone())),
            RatFunc::constant(qf(-1, 4)) / (x.clone() * (one - x)),
        );
        let b = frobenius_mum_basis(&l, 20).unwrap();
        let h = Series::hypergeometric(&[qf(1, 2), qf(1, 2)], &[q(1)], 20);
        assert_eq!(b.y0(), &h);
        for y in &b.solutions {
            assert!(y.apply(&l).is_zero_to(18));
        }
    }

    #[test]
    fn rejects_non_mum() {
        let x = RatFunc::x();
        let l = monic_from(vec![RatFunc::constant(qf(-1, 4)) / x.pow(2), RatFunc::zero()]);
        assert!(matches!(frobenius_mum_basis(&l, 5), Err(Error::NotMum { .. })));
    }
}
