//! Order-by-order series solutions `y = a_n·x^n·(1 + Σ c_k x^k)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::schwarzian_residual;
use crate::error::{Error, Result};
use crate::ratfunc::RatFunc;
use crate::rational::{serde_q, Q};
use crate::series::Series;

/// One-parameter family member `y_n(a_n, x)` through `x^order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub n: u32,
    #[serde(with = "serde_q")]
    pub a_n: Q,
    /// `a_n·x^n + …`; when inconsistent, only the part determined before the
    /// failing step.
    pub tail: Series,
    /// Steps `k` where the coefficient of `c_k` vanished together with the
    /// right-hand side.
    pub resonances: Vec<usize>,
    /// Step `k` where the coefficient of `c_k` vanished but the right-hand side
    /// did not.
    pub inconsistent_at: Option<usize>,
}

impl SolutionFamily {
    pub fn is_consistent(&self) -> bool {
        self.inconsistent_at.is_none()
    }
}

fn candidate(n: u32, a_n: &Q, c: &[Q], order: i64) -> Series {
    Series::from_coeffs(n as i64, c.iter().map(|ck| ck * a_n).collect(), order)
}

/// Solve `residual(y) = 0` for `y = a_n·x^n·(1 + Σ_{k≥1} c_k x^k)` through
/// `x^order`, assuming `c_k` first enters the residual linearly at exponent
/// `k + base`.
pub fn solve_affine<F>(
    n: u32,
    a_n: &Q,
    order: i64,
    base: i64,
    supplied: &BTreeMap<usize, Q>,
    residual: F,
) -> Result<SolutionFamily>
where
    F: Fn(&Series) -> Result<Series>,
{
    if n == 0 {
        return Err(Error::Invalid("the leading exponent n must be ≥ 1".into()));
    }
    if a_n.is_zero() {
        return Err(Error::Invalid("the leading coefficient a_n must be nonzero".into()));
    }
    let probe = |c: &[Q], k: usize| -> Result<Q> {
        let y = candidate(n, a_n, c, n as i64 + k as i64);
        let r = residual(&y)?;
        let e = k as i64 + base;
        if r.order() < e {
            return Err(Error::Series(format!(
                "residual known through x^{} only, x^{e} needed",
                r.order()
            )));
        }
        Ok(r.coeff(e))
    };
    let mut c = vec![Q::from_integer(1.into())];
    let mut resonances = vec![];
    let steps = (order - n as i64).max(0) as usize;
    let head = probe(&c, 0)?;
    if !head.is_zero() {
        return Ok(SolutionFamily {
            n,
            a_n: a_n.clone(),
            tail: candidate(n, a_n, &c, n as i64),
            resonances,
            inconsistent_at: Some(0),
        });
    }
    for k in 1..=steps {
        c.push(Q::zero());
        let r0 = probe(&c, k)?;
        c[k] = Q::from_integer(1.into());
        let r1 = probe(&c, k)?;
        let alpha = &r1 - &r0;
        if !alpha.is_zero() {
            c[k] = -r0 / alpha;
        } else if r0.is_zero() {
            resonances.push(k);
            c[k] = supplied.get(&k).cloned().unwrap_or_else(Q::zero);
        } else {
            c.pop();
            return Ok(SolutionFamily {
                n,
                a_n: a_n.clone(),
                tail: candidate(n, a_n, &c, n as i64 + k as i64 - 1),
                resonances,
                inconsistent_at: Some(k),
            });
        }
    }
    Ok(SolutionFamily {
        n,
        a_n: a_n.clone(),
        tail: candidate(n, a_n, &c, order),
        resonances,
        inconsistent_at: None,
    })
}

/// Solve the Schwarzian condition for `W` with `y = a_n x^n + …` through `x^order`.
pub fn solve_schwarzian_series(w: &RatFunc, n: u32, a_n: &Q, order: i64) -> Result<SolutionFamily> {
    solve_schwarzian_series_with(w, n, a_n, order, &BTreeMap::new())
}

/// As [`solve_schwarzian_series`], with values for resonant coefficients.
pub fn solve_schwarzian_series_with(
    w: &RatFunc,
    n: u32,
    a_n: &Q,
    order: i64,
    supplied: &BTreeMap<usize, Q>,
) -> Result<SolutionFamily> {
    if w.valuation().is_some_and(|v| v < -2) {
        return Err(Error::Invalid(format!(
            "W has a pole of order {} at 0; at most 2 is supported",
            -w.valuation().unwrap()
        )));
    }
    solve_affine(n, a_n, order, -2, supplied, |y| schwarzian_residual(w, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn w_modular() -> RatFunc {
        let x = RatFunc::x();
        let num = &(&x.pow(2).scale(&q(32)) - &x.scale(&q(41))) + &RatFunc::int(36);
        -(num / (x.pow(2) * (x - RatFunc::int(1)).pow(2)).scale(&q(72)))
    }

    #[test]
    fn minus_half_gives_monomials() {
        let w = RatFunc::x().pow(-2).scale(&qf(-1, 2));
        for n in 1..4 {
            let s = solve_schwarzian_series(&w, n, &qf(5, 3), 12).unwrap();
            assert!(s.is_consistent());
            assert_eq!(s.tail, Series::monomial(qf(5, 3), n as i64, 12));
        }
    }

    #[test]
    fn modular_first_coefficients() {
        let s = solve_schwarzian_series(&w_modular(), 1, &q(2), 6).unwrap();
        assert_eq!(s.tail.coeff(2), qf(-31, 36));
        // a(9907a² − 30752a + 20845)/82944 at a = 2
        assert_eq!(s.tail.coeff(3), qf(2 * (9907 * 4 - 30752 * 2 + 20845), 82944));
        let r = schwarzian_residual(&w_modular(), &s.tail).unwrap();
        assert!(r.is_zero_to(3));
    }

    #[test]
    fn modular_y3_head() {
        let s = solve_schwarzian_series(&w_modular(), 3, &q(1), 6).unwrap();
        assert_eq!(s.tail.coeff(4), qf(31, 24));
        assert_eq!(s.tail.coeff(5), qf(36221, 27648));
        assert_eq!(s.tail.coeff(6), -qf(23141376 - 66458485, 53747712));
    }

    #[test]
    fn head_inconsistency() {
        let w = RatFunc::x().pow(-2).scale(&qf(-3, 8));
        let s = solve_schwarzian_series(&w, 2, &q(1), 8).unwrap();
        assert_eq!(s.inconsistent_at, Some(0));
    }
}
