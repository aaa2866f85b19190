//! Recovering an annihilating operator from a power series.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{DiffOperator, Operator};
use crate::error::{Error, Result};
use crate::linalg::modular_nullspace;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::Q;
use crate::series::Series;

/// `n!/(n-k)!` for `k ≤ n`.
fn falling(n: i64, k: usize) -> Q {
    (0..k as i64).fold(Q::one(), |acc, i| acc * Q::from_integer(BigInt::from(n - i)))
}

/// Kernel of the linear system expressing `Σ c_{i,k} x^i D^k f = 0` through
/// `x^(order(f) - ord)`, unknowns ordered `(k, i)` with `i` fastest.
fn kernel(f: &Series, ord: usize, deg: usize) -> Vec<Vec<Q>> {
    let kmax = f.order();
    let last = kmax - ord as i64;
    let ncols = (ord + 1) * (deg + 1);
    let mut m: Vec<Vec<BigInt>> = Vec::with_capacity((last + 1).max(0) as usize);
    for n in 0..=last {
        let mut row = vec![Q::zero(); ncols];
        for k in 0..=ord {
            for i in 0..=deg {
                let base = n - i as i64;
                if base < 0 {
                    continue;
                }
                let idx = base + k as i64;
                let fc = f.coeff(idx);
                if !fc.is_zero() {
                    row[k * (deg + 1) + i] = fc * falling(idx, k);
                }
            }
        }
        let l = row.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let lq = Q::from_integer(l);
        m.push(row.into_iter().map(|c| (c * &lq).to_integer()).collect());
    }
    modular_nullspace(&m, ncols)
}

fn to_operator(v: &[Q], ord: usize, deg: usize) -> DiffOperator {
    // clear denominators and content
    let mut l = BigInt::one();
    for c in v {
        l = l.lcm(c.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|c| (c * Q::from_integer(l.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    let top = &ints[ord * (deg + 1)..];
    let first = top.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(BigInt::one);
    if first.is_negative() {
        g = -g;
    }
    let coeffs = (0..=ord)
        .map(|k| {
            let c: Vec<Q> = ints[k * (deg + 1)..(k + 1) * (deg + 1)]
                .iter()
                .map(|a| Q::new(a.clone(), g.clone()))
                .collect();
            RatFunc::from_poly(Poly::new(c))
        })
        .collect();
    Operator::new(coeffs)
}

/// Lowest-order, then lowest-degree operator with polynomial coefficients
/// annihilating `f` to its known order, or `None` within the given bounds.
pub fn guess_operator(f: &Series, max_order: usize, max_degree: usize) -> Result<Option<DiffOperator>> {
    if f.val().is_some_and(|v| v < 0) {
        return Err(Error::Invalid("guessing needs a power series".into()));
    }
    let known = f.order() + 1;
    let need = ((max_order + 1) * (max_degree + 2) + 10) as i64;
    if known < need {
        return Err(Error::Insufficient(format!(
            "{known} coefficients known, {need} needed for order {max_order} and degree {max_degree}"
        )));
    }
    for ord in 0..=max_order {
        if kernel(f, ord, max_degree).is_empty() {
            continue;
        }
        for deg in 0..=max_degree {
            let ns = kernel(f, ord, deg);
            if let Some(v) = ns.first() {
                let op = to_operator(v, ord, deg);
                if op.order() == ord {
                    return Ok(Some(op));
                }
            }
        }
    }
    Ok(None)
}

/// Operator of exactly the given order and coefficient degree annihilating
/// `f` to its known order, if one exists.
pub fn guess_operator_at(f: &Series, ord: usize, deg: usize) -> Result<Option<DiffOperator>> {
    if f.val().is_some_and(|v| v < 0) {
        return Err(Error::Invalid("guessing needs a power series".into()));
    }
    let need = ((ord + 1) * (deg + 2) + 10) as i64;
    if f.order() + 1 < need {
        return Err(Error::Insufficient(format!(
            "{} coefficients known, {need} needed for order {ord} and degree {deg}",
            f.order() + 1
        )));
    }
    Ok(kernel(f, ord, deg)
        .first()
        .map(|v| to_operator(v, ord, deg))
        .filter(|op| op.order() == ord))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn geometric_series() {
        let f = Series::from_ratfunc(&(RatFunc::one() - RatFunc::x()).inv().unwrap(), 30);
        let op = guess_operator(&f, 2, 2).unwrap().unwrap();
        let expect = Operator::new(vec![RatFunc::int(-1), RatFunc::one() - RatFunc::x()]);
        assert_eq!(op, expect);
    }

    #[test]
    fn exponential_series() {
        let f = Series::x(30).exp().unwrap();
        let op = guess_operator(&f, 2, 1).unwrap().unwrap();
        assert_eq!(op, Operator::new(vec![RatFunc::int(-1), RatFunc::one()]));
    }

    #[test]
    fn hypergeometric_found_and_overdetermined() {
        let f = Series::hypergeometric(&[qf(1, 3), qf(2, 3)], &[q(1)], 60);
        let short = f.truncate(40);
        let op = guess_operator(&short, 2, 2).unwrap().unwrap();
        assert_eq!(op.order(), 2);
        assert!(op.apply_series(&f).is_zero_to(58));
    }

    #[test]
    fn insufficient_coefficients() {
        let f = Series::x(5);
        assert!(matches!(guess_operator(&f, 2, 2), Err(Error::Insufficient(_))));
    }
}
