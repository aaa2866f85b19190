//! Dense bivariate polynomials over ℚ and resultants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::rational::{fmt_q, Q};
use crate::series::Series;

/// `Σ c[i][j]·X^i·Y^j`, stored as a rectangular matrix with zero rows and columns trimmed.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BiPoly {
    #[serde(with = "matrix_serde")]
    c: Vec<Vec<Q>>,
}

mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(fmt_q).collect()).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let v = Vec::<Vec<String>>::deserialize(d)?;
        v.iter()
            .map(|r| {
                r.iter()
                    .map(|s| crate::rational::parse_q(s).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

impl BiPoly {
    pub fn new(c: Vec<Vec<Q>>) -> Self {
        let mut b = BiPoly { c };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let w = self.c.iter().map(|r| r.len()).max().unwrap_or(0);
        for r in self.c.iter_mut() {
            r.resize(w, Q::zero());
        }
        while self.c.last().is_some_and(|r| r.iter().all(|x| x.is_zero())) {
            self.c.pop();
        }
        loop {
            let w = self.c.first().map_or(0, |r| r.len());
            if w == 0 || !self.c.iter().all(|r| r[w - 1].is_zero()) {
                break;
            }
            for r in self.c.iter_mut() {
                r.pop();
            }
        }
        if self.c.first().is_some_and(|r| r.is_empty()) {
            self.c.clear();
        }
    }

    pub fn zero() -> Self {
        BiPoly { c: vec![] }
    }

    pub fn constant(a: Q) -> Self {
        BiPoly::new(vec![vec![a]])
    }

    /// Build from `(i, j, coefficient)` triples; repeated monomials add up.
    pub fn from_terms(terms: &[(usize, usize, Q)]) -> Self {
        let dx = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let dy = terms.iter().map(|t| t.1).max().unwrap_or(0);
        let mut c = vec![vec![Q::zero(); dy + 1]; dx + 1];
        for (i, j, a) in terms {
            c[*i][*j] += a;
        }
        BiPoly::new(c)
    }

    /// Polynomial in `X` only.
    pub fn from_x(p: &Poly) -> Self {
        BiPoly::new(p.coeffs().iter().map(|a| vec![a.clone()]).collect())
    }

    /// Polynomial in `Y` only.
    pub fn from_y(p: &Poly) -> Self {
        BiPoly::new(vec![p.coeffs().to_vec()])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Q {
        self.c.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(Q::zero)
    }

    /// Degree in `X`; `None` for zero.
    pub fn deg_x(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree in `Y`; `None` for zero.
    pub fn deg_y(&self) -> Option<usize> {
        self.c.first().map(|r| r.len() - 1)
    }

    /// Swap the roles of `X` and `Y`.
    pub fn transpose(&self) -> BiPoly {
        let (Some(dx), Some(dy)) = (self.deg_x(), self.deg_y()) else {
            return BiPoly::zero();
        };
        let mut c = vec![vec![Q::zero(); dx + 1]; dy + 1];
        for (i, r) in self.c.iter().enumerate() {
            for (j, a) in r.iter().enumerate() {
                c[j][i] = a.clone();
            }
        }
        BiPoly::new(c)
    }

    /// Coefficient of `Y^j` as a polynomial in `X`.
    pub fn y_coeff(&self, j: usize) -> Poly {
        Poly::new(
            self.c
                .iter()
                .map(|r| r.get(j).cloned().unwrap_or_else(Q::zero))
                .collect(),
        )
    }

    pub fn add(&self, o: &BiPoly) -> BiPoly {
        let dx = self.c.len().max(o.c.len());
        let dy = self
            .c
            .first()
            .map_or(0, |r| r.len())
            .max(o.c.first().map_or(0, |r| r.len()));
        let mut c = vec![vec![Q::zero(); dy]; dx];
        for m in [&self.c, &o.c] {
            for (i, r) in m.iter().enumerate() {
                for (j, a) in r.iter().enumerate() {
                    c[i][j] += a;
                }
            }
        }
        BiPoly::new(c)
    }

    pub fn neg(&self) -> BiPoly {
        BiPoly {
            c: self.c.iter().map(|r| r.iter().map(|a| -a).collect()).collect(),
        }
    }

    pub fn sub(&self, o: &BiPoly) -> BiPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: &Q) -> BiPoly {
        BiPoly::new(self.c.iter().map(|r| r.iter().map(|x| x * a).collect()).collect())
    }

    pub fn mul(&self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero();
        }
        let dx = self.c.len() + o.c.len() - 1;
        let dy = self.c[0].len() + o.c[0].len() - 1;
        let mut c = vec![vec![Q::zero(); dy]; dx];
        for (i1, r1) in self.c.iter().enumerate() {
            for (j1, a) in r1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (i2, r2) in o.c.iter().enumerate() {
                    for (j2, b) in r2.iter().enumerate() {
                        if !b.is_zero() {
                            c[i1 + i2][j1 + j2] += a * b;
                        }
                    }
                }
            }
        }
        BiPoly::new(c)
    }

    pub fn pow(&self, e: usize) -> BiPoly {
        let mut acc = BiPoly::constant(Q::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading term in lex order with `X` major: `(i, j, coefficient)`.
    fn lead(&self) -> Option<(usize, usize, Q)> {
        let i = self.c.len().checked_sub(1)?;
        let j = self.c[i].iter().rposition(|a| !a.is_zero())?;
        Some((i, j, self.c[i][j].clone()))
    }

    /// Exact quotient; errors if `d` does not divide `self`.
    pub fn exact_div(&self, d: &BiPoly) -> Result<BiPoly> {
        let (di, dj, dc) = d.lead().ok_or(Error::DivisionByZero)?;
        let mut r = self.clone();
        let mut quo = vec![];
        while let Some((ri, rj, rc)) = r.lead() {
            if ri < di || rj < dj {
                return Err(Error::Invalid("inexact bivariate division".into()));
            }
            let t = (ri - di, rj - dj, &rc / &dc);
            let term = BiPoly::from_terms(std::slice::from_ref(&t));
            r = r.sub(&term.mul(d));
            quo.push(t);
        }
        Ok(BiPoly::from_terms(&quo))
    }

    /// Value at `(x, y)`.
    pub fn eval(&self, x: &Q, y: &Q) -> Q {
        let mut acc = Q::zero();
        for r in self.c.iter().rev() {
            let mut inner = Q::zero();
            for a in r.iter().rev() {
                inner = inner * y + a;
            }
            acc = acc * x + inner;
        }
        acc
    }

    /// Specialize `X = x`, leaving a polynomial in `Y`.
    pub fn eval_x(&self, x: &Q) -> Poly {
        let w = self.c.first().map_or(0, |r| r.len());
        let mut out = vec![Q::zero(); w];
        let mut pw = Q::one();
        for r in &self.c {
            for (j, a) in r.iter().enumerate() {
                out[j] += a * &pw;
            }
            pw *= x;
        }
        Poly::new(out)
    }

    /// `self(f(t), g(t))` as a reduced rational function.
    pub fn substitute(&self, f: &RatFunc, g: &RatFunc) -> RatFunc {
        let (Some(dx), Some(dy)) = (self.deg_x(), self.deg_y()) else {
            return RatFunc::zero();
        };
        let num = self.homogenized(f, g);
        let den = &f.den().pow(dx as u32) * &g.den().pow(dy as u32);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    /// True iff `self(f(t), g(t))` vanishes identically, decided by evaluating
    /// the homogenized numerator, scaled to integers, at one more point than
    /// its degree.
    pub fn vanishes_on(&self, f: &RatFunc, g: &RatFunc) -> bool {
        let (Some(dx), Some(dy)) = (self.deg_x(), self.deg_y()) else {
            return true;
        };
        let ints = |r: &RatFunc| {
            let (ln, _) = r.num().clear_denominators();
            let (ld, _) = r.den().clear_denominators();
            let m = Q::from_integer(ln.lcm(&ld));
            let scaled = |p: &Poly| p.scale(&m).clear_denominators().1;
            (scaled(r.num()), scaled(r.den()))
        };
        let eval = |c: &[BigInt], t: &BigInt| c.iter().rev().fold(BigInt::zero(), |acc, a| acc * t + a);
        let deg = |r: &RatFunc| r.num().degree().unwrap_or(0).max(r.den().degree().unwrap_or(0));
        let bound = dx * deg(f) + dy * deg(g);
        let mut l = BigInt::one();
        for r in &self.c {
            for a in r {
                l = l.lcm(a.denom());
            }
        }
        let c: Vec<Vec<BigInt>> = self
            .c
            .iter()
            .map(|r| {
                r.iter()
                    .map(|a| (a * Q::from_integer(l.clone())).to_integer())
                    .collect()
            })
            .collect();
        let ((fnum, fden), (gnum, gden)) = (ints(f), ints(g));
        let powers = |n: BigInt, d: BigInt, k: usize| -> Vec<BigInt> {
            let mut np = vec![BigInt::one()];
            let mut dp = vec![BigInt::one()];
            for _ in 0..k {
                np.push(np.last().unwrap() * &n);
                dp.push(dp.last().unwrap() * &d);
            }
            (0..=k).map(|i| &np[i] * &dp[k - i]).collect()
        };
        (0..=bound as i64).all(|t| {
            let t = BigInt::from(t);
            let fx = powers(eval(&fnum, &t), eval(&fden, &t), dx);
            let gy = powers(eval(&gnum, &t), eval(&gden, &t), dy);
            let mut acc = BigInt::zero();
            for (i, r) in c.iter().enumerate() {
                let mut inner = BigInt::zero();
                for (j, a) in r.iter().enumerate() {
                    if !a.is_zero() {
                        inner += a * &gy[j];
                    }
                }
                acc += inner * &fx[i];
            }
            acc.is_zero()
        })
    }

    fn homogenized(&self, f: &RatFunc, g: &RatFunc) -> Poly {
        let dx = self.deg_x().unwrap();
        let dy = self.deg_y().unwrap();
        let powers = |n: &Poly, d: &Poly, k: usize| -> Vec<Poly> {
            let mut np = vec![Poly::one()];
            let mut dp = vec![Poly::one()];
            for _ in 0..k {
                np.push(np.last().unwrap() * n);
                dp.push(dp.last().unwrap() * d);
            }
            (0..=k).map(|i| &np[i] * &dp[k - i]).collect()
        };
        let fx = powers(f.num(), f.den(), dx);
        let gy = powers(g.num(), g.den(), dy);
        let mut acc = Poly::zero();
        for (i, r) in self.c.iter().enumerate() {
            let mut inner = Poly::zero();
            for (j, a) in r.iter().enumerate() {
                if !a.is_zero() {
                    inner = &inner + &gy[j].scale(a);
                }
            }
            if !inner.is_zero() {
                acc = &acc + &(&fx[i] * &inner);
            }
        }
        acc
    }

    /// `self(f, g)` for truncated series arguments.
    pub fn at_series(&self, f: &Series, g: &Series) -> Series {
        let w = self.c.first().map_or(0, |r| r.len());
        let ord = f.order().min(g.order());
        let mut gp = vec![Series::one(ord)];
        for _ in 1..w {
            gp.push(gp.last().unwrap() * g);
        }
        let mut acc = Series::zero(ord);
        for r in self.c.iter().rev() {
            let mut inner = Series::zero(ord);
            for (j, a) in r.iter().enumerate() {
                if !a.is_zero() {
                    inner = &inner + &gp[j].scale(a);
                }
            }
            acc = &(&acc * f) + &inner;
        }
        acc
    }

    /// Integer content removed and sign fixed so that the first nonzero
    /// coefficient in `(i, j)` lexicographic order is positive.
    pub fn content_normalized(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for r in &self.c {
            for a in r {
                l = l.lcm(a.denom());
            }
        }
        let lq = Q::from_integer(l);
        let ints: Vec<Vec<BigInt>> = self
            .c
            .iter()
            .map(|r| r.iter().map(|a| (a * &lq).to_integer()).collect())
            .collect();
        let mut g = BigInt::zero();
        for r in &ints {
            for a in r {
                g = g.gcd(a);
            }
        }
        let first = ints.iter().flat_map(|r| r.iter()).find(|a| !a.is_zero()).unwrap();
        if first.is_negative() {
            g = -g;
        }
        BiPoly::new(
            ints.into_iter()
                .map(|r| r.into_iter().map(|a| Q::from_integer(a / &g)).collect())
                .collect(),
        )
    }
}

/// Univariate polynomial in the eliminated variable with coefficients in ℚ[X, Y].
type UPoly = Vec<BiPoly>;

fn udeg(p: &UPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

fn utrim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn prem(a: &UPoly, b: &UPoly) -> UPoly {
    let db = udeg(b).unwrap();
    let lb = b[db].clone();
    let da = udeg(a).unwrap();
    let mut e = da + 1 - db;
    let mut r = a.clone();
    while let Some(dr) = udeg(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let mut next: UPoly = r.iter().map(|c| c.mul(&lb)).collect();
        for (i, bi) in b.iter().enumerate() {
            next[dr - db + i] = next[dr - db + i].sub(&bi.mul(&lr));
        }
        r = utrim(next);
        e -= 1;
    }
    let f = lb.pow(e);
    r.iter().map(|c| c.mul(&f)).collect()
}

/// Resultant of `a` and `b` (univariate over ℚ[X, Y]) by the subresultant sequence.
fn subresultant(a: &UPoly, b: &UPoly) -> Result<BiPoly> {
    let mut a = utrim(a.clone());
    let mut b = utrim(b.clone());
    let (Some(mut da), Some(mut db)) = (udeg(&a), udeg(&b)) else {
        return Ok(BiPoly::zero());
    };
    let mut s = Q::one();
    if da < db {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut da, &mut db);
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
    }
    if db == 0 {
        return Ok(b[0].pow(da).scale(&s));
    }
    let one = BiPoly::constant(Q::one());
    let mut g = one.clone();
    let mut h = one;
    loop {
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = prem(&a, &b);
        a = b;
        let Some(dr) = udeg(&r) else {
            return Ok(BiPoly::zero());
        };
        let div = g.mul(&h.pow(delta));
        b = r
            .iter()
            .take(dr + 1)
            .map(|c| c.exact_div(&div))
            .collect::<Result<_>>()?;
        da = db;
        db = dr;
        g = a[da].clone();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).exact_div(&h.pow(delta - 1))?
        };
        if db == 0 {
            break;
        }
    }
    let last = b[0].pow(da);
    let h = if da == 0 { h } else { last.exact_div(&h.pow(da - 1))? };
    Ok(h.scale(&s))
}

/// Eliminate `B` from `p(A, B)` and `q(B, C)`: returns the content-normalized
/// resultant as a polynomial in `(A, C)`.
pub fn resultant_in_second_var(p: &BiPoly, q: &BiPoly) -> Result<BiPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::Invalid("zero input polynomial".into()));
    }
    if p.deg_y() == Some(0) || q.deg_x() == Some(0) {
        return Err(Error::Invalid(
            "input has no dependence on the eliminated variable".into(),
        ));
    }
    // p as a polynomial in B with coefficients in ℚ[A] ⊂ ℚ[A, C].
    let up: UPoly = (0..=p.deg_y().unwrap())
        .map(|j| BiPoly::from_x(&p.y_coeff(j)))
        .collect();
    // q as a polynomial in B with coefficients in ℚ[C] ⊂ ℚ[A, C].
    let qt = q.transpose();
    let uq: UPoly = (0..=qt.deg_y().unwrap())
        .map(|i| BiPoly::from_y(&qt.y_coeff(i)))
        .collect();
    Ok(subresultant(&up, &uq)?.content_normalized())
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = vec![];
        for (i, r) in self.c.iter().enumerate() {
            for (j, a) in r.iter().enumerate() {
                if !a.is_zero() {
                    terms.push(format!("({})*X^{i}*Y^{j}", fmt_q(a)));
                }
            }
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Field;
    use crate::rational::{q, qf};

    fn bp(terms: &[(usize, usize, i64)]) -> BiPoly {
        BiPoly::from_terms(&terms.iter().map(|&(i, j, a)| (i, j, q(a))).collect::<Vec<_>>())
    }

    /// Sylvester determinant in the eliminated variable after specializing `A`, `C`.
    fn sylvester_at(p: &BiPoly, qq: &BiPoly, a: &Q, c: &Q) -> Q {
        let pb = p.eval_x(a);
        let qb = qq.transpose().eval_x(c);
        let m = p.deg_y().unwrap();
        let n = qq.deg_x().unwrap();
        let size = m + n;
        let mut mat = vec![vec![Q::zero(); size]; size];
        for r in 0..n {
            for k in 0..=m {
                mat[r][r + m - k] = pb.coeff(k);
            }
        }
        for r in 0..m {
            for k in 0..=n {
                mat[n + r][r + n - k] = qb.coeff(k);
            }
        }
        det(mat)
    }

    fn det(mut m: Vec<Vec<Q>>) -> Q {
        let n = m.len();
        let mut d = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                m.swap(p, c);
                d = -d;
            }
            d *= &m[c][c];
            let (top, rest) = m.split_at_mut(c + 1);
            let pivot = &top[c];
            for row in rest.iter_mut() {
                let f = row[c].f_div(&pivot[c]);
                for (v, pv) in row[c..n].iter_mut().zip(&pivot[c..n]) {
                    *v -= pv * &f;
                }
            }
        }
        d
    }

    #[test]
    fn linear_elimination() {
        let p = bp(&[(1, 0, 1), (0, 1, -1)]); // A - B
        let qq = bp(&[(1, 0, 1), (0, 1, -1)]); // B - C
        let r = resultant_in_second_var(&p, &qq).unwrap();
        // first coefficient in (i, j) order is that of C, made positive
        assert_eq!(r, bp(&[(1, 0, -1), (0, 1, 1)]));
    }

    #[test]
    fn quadratic_elimination() {
        let p = bp(&[(0, 2, 1), (1, 0, -1)]); // B² - A
        let qq = bp(&[(1, 0, 1), (0, 1, -1)]); // B - C
        let r = resultant_in_second_var(&p, &qq).unwrap();
        assert_eq!(r, bp(&[(0, 2, 1), (1, 0, -1)]));
    }

    #[test]
    fn agrees_with_sylvester_determinant() {
        let p = bp(&[(2, 1, 3), (0, 2, 1), (1, 0, -2), (0, 0, 5), (1, 3, 1)]);
        let qq = bp(&[(2, 0, 1), (1, 1, -4), (0, 2, 2), (1, 0, 1)]);
        let r = resultant_in_second_var(&p, &qq).unwrap();
        let pts = [q(0), q(1), qf(1, 2), q(-3), qf(2, 7)];
        let base = sylvester_at(&p, &qq, &pts[1], &pts[2]);
        let ratio = &r.eval(&pts[1], &pts[2]) / &base;
        for a in &pts {
            for c in &pts {
                assert_eq!(r.eval(a, c), &ratio * &sylvester_at(&p, &qq, a, c));
            }
        }
    }

    #[test]
    fn vanishes_at_common_roots() {
        // (B - A)(B - 2) and (B - C)(B + 1): common root b gives a relation between a and c.
        let p = bp(&[(0, 2, 1), (1, 1, -1), (0, 1, -2), (1, 0, 2)]);
        let qq = bp(&[(2, 0, 1), (1, 1, -1), (1, 0, 1), (0, 1, -1)]);
        let r = resultant_in_second_var(&p, &qq).unwrap();
        for b in [q(3), qf(-1, 2), q(7)] {
            assert!(r.eval(&b, &b).is_zero());
        }
        assert!(r.eval(&q(5), &q(2)).is_zero());
        assert!(!r.eval(&q(5), &q(4)).is_zero());
    }

    #[test]
    fn substitution_identity() {
        // X² - Y vanishes on (t, t²)
        let p = bp(&[(2, 0, 1), (0, 1, -1)]);
        let t = RatFunc::x();
        assert!(p.vanishes_on(&t, &t.pow(2)));
        assert!(!p.vanishes_on(&t, &t.pow(3)));
        let inv = t.inv().unwrap();
        assert!(p.vanishes_on(&inv, &inv.pow(2)));
    }

    #[test]
    fn exact_division_round_trip() {
        let a = bp(&[(1, 0, 1), (0, 1, 1), (0, 0, 1)]);
        let b = bp(&[(2, 1, 3), (0, 0, -1)]);
        let prod = a.mul(&b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert!(prod.add(&BiPoly::constant(q(1))).exact_div(&a).is_err());
    }
}
