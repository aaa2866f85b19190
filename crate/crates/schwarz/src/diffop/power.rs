//! Symmetric and exterior powers by the cyclic-vector method, plus the closed
//! forms for symmetric powers of order-two operators.

use serde::{Deserialize, Serialize};

use super::{monic_from, DiffOperator, Operator};
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::ratfunc::RatFunc;
use crate::rational::{q, Q};

/// Which bilinear construction to annihilate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerKind {
    Sym2,
    Ext2,
}

/// Annihilator of a power together with its order and the generic order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PowerResult {
    pub operator: DiffOperator,
    pub order: usize,
    pub generic_order: usize,
}

impl PowerResult {
    pub fn is_degenerate(&self) -> bool {
        self.order < self.generic_order
    }
}

/// Derivative of a coordinate vector in a differential module whose basis
/// satisfies `D e_i = Σ_j deriv[i][j] e_j`.
fn module_derivative(deriv: &[Vec<RatFunc>], v: &[RatFunc]) -> Vec<RatFunc> {
    let mut out: Vec<RatFunc> = v.iter().map(|c| c.derivative()).collect();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        for (j, m) in deriv[i].iter().enumerate() {
            if !m.is_zero() {
                out[j] = &out[j] + &(c * m);
            }
        }
    }
    out
}

/// Minimal monic operator annihilating the element `start` of the module.
pub fn cyclic_annihilator(deriv: &[Vec<RatFunc>], start: Vec<RatFunc>) -> Result<DiffOperator> {
    let dim = deriv.len();
    if start.len() != dim || deriv.iter().any(|r| r.len() != dim) {
        return Err(Error::Invalid("module dimensions disagree".into()));
    }
    // Semi-echelon rows: (vector, pivot, combination of the v_j giving it).
    let mut rows: Vec<(Vec<RatFunc>, usize, Vec<RatFunc>)> = vec![];
    let mut v = start;
    for k in 0..=dim {
        let mut w = v.clone();
        let mut comb = vec![RatFunc::zero(); k + 1];
        comb[k] = RatFunc::one();
        for (row, p, rc) in &rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = w[*p].clone();
            for (wj, rj) in w.iter_mut().zip(row) {
                if !rj.is_zero() {
                    *wj = &*wj - &(&f * rj);
                }
            }
            for (cj, rj) in comb.iter_mut().zip(rc) {
                if !rj.is_zero() {
                    *cj = &*cj - &(&f * rj);
                }
            }
        }
        match w.iter().position(|c| !c.is_zero()) {
            None => return Ok(Operator::new(comb)),
            Some(p) => {
                let inv = w[p].inv()?;
                let w: Vec<RatFunc> = w.iter().map(|c| c * &inv).collect();
                let comb: Vec<RatFunc> = comb.iter().map(|c| c * &inv).collect();
                rows.push((w, p, comb));
            }
        }
        v = module_derivative(deriv, &v);
    }
    Err(Error::Operator("cyclic vector produced no dependency".into()))
}

/// Order of the minimal annihilator of `start`, from ranks of the iterated
/// derivatives evaluated at rational sample points.
pub fn cyclic_order(deriv: &[Vec<RatFunc>], start: Vec<RatFunc>) -> usize {
    let dim = deriv.len();
    let points = [q(3) / q(11), q(-5) / q(7), q(13) / q(17)];
    let mut vs: Vec<Vec<RatFunc>> = vec![start];
    for _ in 0..dim {
        let next = module_derivative(deriv, vs.last().unwrap());
        vs.push(next);
    }
    // rank over ℚ(x) is the maximum of the ranks at regular points
    let mut best_k = 0;
    for x0 in &points {
        let mut rows: Vec<Vec<Q>> = vec![];
        let mut k_here = dim;
        for (k, v) in vs.iter().enumerate() {
            let Some(row) = v.iter().map(|c| c.eval(x0)).collect::<Option<Vec<Q>>>() else {
                k_here = 0;
                break;
            };
            rows.push(row);
            if rank(&rows) < rows.len() {
                k_here = k;
                break;
            }
        }
        best_k = best_k.max(k_here);
    }
    best_k
}

/// Coordinates of `y^(i)` for `i ≤ n` in the basis `y, y', …, y^(n-1)`.
fn jet(l: &DiffOperator, i: usize) -> Vec<RatFunc> {
    let n = l.order();
    if i < n {
        let mut e = vec![RatFunc::zero(); n];
        e[i] = RatFunc::one();
        e
    } else {
        (0..n).map(|k| -l.coeff(k)).collect()
    }
}

struct Bilinear {
    pairs: Vec<(usize, usize)>,
    kind: PowerKind,
}

impl Bilinear {
    fn new(n: usize, kind: PowerKind) -> Self {
        let mut pairs = vec![];
        for a in 0..n {
            let start = if kind == PowerKind::Sym2 { a } else { a + 1 };
            for b in start..n {
                pairs.push((a, b));
            }
        }
        Bilinear { pairs, kind }
    }

    fn index(&self, a: usize, b: usize) -> Option<(usize, Q)> {
        if a == b && self.kind == PowerKind::Ext2 {
            return None;
        }
        let (lo, hi, s) = if a <= b { (a, b, q(1)) } else { (b, a, q(-1)) };
        let s = if self.kind == PowerKind::Sym2 { q(1) } else { s };
        let i = self.pairs.iter().position(|&p| p == (lo, hi)).unwrap();
        Some((i, s))
    }

    /// Coordinates of `y^(a) ⊗ z^(b)` with `a, b ≤ n`.
    fn product(&self, l: &DiffOperator, a: usize, b: usize) -> Vec<RatFunc> {
        let ea = jet(l, a);
        let eb = jet(l, b);
        let mut out = vec![RatFunc::zero(); self.pairs.len()];
        for (i, ci) in ea.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in eb.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                if let Some((k, s)) = self.index(i, j) {
                    out[k] = &out[k] + &(ci * cj).scale(&s);
                }
            }
        }
        out
    }

    fn derivation(&self, l: &DiffOperator) -> Vec<Vec<RatFunc>> {
        self.pairs
            .iter()
            .map(|&(a, b)| {
                let u = self.product(l, a + 1, b);
                let v = self.product(l, a, b + 1);
                u.iter().zip(&v).map(|(x, y)| x + y).collect()
            })
            .collect()
    }

    fn start(&self, l: &DiffOperator) -> Vec<RatFunc> {
        match self.kind {
            PowerKind::Sym2 => self.product(l, 0, 0),
            PowerKind::Ext2 => self.product(l, 0, 1),
        }
    }
}

fn check_monic(l: &DiffOperator) -> Result<()> {
    if l.order() == 0 {
        return Err(Error::Operator("operator of order zero".into()));
    }
    if !l.is_monic() {
        return Err(Error::Operator("operator must be monic".into()));
    }
    Ok(())
}

/// Minimal annihilator of `y·y` (symmetric square) or of the wronskian
/// `y·z' − y'·z` (exterior square) for generic solutions `y, z` of `l`.
pub fn sym_or_ext_power(l: &DiffOperator, kind: PowerKind) -> Result<PowerResult> {
    let l = l.monic();
    check_monic(&l)?;
    let bl = Bilinear::new(l.order(), kind);
    let op = cyclic_annihilator(&bl.derivation(&l), bl.start(&l))?;
    Ok(PowerResult {
        order: op.order(),
        generic_order: bl.pairs.len(),
        operator: op,
    })
}

/// Order of the symmetric or exterior square without building the operator.
pub fn power_order(l: &DiffOperator, kind: PowerKind) -> Result<usize> {
    let l = l.monic();
    check_monic(&l)?;
    let bl = Bilinear::new(l.order(), kind);
    Ok(cyclic_order(&bl.derivation(&l), bl.start(&l)))
}

pub fn sym2(l: &DiffOperator) -> Result<PowerResult> {
    sym_or_ext_power(l, PowerKind::Sym2)
}

pub fn ext2(l: &DiffOperator) -> Result<PowerResult> {
    sym_or_ext_power(l, PowerKind::Ext2)
}

fn order2_parts(l2: &DiffOperator) -> Result<(RatFunc, RatFunc)> {
    if l2.order() != 2 {
        return Err(Error::Operator(format!(
            "expected an order-two operator, got order {}",
            l2.order()
        )));
    }
    let l2 = l2.monic();
    Ok((l2.coeff(1), l2.coeff(0)))
}

/// Symmetric `m`-th power of `D² + A·D + B` from the cyclic vector `y^m`.
pub fn sym_power_order2_cyclic(l2: &DiffOperator, m: usize) -> Result<DiffOperator> {
    let (a, b) = order2_parts(l2)?;
    if m == 0 {
        return Err(Error::Invalid("symmetric power exponent must be ≥ 1".into()));
    }
    // e_i = y^(m-i)·y'^i, D e_i = (m-i) e_{i+1} - i·A e_i - i·B e_{i-1}
    let deriv: Vec<Vec<RatFunc>> = (0..=m)
        .map(|i| {
            let mut row = vec![RatFunc::zero(); m + 1];
            if i < m {
                row[i + 1] = RatFunc::int((m - i) as i64);
            }
            let iq = q(i as i64);
            row[i] = &row[i] - &a.scale(&iq);
            if i > 0 {
                row[i - 1] = &row[i - 1] - &b.scale(&iq);
            }
            row
        })
        .collect();
    let mut start = vec![RatFunc::zero(); m + 1];
    start[0] = RatFunc::one();
    cyclic_annihilator(&deriv, start)
}

/// Closed-form symmetric square, cube and fourth power of `D² + A·D + B`.
pub fn sym_power_order2_explicit(l2: &DiffOperator, m: usize) -> Result<Option<DiffOperator>> {
    let (a, b) = order2_parts(l2)?;
    let a1 = a.derivative();
    let a2 = a1.derivative();
    let a3 = a2.derivative();
    let b1 = b.derivative();
    let b2 = b1.derivative();
    let b3 = b2.derivative();
    let sum = |terms: &[(i64, RatFunc)]| -> RatFunc {
        terms
            .iter()
            .fold(RatFunc::zero(), |acc, (c, t)| &acc + &t.scale(&q(*c)))
    };
    let a_2 = &a * &a;
    let a_3 = &a_2 * &a;
    let b_2 = &b * &b;
    let op = match m {
        1 => Some(l2.monic()),
        2 => {
            let p = sum(&[(3, a.clone())]);
            let qq = sum(&[(2, a_2.clone()), (4, b.clone()), (1, a1.clone())]);
            let r = sum(&[(4, &b * &a), (2, b1.clone())]);
            Some(monic_from(vec![r, qq, p]))
        }
        3 => {
            let p = sum(&[(6, a.clone())]);
            let qq = sum(&[(11, a_2.clone()), (4, a1.clone()), (10, b.clone())]);
            let r = sum(&[
                (6, a_3.clone()),
                (7, &a * &a1),
                (30, &b * &a),
                (1, a2.clone()),
                (10, b1.clone()),
            ]);
            let s = sum(&[
                (18, &a_2 * &b),
                (6, &b * &a1),
                (15, &b1 * &a),
                (9, b_2.clone()),
                (3, b2.clone()),
            ]);
            Some(monic_from(vec![s, r, qq, p]))
        }
        4 => {
            let p = sum(&[(10, a.clone())]);
            let qq = sum(&[(35, a_2.clone()), (20, b.clone()), (10, a1.clone())]);
            let r = sum(&[
                (50, a_3.clone()),
                (120, &b * &a),
                (45, &a * &a1),
                (30, b1.clone()),
                (5, a2.clone()),
            ]);
            let s = sum(&[
                (24, &a_3 * &a),
                (208, &a_2 * &b),
                (46, &a_2 * &a1),
                (120, &b1 * &a),
                (11, &a * &a2),
                (64, b_2.clone()),
                (56, &b * &a1),
                (7, &a1 * &a1),
                (18, b2.clone()),
                (1, a3.clone()),
            ]);
            let t = sum(&[
                (96, &a_3 * &b),
                (104, &a_2 * &b1),
                (128, &a * &b_2),
                (80, &(&a * &b) * &a1),
                (36, &b2 * &a),
                (64, &b * &b1),
                (8, &b * &a2),
                (28, &b1 * &a1),
                (4, b3.clone()),
            ]);
            Some(monic_from(vec![t, s, r, qq, p]))
        }
        _ => None,
    };
    Ok(op)
}

/// Symmetric `m`-th power of an order-two operator: closed forms for
/// `m ≤ 4`, the cyclic-vector method otherwise.
pub fn sym_power_order2(l2: &DiffOperator, m: usize) -> Result<DiffOperator> {
    if m == 0 {
        return Err(Error::Invalid("symmetric power exponent must be ≥ 1".into()));
    }
    match sym_power_order2_explicit(l2, m)? {
        Some(op) => Ok(op),
        None => sym_power_order2_cyclic(l2, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::order2;
    use crate::rational::qf;
    use crate::series::Series;

    fn x() -> RatFunc {
        RatFunc::x()
    }
    fn c(n: i64) -> RatFunc {
        RatFunc::int(n)
    }

    fn sample_l2() -> DiffOperator {
        let a = (x() + c(2)) / (x() * (x() - c(1)));
        let b = RatFunc::constant(qf(3, 7)) / (x() - c(3));
        order2(a, b)
    }

    #[test]
    fn sym2_of_d2() {
        let d2 = order2(c(0), c(0));
        assert_eq!(sym_power_order2(&d2, 2).unwrap(), monic_from(vec![c(0); 3]));
    }

    #[test]
    fn sym2_of_d2_minus_one() {
        let l = order2(c(0), c(-1));
        let s = sym_power_order2(&l, 2).unwrap();
        assert_eq!(s, monic_from(vec![c(0), c(-4), c(0)]));
        // cosh² expansion is annihilated
        let k = 14;
        let e = Series::x(k).exp().unwrap();
        let u = &e + &e.inv().unwrap();
        assert!(s.apply_series(&(&u * &u)).is_zero_to(k - 3));
    }

    #[test]
    fn explicit_forms_match_cyclic() {
        let l = sample_l2();
        for m in 2..=4 {
            let e = sym_power_order2_explicit(&l, m).unwrap().unwrap();
            let g = sym_power_order2_cyclic(&l, m).unwrap();
            assert_eq!(e, g, "m = {m}");
        }
    }

    #[test]
    fn general_power_p_and_q() {
        let l = sample_l2();
        let (a, b) = (l.coeff(1), l.coeff(0));
        for n in 2..=6usize {
            let op = sym_power_order2(&l, n - 1).unwrap();
            let nn = n as i64;
            let p = a.scale(&qf(nn * (nn - 1), 2));
            let qq = &(&a * &a).scale(&qf((3 * nn - 1) * nn * (nn - 1) * (nn - 2), 24))
                + &(&b.scale(&qf(nn * (nn - 1) * (nn + 1), 6))
                    + &a.derivative().scale(&qf(nn * (nn - 1) * (nn - 2), 6)));
            assert_eq!(op.coeff(n - 1), p);
            assert_eq!(op.coeff(n - 2), qq);
        }
    }

    #[test]
    fn sym2_generic_matches_sym_power() {
        let l = sample_l2();
        let r = sym2(&l).unwrap();
        assert_eq!(r.operator, sym_power_order2(&l, 2).unwrap());
        assert_eq!(r.generic_order, 3);
    }

    #[test]
    fn ext2_of_d4_is_degenerate_free() {
        let d4 = monic_from(vec![c(0); 4]);
        let r = ext2(&d4).unwrap();
        // wronskians of polynomials of degree < 4 span degree ≤ 4
        assert_eq!(r.order, 5);
        assert_eq!(r.operator, monic_from(vec![c(0); 5]));
        assert_eq!(power_order(&d4, PowerKind::Ext2).unwrap(), 5);
    }

    #[test]
    fn ext2_of_sym_cube_has_order_five() {
        let l4 = sym_power_order2(&sample_l2(), 3).unwrap();
        let r = ext2(&l4).unwrap();
        assert_eq!(r.order, 5);
        assert_eq!(power_order(&l4, PowerKind::Ext2).unwrap(), 5);
    }

    #[test]
    fn sym2_of_sym_cube_has_order_seven() {
        let l4 = sym_power_order2(&sample_l2(), 3).unwrap();
        assert_eq!(power_order(&l4, PowerKind::Sym2).unwrap(), 7);
        let r = sym2(&l4).unwrap();
        assert_eq!(r.order, 7);
        assert!(r.is_degenerate());
    }

    #[test]
    fn generic_order_four_is_not_degenerate() {
        let l = monic_from(vec![x(), c(1), x().inv().unwrap(), c(2)]);
        assert_eq!(power_order(&l, PowerKind::Ext2).unwrap(), 6);
        assert_eq!(power_order(&l, PowerKind::Sym2).unwrap(), 10);
    }
}
