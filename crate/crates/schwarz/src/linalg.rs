//! Exact linear algebra over ℚ and ℚ(x).

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ratfunc::RatFunc;
use crate::rational::Q;

/// Field operations needed by Gaussian elimination.
pub trait Field: Clone + PartialEq {
    fn f_zero() -> Self;
    fn f_one() -> Self;
    fn f_is_zero(&self) -> bool;
    fn f_add(&self, o: &Self) -> Self;
    fn f_sub(&self, o: &Self) -> Self;
    fn f_mul(&self, o: &Self) -> Self;
    fn f_div(&self, o: &Self) -> Self;
    fn f_neg(&self) -> Self;
    /// Rough size used to pick light pivots.
    fn f_weight(&self) -> usize {
        0
    }
}

impl Field for Q {
    fn f_zero() -> Self {
        Q::zero()
    }
    fn f_one() -> Self {
        Q::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_div(&self, o: &Self) -> Self {
        self / o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

impl Field for RatFunc {
    fn f_zero() -> Self {
        RatFunc::zero()
    }
    fn f_one() -> Self {
        RatFunc::one()
    }
    fn f_is_zero(&self) -> bool {
        self.is_zero()
    }
    fn f_add(&self, o: &Self) -> Self {
        self + o
    }
    fn f_sub(&self, o: &Self) -> Self {
        self - o
    }
    fn f_mul(&self, o: &Self) -> Self {
        self * o
    }
    fn f_div(&self, o: &Self) -> Self {
        self / o
    }
    fn f_neg(&self) -> Self {
        -self
    }
    fn f_weight(&self) -> usize {
        self.num().degree().unwrap_or(0) + self.den().degree().unwrap_or(0)
    }
}

/// Outcome of solving `M·v = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution<F> {
    Inconsistent,
    Solved { particular: Vec<F>, nullspace: Vec<Vec<F>> },
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<F: Field>(m: &mut [Vec<F>], ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let best = (r..nrows)
            .filter(|&i| !m[i][c].f_is_zero())
            .min_by_key(|&i| m[i][c].f_weight());
        let Some(p) = best else { continue };
        m.swap(r, p);
        let inv = F::f_one().f_div(&m[r][c]);
        for j in c..m[r].len() {
            if !m[r][j].f_is_zero() {
                m[r][j] = m[r][j].f_mul(&inv);
            }
        }
        for i in 0..nrows {
            if i == r || m[i][c].f_is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..m[i].len() {
                if !m[r][j].f_is_zero() {
                    let t = m[r][j].f_mul(&f);
                    m[i][j] = m[i][j].f_sub(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a matrix.
pub fn rank<F: Field>(m: &[Vec<F>]) -> usize {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut a = m.to_vec();
    rref(&mut a, ncols).len()
}

/// Basis of the right nullspace `{v : M v = 0}`.
pub fn nullspace<F: Field>(m: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut a = m.to_vec();
    let piv = rref(&mut a, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![F::f_zero(); ncols];
            v[fc] = F::f_one();
            for (r, &pc) in piv.iter().enumerate() {
                v[pc] = a[r][fc].f_neg();
            }
            v
        })
        .collect()
}

/// Right nullspace of an integer matrix by fraction-free (Bareiss)
/// elimination followed by rational back-substitution.
pub fn integer_nullspace(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<Q>> {
    let mut a = m.to_vec();
    let nrows = a.len();
    let mut pivots = vec![];
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].bits())
        else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let piv_row = &top[r];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c..ncols {
                let v = &row[j] * &piv_row[c] - &f * &piv_row[j];
                row[j] = if prev.is_one() { v } else { v / &prev };
            }
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Q::zero(); ncols];
            v[fc] = Q::one();
            for (ri, &pc) in pivots.iter().enumerate().rev() {
                let s: Q = (pc + 1..ncols)
                    .filter(|&j| !a[ri][j].is_zero() && !v[j].is_zero())
                    .map(|j| Q::from_integer(a[ri][j].clone()) * &v[j])
                    .sum();
                v[pc] = -s / Q::from_integer(a[ri][pc].clone());
            }
            v
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pivot columns and normalized kernel basis of a matrix over `Z/p`.
fn nullspace_mod(m: &[Vec<u64>], ncols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let mut a = m.to_vec();
    let nrows = a.len();
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        let inv = pow_mod(a[r][c], p - 2, p);
        for v in &mut a[r][c..ncols] {
            *v = mul_mod(*v, inv, p);
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (v, &pv) in row[c..ncols].iter_mut().zip(&pivot_row[c..ncols]) {
                let t = mul_mod(f, pv, p);
                *v = (*v + p - t) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u64; ncols];
            v[fc] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[ri][fc]) % p;
            }
            v
        })
        .collect();
    (pivots, basis)
}

/// `a/b ≡ u (mod m)` with `|a|, b ≤ sqrt(m/2)`, if it exists.
fn rational_reconstruct(u: &BigInt, m: &BigInt) -> Option<Q> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), u.clone());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let qt = &r0 / &r1;
        let r2 = &r0 - &qt * &r1;
        let t2 = &t0 - &qt * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound.magnitude() {
        return None;
    }
    Some(Q::new(r1, t1))
}

/// Right nullspace of an integer matrix computed modulo a sequence of 62-bit
/// primes, lifted by Chinese remaindering and rational reconstruction, and
/// accepted only once the lifted basis annihilates the matrix exactly.
pub fn modular_nullspace(m: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<Q>> {
    let mut modulus = BigInt::one();
    let mut residues: Vec<Vec<BigInt>> = vec![];
    let mut best_pivots: Option<Vec<usize>> = None;
    let mut prime = 1u64 << 62;
    let mut used = 0;
    loop {
        prime -= 1;
        while !is_prime_u64(prime) {
            prime -= 1;
        }
        let pb = BigInt::from(prime);
        let reduced: Vec<Vec<u64>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        let r = x % &pb;
                        let r = if r < BigInt::zero() { r + &pb } else { r };
                        u64::try_from(r).unwrap()
                    })
                    .collect()
            })
            .collect();
        let (piv, basis) = nullspace_mod(&reduced, ncols, prime);
        match &best_pivots {
            // a prime where the rank drops spuriously yields extra pivots-free columns
            Some(bp) if piv.len() < bp.len() || (piv.len() == bp.len() && piv != *bp) => continue,
            Some(bp) if piv.len() > bp.len() => {
                best_pivots = Some(piv);
                modulus = BigInt::one();
                residues = vec![];
            }
            None => best_pivots = Some(piv),
            _ => {}
        }
        if basis.is_empty() {
            return vec![];
        }
        let flat: Vec<u64> = basis.iter().flatten().copied().collect();
        if residues.is_empty() {
            residues = vec![flat.iter().map(|&x| BigInt::from(x)).collect()];
            modulus = pb.clone();
        } else {
            // x ≡ r (mod M), x ≡ a (mod p)
            let minv = pow_mod(u64::try_from(&modulus % &pb).unwrap(), prime - 2, prime);
            for (r, &a) in residues[0].iter_mut().zip(&flat) {
                let rm = u64::try_from(&*r % &pb).unwrap();
                let k = mul_mod((a + prime - rm) % prime, minv, prime);
                *r += &modulus * BigInt::from(k);
            }
            modulus *= &pb;
        }
        used += 1;
        if used % 2 != 0 {
            continue;
        }
        let lifted: Option<Vec<Q>> = residues[0].iter().map(|r| rational_reconstruct(r, &modulus)).collect();
        let Some(lifted) = lifted else { continue };
        let dim = basis.len();
        let vecs: Vec<Vec<Q>> = lifted.chunks(ncols).map(|c| c.to_vec()).collect();
        debug_assert_eq!(vecs.len(), dim);
        let exact = vecs.iter().all(|v| {
            m.iter().all(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| Q::from_integer(a.clone()) * b)
                    .sum::<Q>()
                    .is_zero()
            })
        });
        if exact {
            return vecs;
        }
    }
}

/// Solve `M v = b`, reporting inconsistency as a value.
pub fn solve<F: Field>(m: &[Vec<F>], b: &[F]) -> Solution<F> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<F>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut a, ncols + 1);
    if piv.last() == Some(&ncols) {
        return Solution::Inconsistent;
    }
    let mut particular = vec![F::f_zero(); ncols];
    for (r, &pc) in piv.iter().enumerate() {
        particular[pc] = a[r][ncols].clone();
    }
    let nullspace = nullspace(m, ncols);
    Solution::Solved { particular, nullspace }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn qm(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
    }

    #[test]
    fn identity_solves_to_rhs() {
        let m = qm(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        let b = vec![q(3), q(-1), q(7)];
        match solve(&m, &b) {
            Solution::Solved { particular, nullspace } => {
                assert_eq!(particular, b);
                assert!(nullspace.is_empty());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn rank_one_has_two_dim_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let s: Q = row.iter().zip(v).map(|(a, b)| a * b).sum();
                assert!(s.is_zero());
            }
        }
        assert_eq!(solve(&m, &[q(1), q(3)]), Solution::Inconsistent);
    }

    #[test]
    fn integer_kernel_matches_rational() {
        let rows: [[i64; 4]; 3] = [[2, -4, 6, 1], [1, 3, -2, 5], [3, -1, 4, 7]];
        let m: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let ns = integer_nullspace(&m, 4);
        assert_eq!(ns.len(), 1);
        for row in &rows {
            let s: Q = row.iter().zip(&ns[0]).map(|(a, b)| q(*a) * b).sum();
            assert!(s.is_zero());
        }
        let qmat: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        assert_eq!(nullspace(&qmat, 4), ns);
        assert_eq!(modular_nullspace(&m, 4), ns);
        let big: Vec<Vec<BigInt>> = vec![vec![
            BigInt::from(3).pow(200u32),
            BigInt::from(-7).pow(90u32),
            BigInt::from(11),
        ]];
        let ns = modular_nullspace(&big, 3);
        assert_eq!(ns.len(), 2);
        assert_eq!(integer_nullspace(&big, 3), ns);
    }

    #[test]
    fn rank_over_function_field() {
        let x = RatFunc::x();
        let one = RatFunc::one();
        let m = vec![vec![x.clone(), one.clone()], vec![&x * &x, x.clone()]];
        assert_eq!(rank(&m), 1);
        let m2 = vec![vec![x.clone(), one.clone()], vec![one, x]];
        assert_eq!(rank(&m2), 2);
    }
}
