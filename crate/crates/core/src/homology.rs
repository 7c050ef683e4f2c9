//! Exact linear algebra over `F_p`, `Z/p^a` and `Z` for complexes with
//! complete 1-skeleton.
//!
//! Conventions: `d1` is the `V x E` matrix of the boundary `C_1 -> C_0`,
//! `d2` the `E x F` matrix of `C_2 -> C_1` restricted to the faces of the
//! complex, and `delta1 = d2^T` acts on cochains. Since the 1-skeleton is
//! complete, `dim ker d1 = C(n,2) - (n-1)` over every field and the torsion of
//! `H_1(X, Z)` is the torsion of `coker d2`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::TwoComplex;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::simplex::{edge_index, num_edges, triangle_edges};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn identity(k: usize) -> Self {
        let mut m = Self::zeros(k, k);
        for i in 0..k {
            m.set(i, i, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(t, j);
                }
            }
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Columns picked by index, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (c, &j) in cols.iter().enumerate() {
                out.set(i, c, self.get(i, j));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), self.cols);
        for (r, &i) in rows.iter().enumerate() {
            out.data[r * self.cols..(r + 1) * self.cols].copy_from_slice(self.row(i));
        }
        out
    }
}

/// `d1` (vertices x edges) and `d2` (edges x faces) of a complex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryMatrices {
    pub n: usize,
    pub d1: IntMatrix,
    pub d2: IntMatrix,
}

impl BoundaryMatrices {
    /// `d2` column of `[u,v,w]`: `+1` at `uv`, `-1` at `uw`, `+1` at `vw`.
    /// `d1` column of `uv`: `-1` at `u`, `+1` at `v`.
    pub fn of(x: &TwoComplex) -> Self {
        let n = x.n();
        let e = num_edges(n);
        let mut d1 = IntMatrix::zeros(n, e);
        for u in 1..=n {
            for v in u + 1..=n {
                let c = edge_index(n, u, v);
                d1.set(u - 1, c, -1);
                d1.set(v - 1, c, 1);
            }
        }
        BoundaryMatrices {
            n,
            d1,
            d2: d2_matrix(x),
        }
    }

    pub fn composition_vanishes(&self) -> bool {
        self.d1.mul(&self.d2).map(|m| m.is_zero()).unwrap_or(false)
    }
}

fn d2_matrix(x: &TwoComplex) -> IntMatrix {
    let n = x.n();
    let mut d2 = IntMatrix::zeros(num_edges(n), x.face_count());
    for (c, &t) in x.triangles().iter().enumerate() {
        let [uv, uw, vw] = triangle_edges(t);
        d2.set(edge_index(n, uv.0, uv.1), c, 1);
        d2.set(edge_index(n, uw.0, uw.1), c, -1);
        d2.set(edge_index(n, vw.0, vw.1), c, 1);
    }
    d2
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn rank_gf2(m: &IntMatrix) -> usize {
    let words = m.cols.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            let mut r = vec![0u64; words];
            for (j, &x) in m.row(i).iter().enumerate() {
                if x.rem_euclid(2) == 1 {
                    r[j / 64] |= 1 << (j % 64);
                }
            }
            r
        })
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][w] & bit != 0) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot = &head[rank];
        for r in tail.iter_mut() {
            if r[w] & bit != 0 {
                for (a, b) in r.iter_mut().zip(pivot) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn rank_gfp(m: &IntMatrix, p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| m.row(i).iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let mut rank = 0;
    for col in 0..m.cols {
        let Some(piv) = (rank..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][col], p - 2, p);
        for x in a[rank].iter_mut() {
            *x = ((*x as u128 * inv as u128) % p as u128) as u64;
        }
        let (head, tail) = a.split_at_mut(rank + 1);
        let prow = &head[rank];
        for r in tail.iter_mut() {
            let f = r[col];
            if f == 0 {
                continue;
            }
            for j in col..prow.len() {
                if prow[j] != 0 {
                    let sub = (f as u128 * prow[j] as u128 % p as u128) as u64;
                    r[j] = (r[j] + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over `F_p` by Gaussian elimination; rows are bit-packed for `p = 2`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) || p > i64::MAX as u64 {
        return Err(Error::NotPrime(p));
    }
    Ok(if p == 2 { rank_gf2(m) } else { rank_gfp(m, p) })
}

/// `dim H_1(X, F_p) = C(n,2) - (n-1) - rank_p(d2)`.
pub fn dim_h1_mod_p(x: &TwoComplex, p: u64) -> Result<usize> {
    let n = x.n();
    let cycles = num_edges(n) + 1 - n;
    Ok(cycles - rank_mod_p(&d2_matrix(x), p)?)
}

/// `dim Z^1(X, F_p) = C(n,2) - rank_p(d2)`.
pub fn dim_z1_mod_p(x: &TwoComplex, p: u64) -> Result<usize> {
    Ok(num_edges(x.n()) - rank_mod_p(&d2_matrix(x), p)?)
}

trait SnfInt: Clone + Integer + Signed + CheckedMul + CheckedSub {}
impl SnfInt for i128 {}
impl SnfInt for BigInt {}

/// Diagonalizes by unimodular row and column operations, pivoting on the
/// entry of least absolute value. `None` on overflow.
fn diagonalize<I: SnfInt>(mut a: Vec<Vec<I>>, cols: usize) -> Option<Vec<I>> {
    let rows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // least nonzero |entry| in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero()
                    && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                    if x.is_one() || (-x.clone()).is_one() {
                        break;
                    }
                }
            }
            if let Some((bi, bj)) = best {
                if a[bi][bj].abs().is_one() {
                    break;
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                let (head, tail) = a.split_at_mut(i);
                let prow = &head[t];
                let row = &mut tail[0];
                for j in t..cols {
                    if prow[j].is_zero() {
                        continue;
                    }
                    row[j] = row[j].checked_sub(&q.checked_mul(&prow[j])?)?;
                }
                dirty |= !row[t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    if row[t].is_zero() {
                        continue;
                    }
                    row[j] = row[j].checked_sub(&q.checked_mul(&row[t])?)?;
                }
                dirty |= !a[t][j].is_zero();
            }
            if !dirty {
                break;
            }
            // move the smallest remainder in row/column t to the pivot
            let mut best = (t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.1 == t {
                a.swap(t, best.0);
            } else {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    Some(diag)
}

/// Replaces a diagonal by the divisor chain `d_1 | d_2 | ...` with the same
/// product structure.
fn normalize_chain(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = &d[i] / &g * &d[j];
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

/// Nonzero elementary divisors `d_1 | d_2 | ... | d_r` of an integer matrix;
/// `r` is its rank over `Q`.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigInt> {
    let small: Vec<Vec<i128>> = (0..m.rows)
        .map(|i| m.row(i).iter().map(|&x| x as i128).collect())
        .collect();
    let diag = match diagonalize(small, m.cols) {
        Some(d) => d.into_iter().map(BigInt::from).collect(),
        None => {
            let big: Vec<Vec<BigInt>> = (0..m.rows)
                .map(|i| m.row(i).iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            diagonalize(big, m.cols).expect("arbitrary precision cannot overflow")
        }
    };
    normalize_chain(diag)
}

/// Product of the elementary divisors greater than one.
pub fn torsion_order(divisors: &[BigInt]) -> BigInt {
    divisors.iter().fold(BigInt::one(), |acc, d| acc * d)
}

fn factor(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            let mut a = 0;
            while m.is_multiple_of(d) {
                m /= d;
                a += 1;
            }
            out.push((d, a));
        }
        d += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

fn valuation(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// `log_p |ker A|` for `A` acting on `(Z/p^a)^cols`, by elimination over the
/// local ring `Z/p^a` with pivots of least valuation.
fn kernel_exponent_prime_power(m: &IntMatrix, p: u64, a: u32) -> u64 {
    let q = p.pow(a);
    let mut rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| m.row(i).iter().map(|&x| x.rem_euclid(q as i64) as u64).collect())
        .collect();
    let mut live_cols: Vec<usize> = (0..m.cols).collect();
    let mut exponent = 0u64;
    let mut pivots = 0u64;
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for (i, row) in rows.iter().enumerate() {
            for (c, &j) in live_cols.iter().enumerate() {
                if row[j] != 0 {
                    let v = valuation(row[j], p);
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, c, v));
                        if v == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((pi, pc, v)) = best else { break };
        let pj = live_cols[pc];
        let prow = rows.swap_remove(pi);
        let pv = p.pow(v);
        // pivot = p^v u with u a unit mod p^(a-v); scale so the pivot is p^v
        let unit = prow[pj] / pv;
        let modulus = q / pv;
        let inv = mod_inverse(unit % modulus, modulus);
        let prow: Vec<u64> = prow
            .iter()
            .map(|&x| ((x as u128 * inv as u128) % q as u128) as u64)
            .collect();
        for row in rows.iter_mut() {
            if row[pj] == 0 {
                continue;
            }
            let f = row[pj] / pv;
            for &j in &live_cols {
                if prow[j] != 0 {
                    let sub = (f as u128 * prow[j] as u128 % q as u128) as u64;
                    row[j] = (row[j] + q - sub) % q;
                }
            }
        }
        live_cols.swap_remove(pc);
        exponent += v as u64;
        pivots += 1;
    }
    exponent + a as u64 * (m.cols as u64 - pivots)
}

fn mod_inverse(x: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut r0, mut r1) = (m as i128, x as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1, "{x} is not a unit mod {m}");
    t0.rem_euclid(m as i128) as u64
}

/// `|ker(delta1 mod m)|` for a single cyclic factor.
fn count_z1_cyclic(delta: &IntMatrix, m: u64) -> BigUint {
    let mut total = BigUint::one();
    for (p, a) in factor(m) {
        let e = kernel_exponent_prime_power(delta, p, a);
        total *= BigUint::from(p).pow(e as u32);
    }
    total
}

/// `|Z^1(X, G)| = prod_i |ker(delta1 mod m_i)|`, by elimination over each
/// `Z/p^a` dividing the moduli.
pub fn count_z1(x: &TwoComplex, group: &GroupSpec) -> BigUint {
    let delta = d2_matrix(x).transpose();
    group
        .moduli()
        .iter()
        .map(|&m| count_z1_cyclic(&delta, m as u64))
        .product()
}

/// The same count from the elementary divisors `d_j` of `d2`:
/// `prod_i m_i^{E-r} prod_j gcd(m_i, d_j)`.
pub fn count_z1_from_divisors(n: usize, divisors: &[BigInt], group: &GroupSpec) -> BigUint {
    let free = (num_edges(n) - divisors.len()) as u32;
    let mut total = BigUint::one();
    for &m in group.moduli() {
        total *= BigUint::from(m).pow(free);
        let mb = BigInt::from(m);
        for d in divisors {
            total *= mb.gcd(d).to_biguint().expect("gcd is positive");
        }
    }
    total
}

/// Exact counts and invariants of `H_1(X, Z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralHomology {
    pub n: usize,
    /// Nonzero elementary divisors of `d2`.
    pub divisors: Vec<BigInt>,
    /// `dim H_1(X, Q)`.
    pub betti1: usize,
}

impl IntegralHomology {
    pub fn of(x: &TwoComplex) -> Self {
        let divisors = smith_normal_form(&d2_matrix(x));
        let n = x.n();
        let betti1 = num_edges(n) + 1 - n - divisors.len();
        IntegralHomology {
            n,
            divisors,
            betti1,
        }
    }

    pub fn torsion_order(&self) -> BigInt {
        torsion_order(&self.divisors)
    }

    pub fn torsion_divisors(&self) -> Vec<BigInt> {
        self.divisors.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    /// `dim H_1(X, F_p) = dim H_1(X, Q) + #{j : p | d_j}`.
    pub fn dim_h1_mod_p(&self, p: u64) -> usize {
        let pb = BigInt::from(p);
        self.betti1 + self.divisors.iter().filter(|d| d.is_multiple_of(&pb)).count()
    }

    /// `mg(H_1) = sup_p dim H_1(F_p)`. Every prime dividing the smallest
    /// divisor above one divides all later ones, so the supremum is the free
    /// rank plus the number of divisors above one.
    pub fn mg(&self) -> usize {
        self.betti1 + self.divisors.iter().filter(|d| !d.is_one()).count()
    }

    /// `|tors H_1|^4 <= 3^{n^2}`.
    pub fn torsion_bound_holds(&self) -> bool {
        let lhs = self.torsion_order().pow(4u32);
        let rhs = BigInt::from(3).pow((self.n * self.n) as u32);
        lhs <= rhs
    }

    pub fn count_z1(&self, group: &GroupSpec) -> BigUint {
        count_z1_from_divisors(self.n, &self.divisors, group)
    }
}

pub fn mg_h1(x: &TwoComplex) -> usize {
    IntegralHomology::of(x).mg()
}

pub fn torsion_bound_check(x: &TwoComplex) -> bool {
    IntegralHomology::of(x).torsion_bound_holds()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn integer_determinant(rows: Vec<Vec<BigInt>>) -> BigInt {
    let k = rows.len();
    let mut a = rows;
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for t in 0..k {
        if a[t][t].is_zero() {
            let Some(s) = (t + 1..k).find(|&i| !a[i][t].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(t, s);
            sign = -sign;
        }
        for i in t + 1..k {
            for j in t + 1..k {
                let v = &a[i][j] * &a[t][t] - &a[i][t] * &a[t][j];
                a[i][j] = v / &prev;
            }
            a[i][t] = BigInt::zero();
        }
        prev = a[t][t].clone();
    }
    if k == 0 {
        BigInt::one()
    } else {
        sign * &a[k - 1][k - 1]
    }
}

/// `{n, p, dim_z1, dim_h1, betti1, elementary_divisors, torsion_order, mg}`;
/// big integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub n: usize,
    pub faces: usize,
    pub p: Option<u64>,
    pub dim_z1: Option<usize>,
    pub dim_h1: Option<usize>,
    pub betti1: usize,
    /// Only the divisors above one unless the full list was requested.
    pub elementary_divisors: Vec<String>,
    pub torsion_order: String,
    pub mg: usize,
    pub torsion_bound_holds: bool,
}

impl HomologyReport {
    pub fn new(x: &TwoComplex, p: Option<u64>, full_snf: bool) -> Result<Self> {
        let h = IntegralHomology::of(x);
        let (dim_z1, dim_h1) = match p {
            Some(p) => (Some(dim_z1_mod_p(x, p)?), Some(dim_h1_mod_p(x, p)?)),
            None => (None, None),
        };
        let shown: Vec<String> = h
            .divisors
            .iter()
            .filter(|d| full_snf || !d.is_one())
            .map(|d| d.to_string())
            .collect();
        Ok(HomologyReport {
            n: x.n(),
            faces: x.face_count(),
            p,
            dim_z1,
            dim_h1,
            betti1: h.betti1,
            elementary_divisors: shown,
            torsion_order: h.torsion_order().to_string(),
            mg: h.mg(),
            torsion_bound_holds: h.torsion_bound_holds(),
        })
    }
}

/// The 6-vertex triangulation of the real projective plane.
pub fn rp2_six() -> TwoComplex {
    TwoComplex::new(
        6,
        vec![
            [1, 2, 3],
            [1, 3, 4],
            [1, 4, 5],
            [1, 5, 6],
            [1, 2, 6],
            [2, 3, 5],
            [3, 4, 6],
            [2, 4, 5],
            [3, 5, 6],
            [2, 4, 6],
        ],
    )
    .expect("valid triangulation")
}

/// Small helper for tests and reports: a divisor list as `u64`s.
pub fn divisors_u64(divisors: &[BigInt]) -> Option<Vec<u64>> {
    divisors.iter().map(|d| d.to_u64()).collect()
}
