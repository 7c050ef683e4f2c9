//! Hypertree enumeration and the exact hypertree measure.
//!
//! For a face set `S` of size `C(n-1,2)`, the minor of `d2` on the rows of
//! edges avoiding vertex 1 has `|det| = |H_1(S, Z)|` when `H_1` is finite and
//! vanishes otherwise. Summing squares over `S` inside a face set `Y` is a
//! single Gram determinant (Cauchy-Binet).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::TwoComplex;
use crate::error::{Error, Result};
use crate::homology::{integer_determinant, rank_mod_p, smith_normal_form, torsion_order, IntMatrix};
use crate::simplex::{self, binomial, edge_index, num_edges, triangle_edges};

/// Largest `n` for which all `C(C(n,3), C(n-1,2))` face sets are scanned.
pub const MAX_ENUMERATION_N: usize = 6;

/// Exceeds `3^{n^2/4}` for `n <= 6`, so rank modulo it equals rank over `Q`
/// for every candidate.
const FILTER_PRIME: u64 = 1_000_000_007;

#[derive(Debug, Clone, PartialEq)]
pub struct Hypertree {
    pub complex: TwoComplex,
    /// `|H_1(S, Z)|`.
    pub torsion: BigInt,
}

impl Hypertree {
    /// `|H_1|^2 / n^{C(n-2,2)}`.
    pub fn probability(&self) -> f64 {
        let n = self.complex.n();
        let sq = (&self.torsion * &self.torsion).to_f64().unwrap_or(f64::INFINITY);
        sq / (n as f64).powi(binomial(n - 2, 2) as i32)
    }
}

/// `d2` of the full 2-skeleton, all triangles as columns.
fn full_d2(n: usize) -> IntMatrix {
    let tris = simplex::triangles(n);
    let mut d = IntMatrix::zeros(num_edges(n), tris.len());
    for (c, &t) in tris.iter().enumerate() {
        let [uv, uw, vw] = triangle_edges(t);
        d.set(edge_index(n, uv.0, uv.1), c, 1);
        d.set(edge_index(n, uw.0, uw.1), c, -1);
        d.set(edge_index(n, vw.0, vw.1), c, 1);
    }
    d
}

fn combinations(total: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(total, k));
    let mut idx: Vec<usize> = (0..k).collect();
    if k > total {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == total - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All hypertrees on `[n]` with `|H_1|`, in lexicographic order of face
/// index sets. Candidates are filtered by rank modulo a large prime and the
/// torsion is read off the Smith normal form.
pub fn enumerate_hypertrees(n: usize) -> Result<Vec<Hypertree>> {
    if !(3..=MAX_ENUMERATION_N).contains(&n) {
        return Err(Error::SizeOutOfRange {
            what: "hypertree enumeration",
            n,
            min: 3,
            max: MAX_ENUMERATION_N,
        });
    }
    let d2 = full_d2(n);
    let r = binomial(n - 1, 2);
    let found: Vec<Option<Hypertree>> = combinations(d2.cols(), r)
        .into_par_iter()
        .map(|set| {
            let m = d2.select_columns(&set);
            if rank_mod_p(&m, FILTER_PRIME).expect("prime") < r {
                return None;
            }
            let divisors = smith_normal_form(&m);
            Some(Hypertree {
                complex: TwoComplex::from_indices(n, &set),
                torsion: torsion_order(&divisors),
            })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Rows of `d2` for the edges not containing vertex 1, restricted to the
/// faces of `y`.
fn reduced_boundary(y: &TwoComplex) -> Vec<Vec<BigInt>> {
    let n = y.n();
    let mut rows = vec![vec![BigInt::zero(); y.face_count()]; binomial(n - 1, 2)];
    // edges {u, v} with 2 <= u < v are exactly the edges with index >= n - 1
    let offset = n - 1;
    for (c, &t) in y.triangles().iter().enumerate() {
        let [uv, uw, vw] = triangle_edges(t);
        for ((a, b), s) in [(uv, 1), (uw, -1), (vw, 1)] {
            if a != 1 {
                rows[edge_index(n, a, b) - offset][c] = BigInt::from(s);
            }
        }
    }
    rows
}

/// `|det|` of the reduced boundary minor of a face set of size `C(n-1,2)`.
pub fn reduced_minor(s: &TwoComplex) -> Result<BigInt> {
    let r = binomial(s.n() - 1, 2);
    if s.face_count() != r {
        return Err(Error::Dimension(format!(
            "{} faces, a hypertree has {r}",
            s.face_count()
        )));
    }
    let det = integer_determinant(reduced_boundary(s));
    Ok(if det < BigInt::zero() { -det } else { det })
}

/// `sum_{S subset Y hypertree} |H_1(S)|^2 = det(M_Y M_Y^T)` with `M_Y` the
/// reduced boundary on the faces of `Y`.
pub fn hypertree_weight_within(y: &TwoComplex) -> BigInt {
    let m = reduced_boundary(y);
    let r = m.len();
    let gram: Vec<Vec<BigInt>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    m[i].iter()
                        .zip(&m[j])
                        .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect()
        })
        .collect();
    integer_determinant(gram)
}

/// Exact `log P(T_n subset Y) = log(weight) - C(n-2,2) log n`; `-inf` when
/// no hypertree fits inside `Y`.
pub fn log_avoidance_exact(y: &TwoComplex) -> f64 {
    let w = hypertree_weight_within(y);
    if w.is_zero() {
        return f64::NEG_INFINITY;
    }
    let n = y.n();
    big_ln(&w) - binomial(n - 2, 2) as f64 * (n as f64).ln()
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("finite").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Right side of `log P(T_n(2) subset Y) <= (n-2) log n + (1 - 2/n) sum_tau log(t_Y(tau)/n)`;
/// `-inf` when some edge lies in no face of `Y`.
pub fn upperb_bound(n: usize, y: &TwoComplex) -> f64 {
    let degrees = y.edge_degrees();
    if degrees.contains(&0) {
        return f64::NEG_INFINITY;
    }
    let nf = n as f64;
    let sum: f64 = degrees.iter().map(|&t| (t as f64 / nf).ln()).sum();
    (nf - 2.0) * nf.ln() + (1.0 - 2.0 / nf) * sum
}

/// `n^{C(n-2,2)}`.
pub fn kalai_total(n: usize) -> BigInt {
    BigInt::from(n).pow(binomial(n - 2, 2) as u32)
}

/// `sum |H_1|^2` over a list of hypertrees.
pub fn kalai_sum(trees: &[Hypertree]) -> BigInt {
    trees.iter().fold(BigInt::zero(), |acc, t| acc + &t.torsion * &t.torsion)
}

/// Largest `|det K_S - P(S)|` over all `C(n-1,2)`-sets of faces, where
/// `P(S)` is the hypertree probability on hypertrees and zero elsewhere.
pub fn kernel_certificate(kernel: &super::ProjectionKernel, trees: &[Hypertree]) -> f64 {
    let n = kernel.n();
    let r = binomial(n - 1, 2);
    let mut law = std::collections::HashMap::new();
    for t in trees {
        law.insert(t.complex.indices(), t.probability());
    }
    combinations(kernel.ground_size(), r)
        .into_par_iter()
        .map(|set| {
            let expect = law.get(&set).copied().unwrap_or(0.0);
            (kernel.principal_minor(&set) - expect).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// `sum_S P(S)`; one for a complete enumeration.
pub fn total_probability(trees: &[Hypertree]) -> f64 {
    trees.iter().map(Hypertree::probability).sum()
}

impl Hypertree {
    pub fn is_trivial_homology(&self) -> bool {
        self.torsion.is_one()
    }
}
