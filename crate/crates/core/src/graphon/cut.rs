//! Cut norm and cut distance bounds for step kernels.
//!
//! For a step function the supremum over measurable rectangles is attained on
//! unions of parts, so the exact value is a maximum over `2^k` row sets `S`.
//! For a fixed `S` the best column set takes every column whose partial sum
//! has the chosen sign.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::step::{StepCochainGraphon, StepFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest part count handled by the exhaustive scan.
pub const EXACT_CUT_LIMIT: usize = 24;

/// Gray-code runs longer than this recompute column sums from scratch, which
/// bounds float drift.
const RESYNC_INTERVAL: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutMode {
    Exact,
    /// Alternating sign optimization from random starts; a certified lower
    /// bound.
    Heuristic { restarts: usize, seed: u64 },
    /// Exact up to [`EXACT_CUT_LIMIT`] parts, heuristic above.
    Auto { restarts: usize, seed: u64 },
}

impl Default for CutMode {
    fn default() -> Self {
        CutMode::Auto {
            restarts: 64,
            seed: 0,
        }
    }
}

/// Value of `sup_{S,T} |int_{SxT} W|` with a maximizing rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct CutNorm<T> {
    pub value: T,
    /// Row parts of the witness rectangle.
    pub rows: Vec<usize>,
    /// Column parts of the witness rectangle.
    pub cols: Vec<usize>,
    /// Signed integral over the witness rectangle.
    pub signed: T,
    /// False when the value is only a lower bound.
    pub exact: bool,
}

fn weights<T: Scalar>(w: &StepFunction<T>) -> Vec<T> {
    w.block_masses()
}

fn best_cols<T: Scalar>(col: &[T]) -> (T, T) {
    let mut pos = T::zero();
    let mut neg = T::zero();
    for c in col {
        if *c > T::zero() {
            pos = pos + c.clone();
        } else {
            neg = neg - c.clone();
        }
    }
    (pos, neg)
}

fn witness_cols<T: Scalar>(col: &[T], positive: bool) -> Vec<usize> {
    col.iter()
        .enumerate()
        .filter(|(_, c)| {
            if positive {
                **c > T::zero()
            } else {
                **c < T::zero()
            }
        })
        .map(|(j, _)| j)
        .collect()
}

fn col_sums<T: Scalar>(w: &[T], k: usize, mask: u64) -> Vec<T> {
    let mut col = vec![T::zero(); k];
    for i in 0..k {
        if mask >> i & 1 == 1 {
            for j in 0..k {
                col[j] = col[j].clone() + w[i * k + j].clone();
            }
        }
    }
    col
}

/// Best rectangle among row sets `top | gray(l)` for `l` in `0..2^low_bits`.
fn scan_chunk<T: Scalar>(w: &[T], k: usize, low_bits: usize, top: u64) -> (T, u64, bool) {
    let mut mask = top;
    let mut col = col_sums(w, k, mask);
    let (p, n) = best_cols(&col);
    let (mut best, mut best_mask, mut best_pos) = if p >= n { (p, mask, true) } else { (n, mask, false) };
    let total = 1u64 << low_bits;
    for step in 1..total {
        let bit = step.trailing_zeros() as usize;
        mask ^= 1 << bit;
        if !T::EXACT && (step as usize).is_multiple_of(RESYNC_INTERVAL) {
            col = col_sums(w, k, mask);
        } else if mask >> bit & 1 == 1 {
            for j in 0..k {
                col[j] = col[j].clone() + w[bit * k + j].clone();
            }
        } else {
            for j in 0..k {
                col[j] = col[j].clone() - w[bit * k + j].clone();
            }
        }
        let (p, n) = best_cols(&col);
        if p > best {
            best = p;
            best_mask = mask;
            best_pos = true;
        }
        if n > best {
            best = n;
            best_mask = mask;
            best_pos = false;
        }
    }
    (best, best_mask, best_pos)
}

fn exact_cut<T: Scalar>(w: &StepFunction<T>) -> Result<CutNorm<T>> {
    let k = w.parts();
    if k > EXACT_CUT_LIMIT {
        return Err(Error::TooManyParts {
            parts: k,
            limit: EXACT_CUT_LIMIT,
        });
    }
    let wt = weights(w);
    let split = if k >= 14 { 6.min(k) } else { 0 };
    let low_bits = k - split;
    let results: Vec<(T, u64, bool)> = (0..1u64 << split)
        .into_par_iter()
        .map(|top| scan_chunk(&wt, k, low_bits, top << low_bits))
        .collect();
    // ordered reduction keeps the witness independent of scheduling
    let mut best = results[0].clone();
    for r in results.into_iter().skip(1) {
        if r.0 > best.0 {
            best = r;
        }
    }
    let (value, mask, positive) = best;
    let rows: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
    let col = col_sums(&wt, k, mask);
    let cols = witness_cols(&col, positive);
    let signed = rect_integral(&wt, k, &rows, &cols);
    Ok(CutNorm {
        value,
        rows,
        cols,
        signed,
        exact: true,
    })
}

fn rect_integral<T: Scalar>(w: &[T], k: usize, rows: &[usize], cols: &[usize]) -> T {
    let mut acc = T::zero();
    for &i in rows {
        for &j in cols {
            acc = acc + w[i * k + j].clone();
        }
    }
    acc
}

fn heuristic_cut<T: Scalar>(w: &StepFunction<T>, restarts: usize, seed: u64) -> CutNorm<T> {
    let k = w.parts();
    let wt = weights(w);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<CutNorm<T>> = None;
    let mut starts: Vec<Vec<bool>> = Vec::with_capacity(restarts + 2);
    starts.push(vec![true; k]);
    for _ in 0..restarts.max(1) {
        starts.push((0..k).map(|_| rng.gen_bool(0.5)).collect());
    }
    for start in starts {
        for positive in [true, false] {
            let sign = |x: &T| if positive { x.clone() } else { -x.clone() };
            let mut rows = start.clone();
            let mut last = None::<T>;
            loop {
                let col: Vec<T> = (0..k)
                    .map(|j| {
                        (0..k)
                            .filter(|&i| rows[i])
                            .fold(T::zero(), |a, i| a + sign(&wt[i * k + j]))
                    })
                    .collect();
                let cols: Vec<bool> = col.iter().map(|c| *c > T::zero()).collect();
                let row: Vec<T> = (0..k)
                    .map(|i| {
                        (0..k)
                            .filter(|&j| cols[j])
                            .fold(T::zero(), |a, j| a + sign(&wt[i * k + j]))
                    })
                    .collect();
                rows = row.iter().map(|r| *r > T::zero()).collect();
                let value = row
                    .iter()
                    .filter(|r| **r > T::zero())
                    .fold(T::zero(), |a, r| a + r.clone());
                let improved = last.as_ref().is_none_or(|l| value > *l);
                if !improved {
                    break;
                }
                last = Some(value.clone());
                let better = best.as_ref().is_none_or(|b| value > b.value);
                if better {
                    let r: Vec<usize> = (0..k).filter(|&i| rows[i]).collect();
                    let c: Vec<usize> = (0..k).filter(|&j| cols[j]).collect();
                    let signed = rect_integral(&wt, k, &r, &c);
                    best = Some(CutNorm {
                        value,
                        rows: r,
                        cols: c,
                        signed,
                        exact: false,
                    });
                }
            }
        }
    }
    best.unwrap_or(CutNorm {
        value: T::zero(),
        rows: vec![],
        cols: vec![],
        signed: T::zero(),
        exact: false,
    })
}

/// Cut norm of a single slice.
pub fn cut_norm_slice<T: Scalar>(w: &StepFunction<T>, mode: CutMode) -> Result<CutNorm<T>> {
    match mode {
        CutMode::Exact => exact_cut(w),
        CutMode::Heuristic { restarts, seed } => Ok(heuristic_cut(w, restarts, seed)),
        CutMode::Auto { restarts, seed } => {
            if w.parts() <= EXACT_CUT_LIMIT {
                exact_cut(w)
            } else {
                Ok(heuristic_cut(w, restarts, seed))
            }
        }
    }
}

/// `||W^G||_cut = sum_g ||W^g||_cut`, exact.
pub fn cut_norm<T: Scalar>(w: &StepCochainGraphon<T>) -> Result<T> {
    cut_norm_with(w, CutMode::Exact).map(|(v, _)| v)
}

/// Cut norm with the per-element witnesses. The flag is false if any slice
/// was only bounded from below.
pub fn cut_norm_with<T: Scalar>(
    w: &StepCochainGraphon<T>,
    mode: CutMode,
) -> Result<(T, bool)> {
    let mut total = T::zero();
    let mut exact = true;
    for g in 0..w.group().order() {
        let c = cut_norm_slice(&w.slice(g), mode)?;
        exact &= c.exact;
        total = total + c.value;
    }
    Ok((total, exact))
}

/// Bounds on `delta_cut(V, W)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutDistanceBounds {
    pub lower: f64,
    pub upper: f64,
    /// Whether the alignment search for the upper bound was exhaustive.
    pub exhaustive: bool,
    pub alignments_tried: usize,
}

fn is_equal_parts<T: Scalar>(m: &[T]) -> bool {
    let first = &m[0];
    m.iter().all(|x| T::near(x, first))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest equal-part count searched exhaustively over all `k!` alignments.
pub const EXHAUSTIVE_ALIGN_LIMIT: usize = 8;

/// Largest equal-part grid used for alignment search.
const ALIGN_GRID_LIMIT: usize = 24;

fn distance_for(
    v: &StepCochainGraphon<f64>,
    w: &StepCochainGraphon<f64>,
    perm: &[usize],
    mode: CutMode,
) -> Result<f64> {
    let d = v.sub(&w.permute_parts(perm))?;
    Ok(cut_norm_with(&d, mode)?.0)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Upper bound: minimum of `||V - W^sigma||_cut` over part alignments
/// `sigma` (all of them for at most 8 equal parts; random starts plus swap
/// local search otherwise). Lower bound: per group element, the largest of
/// `|int V^g - int W^g|` and half the L1 transport distance between the
/// row-degree (and column-degree) distributions, summed over `g`. Both are
/// invariant under measure-preserving relabeling, so `lower <= delta <= upper`.
pub fn cut_distance_bounds<T: Scalar>(
    v: &StepCochainGraphon<T>,
    w: &StepCochainGraphon<T>,
    seed: u64,
) -> Result<CutDistanceBounds> {
    v.as_function().check_group(w.group())?;
    let v = v.to_f64();
    let w = w.to_f64();
    let lower = invariant_lower_bound(&v, &w);
    let mode = CutMode::Auto { restarts: 32, seed };

    // common equal-part grid on which part permutations are measure preserving
    let grid = if is_equal_parts(v.measures()) && is_equal_parts(w.measures()) {
        let (a, b) = (v.parts(), w.parts());
        let l = a / gcd(a, b) * b;
        (l <= ALIGN_GRID_LIMIT).then_some(l)
    } else {
        None
    };
    let Some(l) = grid else {
        let upper = distance_for(&v, &w, &(0..w.parts()).collect::<Vec<_>>(), mode)?;
        return Ok(CutDistanceBounds {
            lower: lower.min(upper),
            upper,
            exhaustive: false,
            alignments_tried: 1,
        });
    };
    let uniform = super::step::equal_parts::<f64>(l);
    let lift_to = |x: &StepCochainGraphon<f64>| {
        let per = l / x.parts();
        let map: Vec<usize> = (0..l).map(|i| i / per).collect();
        x.lift(&map, &uniform)
    };
    let (vl, wl) = (lift_to(&v), lift_to(&w));
    let mut tried = 0usize;
    let mut best = f64::INFINITY;
    let exhaustive = l <= EXHAUSTIVE_ALIGN_LIMIT;
    if exhaustive {
        let mut perm: Vec<usize> = (0..l).collect();
        loop {
            best = best.min(distance_for(&vl, &wl, &perm, mode)?);
            tried += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        for restart in 0..8 {
            let mut perm: Vec<usize> = (0..l).collect();
            if restart > 0 {
                perm.shuffle(&mut rng);
            }
            let mut cur = distance_for(&vl, &wl, &perm, mode)?;
            tried += 1;
            loop {
                let mut improved = false;
                for a in 0..l {
                    for b in a + 1..l {
                        perm.swap(a, b);
                        let d = distance_for(&vl, &wl, &perm, mode)?;
                        tried += 1;
                        if d < cur - 1e-15 {
                            cur = d;
                            improved = true;
                        } else {
                            perm.swap(a, b);
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
            best = best.min(cur);
        }
    }
    Ok(CutDistanceBounds {
        lower: lower.min(best),
        upper: best,
        exhaustive,
        alignments_tried: tried,
    })
}

/// `int |F^{-1} - G^{-1}|` for two step quantile functions given as
/// `(value, measure)` lists.
fn quantile_l1(mut a: Vec<(f64, f64)>, mut b: Vec<(f64, f64)>) -> f64 {
    let cmp = |x: &(f64, f64), y: &(f64, f64)| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal);
    a.sort_by(cmp);
    b.sort_by(cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let (mut ra, mut rb) = (a[0].1, b[0].1);
    let mut acc = 0.0;
    while i < a.len() && j < b.len() {
        let step = ra.min(rb);
        acc += step * (a[i].0 - b[j].0).abs();
        ra -= step;
        rb -= step;
        if ra <= 1e-15 {
            i += 1;
            if i < a.len() {
                ra = a[i].1;
            }
        }
        if rb <= 1e-15 {
            j += 1;
            if j < b.len() {
                rb = b[j].1;
            }
        }
    }
    acc
}

fn degrees(s: &StepFunction<f64>, rows: bool) -> Vec<(f64, f64)> {
    let k = s.parts();
    let m = s.measures();
    (0..k)
        .map(|i| {
            let d: f64 = (0..k)
                .map(|j| if rows { s.get(i, j) * m[j] } else { s.get(j, i) * m[j] })
                .sum();
            (d, m[i])
        })
        .collect()
}

fn invariant_lower_bound(v: &StepCochainGraphon<f64>, w: &StepCochainGraphon<f64>) -> f64 {
    (0..v.group().order())
        .map(|g| {
            let (vs, ws) = (v.slice(g), w.slice(g));
            let mass = (vs.integral() - ws.integral()).abs();
            let row = 0.5 * quantile_l1(degrees(&vs, true), degrees(&ws, true));
            let col = 0.5 * quantile_l1(degrees(&vs, false), degrees(&ws, false));
            mass.max(row).max(col)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use num_rational::BigRational;
    use proptest::prelude::*;

    /// Independent oracle: every pair of subsets, no column shortcut.
    fn brute_cut(w: &StepFunction<f64>) -> f64 {
        let k = w.parts();
        let m = w.measures();
        let mut best: f64 = 0.0;
        for s in 0u32..1 << k {
            for t in 0u32..1 << k {
                let mut acc = 0.0;
                for i in 0..k {
                    for j in 0..k {
                        if s >> i & 1 == 1 && t >> j & 1 == 1 {
                            acc += m[i] * m[j] * w.get(i, j);
                        }
                    }
                }
                best = best.max(acc.abs());
            }
        }
        best
    }

    #[test]
    fn checkerboard_is_one_quarter() {
        let w = StepFunction::new(vec![0.5, 0.5], vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(brute_cut(&w), 0.25);
        let c = cut_norm_slice(&w, CutMode::Exact).unwrap();
        assert_eq!(c.value, 0.25);
        assert_eq!(c.signed.abs(), 0.25);
    }

    #[test]
    fn zero_and_constant() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let zero = StepCochainGraphon::<f64>::zero(z2.clone(), vec![0.25; 4]).unwrap();
        assert_eq!(cut_norm(&zero).unwrap(), 0.0);
        let z3 = GroupSpec::cyclic(3).unwrap();
        let c = StepCochainGraphon::<f64>::constant(z3, &[0.5, 0.25, 0.25]).unwrap();
        assert!((cut_norm(&c).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn too_many_parts_needs_heuristic() {
        let k = EXACT_CUT_LIMIT + 1;
        let w = StepFunction::<f64>::zeros(super::super::step::equal_parts(k)).unwrap();
        assert!(matches!(
            cut_norm_slice(&w, CutMode::Exact),
            Err(Error::TooManyParts { .. })
        ));
        assert!(cut_norm_slice(&w, CutMode::default()).is_ok());
    }

    #[test]
    fn exact_rational_matches_float() {
        let vals: Vec<BigRational> = (0..9).map(|i| BigRational::ratio((i * 5 % 7) - 3, 4)).collect();
        let w = StepFunction::new(
            vec![BigRational::ratio(1, 2), BigRational::ratio(1, 3), BigRational::ratio(1, 6)],
            vals,
        )
        .unwrap();
        let exact = cut_norm_slice(&w, CutMode::Exact).unwrap().value;
        let float = brute_cut(&w.to_f64());
        assert!((exact.to_f64_lossy() - float).abs() < 1e-14);
    }

    #[test]
    fn gray_code_chunks_agree_with_brute_force_at_k14() {
        let k = 14;
        let vals: Vec<f64> = (0..k * k).map(|i| ((i * 37 % 23) as f64 - 11.0) / 11.0).collect();
        let w = StepFunction::from_matrix(k, vals).unwrap();
        let wt = w.block_masses();
        let (v, _, _) = scan_chunk(&wt, k, k, 0);
        let chunked = cut_norm_slice(&w, CutMode::Exact).unwrap().value;
        assert!((v - chunked).abs() < 1e-12);
    }

    #[test]
    fn heuristic_is_a_lower_bound() {
        let vals: Vec<f64> = (0..100).map(|i| ((i * 13 % 17) as f64 - 8.0) / 8.0).collect();
        let w = StepFunction::from_matrix(10, vals).unwrap();
        let exact = cut_norm_slice(&w, CutMode::Exact).unwrap().value;
        let h = cut_norm_slice(&w, CutMode::Heuristic { restarts: 16, seed: 1 }).unwrap();
        assert!(!h.exact);
        assert!(h.value <= exact + 1e-12);
        assert!(h.value > 0.5 * exact);
    }

    fn arb_step(max_k: usize) -> impl Strategy<Value = StepFunction<f64>> {
        (1..=max_k).prop_flat_map(|k| {
            (
                proptest::collection::vec(0.1f64..1.0, k),
                proptest::collection::vec(-1.0f64..1.0, k * k),
            )
                .prop_map(|(raw, vals)| {
                    let s: f64 = raw.iter().sum();
                    let m: Vec<f64> = raw.iter().map(|x| x / s).collect();
                    StepFunction::new(m, vals).unwrap()
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn matches_pairwise_subset_oracle(w in arb_step(5)) {
            let c = cut_norm_slice(&w, CutMode::Exact).unwrap();
            prop_assert!((c.value - brute_cut(&w)).abs() < 1e-12);
            prop_assert!((c.signed.abs() - c.value).abs() < 1e-12);
        }

        #[test]
        fn is_a_norm(a in arb_step(4), b in arb_step(4), c in -3.0f64..3.0) {
            let n = |w: &StepFunction<f64>| cut_norm_slice(w, CutMode::Exact).unwrap().value;
            prop_assert!(n(&a.add(&b)) <= n(&a) + n(&b) + 1e-12);
            prop_assert!((n(&a.scale(&c)) - c.abs() * n(&a)).abs() < 1e-12);
        }

        #[test]
        fn bounded_by_l1_and_sup(w in arb_step(5)) {
            let c = cut_norm_slice(&w, CutMode::Exact).unwrap().value;
            prop_assert!(c <= w.l1_norm() + 1e-12);
            prop_assert!(w.l1_norm() <= w.sup_norm() + 1e-12);
        }
    }

    #[test]
    fn distance_bounds_examples() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let v = StepCochainGraphon::from_fn(z2.clone(), vec![0.25; 4], |i, j, g| {
            let x = ((i * 3 + j * 3) % 4) as f64 / 4.0;
            if g == 0 { x } else { 1.0 - x }
        })
        .unwrap();
        let same = cut_distance_bounds(&v, &v, 0).unwrap();
        assert_eq!((same.lower, same.upper), (0.0, 0.0));
        let perm = v.permute_parts(&[2, 0, 3, 1]);
        let b = cut_distance_bounds(&v, &perm, 0).unwrap();
        assert!(b.exhaustive);
        assert!(b.upper < 1e-15);
        let c1 = StepCochainGraphon::constant(z2.clone(), &[0.7, 0.3]).unwrap();
        let c2 = StepCochainGraphon::constant(z2.clone(), &[0.4, 0.6]).unwrap();
        let b = cut_distance_bounds(&c1, &c2, 0).unwrap();
        assert!(b.lower <= b.upper);
        assert!((b.upper - 0.6).abs() < 1e-12);
        let z3 = GroupSpec::cyclic(3).unwrap();
        assert!(cut_distance_bounds(&c1, &StepCochainGraphon::<f64>::uniform(z3, 1), 0).is_err());
    }

    #[test]
    fn distance_bounds_are_ordered_for_unequal_partitions() {
        let z2 = GroupSpec::cyclic(2).unwrap();
        let v = StepCochainGraphon::from_fn(z2.clone(), vec![0.2, 0.8], |i, j, g| {
            let x = if i == j { 0.9 } else { 0.1 };
            if g == 0 { x } else { 1.0 - x }
        })
        .unwrap();
        let w = StepCochainGraphon::<f64>::uniform(z2, 3);
        let b = cut_distance_bounds(&v, &w, 3).unwrap();
        assert!(b.lower <= b.upper);
        assert!(b.lower > 0.0);
    }
}
