//! Stepping operators and a constructive weak regularity decomposition.
//!
//! A partition here groups the parts of a step function (or the rows of a
//! matrix, viewed as a step function on `n` equal parts). Stepping replaces
//! each block-pair by its average.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphon::{
    cut_norm_slice, CutMode, CutNorm, GroupStepFunction, StepCochainGraphon, StepFunction,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    size: usize,
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Blocks must be nonempty, disjoint and cover `0..size`.
    pub fn new(size: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; size];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &i in b {
                if i >= size || std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} repeated or outside 0..{size}"
                    )));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {i} not covered")));
        }
        let mut blocks = blocks;
        for b in blocks.iter_mut() {
            b.sort_unstable();
        }
        blocks.sort();
        Ok(Partition { size, blocks })
    }

    /// One block.
    pub fn trivial(size: usize) -> Self {
        Partition {
            size,
            blocks: vec![(0..size).collect()],
        }
    }

    pub fn singletons(size: usize) -> Self {
        Partition {
            size,
            blocks: (0..size).map(|i| vec![i]).collect(),
        }
    }

    /// Blocks are the level sets of `labels`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::BTreeMap::<usize, Vec<usize>>::new();
        for (i, &l) in labels.iter().enumerate() {
            map.entry(l).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = map.into_values().collect();
        blocks.sort();
        Partition {
            size: labels.len(),
            blocks,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Block number of every index.
    pub fn labels(&self) -> Vec<usize> {
        let mut out = vec![0; self.size];
        for (b, block) in self.blocks.iter().enumerate() {
            for &i in block {
                out[i] = b;
            }
        }
        out
    }

    /// Venn cells of the blocks and the given sets.
    pub fn refine(&self, sets: &[&[usize]]) -> Self {
        let mut key: Vec<Vec<usize>> = self.labels().into_iter().map(|l| vec![l]).collect();
        for s in sets {
            let mut member = vec![0usize; self.size];
            for &i in s.iter() {
                member[i] = 1;
            }
            for (k, m) in key.iter_mut().zip(member) {
                k.push(m);
            }
        }
        let mut map = std::collections::BTreeMap::<Vec<usize>, Vec<usize>>::new();
        for (i, k) in key.into_iter().enumerate() {
            map.entry(k).or_default().push(i);
        }
        let mut blocks: Vec<Vec<usize>> = map.into_values().collect();
        blocks.sort();
        Partition {
            size: self.size,
            blocks,
        }
    }

    /// Every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        let labels = other.labels();
        self.size == other.size
            && self
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| labels[i] == labels[b[0]]))
    }
}

fn check_size(p: &Partition, parts: usize) -> Result<()> {
    if p.size != parts {
        return Err(Error::InvalidPartition(format!(
            "partition of {} indices applied to {parts} parts",
            p.size
        )));
    }
    Ok(())
}

/// Block averages `(1/|S||T|) int_{SxT} W`, indexed by block pairs.
fn block_averages<T: Scalar>(measures: &[T], values: &[T], p: &Partition) -> (Vec<T>, Vec<usize>) {
    let k = measures.len();
    let labels = p.labels();
    let b = p.len();
    let mut mass = vec![T::zero(); b];
    for i in 0..k {
        mass[labels[i]] = mass[labels[i]].clone() + measures[i].clone();
    }
    let mut sums = vec![T::zero(); b * b];
    for i in 0..k {
        for j in 0..k {
            let x = &values[i * k + j];
            if x.is_zero() {
                continue;
            }
            let s = &mut sums[labels[i] * b + labels[j]];
            *s = s.clone() + measures[i].clone() * measures[j].clone() * x.clone();
        }
    }
    for a in 0..b {
        for c in 0..b {
            let s = &mut sums[a * b + c];
            *s = s.clone() / (mass[a].clone() * mass[c].clone());
        }
    }
    (sums, labels)
}

/// `S_P W` on the same parts as `W`.
pub fn step<T: Scalar>(w: &StepFunction<T>, p: &Partition) -> Result<StepFunction<T>> {
    check_size(p, w.parts())?;
    let k = w.parts();
    let (avg, labels) = block_averages(w.measures(), w.values(), p);
    let b = p.len();
    let values = (0..k * k)
        .map(|ij| avg[labels[ij / k] * b + labels[ij % k]].clone())
        .collect();
    StepFunction::new(w.measures().to_vec(), values)
}

/// `S_P` applied to every slice; symmetry and `[0, 1]` bounds are kept.
pub fn step_graphon<T: Scalar>(
    w: &StepCochainGraphon<T>,
    p: &Partition,
) -> Result<StepCochainGraphon<T>> {
    check_size(p, w.parts())?;
    let k = w.parts();
    let order = w.group().order();
    let slices: Vec<StepFunction<T>> = (0..order)
        .map(|g| step(&w.slice(g), p))
        .collect::<Result<_>>()?;
    let f = GroupStepFunction::from_fn(w.group().clone(), w.measures().to_vec(), |i, j, g| {
        slices[g].get(i, j).clone()
    })?;
    debug_assert_eq!(f.parts(), k);
    // mirrored block averages round differently in float mode
    let f = if T::EXACT { f } else { f.symmetrize() };
    StepCochainGraphon::from_function(f)
}

/// Whether `W` is constant on every block pair (to the scalar tolerance).
pub fn is_measurable<T: Scalar>(w: &StepFunction<T>, p: &Partition) -> bool {
    if p.size != w.parts() {
        return false;
    }
    let labels = p.labels();
    let b = p.len();
    let k = w.parts();
    let mut rep: Vec<Option<&T>> = vec![None; b * b];
    for i in 0..k {
        for j in 0..k {
            let slot = &mut rep[labels[i] * b + labels[j]];
            match slot {
                None => *slot = Some(w.get(i, j)),
                Some(r) => {
                    if !T::near(r, w.get(i, j)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `(1/n^2) max_{S,T} |sum_{S x T} M|` for an `n x n` matrix given as a step
/// function on equal parts: exact up to the exhaustive limit, a certified
/// lower bound (flag cleared) above it.
pub fn step_cut_norm<T: Scalar>(m: &StepFunction<T>) -> Result<CutNorm<T>> {
    cut_norm_slice(m, CutMode::default())
}

/// One accepted refinement of the energy-increment construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkRound {
    /// Group element whose slice produced the witness (graphons only).
    pub slice: Option<usize>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// `|int_{SxT} (W - S_P W)|` before the refinement.
    pub witness: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    pub parts_after: usize,
}

/// JSON trace of a decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FkTrace {
    pub eps: f64,
    /// Acceptance threshold per slice.
    pub threshold: f64,
    pub rounds: Vec<FkRound>,
    /// Upper bound on the number of rounds from the energy argument.
    pub round_cap: usize,
    pub final_partition: Partition,
    /// Sum over slices of the residual cut norms reported by the oracle.
    pub residual: f64,
    /// False when some residual came from the heuristic oracle, which only
    /// certifies that no violation was found.
    pub residual_exact: bool,
}

fn sup_abs<T: Scalar>(values: &[T]) -> f64 {
    values.iter().map(|v| v.to_f64_lossy().abs()).fold(0.0, f64::max)
}

fn energy<T: Scalar>(slices: &[StepFunction<T>], p: &Partition) -> Result<f64> {
    let mut e = 0.0;
    for s in slices {
        e += step(s, p)?.l2_norm_sq().to_f64_lossy();
    }
    Ok(e)
}

/// Shared driver: a witness on any slice above `threshold` refines the
/// partition by its Venn cells.
fn decompose<T: Scalar>(
    slices: &[StepFunction<T>],
    eps: f64,
    threshold: f64,
    round_cap: usize,
    track_slice: bool,
    mode: CutMode,
) -> Result<FkTrace> {
    let k = slices[0].parts();
    let mut p = Partition::trivial(k);
    let mut rounds = Vec::new();
    let mut current = energy(slices, &p)?;
    loop {
        let mut best: Option<(usize, CutNorm<T>)> = None;
        let mut residual = 0.0;
        let mut exact = true;
        for (g, s) in slices.iter().enumerate() {
            let r = s.sub(&step(s, &p)?);
            let c = cut_norm_slice(&r, mode)?;
            let v = c.value.to_f64_lossy();
            residual += v;
            exact &= c.exact;
            if v > threshold && best.as_ref().is_none_or(|(_, b)| v > b.value.to_f64_lossy()) {
                best = Some((g, c));
            }
        }
        let Some((g, witness)) = best else {
            return Ok(FkTrace {
                eps,
                threshold,
                rounds,
                round_cap,
                final_partition: p,
                residual,
                residual_exact: exact,
            });
        };
        let next = p.refine(&[&witness.rows, &witness.cols]);
        let after = energy(slices, &next)?;
        let w = witness.value.to_f64_lossy();
        // refining by S and T raises the energy by at least the squared witness
        assert!(
            after - current >= w * w - 1e-12,
            "energy increment {} below squared witness {}",
            after - current,
            w * w
        );
        rounds.push(FkRound {
            slice: track_slice.then_some(g),
            rows: witness.rows,
            cols: witness.cols,
            witness: w,
            energy_before: current,
            energy_after: after,
            parts_after: next.len(),
        });
        assert!(rounds.len() <= round_cap, "energy argument violated");
        assert!(
            (next.len() as f64).log(4.0) <= rounds.len() as f64 + 1e-9,
            "Venn refinement grew faster than 4x per round"
        );
        current = after;
        p = next;
    }
}

/// Weak regularity for a matrix (or any single step function): refine until
/// no rectangle carries `|int_{SxT}(W - S_P W)| > eps ||W||_inf`. At most
/// `ceil(1/eps^2)` rounds, hence at most `4^{ceil(1/eps^2)}` parts.
pub fn fk_decompose<T: Scalar>(w: &StepFunction<T>, eps: f64, mode: CutMode) -> Result<FkTrace> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let sup = sup_abs(w.values());
    let threshold = eps * sup;
    let round_cap = (1.0 / (eps * eps)).ceil() as usize;
    decompose(std::slice::from_ref(w), eps, threshold, round_cap, false, mode)
}

/// Weak regularity for a cochain graphon with one partition shared by all
/// slices and threshold `eps ||W||_inf / |G|` per slice, so the summed
/// residual is at most `eps ||W||_inf`. Each round raises the total energy
/// `sum_g ||S_P W^g||_2^2` by more than the squared threshold, which bounds
/// the rounds by `sum_g ||W^g||_2^2 / threshold^2 <= |G|^3 / eps^2`.
pub fn fk_decompose_graphon<T: Scalar>(
    w: &StepCochainGraphon<T>,
    eps: f64,
    mode: CutMode,
) -> Result<FkTrace> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    let order = w.group().order();
    let slices: Vec<StepFunction<T>> = (0..order).map(|g| w.slice(g)).collect();
    let sup = sup_abs(w.values());
    let threshold = eps * sup / order as f64;
    let total: f64 = slices.iter().map(|s| s.l2_norm_sq().to_f64_lossy()).sum();
    let round_cap = if threshold > 0.0 {
        (total / (threshold * threshold)).ceil() as usize
    } else {
        0
    };
    decompose(&slices, eps, threshold, round_cap, true, mode)
}

/// Both sides of `||W1 - S_P W1||_cut <= 2 ||W1 - W2||_cut` for a
/// `P`-measurable `W2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTwo<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn factor_two_check<T: Scalar>(
    w1: &StepFunction<T>,
    w2: &StepFunction<T>,
    p: &Partition,
) -> Result<FactorTwo<T>> {
    check_size(p, w1.parts())?;
    if w1.measures() != w2.measures() {
        return Err(Error::InvalidStepFunction("W1 and W2 must share parts".into()));
    }
    if !is_measurable(w2, p) {
        return Err(Error::NotMeasurable("W2".into()));
    }
    let lhs = cut_norm_slice(&w1.sub(&step(w1, p)?), CutMode::Exact)?.value;
    let half = cut_norm_slice(&w1.sub(w2), CutMode::Exact)?.value;
    let rhs = half.clone() + half;
    let holds = lhs <= rhs.clone() + T::tolerance();
    Ok(FactorTwo { lhs, rhs, holds })
}
