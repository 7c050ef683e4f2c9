//! Piecewise-constant functions on `[0,1]^2` and on `[0,1]^2 x G`.
//!
//! A step object is described by a partition of `[0,1]` into consecutive
//! intervals with measures `mu_1, ..., mu_k` and a value per block. Binary
//! operations first pass to the common refinement of both partitions.

use crate::error::{Error, Result};
use crate::group::{GroupSpec, GroupTables};
use crate::scalar::{unit_sum_tolerance, Scalar};

pub(crate) fn check_measures<T: Scalar>(measures: &[T]) -> Result<()> {
    if measures.is_empty() {
        return Err(Error::InvalidStepFunction("no parts".into()));
    }
    if let Some(i) = measures.iter().position(|m| *m <= T::zero()) {
        return Err(Error::InvalidStepFunction(format!(
            "part {i} has non-positive measure"
        )));
    }
    let total = measures.iter().cloned().fold(T::zero(), |a, b| a + b);
    if (total.clone() - T::one()).abs() > unit_sum_tolerance::<T>() {
        return Err(Error::InvalidStepFunction(format!(
            "part measures sum to {total:?}, not 1"
        )));
    }
    Ok(())
}

/// `k` equal parts.
pub fn equal_parts<T: Scalar>(k: usize) -> Vec<T> {
    vec![T::ratio(1, k as i64); k]
}

/// Common refinement of two interval partitions of `[0,1]`.
#[derive(Debug, Clone)]
pub struct Refinement<T> {
    pub measures: Vec<T>,
    /// For each refined part, the part of the left partition containing it.
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl<T: Scalar> Refinement<T> {
    pub fn new(a: &[T], b: &[T]) -> Self {
        let eps = unit_sum_tolerance::<T>();
        let (mut i, mut j) = (0usize, 0usize);
        let (mut end_a, mut end_b) = (a[0].clone(), b[0].clone());
        let mut pos = T::zero();
        let mut measures = Vec::with_capacity(a.len() + b.len());
        let (mut left, mut right) = (Vec::new(), Vec::new());
        loop {
            let diff = end_a.clone() - end_b.clone();
            let next = if diff.abs() <= eps {
                // shared cut point
                end_a.clone()
            } else if diff < T::zero() {
                end_a.clone()
            } else {
                end_b.clone()
            };
            let m = next.clone() - pos.clone();
            if m > eps || (T::EXACT && m > T::zero()) {
                measures.push(m);
                left.push(i);
                right.push(j);
            }
            pos = next;
            let last_a = i + 1 == a.len();
            let last_b = j + 1 == b.len();
            if diff.abs() <= eps {
                if last_a || last_b {
                    break;
                }
                i += 1;
                j += 1;
                end_a = end_a + a[i].clone();
                end_b = end_b + b[j].clone();
            } else if diff < T::zero() {
                if last_a {
                    break;
                }
                i += 1;
                end_a = end_a + a[i].clone();
            } else {
                if last_b {
                    break;
                }
                j += 1;
                end_b = end_b + b[j].clone();
            }
        }
        if !T::EXACT {
            // absorb rounding so the refined measures still sum to one
            let total = measures.iter().cloned().fold(T::zero(), |x, y| x + y);
            if let Some(last) = measures.last_mut() {
                *last = last.clone() + (T::one() - total);
            }
        }
        Refinement {
            measures,
            left,
            right,
        }
    }

    pub fn is_trivial_for_left(&self, k_left: usize) -> bool {
        self.measures.len() == k_left
    }
}

/// Real step function `[0,1]^2 -> R`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<T> {
    measures: Vec<T>,
    values: Vec<T>,
}

impl<T: Scalar> StepFunction<T> {
    /// `values` is row-major `k x k`.
    pub fn new(measures: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_measures(&measures)?;
        let k = measures.len();
        if values.len() != k * k {
            return Err(Error::InvalidStepFunction(format!(
                "expected {} values for {k} parts, got {}",
                k * k,
                values.len()
            )));
        }
        Ok(StepFunction { measures, values })
    }

    /// The `F_n`-measurable function `W_M(x,y) = M(ceil(nx), ceil(ny))`.
    pub fn from_matrix(n: usize, entries: Vec<T>) -> Result<Self> {
        Self::new(equal_parts(n), entries)
    }

    pub fn zeros(measures: Vec<T>) -> Result<Self> {
        let k = measures.len();
        Self::new(measures, vec![T::zero(); k * k])
    }

    pub fn parts(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.values[i * self.measures.len() + j]
    }

    /// Re-expresses the function on a finer partition.
    pub fn lift(&self, map: &[usize], measures: &[T]) -> Self {
        let k = self.parts();
        let m = map.len();
        let mut values = Vec::with_capacity(m * m);
        for &a in map {
            for &b in map {
                values.push(self.values[a * k + b].clone());
            }
        }
        StepFunction {
            measures: measures.to_vec(),
            values,
        }
    }

    /// Both operands on their common refinement.
    pub fn align(&self, other: &Self) -> (Self, Self) {
        let r = Refinement::new(&self.measures, &other.measures);
        (self.lift(&r.left, &r.measures), other.lift(&r.right, &r.measures))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x.clone() - y.clone())
            .collect();
        StepFunction {
            measures: a.measures,
            values,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.align(other);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| x.clone() + y.clone())
            .collect();
        StepFunction {
            measures: a.measures,
            values,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        StepFunction {
            measures: self.measures.clone(),
            values: self.values.iter().map(|v| v.clone() * c.clone()).collect(),
        }
    }

    /// `mu_i mu_j W[i][j]`, the mass carried by each block.
    pub fn block_masses(&self) -> Vec<T> {
        let k = self.parts();
        let mut out = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                out.push(self.measures[i].clone() * self.measures[j].clone() * self.values[i * k + j].clone());
            }
        }
        out
    }

    /// `int W`.
    pub fn integral(&self) -> T {
        self.block_masses().into_iter().fold(T::zero(), |a, b| a + b)
    }

    pub fn l1_norm(&self) -> T {
        self.block_masses().into_iter().fold(T::zero(), |a, b| a + b.abs())
    }

    /// `||W||_2^2`.
    pub fn l2_norm_sq(&self) -> T {
        let k = self.parts();
        let mut acc = T::zero();
        for i in 0..k {
            for j in 0..k {
                let v = self.values[i * k + j].clone();
                acc = acc + self.measures[i].clone() * self.measures[j].clone() * v.clone() * v;
            }
        }
        acc
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn transpose(&self) -> Self {
        let k = self.parts();
        let mut values = self.values.clone();
        for i in 0..k {
            for j in 0..k {
                values[j * k + i] = self.values[i * k + j].clone();
            }
        }
        StepFunction {
            measures: self.measures.clone(),
            values,
        }
    }

    /// Relabels parts: part `i` of the result is part `perm[i]` of `self`.
    pub fn permute_parts(&self, perm: &[usize]) -> Self {
        let k = self.parts();
        let measures = perm.iter().map(|&p| self.measures[p].clone()).collect();
        let mut values = Vec::with_capacity(k * k);
        for &a in perm {
            for &b in perm {
                values.push(self.values[a * k + b].clone());
            }
        }
        StepFunction { measures, values }
    }

    pub fn to_f64(&self) -> StepFunction<f64> {
        StepFunction {
            measures: self.measures.iter().map(|m| m.to_f64_lossy()).collect(),
            values: self.values.iter().map(|m| m.to_f64_lossy()).collect(),
        }
    }
}

/// Step function `[0,1]^2 x G -> R` with no symmetry requirement. Used for
/// test functions `phi` and for products of kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStepFunction<T> {
    group: GroupSpec,
    measures: Vec<T>,
    values: Vec<T>,
}

/// Test functions `phi` in the linear functionals `Z_phi`.
pub type StepTestFunction<T> = GroupStepFunction<T>;

impl<T: Scalar> GroupStepFunction<T> {
    /// `values[(i * k + j) * |G| + g]` is the value on block `(i, j)` at the
    /// group element with dense index `g`.
    pub fn new(group: GroupSpec, measures: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_measures(&measures)?;
        let k = measures.len();
        let expected = k * k * group.order();
        if values.len() != expected {
            return Err(Error::InvalidStepFunction(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(GroupStepFunction {
            group,
            measures,
            values,
        })
    }

    pub fn constant(group: GroupSpec, measures: Vec<T>, c: T) -> Result<Self> {
        let n = measures.len() * measures.len() * group.order();
        Self::new(group, measures, vec![c; n])
    }

    pub fn from_fn(
        group: GroupSpec,
        measures: Vec<T>,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        let k = measures.len();
        let order = group.order();
        let mut values = Vec::with_capacity(k * k * order);
        for i in 0..k {
            for j in 0..k {
                for g in 0..order {
                    values.push(f(i, j, g));
                }
            }
        }
        Self::new(group, measures, values)
    }

    pub(crate) fn from_parts_unchecked(group: GroupSpec, measures: Vec<T>, values: Vec<T>) -> Self {
        GroupStepFunction {
            group,
            measures,
            values,
        }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn parts(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, g: usize) -> usize {
        (i * self.measures.len() + j) * self.group.order() + g
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, g: usize) -> &T {
        &self.values[self.index(i, j, g)]
    }

    /// `values[i][j][g] == values[j][i][-g]`, compared exactly.
    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    pub(crate) fn symmetry_violation(&self) -> Option<(usize, usize, usize)> {
        let k = self.parts();
        let order = self.group.order();
        for i in 0..k {
            for j in 0..k {
                for g in 0..order {
                    let ng = self.group.neg_index(g);
                    if self.get(i, j, g) != self.get(j, i, ng) {
                        return Some((i, j, g));
                    }
                }
            }
        }
        None
    }

    /// `(phi(x,y,g) + phi(y,x,-g)) / 2`.
    pub fn symmetrize(&self) -> Self {
        let two = T::one() + T::one();
        let mut out = self.clone();
        let k = self.parts();
        let order = self.group.order();
        for i in 0..k {
            for j in 0..k {
                for g in 0..order {
                    let ng = self.group.neg_index(g);
                    let idx = self.index(i, j, g);
                    out.values[idx] = (self.get(i, j, g).clone() + self.get(j, i, ng).clone()) / two.clone();
                }
            }
        }
        out
    }

    pub fn slice(&self, g: usize) -> StepFunction<T> {
        let k = self.parts();
        let mut values = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                values.push(self.get(i, j, g).clone());
            }
        }
        StepFunction {
            measures: self.measures.clone(),
            values,
        }
    }

    pub fn lift(&self, map: &[usize], measures: &[T]) -> Self {
        let k = self.parts();
        let order = self.group.order();
        let mut values = Vec::with_capacity(map.len() * map.len() * order);
        for &a in map {
            for &b in map {
                let base = (a * k + b) * order;
                values.extend_from_slice(&self.values[base..base + order]);
            }
        }
        GroupStepFunction {
            group: self.group.clone(),
            measures: measures.to_vec(),
            values,
        }
    }

    pub(crate) fn check_group(&self, other: &GroupSpec) -> Result<()> {
        if &self.group != other {
            return Err(Error::GroupMismatch {
                left: self.group.moduli().to_vec(),
                right: other.moduli().to_vec(),
            });
        }
        Ok(())
    }

    /// Both operands on their common refinement.
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        self.check_group(&other.group)?;
        if self.measures == other.measures {
            return Ok((self.clone(), other.clone()));
        }
        let r = Refinement::new(&self.measures, &other.measures);
        Ok((self.lift(&r.left, &r.measures), other.lift(&r.right, &r.measures)))
    }

    pub fn map_values(&self, mut f: impl FnMut(&T) -> T) -> Self {
        GroupStepFunction {
            group: self.group.clone(),
            measures: self.measures.clone(),
            values: self.values.iter().map(&mut f).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(&T, &T) -> T) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect();
        Ok(GroupStepFunction {
            group: a.group,
            measures: a.measures,
            values,
        })
    }

    pub fn permute_parts(&self, perm: &[usize]) -> Self {
        let map: Vec<usize> = perm.to_vec();
        let measures: Vec<T> = perm.iter().map(|&p| self.measures[p].clone()).collect();
        let mut out = self.lift(&map, &measures);
        out.measures = measures;
        out
    }

    pub fn to_f64(&self) -> GroupStepFunction<f64> {
        GroupStepFunction {
            group: self.group.clone(),
            measures: self.measures.iter().map(|m| m.to_f64_lossy()).collect(),
            values: self.values.iter().map(|m| m.to_f64_lossy()).collect(),
        }
    }

    pub(crate) fn tables(&self) -> GroupTables {
        self.group.tables()
    }
}

/// Symmetric step cochain kernel: `W(x,y,g) = W(y,x,-g)`.
///
/// Graphon-ness (`0 <= W <= 1`) and membership in `W^G_00` / `W^G_00<` are
/// predicates, not construction requirements, so the same type represents
/// kernels, graphons and their differences.
#[derive(Debug, Clone, PartialEq)]
pub struct StepCochainGraphon<T> {
    inner: GroupStepFunction<T>,
}

impl<T: Scalar> StepCochainGraphon<T> {
    pub fn new(group: GroupSpec, measures: Vec<T>, values: Vec<T>) -> Result<Self> {
        Self::from_function(GroupStepFunction::new(group, measures, values)?)
    }

    /// Rejects non-symmetric input, naming the offending entry.
    pub fn from_function(f: GroupStepFunction<T>) -> Result<Self> {
        if let Some((i, j, g)) = f.symmetry_violation() {
            return Err(Error::InvalidStepFunction(format!(
                "symmetry violated: values[{i}][{j}][{}] != values[{j}][{i}][{}]",
                f.group.key_of(g),
                f.group.key_of(f.group.neg_index(g))
            )));
        }
        Ok(StepCochainGraphon { inner: f })
    }

    pub(crate) fn from_function_unchecked(f: GroupStepFunction<T>) -> Self {
        debug_assert!(f.is_symmetric());
        StepCochainGraphon { inner: f }
    }

    pub fn from_fn(
        group: GroupSpec,
        measures: Vec<T>,
        f: impl FnMut(usize, usize, usize) -> T,
    ) -> Result<Self> {
        Self::from_function(GroupStepFunction::from_fn(group, measures, f)?)
    }

    /// `W^g = c_g` everywhere; symmetric iff `c_g = c_{-g}`.
    pub fn constant(group: GroupSpec, per_element: &[T]) -> Result<Self> {
        Self::from_fn(group, vec![T::one()], |_, _, g| per_element[g].clone())
    }

    /// The uniform graphon `U^g = 1/|G|` on `k` equal parts.
    pub fn uniform(group: GroupSpec, k: usize) -> Self {
        let c = T::ratio(1, group.order() as i64);
        Self::from_function_unchecked(
            GroupStepFunction::constant(group, equal_parts(k), c).expect("valid shape"),
        )
    }

    pub fn zero(group: GroupSpec, measures: Vec<T>) -> Result<Self> {
        Ok(Self::from_function_unchecked(GroupStepFunction::constant(
            group,
            measures,
            T::zero(),
        )?))
    }

    pub fn as_function(&self) -> &GroupStepFunction<T> {
        &self.inner
    }

    pub fn into_function(self) -> GroupStepFunction<T> {
        self.inner
    }

    pub fn group(&self) -> &GroupSpec {
        &self.inner.group
    }

    pub fn parts(&self) -> usize {
        self.inner.parts()
    }

    pub fn measures(&self) -> &[T] {
        &self.inner.measures
    }

    pub fn values(&self) -> &[T] {
        &self.inner.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, g: usize) -> &T {
        self.inner.get(i, j, g)
    }

    pub fn slice(&self, g: usize) -> StepFunction<T> {
        self.inner.slice(g)
    }

    /// `0 <= W <= 1` (membership in `W^G_0`).
    pub fn is_graphon(&self) -> bool {
        self.inner
            .values
            .iter()
            .all(|v| *v >= T::zero() && *v <= T::one())
    }

    pub fn check_graphon(&self) -> Result<()> {
        if let Some(v) = self
            .inner
            .values
            .iter()
            .find(|v| **v < T::zero() || **v > T::one())
        {
            return Err(Error::NotGraphon(format!("value {v:?} outside [0, 1]")));
        }
        Ok(())
    }

    /// First block whose fiber does not sum to one, beyond `T::tolerance()`
    /// (`1e-9` for floats, exact for rationals).
    pub fn w00_violation(&self) -> Option<(usize, usize)> {
        let k = self.parts();
        let order = self.group().order();
        for i in 0..k {
            for j in 0..k {
                let base = self.inner.index(i, j, 0);
                let s = self.inner.values[base..base + order]
                    .iter()
                    .cloned()
                    .fold(T::zero(), |a, b| a + b);
                if !T::near(&s, &T::one()) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Membership in `W^G_00`: a graphon whose fibers are probability
    /// vectors. Tolerance `1e-9` in float mode, exact in rational mode.
    pub fn in_w00(&self) -> bool {
        self.is_graphon() && self.w00_violation().is_none()
    }

    /// Membership in `W^G_00<`: in `W^G_00` with a positive infimum.
    pub fn in_w00_positive(&self) -> bool {
        self.in_w00() && self.inner.values.iter().all(|v| *v > T::zero())
    }

    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        let (a, b) = self.inner.align(&other.inner)?;
        Ok((
            Self::from_function_unchecked(a),
            Self::from_function_unchecked(b),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_function_unchecked(
            self.inner.zip_with(&other.inner, |a, b| a.clone() - b.clone())?,
        ))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_function_unchecked(
            self.inner.zip_with(&other.inner, |a, b| a.clone() + b.clone())?,
        ))
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_function_unchecked(self.inner.map_values(|v| v.clone() * c.clone()))
    }

    /// Part relabeling; a measure-preserving rearrangement of `[0,1]`.
    pub fn permute_parts(&self, perm: &[usize]) -> Self {
        Self::from_function_unchecked(self.inner.permute_parts(perm))
    }

    pub fn lift(&self, map: &[usize], measures: &[T]) -> Self {
        Self::from_function_unchecked(self.inner.lift(map, measures))
    }

    /// `sum_g int W^g`.
    pub fn total_mass(&self) -> T {
        (0..self.group().order())
            .map(|g| self.slice(g).integral())
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn l1_norm(&self) -> T {
        (0..self.group().order())
            .map(|g| self.slice(g).l1_norm())
            .fold(T::zero(), |a, b| a + b)
    }

    pub fn sup_norm(&self) -> T {
        self.inner
            .values
            .iter()
            .map(|v| v.abs())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    pub fn to_f64(&self) -> StepCochainGraphon<f64> {
        StepCochainGraphon {
            inner: self.inner.to_f64(),
        }
    }
}
