//! Finite abelian groups `G = Z/m_1 + ... + Z/m_r` and symmetric
//! non-degenerate probability distributions on them.
//!
//! Elements are reduced residue vectors. Each group also carries a dense
//! index: the position of the element in lexicographic residue order (first
//! coordinate most significant), which is what the array-backed graphon
//! tensors use.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{unit_sum_tolerance, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct GroupSpec {
    moduli: Vec<u32>,
}

impl GroupSpec {
    pub fn new(moduli: Vec<u32>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidGroup("no cyclic factors".into()));
        }
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidGroup(format!("modulus {m} < 2")));
        }
        let order = moduli
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m as usize));
        if order.is_none() {
            return Err(Error::InvalidGroup("order overflows usize".into()));
        }
        Ok(GroupSpec { moduli })
    }

    /// `Z/m`.
    pub fn cyclic(m: u32) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    /// `|G|`.
    pub fn order(&self) -> usize {
        self.moduli.iter().map(|&m| m as usize).product()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            residues: vec![0; self.moduli.len()],
        }
    }

    /// Validates and wraps a residue vector.
    pub fn element(&self, residues: Vec<u32>) -> Result<GroupElement> {
        if residues.len() != self.moduli.len()
            || residues.iter().zip(&self.moduli).any(|(r, m)| r >= m)
        {
            return Err(Error::InvalidElement {
                residues,
                moduli: self.moduli.clone(),
            });
        }
        Ok(GroupElement { residues })
    }

    fn check(&self, a: &GroupElement) -> Result<()> {
        if a.residues.len() != self.moduli.len()
            || a.residues.iter().zip(&self.moduli).any(|(r, m)| r >= m)
        {
            return Err(Error::InvalidElement {
                residues: a.residues.clone(),
                moduli: self.moduli.clone(),
            });
        }
        Ok(())
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((x, y), m)| (x + y) % m)
            .collect();
        Ok(GroupElement { residues })
    }

    pub fn neg(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        let residues = a
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(x, m)| (m - x) % m)
            .collect();
        Ok(GroupElement { residues })
    }

    /// All elements in lexicographic residue order.
    pub fn enumerate(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    /// Dense index of an element.
    pub fn index_of(&self, a: &GroupElement) -> Result<usize> {
        self.check(a)?;
        Ok(a
            .residues
            .iter()
            .zip(&self.moduli)
            .fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize))
    }

    /// Inverse of [`GroupSpec::index_of`]. Panics if `index >= order()`.
    pub fn element_at(&self, index: usize) -> GroupElement {
        assert!(index < self.order(), "group index out of range");
        let mut rest = index;
        let mut residues = vec![0u32; self.moduli.len()];
        for (slot, &m) in residues.iter_mut().zip(&self.moduli).rev() {
            *slot = (rest % m as usize) as u32;
            rest /= m as usize;
        }
        GroupElement { residues }
    }

    /// Group law on dense indices.
    pub fn add_index(&self, a: usize, b: usize) -> usize {
        let mut out = 0usize;
        let (mut ra, mut rb, mut scale) = (a, b, 1usize);
        for &m in self.moduli.iter().rev() {
            let m = m as usize;
            out += ((ra % m + rb % m) % m) * scale;
            ra /= m;
            rb /= m;
            scale *= m;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        let mut out = 0usize;
        let (mut ra, mut scale) = (a, 1usize);
        for &m in self.moduli.iter().rev() {
            let m = m as usize;
            out += ((m - ra % m) % m) * scale;
            ra /= m;
            scale *= m;
        }
        out
    }

    /// `a - b` on dense indices.
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// Precomputed tables for hot loops.
    pub fn tables(&self) -> GroupTables {
        let order = self.order();
        let neg = (0..order).map(|a| self.neg_index(a)).collect();
        let mut add = vec![0usize; order * order];
        for a in 0..order {
            for b in 0..order {
                add[a * order + b] = self.add_index(a, b);
            }
        }
        GroupTables { order, add, neg }
    }

    /// `"2|1"`-style key used in JSON distribution maps.
    pub fn key_of(&self, index: usize) -> String {
        self.element_at(index).to_string()
    }

    pub fn parse_key(&self, key: &str) -> Result<GroupElement> {
        let residues = key
            .split('|')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidDistribution(format!("bad element key {key:?}")))?;
        self.element(residues)
    }
}

impl TryFrom<Vec<u32>> for GroupSpec {
    type Error = Error;

    fn try_from(moduli: Vec<u32>) -> Result<Self> {
        GroupSpec::new(moduli)
    }
}

impl From<GroupSpec> for Vec<u32> {
    fn from(g: GroupSpec) -> Self {
        g.moduli
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z/{m}")).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Lookup tables for the group law on dense indices.
#[derive(Debug, Clone)]
pub struct GroupTables {
    pub order: usize,
    add: Vec<usize>,
    neg: Vec<usize>,
}

impl GroupTables {
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.order + b]
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u32>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u32] {
        &self.residues
    }

    pub fn is_identity(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// A probability distribution `nu` on `G` with `nu(g) = nu(-g) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricDistribution<T> {
    group: GroupSpec,
    probs: Vec<T>,
    cumulative: Vec<f64>,
}

impl<T: Scalar> SymmetricDistribution<T> {
    /// `probs[i]` is the mass of the element with dense index `i`.
    ///
    /// The total mass must be one (exactly for rationals, within `1e-12`
    /// for floats), every mass positive, and `nu(g) = nu(-g)` exactly.
    pub fn new(group: GroupSpec, probs: Vec<T>) -> Result<Self> {
        let order = group.order();
        if probs.len() != order {
            return Err(Error::InvalidDistribution(format!(
                "expected {order} masses, got {}",
                probs.len()
            )));
        }
        for (i, p) in probs.iter().enumerate() {
            if *p <= T::zero() {
                return Err(Error::InvalidDistribution(format!(
                    "mass of {} is not positive",
                    group.key_of(i)
                )));
            }
            let j = group.neg_index(i);
            if probs[j] != *p {
                return Err(Error::InvalidDistribution(format!(
                    "nu({}) != nu({})",
                    group.key_of(i),
                    group.key_of(j)
                )));
            }
        }
        let total = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if (total.clone() - T::one()).abs() > unit_sum_tolerance::<T>() {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {:?}",
                total
            )));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|p| {
                acc += p.to_f64_lossy();
                acc
            })
            .collect();
        Ok(SymmetricDistribution {
            group,
            probs,
            cumulative,
        })
    }

    /// The uniform measure on `G`.
    pub fn uniform(group: GroupSpec) -> Self {
        let order = group.order() as i64;
        let probs = vec![T::ratio(1, order); group.order()];
        Self::new(group, probs).expect("uniform measure is symmetric")
    }

    pub fn from_elements(group: GroupSpec, masses: &[(GroupElement, T)]) -> Result<Self> {
        let mut probs: Vec<Option<T>> = vec![None; group.order()];
        for (g, p) in masses {
            let i = group.index_of(g)?;
            if probs[i].is_some() {
                return Err(Error::InvalidDistribution(format!("duplicate element {g}")));
            }
            probs[i] = Some(p.clone());
        }
        let probs = probs
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| {
                    Error::InvalidDistribution(format!("missing mass for {}", group.key_of(i)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(group, probs)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> &T {
        &self.probs[index]
    }

    pub fn prob_of(&self, g: &GroupElement) -> Result<&T> {
        Ok(&self.probs[self.group.index_of(g)?])
    }

    /// One draw, returned as a dense index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("nonempty group");
        let u: f64 = rng.gen::<f64>() * total;
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.probs.len() - 1)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        self.group.element_at(self.sample_index(rng))
    }

    pub fn to_f64(&self) -> SymmetricDistribution<f64> {
        SymmetricDistribution {
            group: self.group.clone(),
            probs: self.probs.iter().map(|p| p.to_f64_lossy()).collect(),
            cumulative: self.cumulative.clone(),
        }
    }
}

impl SymmetricDistribution<f64> {
    /// Parses `{"0": 0.5, "1": 0.5}` / `{"2|1": ...}` maps.
    pub fn from_json_map(group: GroupSpec, json: &str) -> Result<Self> {
        let map: BTreeMap<String, f64> = serde_json::from_str(json)?;
        let masses = map
            .iter()
            .map(|(k, &p)| Ok((group.parse_key(k)?, p)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_elements(group, &masses)
    }

    pub fn to_json_map(&self) -> String {
        let map: BTreeMap<String, f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.group.key_of(i), p))
            .collect();
        serde_json::to_string(&map).expect("string keys serialize")
    }
}
