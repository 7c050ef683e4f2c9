//! 1-cochains `f in C^1(K_n, G)`: antisymmetric `G`-labelings of the ordered
//! edges of the complete graph on `[n]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::TwoComplex;
use crate::error::{Error, Result};
use crate::graphon::{equal_parts, GroupStepFunction, StepCochainGraphon};
use crate::group::{GroupElement, GroupSpec, SymmetricDistribution};
use crate::scalar::Scalar;
use crate::simplex::{self, edge_index, num_edges};

/// Only the labels `f(u, v)` with `u < v` are stored; `f(v, u)` is derived as
/// `-f(u, v)`, so antisymmetry holds by construction. Vertices are `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain {
    n: usize,
    group: GroupSpec,
    labels: Vec<usize>,
}

impl Cochain {
    /// `labels[e]` is the dense group index of `f(u, v)` for the `e`-th edge
    /// `u < v` in lexicographic order.
    pub fn new(n: usize, group: GroupSpec, labels: Vec<usize>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCochain(format!("n = {n} < 2")));
        }
        if labels.len() != num_edges(n) {
            return Err(Error::InvalidCochain(format!(
                "expected {} edge labels, got {}",
                num_edges(n),
                labels.len()
            )));
        }
        if let Some(l) = labels.iter().find(|&&l| l >= group.order()) {
            return Err(Error::InvalidCochain(format!("label index {l} outside {group}")));
        }
        Ok(Cochain { n, group, labels })
    }

    pub fn from_fn(n: usize, group: GroupSpec, mut f: impl FnMut(usize, usize) -> usize) -> Result<Self> {
        let labels = simplex::edges(n).into_iter().map(|(u, v)| f(u, v)).collect();
        Self::new(n, group, labels)
    }

    /// `f = 0` on every edge.
    pub fn zero(n: usize, group: GroupSpec) -> Result<Self> {
        Self::new(n, group, vec![0; num_edges(n)])
    }

    /// The coboundary of a vertex potential: `f(u,v) = p(v) - p(u)`.
    pub fn coboundary_of(group: GroupSpec, potential: &[usize]) -> Result<Self> {
        let n = potential.len();
        let g = group.clone();
        Self::from_fn(n, group, |u, v| g.sub_index(potential[v - 1], potential[u - 1]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Dense index of `f(u, v)` for `u != v`.
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> usize {
        debug_assert!(u != v);
        if u < v {
            self.labels[edge_index(self.n, u, v)]
        } else {
            self.group.neg_index(self.labels[edge_index(self.n, v, u)])
        }
    }

    pub fn label(&self, u: usize, v: usize) -> GroupElement {
        self.group.element_at(self.get(u, v))
    }

    /// `f^pi(u, v) = f(pi(u), pi(v))`; `pi[u - 1]` is the image of `u`.
    pub fn permute(&self, pi: &[usize]) -> Result<Self> {
        if pi.len() != self.n {
            return Err(Error::InvalidPermutation(format!(
                "length {} for n = {}",
                pi.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n + 1];
        for &p in pi {
            if p < 1 || p > self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation(format!("{pi:?} is not a bijection of [n]")));
            }
        }
        Self::from_fn(self.n, self.group.clone(), |u, v| self.get(pi[u - 1], pi[v - 1]))
    }

    /// `P(u, w, g) = |{v != u, w : f(u,v) + f(v,w) = g}|`.
    pub fn path_counts(&self) -> TriangleStat {
        let n = self.n;
        let tables = self.group.tables();
        let order = tables.order;
        let mut counts = vec![0u32; n * n * order];
        for u in 1..=n {
            for w in 1..=n {
                if u == w {
                    continue;
                }
                let base = ((u - 1) * n + (w - 1)) * order;
                for v in 1..=n {
                    if v == u || v == w {
                        continue;
                    }
                    counts[base + tables.add(self.get(u, v), self.get(v, w))] += 1;
                }
            }
        }
        TriangleStat { n, order, counts }
    }

    /// `f(u,v) + f(v,w) + f(w,u) == 0`.
    pub fn vanishes_on(&self, t: [usize; 3]) -> bool {
        let [u, v, w] = t;
        let s = self
            .group
            .add_index(self.group.add_index(self.get(u, v), self.get(v, w)), self.get(w, u));
        s == 0
    }

    /// `Y_f`: the triangles on which the cyclic sum vanishes.
    pub fn coboundary_triangles(&self) -> TwoComplex {
        let faces: Vec<[usize; 3]> = simplex::triangles(self.n)
            .into_iter()
            .filter(|&t| self.vanishes_on(t))
            .collect();
        TwoComplex::new(self.n, faces).expect("lexicographic triangles are valid")
    }

    /// Whether `f` is a cocycle of `X`, i.e. the faces of `X` lie in `Y_f`.
    pub fn is_cocycle_on(&self, x: &TwoComplex) -> bool {
        x.triangles().iter().all(|&t| self.vanishes_on(t))
    }

    /// `W^G_f`: `n` equal parts; block `(u, v)` with `u != v` is the
    /// indicator of `g = f(u, v)`, diagonal blocks vanish.
    pub fn embed_graphon<T: Scalar>(&self) -> StepCochainGraphon<T> {
        let n = self.n;
        let order = self.group.order();
        let mut values = vec![T::zero(); n * n * order];
        for u in 1..=n {
            for v in 1..=n {
                if u != v {
                    values[((u - 1) * n + (v - 1)) * order + self.get(u, v)] = T::one();
                }
            }
        }
        let f = GroupStepFunction::new(self.group.clone(), equal_parts(n), values)
            .expect("shape matches");
        StepCochainGraphon::from_function(f).expect("antisymmetric labels give a symmetric kernel")
    }

    pub fn to_json(&self) -> CochainJson {
        let edges = simplex::edges(self.n)
            .into_iter()
            .map(|(u, v)| EdgeLabel {
                u,
                v,
                g: self.label(u, v),
            })
            .collect();
        CochainJson {
            n: self.n,
            group: self.group.clone(),
            edges,
        }
    }
}

/// `F_{n,nu}`: independent labels `f(u, v) ~ nu` for `u < v`.
pub fn sample_random_cochain<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    nu: &SymmetricDistribution<T>,
    rng: &mut R,
) -> Result<Cochain> {
    let labels = (0..num_edges(n)).map(|_| nu.sample_index(rng)).collect();
    Cochain::new(n, nu.group().clone(), labels)
}

/// Every cochain on `K_n`, `|G|^{C(n,2)}` of them, in lexicographic label
/// order.
pub fn all_cochains(n: usize, group: &GroupSpec) -> impl Iterator<Item = Cochain> + '_ {
    let e = num_edges(n);
    let order = group.order();
    let total = (order as u128).checked_pow(e as u32).expect("enumeration size overflow");
    (0..total).map(move |mut code| {
        let mut labels = vec![0usize; e];
        for slot in labels.iter_mut().rev() {
            *slot = (code % order as u128) as usize;
            code /= order as u128;
        }
        Cochain {
            n,
            group: group.clone(),
            labels,
        }
    })
}

/// Exact path statistics `P(u, w, g)` of a cochain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleStat {
    n: usize,
    order: usize,
    counts: Vec<u32>,
}

impl TriangleStat {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `P(u, w, g)`; zero when `u == w`.
    #[inline]
    pub fn get(&self, u: usize, w: usize, g: usize) -> u32 {
        self.counts[((u - 1) * self.n + (w - 1)) * self.order + g]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub u: usize,
    pub v: usize,
    pub g: GroupElement,
}

/// `{n, group, edges: [{u, v, g}]}`. Every unordered pair must appear exactly
/// once; `u > v` entries are read as `f(u, v)` and stored negated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainJson {
    pub n: usize,
    pub group: GroupSpec,
    pub edges: Vec<EdgeLabel>,
}

impl CochainJson {
    pub fn into_cochain(self) -> Result<Cochain> {
        let n = self.n;
        if n < 2 {
            return Err(Error::InvalidCochain(format!("n = {n} < 2")));
        }
        let mut labels: Vec<Option<usize>> = vec![None; num_edges(n)];
        for e in &self.edges {
            if e.u == e.v || e.u < 1 || e.v < 1 || e.u > n || e.v > n {
                return Err(Error::InvalidCochain(format!("bad edge ({}, {})", e.u, e.v)));
            }
            let g = self.group.index_of(&e.g)?;
            let (a, b, g) = if e.u < e.v {
                (e.u, e.v, g)
            } else {
                (e.v, e.u, self.group.neg_index(g))
            };
            let slot = &mut labels[edge_index(n, a, b)];
            if slot.is_some() {
                return Err(Error::InvalidCochain(format!("edge ({a}, {b}) labeled twice")));
            }
            *slot = Some(g);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                l.ok_or_else(|| {
                    let (u, v) = simplex::edges(n)[i];
                    Error::InvalidCochain(format!("missing edge ({u}, {v})"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Cochain::new(n, self.group, labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn z(m: u32) -> GroupSpec {
        GroupSpec::cyclic(m).unwrap()
    }

    /// f(1,2) = 1, f(2,3) = 0, f(1,3) = 1 over Z/2.
    fn small() -> Cochain {
        Cochain::from_fn(3, z(2), |u, v| match (u, v) {
            (1, 2) => 1,
            (2, 3) => 0,
            _ => 1,
        })
        .unwrap()
    }

    #[test]
    fn antisymmetric_access_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = GroupSpec::new(vec![5, 2]).unwrap();
        let nu = SymmetricDistribution::<f64>::uniform(g.clone());
        for n in 2..=20 {
            let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
            for u in 1..=n {
                for v in 1..=n {
                    if u != v {
                        assert_eq!(f.label(v, u), g.neg(&f.label(u, v)).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_support_and_marginals() {
        let nu = SymmetricDistribution::<f64>::uniform(z(2));
        let mut seen = std::collections::HashSet::new();
        for seed in 0..200 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            seen.insert(sample_random_cochain(3, &nu, &mut rng).unwrap().labels().to_vec());
        }
        assert_eq!(seen.len(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_random_cochain(2, &nu, &mut rng).unwrap().labels().len(), 1);
        let nu3 = SymmetricDistribution::<f64>::uniform(z(3));
        let f = sample_random_cochain(100, &nu3, &mut rng).unwrap();
        for g in 0..3 {
            let freq = f.labels().iter().filter(|&&l| l == g).count() as f64 / 4950.0;
            assert!((freq - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn permute_examples() {
        let f = small();
        assert_eq!(f.permute(&[1, 2, 3]).unwrap(), f);
        let p = f.permute(&[2, 1, 3]).unwrap();
        assert_eq!(p.get(1, 2), f.get(2, 1));
        assert_eq!(p.get(1, 2), 1);
        assert!(f.permute(&[1, 1, 3]).is_err());
        assert!(f.permute(&[1, 2]).is_err());
        assert!(f.permute(&[1, 2, 4]).is_err());
    }

    #[test]
    fn permutation_preserves_uniform_law_exactly() {
        // Pushforward of the 8-point uniform law under every pi of [3].
        let g = z(2);
        let law: HashMap<Vec<usize>, usize> =
            all_cochains(3, &g).map(|f| (f.labels().to_vec(), 1)).collect();
        for pi in [[1, 2, 3], [2, 1, 3], [3, 2, 1], [1, 3, 2], [2, 3, 1], [3, 1, 2]] {
            let mut pushed: HashMap<Vec<usize>, usize> = HashMap::new();
            for f in all_cochains(3, &g) {
                *pushed.entry(f.permute(&pi).unwrap().labels().to_vec()).or_default() += 1;
            }
            assert_eq!(pushed, law);
        }
    }

    #[test]
    fn path_counts_examples() {
        let p = small().path_counts();
        assert_eq!(p.get(1, 3, 1), 1);
        assert_eq!(p.get(1, 3, 0), 0);
        let zero = Cochain::zero(6, z(3)).unwrap().path_counts();
        for u in 1..=6 {
            for w in 1..=6 {
                if u != w {
                    assert_eq!(zero.get(u, w, 0), 4);
                    assert_eq!(zero.get(u, w, 1) + zero.get(u, w, 2), 0);
                }
            }
        }
    }

    #[test]
    fn triangle_stat_invariants_on_random_cochains() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = GroupSpec::new(vec![2, 3]).unwrap();
        let nu = SymmetricDistribution::<f64>::uniform(g.clone());
        for trial in 0..1000 {
            let n = 3 + trial % 7;
            let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
            let p = f.path_counts();
            for u in 1..=n {
                for w in 1..=n {
                    if u == w {
                        continue;
                    }
                    let total: u32 = (0..g.order()).map(|h| p.get(u, w, h)).sum();
                    assert_eq!(total as usize, n - 2);
                    for h in 0..g.order() {
                        assert_eq!(p.get(u, w, h), p.get(w, u, g.neg_index(h)));
                    }
                }
            }
        }
    }

    #[test]
    fn coboundary_triangles_examples() {
        let y = small().coboundary_triangles();
        assert_eq!(y.triangles(), &[[1, 2, 3]]);
        assert_eq!(y.edge_degree(1, 3), 1);
        let zero = Cochain::zero(7, z(2)).unwrap();
        assert_eq!(zero.coboundary_triangles(), TwoComplex::full(7));
    }

    #[test]
    fn edge_degree_equals_path_count_at_own_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let nu = SymmetricDistribution::<f64>::uniform(GroupSpec::new(vec![4]).unwrap());
        for n in 3..12 {
            let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
            let y = f.coboundary_triangles();
            let p = f.path_counts();
            for (u, w) in simplex::edges(n) {
                assert_eq!(y.edge_degree(u, w), p.get(u, w, f.get(u, w)) as usize);
            }
        }
    }

    #[test]
    fn embed_examples() {
        let f = Cochain::new(2, z(2), vec![1]).unwrap();
        let w = f.embed_graphon::<f64>();
        assert_eq!(*w.get(0, 1, 1), 1.0);
        assert_eq!(*w.get(1, 0, 1), 1.0);
        assert_eq!(*w.get(0, 1, 0), 0.0);
        assert_eq!(*w.get(0, 0, 0) + *w.get(0, 0, 1), 0.0);
    }

    #[test]
    fn embed_mass_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let nu = SymmetricDistribution::<f64>::uniform(z(3));
        for n in 2..=10 {
            let f = sample_random_cochain(n, &nu, &mut rng).unwrap();
            let w = f.embed_graphon::<BigRational>();
            assert!(w.as_function().is_symmetric());
            assert_eq!(w.total_mass(), BigRational::ratio(n as i64 - 1, n as i64));
            assert!(w.is_graphon());
            assert!(!w.in_w00());
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let f = small();
        let s = serde_json::to_string(&f.to_json()).unwrap();
        let back: CochainJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.into_cochain().unwrap(), f);
        let missing = r#"{"n":3,"group":[2],"edges":[{"u":1,"v":2,"g":[1]}]}"#;
        let err = serde_json::from_str::<CochainJson>(missing).unwrap().into_cochain();
        assert!(err.unwrap_err().to_string().contains("missing edge"));
        let reversed = r#"{"n":2,"group":[3],"edges":[{"u":2,"v":1,"g":[1]}]}"#;
        let f = serde_json::from_str::<CochainJson>(reversed).unwrap().into_cochain().unwrap();
        assert_eq!(f.get(1, 2), 2);
    }
}
