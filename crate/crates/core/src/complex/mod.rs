//! 2-dimensional simplicial complexes with complete 1-skeleton on `[n]`,
//! and the random models built on them.

mod hypertree;
mod kernel;

pub use hypertree::{
    enumerate_hypertrees, hypertree_weight_within, kalai_sum, kalai_total, kernel_certificate,
    log_avoidance_exact, reduced_minor, total_probability, upperb_bound, Hypertree,
    MAX_ENUMERATION_N,
};
pub use kernel::{ProjectionKernel, MAX_KERNEL_N};

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{self, edge_index, num_edges, num_triangles, triangle_edges, triangle_index};

/// Vertex set `[n]`, all edges, and a set of triangular faces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ComplexJson", into = "ComplexJson")]
pub struct TwoComplex {
    n: usize,
    triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ComplexJson {
    n: usize,
    triangles: Vec<[usize; 3]>,
}

impl TryFrom<ComplexJson> for TwoComplex {
    type Error = Error;

    fn try_from(raw: ComplexJson) -> Result<Self> {
        TwoComplex::new(raw.n, raw.triangles)
    }
}

impl From<TwoComplex> for ComplexJson {
    fn from(c: TwoComplex) -> Self {
        ComplexJson {
            n: c.n,
            triangles: c.triangles,
        }
    }
}

impl TwoComplex {
    /// Sorts each triple and the face list. Rejects repeated vertices,
    /// vertices outside `[n]` and duplicate faces.
    pub fn new(n: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidComplex("n must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for mut t in faces {
            t.sort_unstable();
            if t[0] < 1 || t[2] > n || t[0] == t[1] || t[1] == t[2] {
                return Err(Error::InvalidComplex(format!("bad triangle {t:?} for n = {n}")));
            }
            if !set.insert(t) {
                return Err(Error::InvalidComplex(format!("duplicate triangle {t:?}")));
            }
        }
        Ok(TwoComplex {
            n,
            triangles: set.into_iter().collect(),
        })
    }

    /// Like [`TwoComplex::new`] but silently merges duplicate faces.
    pub fn from_faces_dedup(n: usize, faces: impl IntoIterator<Item = [usize; 3]>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for mut t in faces {
            t.sort_unstable();
            set.insert(t);
        }
        Self::new(n, set.into_iter().collect())
    }

    pub fn empty(n: usize) -> Self {
        TwoComplex {
            n,
            triangles: Vec::new(),
        }
    }

    /// The full 2-skeleton of the simplex on `[n]`.
    pub fn full(n: usize) -> Self {
        TwoComplex {
            n,
            triangles: simplex::triangles(n),
        }
    }

    /// Faces given by positions in the lexicographic list of all triangles.
    pub fn from_indices(n: usize, indices: &[usize]) -> Self {
        let all = simplex::triangles(n);
        let mut triangles: Vec<[usize; 3]> = indices.iter().map(|&i| all[i]).collect();
        triangles.sort_unstable();
        triangles.dedup();
        TwoComplex { n, triangles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn face_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn contains(&self, t: [usize; 3]) -> bool {
        self.triangles.binary_search(&t).is_ok()
    }

    /// Lexicographic positions of the faces.
    pub fn indices(&self) -> Vec<usize> {
        self.triangles.iter().map(|&t| triangle_index(self.n, t)).collect()
    }

    /// `t_Y(tau) = |{sigma in Y : tau in sigma}|` for every edge, in edge
    /// index order.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; num_edges(self.n)];
        for &t in &self.triangles {
            for (u, v) in triangle_edges(t) {
                deg[edge_index(self.n, u, v)] += 1;
            }
        }
        deg
    }

    /// `t_Y({u, w})`.
    pub fn edge_degree(&self, u: usize, w: usize) -> usize {
        let (a, b) = if u < w { (u, w) } else { (w, u) };
        self.triangles
            .iter()
            .filter(|t| t.contains(&a) && t.contains(&b))
            .count()
    }

    pub fn is_subset_of(&self, other: &TwoComplex) -> bool {
        self.n == other.n && self.triangles.iter().all(|&t| other.contains(t))
    }

    pub fn complement(&self) -> TwoComplex {
        let triangles = simplex::triangles(self.n)
            .into_iter()
            .filter(|&t| !self.contains(t))
            .collect();
        TwoComplex {
            n: self.n,
            triangles,
        }
    }
}

/// `S_2(n,1)`: each edge `{u,v}` independently picks a uniform third vertex
/// `w`; repeated faces are kept once.
pub fn sample_one_out<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<TwoComplex> {
    if n < 3 {
        return Err(Error::SizeOutOfRange {
            what: "one-out complex",
            n,
            min: 3,
            max: usize::MAX,
        });
    }
    let mut faces = Vec::with_capacity(num_edges(n));
    for (u, v) in simplex::edges(n) {
        // uniform over [n] \ {u, v}
        let mut w = rng.gen_range(1..=n - 2);
        if w >= u {
            w += 1;
        }
        if w >= v {
            w += 1;
        }
        faces.push([u, v, w]);
    }
    TwoComplex::from_faces_dedup(n, faces)
}

/// `X_2(n, c/n)`: every triangle independently with probability `c/n`.
pub fn sample_linial_meshulam<R: Rng + ?Sized>(n: usize, c: f64, rng: &mut R) -> Result<TwoComplex> {
    let p = c / n as f64;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let triangles = simplex::triangles(n)
        .into_iter()
        .filter(|_| rng.gen_bool(p))
        .collect();
    Ok(TwoComplex { n, triangles })
}

/// Number of triangles of the full 2-skeleton.
pub fn full_face_count(n: usize) -> usize {
    num_triangles(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn construction_validates() {
        assert!(TwoComplex::new(4, vec![[1, 2, 5]]).is_err());
        assert!(TwoComplex::new(4, vec![[1, 2, 2]]).is_err());
        assert!(TwoComplex::new(4, vec![[1, 2, 3], [3, 2, 1]]).is_err());
        let c = TwoComplex::new(4, vec![[3, 1, 2], [4, 1, 2]]).unwrap();
        assert_eq!(c.triangles(), &[[1, 2, 3], [1, 2, 4]]);
        assert_eq!(c.edge_degree(2, 1), 2);
        assert_eq!(c.edge_degrees()[edge_index(4, 1, 2)], 2);
    }

    #[test]
    fn json_is_sorted_triples() {
        let c: TwoComplex = serde_json::from_str(r#"{"n":4,"triangles":[[2,1,3]]}"#).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"{"n":4,"triangles":[[1,2,3]]}"#);
        assert!(serde_json::from_str::<TwoComplex>(r#"{"n":3,"triangles":[[1,2,4]]}"#).is_err());
    }

    #[test]
    fn one_out_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(sample_one_out(3, &mut rng).unwrap(), TwoComplex::full(3));
        }
        assert!(sample_one_out(2, &mut rng).is_err());
        for _ in 0..50 {
            let c = sample_one_out(9, &mut rng).unwrap();
            assert!(c.face_count() <= num_edges(9));
            assert!(c.edge_degrees().iter().all(|&d| d >= 1));
        }
    }

    #[test]
    fn one_out_mean_face_count_n4() {
        // A fixed triangle at n = 4 is absent iff each of its three edges
        // picks the other vertex: probability (1/2)^3.
        let expected = 4.0 * (1.0 - 0.125);
        let var_single = 0.875 * 0.125;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let samples = 10_000;
        let counts: Vec<f64> = (0..samples)
            .map(|_| sample_one_out(4, &mut rng).unwrap().face_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / samples as f64;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        assert!(var > 0.0 && var < 4.0 * var_single * 2.0);
        let se = (var / samples as f64).sqrt();
        assert!((mean - expected).abs() < 3.0 * se, "{mean} vs {expected}");
    }

    #[test]
    fn linial_meshulam_extremes_and_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(sample_linial_meshulam(7, 0.0, &mut rng).unwrap().face_count(), 0);
        assert_eq!(sample_linial_meshulam(7, 7.0, &mut rng).unwrap(), TwoComplex::full(7));
        assert!(sample_linial_meshulam(7, 8.0, &mut rng).is_err());
        let (n, c, samples) = (10usize, 2.0, 10_000);
        let p = c / n as f64;
        let total = num_triangles(n) as f64;
        let mean = (0..samples)
            .map(|_| sample_linial_meshulam(n, c, &mut rng).unwrap().face_count() as f64)
            .sum::<f64>()
            / samples as f64;
        let sigma = (total * p * (1.0 - p) / samples as f64).sqrt();
        assert!((mean - total * p).abs() < 3.0 * sigma);
    }
}
