//! The determinantal hypertree measure as a projection DPP on triangles.
//!
//! The kernel is the orthogonal projection onto the row space of the
//! boundary operator `d2` of the full 2-skeleton (columns indexed by
//! triangles). Its principal minors on `C(n-1,2)`-sets are the hypertree
//! probabilities `|H_1(S)|^2 / n^{C(n-2,2)}`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::TwoComplex;
use crate::error::{Error, Result};
use crate::simplex::{self, binomial, edge_index, num_edges, num_triangles, triangle_edges};

/// Largest `n` for which the dense `C(n,3) x C(n,3)` kernel is built.
pub const MAX_KERNEL_N: usize = 30;

const RANK_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ProjectionKernel {
    n: usize,
    /// `C(n,3) x r` with orthonormal columns spanning the projection range.
    basis: DMatrix<f64>,
    kernel: DMatrix<f64>,
}

/// `d2` of the full 2-skeleton as an `E x T` float matrix. Column `t` has
/// `+1` at `uv`, `-1` at `uw`, `+1` at `vw`, times `orientation[t]`.
fn boundary(n: usize, orientation: &[f64]) -> DMatrix<f64> {
    let tris = simplex::triangles(n);
    let mut d = DMatrix::zeros(num_edges(n), tris.len());
    for (c, &t) in tris.iter().enumerate() {
        let [uv, uw, vw] = triangle_edges(t);
        let s = orientation[c];
        d[(edge_index(n, uv.0, uv.1), c)] = s;
        d[(edge_index(n, uw.0, uw.1), c)] = -s;
        d[(edge_index(n, vw.0, vw.1), c)] = s;
    }
    d
}

impl ProjectionKernel {
    pub fn build(n: usize) -> Result<Self> {
        Self::build_oriented(n, &vec![1.0; num_triangles(n)])
    }

    /// Same construction with triangle `t` oriented by the sign
    /// `orientation[t]`. The kernel changes by a diagonal sign conjugation,
    /// so all principal minors are unchanged.
    pub fn build_oriented(n: usize, orientation: &[f64]) -> Result<Self> {
        if !(3..=MAX_KERNEL_N).contains(&n) {
            return Err(Error::SizeOutOfRange {
                what: "projection kernel",
                n,
                min: 3,
                max: MAX_KERNEL_N,
            });
        }
        if orientation.len() != num_triangles(n) || orientation.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::Dimension("orientation must be one sign per triangle".into()));
        }
        let d = boundary(n, orientation);
        // modified Gram-Schmidt over the rows of d2
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for e in 0..d.nrows() {
            let mut v: DVector<f64> = d.row(e).transpose();
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&v);
                    v.axpy(-c, q, 1.0);
                }
            }
            let norm = v.norm();
            if norm > RANK_THRESHOLD {
                basis.push(v / norm);
            }
        }
        let expected = binomial(n - 1, 2);
        if basis.len() != expected {
            return Err(Error::RankMismatch {
                expected,
                found: basis.len(),
            });
        }
        let basis = DMatrix::from_columns(&basis);
        let kernel = &basis * basis.transpose();
        Ok(ProjectionKernel { n, basis, kernel })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ground_size(&self) -> usize {
        self.kernel.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn trace(&self) -> f64 {
        self.kernel.trace()
    }

    /// `max |K^2 - K|` entrywise.
    pub fn idempotence_error(&self) -> f64 {
        (&self.kernel * &self.kernel - &self.kernel).amax()
    }

    /// A copy with `K[i][j]` and `K[j][i]` shifted by `delta`; used to check
    /// that certificates notice a corrupted kernel.
    pub fn perturbed(&self, i: usize, j: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.kernel[(i, j)] += delta;
        if i != j {
            out.kernel[(j, i)] += delta;
        }
        out
    }

    /// `det K_S` for a set of triangle indices.
    pub fn principal_minor(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return 1.0;
        }
        let m = DMatrix::from_fn(set.len(), set.len(), |a, b| self.kernel[(set[a], set[b])]);
        m.determinant()
    }

    /// `P(sample contained in Y) = det(I - K restricted to the complement of Y)`.
    pub fn avoidance_probability(&self, y: &TwoComplex) -> Result<f64> {
        if y.n() != self.n {
            return Err(Error::Dimension(format!(
                "complex on {} vertices, kernel on {}",
                y.n(),
                self.n
            )));
        }
        let mut inside = vec![false; self.ground_size()];
        for i in y.indices() {
            inside[i] = true;
        }
        let out: Vec<usize> = (0..self.ground_size()).filter(|&i| !inside[i]).collect();
        if out.is_empty() {
            return Ok(1.0);
        }
        let m = DMatrix::from_fn(out.len(), out.len(), |a, b| {
            let id = if a == b { 1.0 } else { 0.0 };
            id - self.kernel[(out[a], out[b])]
        });
        Ok(m.determinant())
    }

    /// One exact draw: at each step pick a triangle with probability
    /// proportional to its squared row norm in the current basis, then
    /// restrict the range to vectors vanishing there (a Householder step).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TwoComplex> {
        let ground = self.ground_size();
        let mut v = self.basis.clone();
        let mut chosen = Vec::with_capacity(self.rank());
        let mut taken = vec![false; ground];
        while v.ncols() > 0 {
            let d = v.ncols();
            let norms: Vec<f64> = (0..ground)
                .map(|i| if taken[i] { 0.0 } else { v.row(i).norm_squared() })
                .collect();
            let total: f64 = norms.iter().sum();
            let mut x = rng.gen::<f64>() * total;
            let mut pick = None;
            for (i, &w) in norms.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                pick = Some(i);
                if x < w {
                    break;
                }
                x -= w;
            }
            let i = pick.ok_or(Error::RankMismatch {
                expected: self.rank(),
                found: chosen.len(),
            })?;
            taken[i] = true;
            chosen.push(i);

            // reflector H with (row_i H) = alpha e_1
            let row: DVector<f64> = v.row(i).transpose();
            let norm = row.norm();
            let alpha = if row[0] >= 0.0 { -norm } else { norm };
            let mut u = row;
            u[0] -= alpha;
            let uu = u.norm_squared();
            if uu > 0.0 {
                let vu = &v * &u;
                v -= (2.0 / uu) * vu * u.transpose();
            }
            v = v.columns(1, d - 1).into_owned();
        }
        Ok(TwoComplex::from_indices(self.n, &chosen))
    }
}
