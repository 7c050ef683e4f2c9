//! Random step graphons and test functions for audits and experiments.

use num_rational::BigRational;
use rand::Rng;

use super::step::{equal_parts, GroupStepFunction, StepCochainGraphon};
use crate::group::GroupSpec;
use crate::scalar::Scalar;

/// Fills block `(i, j)` for `i <= j` with a fiber from `draw` and sets the
/// mirrored block `(j, i)` to `g -> fiber(-g)`; diagonal fibers are averaged
/// with their negation so the result is symmetric.
fn symmetric_from_fibers<T: Scalar>(
    group: &GroupSpec,
    measures: Vec<T>,
    mut draw: impl FnMut() -> Vec<T>,
) -> StepCochainGraphon<T> {
    let k = measures.len();
    let order = group.order();
    let mut values = vec![T::zero(); k * k * order];
    let two = T::one() + T::one();
    for i in 0..k {
        for j in i..k {
            let fiber = draw();
            for g in 0..order {
                let ng = group.neg_index(g);
                if i == j {
                    values[(i * k + i) * order + g] =
                        (fiber[g].clone() + fiber[ng].clone()) / two.clone();
                } else {
                    values[(i * k + j) * order + g] = fiber[g].clone();
                    values[(j * k + i) * order + ng] = fiber[g].clone();
                }
            }
        }
    }
    let f = GroupStepFunction::new(group.clone(), measures, values).expect("shape");
    StepCochainGraphon::from_function(f).expect("symmetric by construction")
}

/// Random part measures bounded away from zero, summing to one.
pub fn random_measures<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut m: Vec<f64> = raw.iter().map(|x| x / s).collect();
    let head: f64 = m[..k - 1].iter().sum();
    m[k - 1] = 1.0 - head;
    m
}

/// A random element of `W^G_00`. With `sparsity > 0` each fiber entry is
/// zeroed with that probability (keeping at least one atom), so boundary
/// cases of the functionals are exercised.
pub fn random_w00<R: Rng + ?Sized>(
    group: &GroupSpec,
    k: usize,
    sparsity: f64,
    rng: &mut R,
) -> StepCochainGraphon<f64> {
    let order = group.order();
    let measures = random_measures(k, rng);
    symmetric_from_fibers(group, measures, || {
        let mut x: Vec<f64> = (0..order)
            .map(|_| {
                if rng.gen_bool(sparsity) {
                    0.0
                } else {
                    -rng.gen_range(f64::EPSILON..1.0).ln()
                }
            })
            .collect();
        if x.iter().all(|&v| v == 0.0) {
            x[rng.gen_range(0..order)] = 1.0;
        }
        let s: f64 = x.iter().sum();
        x.iter().map(|v| v / s).collect()
    })
}

/// A random element of `W^G_00<` (every entry at least `floor / |G|`).
pub fn random_w00_positive<R: Rng + ?Sized>(
    group: &GroupSpec,
    k: usize,
    floor: f64,
    rng: &mut R,
) -> StepCochainGraphon<f64> {
    let w = random_w00(group, k, 0.0, rng);
    let order = group.order() as f64;
    let f = w
        .as_function()
        .map_values(|v| (1.0 - floor) * v + floor / order);
    StepCochainGraphon::from_function(f).expect("affine map keeps symmetry")
}

/// A random element of `W^G_00` with rational entries of denominator
/// dividing `denominator` on `k` equal parts.
pub fn random_w00_rational<R: Rng + ?Sized>(
    group: &GroupSpec,
    k: usize,
    denominator: i64,
    rng: &mut R,
) -> StepCochainGraphon<BigRational> {
    let order = group.order();
    symmetric_from_fibers(group, equal_parts(k), || {
        // a random composition of `denominator` into `order` parts
        let mut cuts: Vec<i64> = (0..order - 1).map(|_| rng.gen_range(0..=denominator)).collect();
        cuts.push(0);
        cuts.push(denominator);
        cuts.sort_unstable();
        cuts.windows(2)
            .map(|w| BigRational::ratio(w[1] - w[0], denominator))
            .collect()
    })
}

/// A random, generally asymmetric, test function with entries in
/// `[-scale, scale]`.
pub fn random_test_function<R: Rng + ?Sized>(
    group: &GroupSpec,
    measures: Vec<f64>,
    scale: f64,
    rng: &mut R,
) -> GroupStepFunction<f64> {
    GroupStepFunction::from_fn(group.clone(), measures, |_, _, _| rng.gen_range(-scale..=scale))
        .expect("valid measures")
}
