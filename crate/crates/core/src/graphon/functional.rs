//! Functionals of step cochain graphons.
//!
//! Products and sums are carried out in the scalar type (exact for
//! rationals); logarithms are taken in `f64` at the end. Infinite values are
//! returned as `f64::INFINITY` / `f64::NEG_INFINITY`, never saturated.

use super::step::{GroupStepFunction, StepCochainGraphon};
use crate::error::{Error, Result};
use crate::group::SymmetricDistribution;
use crate::scalar::Scalar;

/// `(V*W)^g = sum_h V^h o W^{g-h}` with `(A o B)(x,y) = int A(x,t) B(t,y) dt`.
///
/// The product of two symmetric kernels is in general not symmetric
/// (`((V*W)^g)^T = (W*V)^{-g}`), so the result is an unconstrained
/// group step function. See [`self_convolve`] for `W*W`.
pub fn convolve<T: Scalar>(
    v: &StepCochainGraphon<T>,
    w: &StepCochainGraphon<T>,
) -> Result<GroupStepFunction<T>> {
    let (a, b) = v.as_function().align(w.as_function())?;
    Ok(convolve_aligned(&a, &b))
}

pub(crate) fn convolve_aligned<T: Scalar>(
    a: &GroupStepFunction<T>,
    b: &GroupStepFunction<T>,
) -> GroupStepFunction<T> {
    let k = a.parts();
    let tables = a.tables();
    let order = tables.order;
    let mu = a.measures();
    let mut out = vec![T::zero(); k * k * order];
    for i in 0..k {
        for t in 0..k {
            for h in 0..order {
                let left = a.get(i, t, h);
                if left.is_zero() {
                    continue;
                }
                let left = left.clone() * mu[t].clone();
                for j in 0..k {
                    let base = (i * k + j) * order;
                    for r in 0..order {
                        let right = b.get(t, j, r);
                        if right.is_zero() {
                            continue;
                        }
                        // h + r = g
                        let g = tables.add(h, r);
                        out[base + g] = out[base + g].clone() + left.clone() * right.clone();
                    }
                }
            }
        }
    }
    GroupStepFunction::from_parts_unchecked(a.group().clone(), mu.to_vec(), out)
}

/// `W*W`, symmetric whenever `W` is. In float mode the two mirrored sums
/// are rounded differently, so the result is symmetrized (a no-op in exact
/// arithmetic).
pub fn self_convolve<T: Scalar>(w: &StepCochainGraphon<T>) -> StepCochainGraphon<T> {
    let mut f = convolve_aligned(w.as_function(), w.as_function());
    if !T::EXACT {
        f = f.symmetrize();
    }
    StepCochainGraphon::from_function_unchecked(f)
}

/// One summand `weight * log(argument)` of `b(W)`, with `weight > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTerm<T> {
    pub weight: T,
    pub argument: T,
}

/// The nonzero summands of `b(W) = <W, log o (W*W)>`: for each block
/// `(i, j)` and `g` with `W^g[i][j] > 0`, weight `mu_i mu_j W^g[i][j]` and
/// argument `(W*W)^g[i][j]`. Exact in rational mode.
pub fn b_terms<T: Scalar>(w: &StepCochainGraphon<T>) -> Result<Vec<LogTerm<T>>> {
    w.check_graphon()?;
    let conv = self_convolve(w);
    let k = w.parts();
    let order = w.group().order();
    let mu = w.measures();
    let mut terms = Vec::new();
    for i in 0..k {
        for j in 0..k {
            for g in 0..order {
                let x = w.get(i, j, g);
                if x.is_zero() {
                    continue;
                }
                terms.push(LogTerm {
                    weight: mu[i].clone() * mu[j].clone() * x.clone(),
                    argument: conv.get(i, j, g).clone(),
                });
            }
        }
    }
    Ok(terms)
}

/// `b(W) = <W, log o (W*W)>` with `0 log 0 = 0`; `-inf` when some
/// `W^g > 0` meets `(W*W)^g = 0`.
pub fn b_functional<T: Scalar>(w: &StepCochainGraphon<T>) -> Result<f64> {
    let terms = b_terms(w)?;
    let mut acc = 0.0;
    for t in terms {
        if t.argument.is_zero() {
            return Ok(f64::NEG_INFINITY);
        }
        acc += t.weight.to_f64_lossy() * t.argument.to_f64_lossy().ln();
    }
    Ok(acc)
}

fn kl_sum<T: Scalar>(w: &StepCochainGraphon<T>, reference: &[f64]) -> f64 {
    let k = w.parts();
    let order = w.group().order();
    let mu: Vec<f64> = w.measures().iter().map(|m| m.to_f64_lossy()).collect();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            let block = mu[i] * mu[j];
            for g in 0..order {
                let x = w.get(i, j, g).to_f64_lossy();
                if x > 0.0 {
                    acc += block * x * (x / reference[g]).ln();
                }
            }
        }
    }
    acc
}

/// `I_nu(W) = 1/2 int sum_g W^g log(W^g / nu(g))` on `W^G_00`, `+inf`
/// elsewhere. Membership tolerance: `1e-9` (float), exact (rational).
pub fn rate_function<T: Scalar, U: Scalar>(
    w: &StepCochainGraphon<T>,
    nu: &SymmetricDistribution<U>,
) -> Result<f64> {
    w.as_function().check_group(nu.group())?;
    w.check_graphon()?;
    if !w.in_w00() {
        return Ok(f64::INFINITY);
    }
    let reference: Vec<f64> = nu.probs().iter().map(|p| p.to_f64_lossy()).collect();
    Ok(0.5 * kl_sum(w, &reference))
}

/// `H(W) = log|G| - 2 I_uniform(W)`: the integrated Shannon entropy of the
/// fibers on `W^G_00`, `-inf` elsewhere.
pub fn entropy_h<T: Scalar>(w: &StepCochainGraphon<T>) -> Result<f64> {
    let nu = SymmetricDistribution::<f64>::uniform(w.group().clone());
    let rate = rate_function(w, &nu)?;
    Ok((w.group().order() as f64).ln() - 2.0 * rate)
}

/// `Z_phi(W) = sum_g int phi^g W^g`, exact in the scalar type. `phi` need
/// not be symmetric.
pub fn linear_functional<T: Scalar>(
    phi: &GroupStepFunction<T>,
    w: &StepCochainGraphon<T>,
) -> Result<T> {
    let (p, x) = phi.align(w.as_function())?;
    let k = p.parts();
    let order = p.group().order();
    let mu = p.measures();
    let mut acc = T::zero();
    for i in 0..k {
        for j in 0..k {
            let block = mu[i].clone() * mu[j].clone();
            let mut s = T::zero();
            for g in 0..order {
                s = s + p.get(i, j, g).clone() * x.get(i, j, g).clone();
            }
            acc = acc + block * s;
        }
    }
    Ok(acc)
}

/// `log sum_g nu(g) exp(2 x_g)`, evaluated stably.
pub fn log_mgf(nu: &[f64], x: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = x.clone().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = nu.iter().zip(x).map(|(p, v)| p * (2.0 * (v - m)).exp()).sum();
    2.0 * m + s.ln()
}

/// `1/2 int log(sum_g nu(g) exp(2 phi(x,y,g)))`, using the symmetrization
/// of `phi`.
pub fn mgf_limit<T: Scalar, U: Scalar>(
    phi: &GroupStepFunction<T>,
    nu: &SymmetricDistribution<U>,
) -> Result<f64> {
    phi.check_group(nu.group())?;
    let phi = phi.symmetrize().to_f64();
    let nu: Vec<f64> = nu.probs().iter().map(|p| p.to_f64_lossy()).collect();
    let k = phi.parts();
    let order = phi.group().order();
    let mu = phi.measures();
    let mut acc = 0.0;
    for i in 0..k {
        for j in 0..k {
            let vals = (0..order).map(|g| *phi.get(i, j, g));
            acc += mu[i] * mu[j] * log_mgf(&nu, vals);
        }
    }
    Ok(0.5 * acc)
}

/// Exact finite-`n` value and its `n -> inf` limit of
/// `(1/n^2) log E exp(n^2 Z_phi(R_n))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfValue {
    pub n: usize,
    pub finite: f64,
    pub limit: f64,
}

impl MgfValue {
    pub fn gap(&self) -> f64 {
        self.limit - self.finite
    }
}

/// Overlap of grid cell `((c-1)/n, c/n]` with each part, scaled by `n`.
fn grid_overlaps<T: Scalar>(measures: &[T], n: usize) -> Vec<Vec<(usize, T)>> {
    let nn = T::from_usize_exact(n);
    let mut cuts = Vec::with_capacity(measures.len());
    let mut acc = T::zero();
    for m in measures {
        acc = acc + m.clone();
        cuts.push(acc.clone());
    }
    let mut rows = Vec::with_capacity(n);
    for c in 0..n {
        let lo = T::ratio(c as i64, n as i64);
        let hi = T::ratio(c as i64 + 1, n as i64);
        let mut row = Vec::new();
        let mut start = T::zero();
        for (a, end) in cuts.iter().enumerate() {
            let l = if start > lo { start.clone() } else { lo.clone() };
            let r = if *end < hi { end.clone() } else { hi.clone() };
            if r > l {
                row.push((a, (r - l) * nn.clone()));
            }
            start = end.clone();
        }
        rows.push(row);
    }
    rows
}

/// The finite-`n` identity
/// `(1/n^2) log E exp(n^2 Z_phi(R_n)) = 1/2 int_{off-diagonal} log(sum_g nu(g) exp(2 phi_n))`
/// with `phi_n` the stepping of the symmetrized `phi` onto the `n`-grid,
/// evaluated directly (no sampling), together with the limit value.
pub fn mgf_finite_n<T: Scalar, U: Scalar>(
    phi: &GroupStepFunction<T>,
    n: usize,
    nu: &SymmetricDistribution<U>,
) -> Result<MgfValue> {
    phi.check_group(nu.group())?;
    if n < 2 {
        return Err(Error::SizeOutOfRange {
            what: "mgf_finite_n",
            n,
            min: 2,
            max: usize::MAX,
        });
    }
    let sym = phi.symmetrize();
    let order = sym.group().order();
    let overlaps = grid_overlaps(sym.measures(), n);
    let nu_f: Vec<f64> = nu.probs().iter().map(|p| p.to_f64_lossy()).collect();
    let mut acc = 0.0;
    let mut stepped = vec![T::zero(); order];
    for u in 0..n {
        for w in 0..n {
            if u == w {
                continue;
            }
            for s in stepped.iter_mut() {
                *s = T::zero();
            }
            for (a, wa) in &overlaps[u] {
                for (b, wb) in &overlaps[w] {
                    let weight = wa.clone() * wb.clone();
                    for (g, s) in stepped.iter_mut().enumerate() {
                        *s = s.clone() + weight.clone() * sym.get(*a, *b, g).clone();
                    }
                }
            }
            acc += log_mgf(&nu_f, stepped.iter().map(|s| s.to_f64_lossy()));
        }
    }
    let finite = 0.5 * acc / (n * n) as f64;
    Ok(MgfValue {
        n,
        finite,
        limit: mgf_limit(phi, nu)?,
    })
}

/// `Z_phi(W) - 1/2 int log(sum_g nu(g) exp(2 phi))`; by weak duality at most
/// `I_nu(W)`.
pub fn dual_rate<T: Scalar, U: Scalar>(
    phi: &GroupStepFunction<T>,
    w: &StepCochainGraphon<T>,
    nu: &SymmetricDistribution<U>,
) -> Result<f64> {
    w.as_function().check_group(nu.group())?;
    let z = linear_functional(phi, w)?.to_f64_lossy();
    Ok(z - mgf_limit(phi, nu)?)
}

/// The maximizer `phi*(x,y,g) = 1/2 log(W^g(x,y) / nu(g))` and its dual
/// value, which equals `I_nu(W)`. Requires `W` in `W^G_00<`.
pub fn dual_maximize<T: Scalar, U: Scalar>(
    w: &StepCochainGraphon<T>,
    nu: &SymmetricDistribution<U>,
) -> Result<(GroupStepFunction<f64>, f64)> {
    w.as_function().check_group(nu.group())?;
    w.check_graphon()?;
    if let Some((i, j)) = w.w00_violation() {
        return Err(Error::NotInW00(format!("fiber of block ({i}, {j}) does not sum to 1")));
    }
    let k = w.parts();
    let order = w.group().order();
    for i in 0..k {
        for j in 0..k {
            for g in 0..order {
                if w.get(i, j, g).is_zero() {
                    return Err(Error::ZeroEntry { i, j, g });
                }
            }
        }
    }
    let wf = w.to_f64();
    let nu_f: Vec<f64> = nu.probs().iter().map(|p| p.to_f64_lossy()).collect();
    let phi = GroupStepFunction::from_fn(wf.group().clone(), wf.measures().to_vec(), |i, j, g| {
        0.5 * (wf.get(i, j, g) / nu_f[g]).ln()
    })?;
    let value = dual_rate(&phi, &wf, nu)?;
    Ok((phi, value))
}

/// `W_t^g = t W^g + (1 - t)/|G|`, in `W^G_00` for `W` in `W^G_00`, and in
/// `W^G_00<` for `t < 1`.
pub fn interpolate_to_uniform<T: Scalar>(
    w: &StepCochainGraphon<T>,
    t: T,
) -> Result<StepCochainGraphon<T>> {
    if t < T::zero() || t > T::one() {
        return Err(Error::InvalidStepFunction(format!("t = {t:?} outside [0, 1]")));
    }
    w.check_graphon()?;
    if let Some((i, j)) = w.w00_violation() {
        return Err(Error::NotInW00(format!("fiber of block ({i}, {j}) does not sum to 1")));
    }
    let floor = (T::one() - t.clone()) / T::from_usize_exact(w.group().order());
    Ok(StepCochainGraphon::from_function_unchecked(
        w.as_function()
            .map_values(|v| t.clone() * v.clone() + floor.clone()),
    ))
}
