use anyhow::Result;
use cocycle_core::complex::{sample_linial_meshulam, sample_one_out};
use cocycle_core::{ProjectionKernel, TwoComplex};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use crate::config::Model;

/// Draws complexes of one model at a fixed `n`; the hypertree kernel is
/// built once and shared by all replicas.
pub struct ComplexSampler {
    model: Model,
    n: usize,
    c: f64,
    kernel: Option<ProjectionKernel>,
}

impl ComplexSampler {
    pub fn new(model: Model, n: usize, c: f64) -> Result<Self> {
        let kernel = match model {
            Model::Hypertree => Some(ProjectionKernel::build(n)?),
            _ => None,
        };
        Ok(ComplexSampler { model, n, c, kernel })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TwoComplex> {
        Ok(match self.model {
            Model::Hypertree => self.kernel.as_ref().expect("built").sample(rng)?,
            Model::OneOut => sample_one_out(self.n, rng)?,
            Model::Lm => sample_linial_meshulam(self.n, self.c, rng)?,
        })
    }
}

/// Natural log of a positive big integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("below f64 range").ln();
    }
    let shift = bits - 900;
    (x >> shift).to_f64().expect("below f64 range").ln() + shift as f64 * std::f64::consts::LN_2
}
