//! Cochain graphons, random 2-complexes and exact cocycle counting.
//!
//! The numeric core ([`graphon`], [`regularity`], [`group`]) is generic over
//! [`Scalar`]: `f64`, `f32`, or exact [`Rational`] arithmetic.

pub mod cochain;
pub mod complex;
pub mod error;
pub mod graphon;
pub mod group;
pub mod homology;
pub mod regularity;
pub mod scalar;
pub mod simplex;

pub use cochain::{sample_random_cochain, Cochain, CochainJson, TriangleStat};
pub use complex::{ProjectionKernel, TwoComplex};
pub use error::{Error, Result};
pub use graphon::{GroupStepFunction, StepCochainGraphon, StepFunction, StepTestFunction};
pub use group::{GroupElement, GroupSpec, SymmetricDistribution};
pub use homology::{HomologyReport, IntegralHomology};
pub use regularity::Partition;
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type Graphon = StepCochainGraphon<f64>;
pub type ExactGraphon = StepCochainGraphon<Rational>;
pub type TestFunction = GroupStepFunction<f64>;
pub type ExactTestFunction = GroupStepFunction<Rational>;
pub type Distribution = SymmetricDistribution<f64>;
pub type ExactDistribution = SymmetricDistribution<Rational>;
