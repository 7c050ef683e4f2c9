//! Step cochain kernels and graphons.

mod cut;
mod functional;
mod json;
mod random;
mod step;

pub use cut::{
    cut_distance_bounds, cut_norm, cut_norm_slice, cut_norm_with, CutDistanceBounds, CutMode,
    CutNorm, EXACT_CUT_LIMIT, EXHAUSTIVE_ALIGN_LIMIT,
};
pub use functional::{
    b_functional, b_terms, convolve, dual_maximize, dual_rate, entropy_h, interpolate_to_uniform,
    linear_functional, log_mgf, mgf_finite_n, mgf_limit, rate_function, self_convolve, LogTerm,
    MgfValue,
};
pub use json::GraphonJson;
pub use random::{
    random_measures, random_test_function, random_w00, random_w00_positive, random_w00_rational,
};
pub use step::{
    equal_parts, GroupStepFunction, Refinement, StepCochainGraphon, StepFunction,
    StepTestFunction,
};

#[cfg(test)]
mod tests;
