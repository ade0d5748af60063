//! Three-qubit pure states: SLOCC classes, filters reaching the GHZ and W
//! normal forms, and single-copy distillation.

mod classify;
mod filters;
mod ghz;
mod tangle;
mod wdistill;

pub use classify::{classify3, Slocc3Class, TANGLE_THRESHOLD};
pub use filters::{
    branch_success_probability, ghz_filters, ghz_symmetry_family, povm_feasible, ray_residual, w_family_matrices,
    w_filters, w_symmetry_family, FilterTriple,
};
pub use ghz::{
    curve_a_of_b, curve_b_of_a, curve_crossings, eigvec_formula_check, ghz_distillation_oracle, lambda_max8,
    optimal_ghz_distillation, CurveCrossings, GhzDistillResult,
};
pub use tangle::three_tangle;
pub use wdistill::{optimal_w_distillation, WDistillResult};

#[cfg(test)]
mod tests;
