//! Tolerance hierarchy shared by every module.

/// Structural checks on constructed objects (Hermiticity, trace, norm).
pub const STRUCTURAL: f64 = 1e-10;
/// Rank decisions, relative to the largest eigenvalue.
pub const RANK: f64 = 1e-9;
/// Convergence of iterative solvers.
pub const CONVERGENCE: f64 = 1e-12;
/// Unit-determinant check on filters and Lorentz-group invariants.
pub const DETERMINANT: f64 = 1e-9;
/// Hermiticity accepted by the eigensolver.
pub const EIG_HERMITIAN: f64 = 1e-9;
/// Relative gap below which eigenvalues of `RηRᵀη` are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-7;
/// Normal-form family relations.
pub const FAMILY: f64 = 1e-7;
/// Lorentz singular values at or below this are treated as zero.
pub const ZERO_SINGULAR: f64 = 1e-9;
