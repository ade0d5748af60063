use crate::algebra::ThreeQubitPure;

/// Three-tangle `τ = 4 |hyperdet(ψ)|` of the 2×2×2 amplitude tensor.
pub fn three_tangle(psi: &ThreeQubitPure) -> f64 {
    4.0 * hyperdeterminant(psi).norm()
}

/// Cayley hyperdeterminant, degree 4 in the amplitudes.
pub(crate) fn hyperdeterminant(psi: &ThreeQubitPure) -> crate::C64 {
    let a = |i: usize, j: usize, k: usize| psi.amp(i, j, k);
    let d1 = a(0, 0, 0).powu(2) * a(1, 1, 1).powu(2)
        + a(0, 0, 1).powu(2) * a(1, 1, 0).powu(2)
        + a(0, 1, 0).powu(2) * a(1, 0, 1).powu(2)
        + a(1, 0, 0).powu(2) * a(0, 1, 1).powu(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    d1 - d2 * 2.0 + d3 * 4.0
}
