use std::fmt;

use crate::algebra::ThreeQubitPure;
use crate::eigen::eig_hermitian;
use crate::error::Result;
use crate::tol;

use super::three_tangle;

/// SLOCC class of a three-qubit pure state.
///
/// The biseparable tags name the entangled pair: `BiseparableBC` is
/// `|a⟩ ⊗ |ψ_BC⟩` with `ψ_BC` entangled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slocc3Class {
    FullProduct,
    BiseparableAB,
    BiseparableAC,
    BiseparableBC,
    Wclass,
    GHZclass,
}

impl fmt::Display for Slocc3Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Tangle threshold separating the GHZ class from the W class.
pub const TANGLE_THRESHOLD: f64 = 1e-9;

fn marginal_is_pure(psi: &ThreeQubitPure, party: usize) -> Result<bool> {
    let e = eig_hermitian(&psi.single_marginal(party)?)?;
    Ok(e.values[1] <= tol::RANK * e.values[0])
}

pub fn classify3(psi: &ThreeQubitPure) -> Result<Slocc3Class> {
    let pure = [marginal_is_pure(psi, 0)?, marginal_is_pure(psi, 1)?, marginal_is_pure(psi, 2)?];
    Ok(match pure {
        [true, true, _] | [true, _, true] | [_, true, true] => Slocc3Class::FullProduct,
        [true, false, false] => Slocc3Class::BiseparableBC,
        [false, true, false] => Slocc3Class::BiseparableAC,
        [false, false, true] => Slocc3Class::BiseparableAB,
        [false, false, false] if three_tangle(psi) > TANGLE_THRESHOLD => Slocc3Class::GHZclass,
        [false, false, false] => Slocc3Class::Wclass,
    })
}
