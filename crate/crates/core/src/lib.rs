//! Lorentz singular value decomposition of two-qubit states and its uses:
//! SLOCC normal forms, entanglement monotones, convertibility, and
//! three-qubit classification and GHZ/W distillation.

pub mod algebra;
pub mod convert;
pub mod eigen;
pub mod filtering;
pub mod monotones;
mod optimize;
pub mod error;
pub mod lorentz;
pub mod lsvd;
pub mod random;
pub mod tol;
pub mod tripartite;

pub use algebra::{DensityMatrix2Q, Filter2, ThreeQubitPure, C64};
pub use error::{Error, Result};
pub use lorentz::{LorentzTransform, RMatrix};
pub use lsvd::{lsvd, LsvdResult, NormalFormClass};

/// The guide's code listings, compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/r-picture.md")]
    mod r_picture {}
    #[doc = include_str!("../../../book/src/lsvd.md")]
    mod lsvd {}
    #[doc = include_str!("../../../book/src/monotones.md")]
    mod monotones {}
    #[doc = include_str!("../../../book/src/convert.md")]
    mod convert {}
    #[doc = include_str!("../../../book/src/three-qubits.md")]
    mod three_qubits {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
