//! Seeded generators for states and filters.
//!
//! Every random draw in the crate flows from a single `u64` seed; Monte Carlo
//! loops derive one independent ChaCha stream per trial index.

use nalgebra::Vector4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{apply_local3, bell, r, DensityMatrix2Q, Ket4, Ket8, Mat2, Mat4, ThreeQubitPure, C64};
use crate::error::{Error, Result};
use crate::lorentz::random_filter;

/// Independent generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn haar_pure2<R: Rng + ?Sized>(rng: &mut R) -> Ket4 {
    let v = Ket4::from_fn(|_, _| gaussian_c64(rng));
    v / r(v.norm())
}

pub fn haar_pure3<R: Rng + ?Sized>(rng: &mut R) -> ThreeQubitPure {
    let v = Ket8::from_fn(|_, _| gaussian_c64(rng));
    ThreeQubitPure::normalized(v).expect("Gaussian vector is nonzero")
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix2Q {
    DensityMatrix2Q::from_pure(&haar_pure2(rng)).expect("normalized")
}

/// `G G† / tr(G G†)` with a complex Gaussian 4×4 `G`; full rank almost surely.
pub fn wishart_state<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix2Q {
    let g = Mat4::from_fn(|_, _| gaussian_c64(rng));
    DensityMatrix2Q::from_unnormalized(g * g.adjoint()).expect("Wishart matrices are PSD")
}

/// Werner state `p |ψ−⟩⟨ψ−| + (1 − p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix2Q> {
    if !(-1.0 / 3.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("Werner parameter {p} outside [-1/3, 1]")));
    }
    let s = bell::psi_minus();
    let m = s * s.adjoint() * r(p) + Mat4::identity() * r((1.0 - p) / 4.0);
    DensityMatrix2Q::from_unnormalized(m)
}

/// Bell-diagonal state with weights on `(φ+, φ−, ψ+, ψ−)`.
pub fn bell_diagonal(weights: [f64; 4]) -> Result<DensityMatrix2Q> {
    if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("Bell weights {weights:?} are not a distribution")));
    }
    let basis = [bell::phi_plus(), bell::phi_minus(), bell::psi_plus(), bell::psi_minus()];
    let m = basis.iter().zip(weights).fold(Mat4::zeros(), |acc, (v, w)| acc + v * v.adjoint() * r(w));
    DensityMatrix2Q::from_unnormalized(m)
}

/// Uniform point of the probability simplex.
pub fn simplex4<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let e: Vector4<f64> = Vector4::from_fn(|_, _| -(1.0 - rng.random::<f64>()).ln());
    let s = e.sum();
    [e[0] / s, e[1] / s, e[2] / s, e[3] / s]
}

/// GHZ-class state: random determinant-one filters applied to GHZ.
pub fn ghz_class<R: Rng + ?Sized>(rng: &mut R, boost_cap: f64) -> ThreeQubitPure {
    orbit_sample(rng, &ThreeQubitPure::ghz(), boost_cap)
}

/// W-class state: random determinant-one filters applied to W.
pub fn w_class<R: Rng + ?Sized>(rng: &mut R, boost_cap: f64) -> ThreeQubitPure {
    orbit_sample(rng, &ThreeQubitPure::w(), boost_cap)
}

fn orbit_sample<R: Rng + ?Sized>(rng: &mut R, psi: &ThreeQubitPure, boost_cap: f64) -> ThreeQubitPure {
    let [a, b, c]: [Mat2; 3] = std::array::from_fn(|_| random_filter(rng, boost_cap).m);
    ThreeQubitPure::normalized(apply_local3(psi.amplitudes(), &a, &b, &c)).expect("filters are invertible")
}

/// Random contraction `U diag(σ1, σ2) V†` with Haar `U`, `V` and `σ` uniform in `[0, 1]²`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let u = haar_unitary2(rng);
    let v = haar_unitary2(rng);
    let d = Mat2::new(r(rng.random()), r(0.0), r(0.0), r(rng.random()));
    u * d * v.adjoint()
}

pub fn haar_unitary2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let g = Mat2::from_fn(|_, _| gaussian_c64(rng));
    let qr = g.qr();
    let q = qr.q();
    let rr = qr.r();
    // Fix the phases of R's diagonal so Q is Haar distributed.
    let ph = Mat2::from_diagonal(&nalgebra::Vector2::new(
        rr[(0, 0)] / r(rr[(0, 0)].norm()),
        rr[(1, 1)] / r(rr[(1, 1)].norm()),
    ));
    q * ph
}
