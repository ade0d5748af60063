//! Entanglement monotones built from the Lorentz singular values.
//!
//! `M1 = max(0, −(s0 − s1 − s2))` and `M2 = max(0, −(s0 − s1 − s2 + s3))`;
//! the concurrence is `M2 / 2`. The singular values relate linearly to the
//! Wootters eigenvalues `λ` through `s = H λ`.

use nalgebra::{Matrix4, Vector4};
use rand::Rng;

use crate::algebra::{apply_local2, hermitian_fn, kron2, partial_transpose_matrix, pauli_basis, r, DensityMatrix2Q, Mat2, Mat4};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::lorentz::{random_lorentz, LorentzTransform, RMatrix};
use crate::lsvd::lsvd;
use crate::random::{random_contraction, trial_rng};

/// Ordered Lorentz singular values `s0 ≥ s1 ≥ s2 ≥ |s3|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzSpectrum(pub [f64; 4]);

impl LorentzSpectrum {
    pub fn new(s: [f64; 4]) -> Result<Self> {
        let eps = 1e-9 * s[0].abs().max(1.0);
        if s[0] + eps < s[1] || s[1] + eps < s[2] || s[2] + eps < s[3].abs() {
            return Err(Error::InvalidParameter(format!("spectrum {s:?} is not ordered")));
        }
        Ok(Self(s))
    }
}

/// The sign matrix with `s = H λ`.
pub fn sign_matrix() -> Matrix4<f64> {
    Matrix4::new(
        1.0, 1.0, 1.0, 1.0, //
        1.0, 1.0, -1.0, -1.0, //
        1.0, -1.0, 1.0, -1.0, //
        -1.0, 1.0, 1.0, -1.0,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    pub s: [f64; 4],
    pub m1: f64,
    pub m2: f64,
    pub concurrence: f64,
    pub negativity: f64,
    pub wootters_lambda: [f64; 4],
    /// `max |s − H λ|`
    pub relation_residual: f64,
}

pub fn monotones_from_spectrum(s: &LorentzSpectrum) -> (f64, f64) {
    let [s0, s1, s2, s3] = s.0;
    ((-(s0 - s1 - s2)).max(0.0), (-(s0 - s1 - s2 + s3)).max(0.0))
}

/// Lorentz singular values of a state.
pub fn lorentz_spectrum(rho: &DensityMatrix2Q) -> Result<LorentzSpectrum> {
    LorentzSpectrum::new(crate::lsvd::lsvd_of(rho)?.s)
}

/// Concurrence as half of `M2`.
pub fn concurrence(rho: &DensityMatrix2Q) -> Result<f64> {
    Ok(monotones_from_spectrum(&lorentz_spectrum(rho)?).1 / 2.0)
}

/// Square roots of the eigenvalues of `√ρ ρ̃ √ρ` with `ρ̃ = (σy⊗σy) ρᵀ (σy⊗σy)`, descending.
pub fn wootters_lambda(rho: &DensityMatrix2Q) -> Result<[f64; 4]> {
    let m = rho.matrix();
    let sqrt_rho = hermitian_fn(m, |x| x.max(0.0).sqrt())?;
    let y = pauli_basis()[2];
    let yy = kron2(&y, &y);
    let flipped = yy * m.transpose() * yy;
    let k = sqrt_rho * flipped * sqrt_rho;
    let k = (k + k.adjoint()) * r(0.5);
    let e = eig_hermitian(&k)?;
    Ok([0, 1, 2, 3].map(|i| e.values[i].max(0.0).sqrt()))
}

/// `max(0, λ1 − λ2 − λ3 − λ4)`
pub fn wootters_concurrence(rho: &DensityMatrix2Q) -> Result<f64> {
    let l = wootters_lambda(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// `max(0, −2 λ_min(ρ^{T_B}))`
pub fn negativity(rho: &DensityMatrix2Q) -> Result<f64> {
    let pt = partial_transpose_matrix(rho.matrix(), 1)?;
    let e = eig_hermitian(&pt)?;
    Ok((-2.0 * e.values[3]).max(0.0))
}

pub fn monotone_report(rho: &DensityMatrix2Q) -> Result<MonotoneReport> {
    let spectrum = lorentz_spectrum(rho)?;
    let (m1, m2) = monotones_from_spectrum(&spectrum);
    let lambda = wootters_lambda(rho)?;
    let predicted = sign_matrix() * Vector4::from(lambda);
    let relation_residual = (0..4).fold(0.0f64, |acc, i| acc.max((predicted[i] - spectrum.0[i]).abs()));
    Ok(MonotoneReport {
        s: spectrum.0,
        m1,
        m2,
        concurrence: m2 / 2.0,
        negativity: negativity(rho)?,
        wootters_lambda: lambda,
        relation_residual,
    })
}

/// Diagonal pick matrix of the `k`-th variational functional, `k ∈ 1..=4`.
pub fn pick_matrix(k: usize) -> Result<Matrix4<f64>> {
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidParameter(format!("functional index {k} not in 1..=4")));
    }
    Ok(Matrix4::from_fn(|i, j| if i == j && i < k { 1.0 } else { 0.0 }))
}

/// Closed-form minimum of the `k`-th functional: `s0`, `s0 − s1`,
/// `s0 − s1 − s2`, `s0 − s1 − s2 + s3`.
pub fn closed_form(s: &[f64; 4], k: usize) -> f64 {
    let signs = [1.0, -1.0, -1.0, 1.0];
    (0..k).map(|i| signs[i] * s[i]).sum()
}

/// `tr(L1 R L2ᵀ P_k)`
pub fn functional_value(r_mat: &RMatrix, l1: &LorentzTransform, l2: &LorentzTransform, k: usize) -> Result<f64> {
    Ok((l1.0 * r_mat.0 * l2.0.transpose() * pick_matrix(k)?).trace())
}

/// Pair `(L1, L2)` attaining the closed-form minimum of every functional:
/// `L1 = L1_R⁻¹` and `L2 = diag(1, −1, −1, 1) L2_R⁻¹`, from the LSVD of `R`.
pub fn variational_optimizer(r_mat: &RMatrix) -> Result<(LorentzTransform, LorentzTransform)> {
    let d = lsvd(r_mat)?;
    let flip = Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, 1.0));
    Ok((d.l1.inverse(), LorentzTransform(flip * d.l2.inverse().0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalSample {
    pub sample_min: f64,
    pub closed_form: f64,
}

/// Minimum of the `k`-th functional over `n_samples` random pairs `(L1, L2)`.
///
/// Sample 0 is always the identity pair; the rest come from
/// [`random_lorentz`] with the given boost cap.
pub fn variational_sample(
    r_mat: &RMatrix,
    k: usize,
    n_samples: usize,
    seed: u64,
    boost_cap: f64,
) -> Result<VariationalSample> {
    let p = pick_matrix(k)?;
    let s = lsvd(r_mat)?.s;
    let mut rng = trial_rng(seed, k as u64);
    let mut best = (r_mat.0 * p).trace();
    for _ in 1..n_samples {
        let l1 = random_lorentz(&mut rng, boost_cap);
        let l2 = random_lorentz(&mut rng, boost_cap);
        best = best.min((l1.0 * r_mat.0 * l2.0.transpose() * p).trace());
    }
    Ok(VariationalSample { sample_min: best, closed_form: closed_form(&s, k) })
}

/// Two-outcome local measurement `{a, √(I − a†a)}` on one party.
#[derive(Debug, Clone)]
pub struct PovmBranches {
    pub p_pass: f64,
    pub rho_pass: Option<DensityMatrix2Q>,
    pub p_fail: f64,
    pub rho_fail: Option<DensityMatrix2Q>,
}

/// Applies `a` (with `a†a ≤ I`) and its complement `√(I − a†a)` to `party`.
/// A branch with zero probability has no post-measurement state.
pub fn local_povm_branch(rho: &DensityMatrix2Q, a: &Mat2, party: usize) -> Result<PovmBranches> {
    if party > 1 {
        return Err(Error::InvalidParty(party));
    }
    let gram = a.adjoint() * a;
    let top = eig_hermitian(&gram)?.values[0];
    if top > 1.0 + 1e-9 {
        return Err(Error::NotAContraction(top));
    }
    let complement = hermitian_fn(&(Mat2::identity() - gram), |x| x.max(0.0).sqrt())?;
    let apply = |k: &Mat2| -> Mat4 {
        if party == 0 {
            apply_local2(rho.matrix(), k, &Mat2::identity())
        } else {
            apply_local2(rho.matrix(), &Mat2::identity(), k)
        }
    };
    let branch = |m: Mat4| -> Result<(f64, Option<DensityMatrix2Q>)> {
        let p = m.trace().re;
        if p <= 1e-14 {
            return Ok((p.max(0.0), None));
        }
        Ok((p, Some(DensityMatrix2Q::from_unnormalized(m)?)))
    };
    let (p_pass, rho_pass) = branch(apply(a))?;
    let (p_fail, rho_fail) = branch(apply(&complement))?;
    Ok(PovmBranches { p_pass, rho_pass, p_fail, rho_fail })
}

fn monotone_pair(rho: &DensityMatrix2Q) -> Result<(f64, f64)> {
    Ok(monotones_from_spectrum(&lorentz_spectrum(rho)?))
}

/// Smallest `M_i(ρ) − Σ_branch p · M_i(branch)` over `n_trials` random local
/// two-outcome measurements on each party, for `i = 1, 2`.
///
/// Trial `t` draws its contraction from stream `t` of `seed`. A negative
/// result would mean the expected monotone increased.
pub fn monotone_mc_check(rho: &DensityMatrix2Q, n_trials: usize, seed: u64) -> Result<f64> {
    let (m1, m2) = monotone_pair(rho)?;
    let mut worst = f64::INFINITY;
    for t in 0..n_trials {
        let mut rng = trial_rng(seed, t as u64);
        for party in 0..2 {
            let a = random_contraction(&mut rng);
            let out = local_povm_branch(rho, &a, party)?;
            let mut expected = (0.0, 0.0);
            for (p, state) in [(out.p_pass, &out.rho_pass), (out.p_fail, &out.rho_fail)] {
                if let Some(state) = state {
                    let (b1, b2) = monotone_pair(state)?;
                    expected.0 += p * b1;
                    expected.1 += p * b2;
                }
            }
            worst = worst.min(m1 - expected.0).min(m2 - expected.1);
        }
    }
    Ok(if n_trials == 0 { 0.0 } else { worst })
}

/// `σ1 σ2 + (1 − σ1)(1 − σ2)` for the singular values of a random contraction;
/// never exceeds one.
pub fn det_sum_bound<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let a = random_contraction(rng);
    let sv = a.singular_values();
    sv[0] * sv[1] + (1.0 - sv[0]) * (1.0 - sv[1])
}
