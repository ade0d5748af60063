//! The real R-picture of a two-qubit operator and the Lorentz-group machinery
//! acting on it.
//!
//! A determinant-one local filter `A ⊗ B` acts on the R-picture as
//! `R ↦ L_A R L_Bᵀ`, where `L_A[i][j] = ½ tr(σi A σj A†)` is a proper
//! orthochronous Lorentz transformation.

use nalgebra::{Matrix3, Matrix4, Vector4};
use rand::Rng;

use crate::algebra::{det2, kron2, max_abs, pauli_basis, r, DensityMatrix2Q, Filter2, Mat2, Mat4, C64, I, ONE};
use crate::error::{Error, Result};
use crate::tol;

pub type RMat4 = Matrix4<f64>;

/// Minkowski metric `diag(1, −1, −1, −1)`.
pub fn eta() -> RMat4 {
    RMat4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

pub(crate) fn minkowski_dot(u: &Vector4<f64>, v: &Vector4<f64>) -> f64 {
    u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3]
}

pub(crate) fn max_abs_real(m: &RMat4) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// `R[i][j] = tr(ρ σi ⊗ σj)` for a (possibly unnormalized) two-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMatrix(pub RMat4);

impl RMatrix {
    /// Checks the Pauli-expectation bounds `|R[i][j]| ≤ R[0][0]`.
    pub fn new(r: RMat4) -> Result<Self> {
        if r.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let r00 = r[(0, 0)];
        if !(r00 > 0.0) {
            return Err(Error::InvalidRMatrix(format!("R00 = {r00} must be positive")));
        }
        let worst = max_abs_real(&r);
        if worst > r00 * (1.0 + tol::RANK) + tol::RANK {
            return Err(Error::InvalidRMatrix(format!("entry {worst} exceeds R00 = {r00}")));
        }
        Ok(Self(r))
    }

    pub fn matrix(&self) -> &RMat4 {
        &self.0
    }
}

/// R-picture of an arbitrary Hermitian 4×4 operator.
pub(crate) fn r_of(m: &Mat4) -> Result<RMat4> {
    let p = pauli_basis();
    let mut out = RMat4::zeros();
    let mut worst_im = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let t = (m * kron2(&p[i], &p[j])).trace();
            worst_im = worst_im.max(t.im.abs());
            out[(i, j)] = t.re;
        }
    }
    let scale = max_abs(m).max(1.0);
    if worst_im > tol::RANK * scale {
        return Err(Error::ImaginaryResidue(worst_im));
    }
    Ok(out)
}

pub(crate) fn rho_of(r_mat: &RMat4) -> Mat4 {
    let p = pauli_basis();
    let mut m = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            if r_mat[(i, j)] != 0.0 {
                m += kron2(&p[i], &p[j]) * r(r_mat[(i, j)] / 4.0);
            }
        }
    }
    m
}

pub fn rho_to_r(rho: &DensityMatrix2Q) -> Result<RMatrix> {
    RMatrix::new(r_of(rho.matrix())?)
}

/// Inverse of [`rho_to_r`]; fails when the operator is not a state.
pub fn r_to_rho(r_mat: &RMatrix) -> Result<DensityMatrix2Q> {
    DensityMatrix2Q::from_unnormalized(rho_of(&r_mat.0))
}

/// A proper orthochronous Lorentz transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzTransform(pub RMat4);

impl LorentzTransform {
    pub fn new(l: RMat4) -> Result<Self> {
        check_lorentz(&l, tol::DETERMINANT)?;
        Ok(Self(l))
    }

    pub fn identity() -> Self {
        Self(RMat4::identity())
    }

    pub fn matrix(&self) -> &RMat4 {
        &self.0
    }

    /// `η Lᵀ η`, exact for a Lorentz matrix.
    pub fn inverse(&self) -> Self {
        let e = eta();
        Self(e * self.0.transpose() * e)
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// Boost of rapidity `alpha` along the first spatial axis.
    pub fn boost_x(alpha: f64) -> Self {
        let mut l = RMat4::identity();
        l[(0, 0)] = alpha.cosh();
        l[(1, 1)] = alpha.cosh();
        l[(0, 1)] = alpha.sinh();
        l[(1, 0)] = alpha.sinh();
        Self(l)
    }

    pub fn rotation(rot: &Matrix3<f64>) -> Self {
        let mut l = RMat4::identity();
        l.fixed_view_mut::<3, 3>(1, 1).copy_from(rot);
        Self(l)
    }
}

/// Returns the worst metric-preservation defect after checking properness and
/// orthochronicity at tolerance `eps`.
pub(crate) fn check_lorentz(l: &RMat4, eps: f64) -> Result<f64> {
    if l.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    let e = eta();
    // Relative to the size of the entries: a boost with cosh α = 10³ has entries
    // of 10³ and a metric product of 10⁶ before cancellation.
    let scale = max_abs_real(l).powi(2).max(1.0);
    let defect = max_abs_real(&(l.transpose() * e * l - e));
    if defect > eps * scale {
        return Err(Error::NotLorentz(format!("metric defect {defect:.3e}")));
    }
    let det = l.determinant();
    if (det - 1.0).abs() > eps * scale {
        return Err(Error::NotLorentz(format!("determinant {det}")));
    }
    if l[(0, 0)] < 1.0 - eps {
        return Err(Error::NotLorentz(format!("L00 = {} < 1", l[(0, 0)])));
    }
    Ok(defect)
}

/// `L[i][j] = ½ tr(σi A σj A†)`.
pub fn sl2c_to_lorentz(a: &Filter2) -> Result<LorentzTransform> {
    let d = det2(&a.m);
    if (d - ONE).norm() > tol::DETERMINANT {
        return Err(Error::NotUnitDeterminant(d.norm()));
    }
    Ok(LorentzTransform(lorentz_of(&a.m)))
}

pub(crate) fn lorentz_of(a: &Mat2) -> RMat4 {
    let p = pauli_basis();
    let ad = a.adjoint();
    let mut l = RMat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            l[(i, j)] = 0.5 * (p[i] * a * p[j] * ad).trace().re;
        }
    }
    l
}

/// Inverse of [`sl2c_to_lorentz`] up to the sign ambiguity `±A`, resolved by
/// making the largest-magnitude entry have non-negative real part.
pub fn lorentz_to_sl2c(l: &LorentzTransform) -> Result<Filter2> {
    check_lorentz(&l.0, tol::DETERMINANT)?;
    let p = pauli_basis();
    // A A† = Σ_i L[i][0] σi is the boost part; its positive square root is P.
    let mut h = Mat2::zeros();
    for i in 0..4 {
        h += p[i] * r(l.0[(i, 0)]);
    }
    let boost = crate::algebra::psd_sqrt2(&h)?;
    let boost = boost / det2(&boost).sqrt();
    let rest = LorentzTransform(lorentz_of(&boost)).inverse().0 * l.0;
    let rot: Matrix3<f64> = rest.fixed_view::<3, 3>(1, 1).into_owned();
    let u = su2_of_rotation(&rot);
    let mut a = boost * u;
    canonical_sign(&mut a);
    Ok(Filter2 { m: a, det_normalized: true })
}

fn canonical_sign(a: &mut Mat2) {
    let mut best = (0, 0);
    for i in 0..2 {
        for j in 0..2 {
            if a[(i, j)].norm() > a[best].norm() + 1e-12 {
                best = (i, j);
            }
        }
    }
    if a[best].re < 0.0 {
        *a = -*a;
    }
}

/// The SU(2) element `q0 − i q·σ` covering a rotation matrix.
fn su2_of_rotation(m: &Matrix3<f64>) -> Mat2 {
    // Shepperd's method for the unit quaternion of a rotation matrix.
    let tr = m.trace();
    let (w, x, y, z);
    if tr > m[(0, 0)] && tr > m[(1, 1)] && tr > m[(2, 2)] {
        let s = (1.0 + tr).max(0.0).sqrt() * 2.0;
        w = 0.25 * s;
        x = (m[(2, 1)] - m[(1, 2)]) / s;
        y = (m[(0, 2)] - m[(2, 0)]) / s;
        z = (m[(1, 0)] - m[(0, 1)]) / s;
    } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
        let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).max(0.0).sqrt() * 2.0;
        w = (m[(2, 1)] - m[(1, 2)]) / s;
        x = 0.25 * s;
        y = (m[(0, 1)] + m[(1, 0)]) / s;
        z = (m[(0, 2)] + m[(2, 0)]) / s;
    } else if m[(1, 1)] > m[(2, 2)] {
        let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).max(0.0).sqrt() * 2.0;
        w = (m[(0, 2)] - m[(2, 0)]) / s;
        x = (m[(0, 1)] + m[(1, 0)]) / s;
        y = 0.25 * s;
        z = (m[(1, 2)] + m[(2, 1)]) / s;
    } else {
        let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).max(0.0).sqrt() * 2.0;
        w = (m[(1, 0)] - m[(0, 1)]) / s;
        x = (m[(0, 2)] + m[(2, 0)]) / s;
        y = (m[(1, 2)] + m[(2, 1)]) / s;
        z = 0.25 * s;
    }
    let n = (w * w + x * x + y * y + z * z).sqrt();
    let (w, x, y, z) = (w / n, x / n, y / n, z / n);
    Mat2::new(
        C64::new(w, -z),
        -I * x - r(y),
        -I * x + r(y),
        C64::new(w, z),
    )
}

/// Rotation from ZYZ Euler angles.
pub(crate) fn euler_zyz(a: f64, b: f64, g: f64) -> Matrix3<f64> {
    let rz = |t: f64| Matrix3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
    let ry = |t: f64| Matrix3::new(t.cos(), 0.0, t.sin(), 0.0, 1.0, 0.0, -t.sin(), 0.0, t.cos());
    rz(a) * ry(b) * rz(g)
}

/// Samples `diag(1, V) · boost_x(α) · diag(1, W)` with `V`, `W` from uniform
/// Euler angles and `α` uniform in `[−boost_cap, boost_cap]`.
pub fn random_lorentz<R: Rng + ?Sized>(rng: &mut R, boost_cap: f64) -> LorentzTransform {
    use std::f64::consts::PI;
    let rot = |rng: &mut R| {
        euler_zyz(rng.random_range(0.0..2.0 * PI), rng.random_range(0.0..PI), rng.random_range(0.0..2.0 * PI))
    };
    let v = rot(rng);
    let w = rot(rng);
    let alpha = if boost_cap > 0.0 { rng.random_range(-boost_cap..=boost_cap) } else { 0.0 };
    LorentzTransform::rotation(&v)
        .compose(&LorentzTransform::boost_x(alpha))
        .compose(&LorentzTransform::rotation(&w))
}

/// Random determinant-one filter with bounded boost, as the SL(2,C) preimage
/// of [`random_lorentz`].
pub fn random_filter<R: Rng + ?Sized>(rng: &mut R, boost_cap: f64) -> Filter2 {
    let l = random_lorentz(rng, boost_cap);
    lorentz_to_sl2c(&l).expect("sampled transforms are Lorentz")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bell, ZERO};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn real_close(a: &RMat4, b: &RMat4, eps: f64) -> bool {
        max_abs_real(&(a - b)) <= eps
    }

    #[test]
    fn bell_r_pictures() {
        let psi = DensityMatrix2Q::from_pure(&bell::psi_plus()).unwrap();
        let got = rho_to_r(&psi).unwrap();
        let want = RMat4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0));
        assert!(real_close(&got.0, &want, 1e-14));

        let mixed = rho_to_r(&DensityMatrix2Q::maximally_mixed()).unwrap();
        assert!(real_close(&mixed.0, &RMat4::from_diagonal(&Vector4::new(1.0, 0.0, 0.0, 0.0)), 1e-15));

        let mut m = Mat4::zeros();
        m[(0, 0)] = ONE;
        let got = rho_to_r(&DensityMatrix2Q::new(m).unwrap()).unwrap();
        let mut want = RMat4::zeros();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            want[(i, j)] = 1.0;
        }
        assert!(real_close(&got.0, &want, 1e-15));
    }

    #[test]
    fn inverse_map() {
        let r1 = RMatrix::new(RMat4::from_diagonal(&Vector4::new(1.0, 1.0, 1.0, -1.0))).unwrap();
        let rho = r_to_rho(&r1).unwrap();
        let p = bell::psi_plus();
        assert!(max_abs(&(rho.matrix() - p * p.adjoint())) < 1e-15);

        let r2 = RMatrix::new(RMat4::from_diagonal(&Vector4::new(1.0, 0.0, 0.0, 0.0))).unwrap();
        assert!(max_abs(&(r_to_rho(&r2).unwrap().matrix() - Mat4::identity() * r(0.25))) < 1e-15);

        let r3 = RMatrix::new(RMat4::identity()).unwrap();
        assert!(matches!(r_to_rho(&r3), Err(Error::NotPositive(_))));
    }

    #[test]
    fn identity_and_boost() {
        let l = sl2c_to_lorentz(&Filter2::identity()).unwrap();
        assert!(real_close(&l.0, &RMat4::identity(), 1e-15));

        let g: f64 = 1.7;
        let a = Filter2::unit(Mat2::new(r(g), ZERO, ZERO, r(1.0 / g))).unwrap();
        let l = sl2c_to_lorentz(&a).unwrap();
        let mut want = RMat4::identity();
        want[(0, 0)] = (g * g + 1.0 / (g * g)) / 2.0;
        want[(3, 3)] = want[(0, 0)];
        want[(0, 3)] = (g * g - 1.0 / (g * g)) / 2.0;
        want[(3, 0)] = want[(0, 3)];
        assert!(real_close(&l.0, &want, 1e-14));

        let theta: f64 = 0.6;
        let u = Mat2::new(C64::from_polar(1.0, -theta / 2.0), ZERO, ZERO, C64::from_polar(1.0, theta / 2.0));
        let l = sl2c_to_lorentz(&Filter2::unit(u).unwrap()).unwrap();
        let mut want = RMat4::identity();
        want[(1, 1)] = theta.cos();
        want[(2, 2)] = theta.cos();
        want[(1, 2)] = -theta.sin();
        want[(2, 1)] = theta.sin();
        assert!(real_close(&l.0, &want, 1e-14));

        assert!(sl2c_to_lorentz(&Filter2::raw(Mat2::identity() * r(2.0))).is_err());
    }

    #[test]
    fn inverse_of_boost() {
        let a = Filter2::unit(Mat2::new(r(2.0), ZERO, ZERO, r(0.5))).unwrap();
        let back = lorentz_to_sl2c(&sl2c_to_lorentz(&a).unwrap()).unwrap();
        assert!(max_abs(&(back.m - a.m)) < 1e-12);
        let id = lorentz_to_sl2c(&LorentzTransform::identity()).unwrap();
        assert!(max_abs(&(id.m - Mat2::identity())) < 1e-15);
    }

    #[test]
    fn round_trip_random_filters() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let m = Mat2::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let Ok(a) = Filter2::normalize(m) else { continue };
            let l = sl2c_to_lorentz(&a).unwrap();
            let back = lorentz_to_sl2c(&l).unwrap();
            let err = max_abs(&(back.m - a.m)).min(max_abs(&(back.m + a.m)));
            let scale = max_abs(&a.m).powi(2).max(1.0);
            assert!(err <= 1e-8 * scale, "err {err}");
            assert!(real_close(&sl2c_to_lorentz(&back).unwrap().0, &l.0, 1e-8 * scale));
        }
    }

    #[test]
    fn random_lorentz_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = random_lorentz(&mut rng, 0.0);
        assert_abs_diff_eq!(l.0[(0, 0)], 1.0, epsilon = 1e-15);
        for _ in 0..200 {
            let l = random_lorentz(&mut rng, 2.0);
            check_lorentz(&l.0, 1e-9).unwrap();
        }
        let a = random_lorentz(&mut ChaCha8Rng::seed_from_u64(5), 2.0);
        let b = random_lorentz(&mut ChaCha8Rng::seed_from_u64(5), 2.0);
        assert_eq!(a, b);
    }

    #[test]
    fn covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let rho = crate::random::wishart_state(&mut rng);
            let a = random_filter(&mut rng, 2.0);
            let b = random_filter(&mut rng, 2.0);
            let moved = crate::algebra::apply_local2(rho.matrix(), &a.m, &b.m);
            let lhs = r_of(&moved).unwrap();
            let rhs = sl2c_to_lorentz(&a).unwrap().0 * rho_to_r(&rho).unwrap().0 * sl2c_to_lorentz(&b).unwrap().0.transpose();
            let scale = max_abs_real(&lhs).max(1.0);
            assert!(real_close(&lhs, &rhs, 1e-9 * scale));
        }
    }

    #[test]
    fn round_trip_r_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let rho = crate::random::wishart_state(&mut rng);
            let back = r_to_rho(&rho_to_r(&rho).unwrap()).unwrap();
            assert!(max_abs(&(back.matrix() - rho.matrix())) < 1e-12);
        }
    }
}
