//! Small dense complex linear algebra and the quantum-state primitives the
//! rest of the crate is built on.
//!
//! Qubit ordering: party 0 is the leftmost tensor factor, so the basis label
//! `|b0 b1 b2⟩` maps to the array index `4·b0 + 2·b1 + b2`.

use nalgebra::{Complex, Matrix2, Matrix4, SMatrix, SVector, Vector4};

use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat8 = SMatrix<C64, 8, 8>;
pub type Ket4 = Vector4<C64>;
pub type Ket8 = SVector<C64, 8>;
/// Statically sized complex matrix.
pub type CMatrix<const R: usize, const C: usize> = SMatrix<C64, R, C>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub(crate) fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The Pauli basis `σ0 = I, σ1 = σx, σ2 = σy, σ3 = σz`, in this order.
pub fn pauli_basis() -> [Mat2; 4] {
    [
        Mat2::new(ONE, ZERO, ZERO, ONE),
        Mat2::new(ZERO, ONE, ONE, ZERO),
        Mat2::new(ZERO, -I, I, ZERO),
        Mat2::new(ONE, ZERO, ZERO, -ONE),
    ]
}

pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron3(a: &Mat2, b: &Mat2, c: &Mat2) -> Mat8 {
    let ab = kron2(a, b);
    let mut out = Mat8::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = ab[(i, j)] * c[(k, l)];
                }
            }
        }
    }
    out
}

pub(crate) fn max_abs<const R: usize, const C: usize>(m: &SMatrix<C64, R, C>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub(crate) fn det2(m: &Mat2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_fn<const N: usize>(
    m: &SMatrix<C64, N, N>,
    f: impl Fn(f64) -> f64,
) -> Result<SMatrix<C64, N, N>> {
    let eig = eig_hermitian(m)?;
    let mut out = SMatrix::<C64, N, N>::zeros();
    for k in 0..N {
        let v = eig.vectors.column(k);
        out += v * v.adjoint() * r(f(eig.values[k]));
    }
    Ok(out)
}

/// Square root of a positive semidefinite 2×2 matrix.
pub(crate) fn psd_sqrt2(m: &Mat2) -> Result<Mat2> {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Largest eigenvalue of a 2×2 Hermitian matrix, closed form.
pub(crate) fn lambda_max2(m: &Mat2) -> f64 {
    let t = (m[(0, 0)].re + m[(1, 1)].re) / 2.0;
    let d = (m[(0, 0)].re - m[(1, 1)].re) / 2.0;
    t + (d * d + m[(0, 1)].norm_sqr()).sqrt()
}

/// A two-qubit density matrix: 4×4, Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix2Q(Mat4);

impl DensityMatrix2Q {
    /// Validates `m` against the Hermiticity, trace and positivity invariants.
    pub fn new(m: Mat4) -> Result<Self> {
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let defect = hermiticity_defect(&m);
        if defect > tol::STRUCTURAL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol::STRUCTURAL {
            return Err(Error::NotUnitTrace(tr.re));
        }
        let eig = eig_hermitian(&m)?;
        let min = eig.values[3];
        if min < -tol::STRUCTURAL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self(m))
    }

    /// Normalizes a nonzero PSD operator to unit trace before validating it.
    pub fn from_unnormalized(m: Mat4) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::NotPositive(tr));
        }
        let mut m = m / r(tr);
        // Symmetrize away round-off so the structural check is not tripped by it.
        m = (m + m.adjoint()) * r(0.5);
        Self::new(m)
    }

    pub fn from_pure(psi: &Ket4) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let v = psi / r(n);
        Self::new(v * v.adjoint())
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat4::identity() * r(0.25))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_matrix(self) -> Mat4 {
        self.0
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> [f64; 4] {
        let e = eig_hermitian(&self.0).expect("validated Hermitian");
        [e.values[0], e.values[1], e.values[2], e.values[3]]
    }

    /// Number of eigenvalues above `tol::RANK` relative to the largest.
    pub fn rank(&self) -> usize {
        let s = self.spectrum();
        s.iter().filter(|&&x| x > tol::RANK * s[0]).count()
    }

    /// Reduced state of one party (0 = left factor, 1 = right factor).
    pub fn marginal(&self, party: usize) -> Result<Mat2> {
        marginal_of(&self.0, party)
    }
}

pub(crate) fn marginal_of(m: &Mat4, party: usize) -> Result<Mat2> {
    let mut out = Mat2::zeros();
    match party {
        0 => {
            for i in 0..2 {
                for j in 0..2 {
                    out[(i, j)] = m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)];
                }
            }
        }
        1 => {
            for i in 0..2 {
                for j in 0..2 {
                    out[(i, j)] = m[(i, j)] + m[(2 + i, 2 + j)];
                }
            }
        }
        p => return Err(Error::InvalidParty(p)),
    }
    Ok(out)
}

/// Transposes the tensor factor of `party` (0 or 1).
pub fn partial_transpose(rho: &DensityMatrix2Q, party: usize) -> Result<Mat4> {
    partial_transpose_matrix(rho.matrix(), party)
}

/// Partial transpose of any 4×4 operator on `party`.
pub fn partial_transpose_matrix(m: &Mat4, party: usize) -> Result<Mat4> {
    if party > 1 {
        return Err(Error::InvalidParty(party));
    }
    let mut out = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let (i0, i1, j0, j1) = (i / 2, i % 2, j / 2, j % 2);
            let (src_i, src_j) = if party == 0 {
                (2 * j0 + i1, 2 * i0 + j1)
            } else {
                (2 * i0 + j1, 2 * j0 + i1)
            };
            out[(i, j)] = m[(src_i, src_j)];
        }
    }
    Ok(out)
}

/// A normalized pure state of three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitPure(Ket8);

impl ThreeQubitPure {
    pub fn new(amp: Ket8) -> Result<Self> {
        if amp.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n2 = amp.norm_squared();
        if (n2 - 1.0).abs() > tol::STRUCTURAL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self(amp))
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amp: Ket8) -> Result<Self> {
        let n = amp.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amp / r(n))
    }

    pub fn from_slice(amp: &[C64; 8]) -> Result<Self> {
        Self::new(Ket8::from_column_slice(amp))
    }

    /// `(|000⟩ + |111⟩)/√2`
    pub fn ghz() -> Self {
        let mut v = Ket8::zeros();
        v[0] = r(std::f64::consts::FRAC_1_SQRT_2);
        v[7] = r(std::f64::consts::FRAC_1_SQRT_2);
        Self(v)
    }

    /// `(|100⟩ + |010⟩ + |001⟩)/√3`
    pub fn w() -> Self {
        let a = r(1.0 / 3f64.sqrt());
        let mut v = Ket8::zeros();
        v[4] = a;
        v[2] = a;
        v[1] = a;
        Self(v)
    }

    /// `√p|000⟩ + √(1−p)|111⟩`
    pub fn generalized_ghz(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p = {p} outside [0, 1]")));
        }
        let mut v = Ket8::zeros();
        v[0] = r(p.sqrt());
        v[7] = r((1.0 - p).sqrt());
        Ok(Self(v))
    }

    pub fn amplitudes(&self) -> &Ket8 {
        &self.0
    }

    pub fn amp(&self, b0: usize, b1: usize, b2: usize) -> C64 {
        self.0[4 * b0 + 2 * b1 + b2]
    }

    /// Single-party reduced state.
    pub fn single_marginal(&self, party: usize) -> Result<Mat2> {
        if party > 2 {
            return Err(Error::InvalidParty(party));
        }
        let mut out = Mat2::zeros();
        for x in 0..8 {
            for y in 0..8 {
                let bit = |k: usize, p: usize| (k >> (2 - p)) & 1;
                let others_equal = (0..3).filter(|&p| p != party).all(|p| bit(x, p) == bit(y, p));
                if others_equal {
                    out[(bit(x, party), bit(y, party))] += self.0[x] * self.0[y].conj();
                }
            }
        }
        Ok(out)
    }
}

/// Applies a local operator triple without renormalizing.
pub fn apply_local3(psi: &Ket8, a: &Mat2, b: &Mat2, c: &Mat2) -> Ket8 {
    kron3(a, b, c) * psi
}

/// Reduced state of the two parties other than `party`, in their original order.
pub fn partial_trace(psi: &ThreeQubitPure, party: usize) -> Result<DensityMatrix2Q> {
    if party > 2 {
        return Err(Error::InvalidParty(party));
    }
    let kept: Vec<usize> = (0..3).filter(|&p| p != party).collect();
    let bit = |k: usize, p: usize| (k >> (2 - p)) & 1;
    let mut m = Mat4::zeros();
    for x in 0..8 {
        for y in 0..8 {
            if bit(x, party) != bit(y, party) {
                continue;
            }
            let i = 2 * bit(x, kept[0]) + bit(x, kept[1]);
            let j = 2 * bit(y, kept[0]) + bit(y, kept[1]);
            m[(i, j)] += psi.0[x] * psi.0[y].conj();
        }
    }
    DensityMatrix2Q::from_unnormalized(m)
}

/// Fixes the global phase of a vector so its largest-magnitude component is
/// real and positive.
pub(crate) fn fix_phase<const N: usize>(v: &SVector<C64, N>) -> SVector<C64, N> {
    let mut best = 0;
    for k in 1..N {
        if v[k].norm() > v[best].norm() + 1e-14 {
            best = k;
        }
    }
    let z = v[best];
    if z.norm() == 0.0 {
        return *v;
    }
    v * (z.conj() / r(z.norm()))
}

/// Purifies a rank-≤2 two-qubit state onto a third qubit appended as party 2.
pub fn purify_rank2(rho: &DensityMatrix2Q) -> Result<ThreeQubitPure> {
    let eig = eig_hermitian(rho.matrix())?;
    let lead = eig.values[0];
    for k in 2..4 {
        if eig.values[k] > tol::RANK * lead.max(1.0) {
            return Err(Error::RankTooHigh(eig.values[k]));
        }
    }
    let mut psi = Ket8::zeros();
    for k in 0..2 {
        let weight = eig.values[k].max(0.0).sqrt();
        let v = fix_phase(&eig.vectors.column(k).into_owned());
        for i in 0..4 {
            psi[2 * i + k] += v[i] * r(weight);
        }
    }
    ThreeQubitPure::normalized(psi)
}

/// Standard Bell states.
pub mod bell {
    use super::{r, Ket4};
    use std::f64::consts::FRAC_1_SQRT_2 as H;

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus() -> Ket4 {
        Ket4::new(r(H), r(0.0), r(0.0), r(H))
    }
    /// `(|00⟩ − |11⟩)/√2`
    pub fn phi_minus() -> Ket4 {
        Ket4::new(r(H), r(0.0), r(0.0), r(-H))
    }
    /// `(|01⟩ + |10⟩)/√2`
    pub fn psi_plus() -> Ket4 {
        Ket4::new(r(0.0), r(H), r(H), r(0.0))
    }
    /// `(|01⟩ − |10⟩)/√2`, the singlet.
    pub fn psi_minus() -> Ket4 {
        Ket4::new(r(0.0), r(H), r(-H), r(0.0))
    }
}

/// A 2×2 local filter, optionally scaled to unit determinant.
#[derive(Debug, Clone, PartialEq)]
pub struct Filter2 {
    pub m: Mat2,
    pub det_normalized: bool,
}

impl Filter2 {
    pub fn raw(m: Mat2) -> Self {
        Self { m, det_normalized: false }
    }

    /// Divides by a square root of the determinant.
    pub fn normalize(m: Mat2) -> Result<Self> {
        let d = det2(&m);
        if d.norm() < 1e-300 {
            return Err(Error::SingularFilter);
        }
        Ok(Self { m: m / d.sqrt(), det_normalized: true })
    }

    /// Wraps a matrix already known to have unit determinant.
    pub fn unit(m: Mat2) -> Result<Self> {
        let d = det2(&m);
        if (d - ONE).norm() > tol::DETERMINANT {
            return Err(Error::NotUnitDeterminant(d.norm()));
        }
        Ok(Self { m, det_normalized: true })
    }

    pub fn identity() -> Self {
        Self { m: Mat2::identity(), det_normalized: true }
    }

    pub fn det(&self) -> C64 {
        det2(&self.m)
    }
}

/// Applies `(a ⊗ b) ρ (a ⊗ b)†` without renormalizing.
pub fn apply_local2(m: &Mat4, a: &Mat2, b: &Mat2) -> Mat4 {
    let k = kron2(a, b);
    k * m * k.adjoint()
}
