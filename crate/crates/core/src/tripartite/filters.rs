use nalgebra::Vector2;

use crate::algebra::{apply_local3, bell, c, kron3, lambda_max2, partial_trace, r, Filter2, Ket8, Mat2, ThreeQubitPure, C64, ONE, ZERO};
use crate::eigen::eig_hermitian;
use crate::error::{Error, Result};
use crate::lsvd::{lsvd_of, quasi_distillable_filters, NormalFormClass};

use super::{classify3, Slocc3Class};

/// Three determinant-one local filters with the success probability of the
/// branch they define on a given state.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterTriple {
    pub a: Filter2,
    pub b: Filter2,
    pub c: Filter2,
    pub success_probability: f64,
}

impl FilterTriple {
    pub fn matrices(&self) -> [Mat2; 3] {
        [self.a.m, self.b.m, self.c.m]
    }

    pub(crate) fn from_matrices(psi: &ThreeQubitPure, m: [Mat2; 3]) -> Result<Self> {
        let [a, b, c] = m.map(Filter2::normalize);
        let (a, b, c) = (a?, b?, c?);
        let success_probability = branch_success_probability(psi, &[a.m, b.m, c.m]);
        Ok(Self { a, b, c, success_probability })
    }

    /// `(A ⊗ B ⊗ C) ψ`, unnormalized.
    pub fn apply(&self, psi: &ThreeQubitPure) -> Ket8 {
        apply_local3(psi.amplitudes(), &self.a.m, &self.b.m, &self.c.m)
    }
}

/// Probability of the branch `q (A ⊗ B ⊗ C)` with `q²` as large as a POVM
/// allows: `‖(A⊗B⊗C)ψ‖² / Π λmax(X†X)`.
pub fn branch_success_probability(psi: &ThreeQubitPure, m: &[Mat2; 3]) -> f64 {
    let image = apply_local3(psi.amplitudes(), &m[0], &m[1], &m[2]);
    let lambda: f64 = m.iter().map(|x| lambda_max2(&(x.adjoint() * x))).product();
    image.norm_squared() / lambda
}

/// Whether `Σ q² A†A ⊗ B†B ⊗ C†C ≤ I` within `1e-9`.
pub fn povm_feasible(branches: &[(f64, [Mat2; 3])]) -> Result<bool> {
    let mut total = crate::algebra::Mat8::zeros();
    for (q, m) in branches {
        let [a, b, c] = m.map(|x| x.adjoint() * x);
        total += kron3(&a, &b, &c) * r(q * q);
    }
    Ok(eig_hermitian(&total)?.values[0] <= 1.0 + 1e-9)
}

/// Distance of the normalized `v` from the ray of `target`.
pub fn ray_residual(v: &Ket8, target: &Ket8) -> f64 {
    let n = v.norm();
    if n == 0.0 {
        return f64::INFINITY;
    }
    let u = v / r(n);
    let t = target / r(target.norm());
    let overlap = t.dotc(&u);
    let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { ONE };
    (u - t * phase).norm()
}

fn require(psi: &ThreeQubitPure, want: Slocc3Class) -> Result<()> {
    let found = classify3(psi)?;
    if found != want {
        return Err(Error::ClassMismatch { expected: want.to_string(), found: found.to_string() });
    }
    Ok(())
}

/// Component `⟨φ| ψ` for a two-qubit `φ` on parties A, B; a vector on party C.
fn contract_ab(phi: &crate::algebra::Ket4, psi: &Ket8) -> Vector2<C64> {
    Vector2::from_fn(|k, _| (0..4).map(|ab| phi[ab].conj() * psi[2 * ab + k]).sum())
}

/// Bell states with the Pauli `P` such that the state is `(I ⊗ P) φ+` up to phase.
fn bell_with_pauli() -> [(crate::algebra::Ket4, Mat2); 4] {
    let p = crate::algebra::pauli_basis();
    [
        (bell::phi_plus(), p[0]),
        (bell::psi_plus(), p[1]),
        (bell::psi_minus(), p[2]),
        (bell::phi_minus(), p[3]),
    ]
}

/// Local unitaries `(U, V)` with `(U ⊗ V) b1 ∝ φ+` and `(U ⊗ V) b2 ∝ φ−`,
/// for the two Bell states carrying `psi`'s AB support.
fn bell_pair_alignment(psi: &Ket8) -> Result<(Mat2, Mat2)> {
    let bells = bell_with_pauli();
    let mut weight: Vec<(f64, usize)> =
        bells.iter().enumerate().map(|(k, (b, _))| (contract_ab(b, psi).norm_squared(), k)).collect();
    weight.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (p1, p2) = (bells[weight[0].1].1, bells[weight[1].1].1);
    // (I ⊗ P1) moves b1 to φ+ and b2 to (I ⊗ Q) φ+ = (Qᵀ ⊗ I) φ+ with Q = P1 P2.
    let q = (p1 * p2).transpose();
    let s = (0.5f64).sqrt();
    let candidates = [
        Mat2::identity(),
        Mat2::new(r(s), r(s), r(s), r(-s)),
        Mat2::new(r(s), c(0.0, -s), c(0.0, -s), r(s)),
    ];
    // U ⊗ U* fixes φ+, and conjugating Qᵀ into Z sends the second state to φ−.
    for u in candidates {
        let t = u * q * u.adjoint();
        if t[(0, 1)].norm() < 1e-9 && (t[(0, 0)] + t[(1, 1)]).norm() < 1e-9 {
            return Ok((u, u.conjugate() * p1.adjoint()));
        }
    }
    Err(Error::InternalInconsistency("Bell support is not a pair of distinct Bell states".into()))
}

/// Filters mapping `C c1 = g1` and `C c2 = g2`.
fn party_c_filter(c1: Vector2<C64>, c2: Vector2<C64>, g1: Vector2<C64>, g2: Vector2<C64>) -> Result<Mat2> {
    let k = Mat2::from_columns(&[c1, c2]);
    let kinv = k.try_inverse().ok_or(Error::SingularFilter)?;
    Ok(Mat2::from_columns(&[g1, g2]) * kinv)
}

/// Determinant-one filters taking a GHZ-class state to the GHZ direction.
///
/// The AB marginal is brought to its Bell-diagonal normal form, a mixture of
/// two Bell states; local unitaries turn those into `φ+` and `φ−`, and the
/// third party maps its two relative states onto `|±⟩`, since
/// `φ+|+⟩ + φ−|−⟩ ∝ |000⟩ + |111⟩`.
pub fn ghz_filters(psi: &ThreeQubitPure) -> Result<FilterTriple> {
    require(psi, Slocc3Class::GHZclass)?;
    let rho_ab = partial_trace(psi, 2)?;
    let d = lsvd_of(&rho_ab)?;
    if d.class != NormalFormClass::Diagonal {
        return Err(Error::InternalInconsistency(format!("GHZ-class marginal has normal form {}", d.class)));
    }
    let (fa, fb) = d.filters()?;
    let psi1 = apply_local3(psi.amplitudes(), &fa.m, &fb.m, &Mat2::identity());
    let (u, v) = bell_pair_alignment(&psi1)?;
    let psi2 = apply_local3(&psi1, &u, &v, &Mat2::identity());
    let c1 = contract_ab(&bell::phi_plus(), &psi2);
    let c2 = contract_ab(&bell::phi_minus(), &psi2);
    let s = r((0.5f64).sqrt());
    let cf = party_c_filter(c1, c2, Vector2::new(s, s), Vector2::new(s, -s))?;
    let triple = [u * fa.m, v * fb.m, cf];
    FilterTriple::from_matrices(psi, canonical_ghz_gauge(triple))
}

/// Uses the GHZ symmetries (a global bit flip and the diagonal family) to
/// balance the diagonals of the first two filters, so states already in GHZ
/// form get identity filters.
fn canonical_ghz_gauge(mut m: [Mat2; 3]) -> [Mat2; 3] {
    let off = m[0][(0, 1)].norm() + m[0][(1, 0)].norm();
    let on = m[0][(0, 0)].norm() + m[0][(1, 1)].norm();
    if off > on {
        let flip = Mat2::new(ZERO, c(0.0, 1.0), c(0.0, 1.0), ZERO);
        m = m.map(|x| flip * x);
    }
    let balance = |x: &Mat2| {
        let (p, q) = (x[(0, 0)], x[(1, 1)]);
        if p.norm() > 1e-12 && q.norm() > 1e-12 { (q / p).sqrt() } else { ONE }
    };
    let (a, b) = (balance(&m[0]), balance(&m[1]));
    ghz_family_apply(m, a, b)
}

fn ghz_family_apply(m: [Mat2; 3], a: C64, b: C64) -> [Mat2; 3] {
    let d = |x: C64| Mat2::new(x, ZERO, ZERO, ONE / x);
    [d(a) * m[0], d(b) * m[1], d(ONE / (a * b)) * m[2]]
}

/// Left-multiplies by `diag(a, 1/a)`, `diag(b, 1/b)`, `diag(1/ab, ab)`, which
/// fix the GHZ state; the success probability is recomputed on `psi`.
pub fn ghz_symmetry_family(psi: &ThreeQubitPure, filters: &FilterTriple, a: C64, b: C64) -> Result<FilterTriple> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::InvalidParameter("GHZ family parameters must be nonzero".into()));
    }
    FilterTriple::from_matrices(psi, ghz_family_apply(filters.matrices(), a, b))
}

/// Determinant-one filters taking a W-class state to the W direction.
///
/// The AB marginal is reduced to the quasi-distillable form
/// `∝ |00⟩⟨00| + |ψ+⟩⟨ψ+|`, after which the third party maps its relative
/// states onto `|1⟩` and `√2 |0⟩`.
pub fn w_filters(psi: &ThreeQubitPure) -> Result<FilterTriple> {
    require(psi, Slocc3Class::Wclass)?;
    // A W-class marginal always has the quasi-distillable normal form, so the
    // finite reduction is applied directly instead of re-detecting the class
    // from a numerically delicate eigenvalue degeneracy.
    let rho_ab = partial_trace(psi, 2)?;
    let (ma, mb) = quasi_distillable_filters(rho_ab.matrix())?;
    let (fa, fb) = (Filter2::normalize(ma)?, Filter2::normalize(mb)?);
    let psi1 = apply_local3(psi.amplitudes(), &fa.m, &fb.m, &Mat2::identity());
    let mut zero_zero = crate::algebra::Ket4::zeros();
    zero_zero[0] = ONE;
    let mut fa = fa.m;
    let mut psi1 = psi1;
    // A negative coherence gives ψ− in place of ψ+; Z on A swaps them and fixes |00⟩.
    if contract_ab(&bell::psi_minus(), &psi1).norm() > contract_ab(&bell::psi_plus(), &psi1).norm() {
        let z = Mat2::new(c(0.0, 1.0), ZERO, ZERO, c(0.0, -1.0));
        fa = z * fa;
        psi1 = apply_local3(&psi1, &z, &Mat2::identity(), &Mat2::identity());
    }
    let c1 = contract_ab(&zero_zero, &psi1);
    let c2 = contract_ab(&bell::psi_plus(), &psi1);
    let cf = party_c_filter(c1, c2, Vector2::new(ZERO, ONE), Vector2::new(r(2f64.sqrt()), ZERO))?;
    FilterTriple::from_matrices(psi, canonical_w_gauge([fa, fb.m, cf]))
}

/// The upper-triangular W symmetries, `x ≠ 0`.
///
/// The `|000⟩` amplitude of the image of W is `x²(y + z + w)` for third
/// off-diagonal entry `w`, so W is fixed (up to the factor `x`) exactly when
/// `w = −(y + z)`.
pub fn w_family_matrices(x: C64, y: C64, z: C64) -> [Mat2; 3] {
    let ix = ONE / x;
    [
        Mat2::new(x, y, ZERO, ix),
        Mat2::new(x, z, ZERO, ix),
        Mat2::new(x, -(y + z), ZERO, ix),
    ]
}

fn w_family_apply(m: [Mat2; 3], x: C64, y: C64, z: C64) -> [Mat2; 3] {
    let s = w_family_matrices(x, y, z);
    [s[0] * m[0], s[1] * m[1], s[2] * m[2]]
}

/// Uses the W symmetries to make the first two filters as close to the
/// identity as the family allows.
fn canonical_w_gauge(m: [Mat2; 3]) -> [Mat2; 3] {
    let (a, b) = (m[0], m[1]);
    if a[(0, 0)].norm() < 1e-12 || a[(1, 1)].norm() < 1e-12 || b[(1, 1)].norm() < 1e-12 {
        return m;
    }
    let x = ONE / a[(0, 0)];
    let y = -x * a[(0, 1)] / a[(1, 1)];
    let z = -x * b[(0, 1)] / b[(1, 1)];
    w_family_apply(m, x, y, z)
}

/// Left-multiplies by the W symmetries; the success probability is
/// recomputed on `psi`.
pub fn w_symmetry_family(psi: &ThreeQubitPure, filters: &FilterTriple, x: C64, y: C64, z: C64) -> Result<FilterTriple> {
    if x.norm() == 0.0 {
        return Err(Error::InvalidParameter("W family parameter x must be nonzero".into()));
    }
    FilterTriple::from_matrices(psi, w_family_apply(filters.matrices(), x, y, z))
}
