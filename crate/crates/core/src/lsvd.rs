//! Lorentz singular value decomposition `R = L1 Σ L2ᵀ` of the R-picture.
//!
//! Generic states have a diagonal `Σ = diag(s0, s1, s2, s3)` with
//! `s0 ≥ s1 ≥ s2 ≥ |s3|`. The columns of `L1` are the eigenvectors of
//! `M = R η Rᵀ η = L1 Σ² L1⁻¹`, Minkowski-orthonormalized; `L2ᵀ = Σ⁻¹ L1⁻¹ R`.
//!
//! When `M` is defective, or the state has a product-projector structure, `Σ`
//! takes one of four non-diagonal forms
//!
//! ```text
//!     [ a  .  .  b       ]
//! Σ = [ .  d  .  .       ]
//!     [ .  .  d  .       ]
//!     [ c  .  .  b+c−a   ]
//! ```
//!
//! reached by finite filters; only diagonalizing them would need an infinite
//! boost. The Lorentz singular values are still defined as
//! `[√((a−b)(a−c)), √((a−b)(a−c)), d, −d]`.

use std::fmt;

use nalgebra::{DMatrix, Matrix2, Schur, Vector4};

use crate::algebra::{
    apply_local2, c, det2, marginal_of, r, Filter2, Mat2, Mat4, C64, ONE, ZERO,
};
use crate::eigen::{eig_hermitian, eig_symmetric};
use crate::error::{Error, Result};
use crate::lorentz::{
    check_lorentz, eta, lorentz_of, lorentz_to_sl2c, max_abs_real, minkowski_dot, r_of, rho_of,
    LorentzTransform, RMat4, RMatrix,
};
use crate::tol;

/// Which normal form `Σ` takes.
///
/// The separable projector families are named after the order in which the
/// non-diagonal families are listed: `SeparableProjectorA` is `c = d = 0,
/// b = a` (normal form `½ I ⊗ |0⟩⟨0|`, the projector sits on the second
/// party) and `SeparableProjectorB` is `b = d = 0, c = a` (normal form
/// `½ |0⟩⟨0| ⊗ I`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalFormClass {
    Diagonal,
    QuasiDistillable,
    SeparableProjectorA,
    SeparableProjectorB,
    SeparablePure,
}

impl fmt::Display for NormalFormClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Diagonal => "Diagonal",
            Self::QuasiDistillable => "QuasiDistillable",
            Self::SeparableProjectorA => "SeparableProjectorA",
            Self::SeparableProjectorB => "SeparableProjectorB",
            Self::SeparablePure => "SeparablePure",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct LsvdResult {
    pub l1: LorentzTransform,
    pub l2: LorentzTransform,
    pub sigma: RMat4,
    pub s: [f64; 4],
    pub class: NormalFormClass,
    /// `(a, b, c, d)` of the non-diagonal normal form.
    pub abcd: Option<[f64; 4]>,
    /// `max |L1 Σ L2ᵀ − R|`.
    pub residual: f64,
    /// Determinant-one filters with `(A ⊗ B) ρ (A ⊗ B)†` in normal form, when
    /// they were constructed directly.
    filters: Option<(Mat2, Mat2)>,
}

impl LsvdResult {
    /// Determinant-one filters `(A, B)` taking the input to its normal form,
    /// i.e. the SL(2,C) preimages of `L1⁻¹` and `L2⁻¹`.
    pub fn filters(&self) -> Result<(Filter2, Filter2)> {
        if let Some((a, b)) = &self.filters {
            return Ok((Filter2 { m: *a, det_normalized: true }, Filter2 { m: *b, det_normalized: true }));
        }
        Ok((lorentz_to_sl2c(&self.l1.inverse())?, lorentz_to_sl2c(&self.l2.inverse())?))
    }

    /// `L1 Σ L2ᵀ`
    pub fn reconstruct(&self) -> RMat4 {
        self.l1.0 * self.sigma * self.l2.0.transpose()
    }
}

/// The non-diagonal template for `(a, b, c, d)`.
pub fn template(abcd: [f64; 4]) -> RMat4 {
    let [a, b, c, d] = abcd;
    let mut s = RMat4::zeros();
    s[(0, 0)] = a;
    s[(0, 3)] = b;
    s[(3, 0)] = c;
    s[(3, 3)] = b + c - a;
    s[(1, 1)] = d;
    s[(2, 2)] = d;
    s
}

/// Lorentz singular values of a non-diagonal normal form.
pub fn nondiagonal_singular_values(abcd: [f64; 4]) -> [f64; 4] {
    let [a, b, c, d] = abcd;
    let s = ((a - b) * (a - c)).max(0.0).sqrt();
    [s, s, d, -d]
}

/// Decides which of the four non-diagonal families `(a, b, c, d)` belongs to.
pub fn classify_normal_form(abcd: [f64; 4]) -> Result<NormalFormClass> {
    let [a, b, c, d] = abcd;
    let eps = tol::FAMILY * a.abs().max(1.0);
    let near = |x: f64, y: f64| (x - y).abs() <= eps;
    if a.abs() <= eps {
        return Err(Error::InternalInconsistency(format!("degenerate normal form {abcd:?}")));
    }
    let candidates = [
        (near(d, 0.0) && near(a, b) && near(a, c), NormalFormClass::SeparablePure),
        (near(d, 0.0) && near(c, 0.0) && near(b, a), NormalFormClass::SeparableProjectorA),
        (near(d, 0.0) && near(b, 0.0) && near(c, a), NormalFormClass::SeparableProjectorB),
        (near(b, a / 2.0) && near(c, a / 2.0), NormalFormClass::QuasiDistillable),
    ];
    candidates
        .iter()
        .find(|(hit, _)| *hit)
        .map(|(_, class)| *class)
        .ok_or_else(|| Error::InternalInconsistency(format!("{abcd:?} matches no normal-form family")))
}

/// Computes the Lorentz singular value decomposition.
pub fn lsvd(r_mat: &RMatrix) -> Result<LsvdResult> {
    let rm = r_mat.0;
    let scale = rm[(0, 0)];
    let rho = rho_of(&rm);

    if let Some(result) = product_structure(&rm, &rho)? {
        return Ok(result);
    }

    let m = rm * eta() * rm.transpose() * eta();
    let clusters = eigen_clusters(&m)?;
    if clusters.iter().any(|c| c.defective) {
        return quasi_distillable(&rm, &rho);
    }
    diagonal_path(&rm, scale, &clusters)
}

struct Cluster {
    value: f64,
    basis: Vec<Vector4<f64>>,
    defective: bool,
}

/// Groups the spectrum of `M` into clusters and returns an eigenbasis of each.
///
/// A cluster is defective when `M − λI` has fewer near-null directions than
/// the cluster has eigenvalues.
fn eigen_clusters(m: &RMat4) -> Result<Vec<Cluster>> {
    let norm = max_abs_real(m).max(f64::MIN_POSITIVE);
    let mut values = eigenvalues_re(m, norm)?;
    values.sort_by(|a, b| b.total_cmp(a));

    let mut groups: Vec<Vec<f64>> = Vec::new();
    for v in values {
        match groups.last_mut() {
            Some(g) if (g.last().unwrap() - v).abs() <= tol::CLUSTER_GAP * norm => g.push(v),
            _ => groups.push(vec![v]),
        }
    }

    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let value = g.iter().sum::<f64>() / g.len() as f64;
        let k = g.len();
        let shifted = DMatrix::from_fn(4, 4, |i, j| m[(i, j)] - if i == j { value } else { 0.0 });
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
        let null_count = order
            .iter()
            .filter(|&&i| svd.singular_values[i] <= 1e-6 * norm)
            .count();
        let raw: Vec<Vector4<f64>> = order[..k]
            .iter()
            .map(|&i| Vector4::new(v_t[(i, 0)], v_t[(i, 1)], v_t[(i, 2)], v_t[(i, 3)]))
            .collect();
        out.push(Cluster { value, basis: align_to_axes(&raw), defective: null_count < k });
    }
    Ok(out)
}

/// Real parts of the eigenvalues of a real 4×4 matrix.
///
/// The unshifted Schur iteration can stall on matrices close to a multiple of
/// the identity (pure states give exactly that), so a capped attempt is
/// followed by one on the traceless, rescaled part.
fn eigenvalues_re(m: &RMat4, norm: f64) -> Result<Vec<f64>> {
    let eps = f64::EPSILON;
    let shift = m.trace() / 4.0;
    let rest = m - RMat4::identity() * shift;
    let size = max_abs_real(&rest);
    if size <= 1e-12 * norm {
        return Ok(vec![shift; 4]);
    }
    if let Some(schur) = Schur::try_new(*m, eps, 300) {
        return Ok(schur.complex_eigenvalues().iter().map(|z| z.re).collect());
    }
    let schur = Schur::try_new(rest / size, eps, 10_000)
        .ok_or_else(|| Error::InternalInconsistency("eigenvalues of RηRᵀη did not converge".into()))?;
    Ok(schur.complex_eigenvalues().iter().map(|z| z.re * size + shift).collect())
}

/// Re-expresses an orthonormal basis of a subspace using the projections of
/// the coordinate axes, most-aligned first. Keeps axis-aligned answers for
/// states already in normal form.
fn align_to_axes(basis: &[Vector4<f64>]) -> Vec<Vector4<f64>> {
    let project = |e: &Vector4<f64>| basis.iter().fold(Vector4::zeros(), |acc, q| acc + q * q.dot(e));
    let mut axes: Vec<(f64, Vector4<f64>)> = (0..4)
        .map(|i| {
            let p = project(&Vector4::ith(i, 1.0));
            (p.norm(), p)
        })
        .collect();
    axes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<Vector4<f64>> = Vec::with_capacity(basis.len());
    for (_, mut v) in axes {
        if out.len() == basis.len() {
            break;
        }
        for q in &out {
            v -= q * q.dot(&v);
        }
        let n = v.norm();
        if n > 1e-6 {
            out.push(v / n);
        }
    }
    if out.len() < basis.len() {
        return basis.to_vec();
    }
    out
}

fn diagonal_path(rm: &RMat4, scale: f64, clusters: &[Cluster]) -> Result<LsvdResult> {
    let e = eta();
    // (eigenvalue, vector, metric sign)
    let mut timelike: Vec<(f64, Vector4<f64>)> = Vec::new();
    let mut spacelike: Vec<(f64, Vector4<f64>)> = Vec::new();
    for cl in clusters {
        let k = cl.basis.len();
        let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| minkowski_dot(&cl.basis[i], &cl.basis[j]));
        let (vals, vecs) = eig_dyn(&gram)?;
        for j in 0..k {
            if vals[j].abs() < 1e-12 {
                return Err(Error::InternalInconsistency("null eigenvector of RηRᵀη".into()));
            }
            let v = (0..k).fold(Vector4::zeros(), |acc, i| acc + cl.basis[i] * vecs[(i, j)]) / vals[j].abs().sqrt();
            if vals[j] > 0.0 {
                timelike.push((cl.value, v));
            } else {
                spacelike.push((cl.value, v));
            }
        }
    }
    if timelike.len() != 1 || spacelike.len() != 3 {
        return Err(Error::InternalInconsistency(format!(
            "expected one timelike eigenvector, found {}",
            timelike.len()
        )));
    }
    spacelike.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut cols = [timelike[0].1, spacelike[0].1, spacelike[1].1, spacelike[2].1];
    minkowski_gram_schmidt(&mut cols)?;
    if cols[0][0] < 0.0 {
        cols[0] = -cols[0];
    }
    let mut l1 = RMat4::from_columns(&cols);
    if l1.determinant() < 0.0 {
        let c3 = -l1.column(3);
        l1.set_column(3, &c3);
    }

    // G = L1⁻¹ R = Σ L2ᵀ
    let mut g = e * l1.transpose() * e * rm;
    let row = |g: &RMat4, i: usize| Vector4::new(g[(i, 0)], g[(i, 1)], g[(i, 2)], g[(i, 3)]);
    let s0_sq = minkowski_dot(&row(&g, 0), &row(&g, 0));
    if s0_sq <= 0.0 || g[(0, 0)] <= 0.0 {
        return Err(Error::InternalInconsistency("leading Lorentz singular vector is not future timelike".into()));
    }
    let mut s = [s0_sq.sqrt(), 0.0, 0.0, 0.0];
    for i in 1..4 {
        s[i] = (-minkowski_dot(&row(&g, i), &row(&g, i))).max(0.0).sqrt();
    }

    // Spatial ordering by magnitude; odd permutations absorb a sign flip.
    let mut perm = [1usize, 2, 3];
    perm.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    if perm != [1, 2, 3] {
        let (l_old, g_old, s_old) = (l1, g, s);
        for (dst, &src) in perm.iter().enumerate() {
            l1.set_column(dst + 1, &l_old.column(src));
            g.set_row(dst + 1, &g_old.row(src));
            s[dst + 1] = s_old[src];
        }
        if l1.determinant() < 0.0 {
            let c3 = -l1.column(3);
            l1.set_column(3, &c3);
            let r3 = -g.row(3);
            g.set_row(3, &r3);
        }
    }

    let zero_cut = tol::ZERO_SINGULAR * scale;
    let mut l2_cols: [Option<Vector4<f64>>; 4] = [None; 4];
    for i in 0..4 {
        if s[i] > zero_cut {
            l2_cols[i] = Some(row(&g, i) / s[i]);
        } else {
            s[i] = 0.0;
        }
    }
    if l2_cols[0].is_none() {
        return Err(Error::InternalInconsistency("s0 vanishes".into()));
    }
    let completed = complete_minkowski(&mut l2_cols)?;
    // Columns g_i / s_i lose accuracy as s_i shrinks; re-orthonormalize in
    // order of decreasing s so the best-determined columns anchor the frame.
    let mut l2_frame = l2_cols.map(|c| c.expect("completed"));
    minkowski_gram_schmidt(&mut l2_frame)?;
    let mut l2 = RMat4::from_columns(&l2_frame);
    if l2.determinant() < 0.0 {
        let flip = completed.last().copied().unwrap_or(3);
        let col = -l2.column(flip);
        l2.set_column(flip, &col);
        if completed.is_empty() {
            s[3] = -s[3];
        }
    }

    let sigma = RMat4::from_diagonal(&Vector4::from(s));
    let residual = max_abs_real(&(l1 * sigma * l2.transpose() - rm));
    Ok(LsvdResult {
        l1: LorentzTransform(l1),
        l2: LorentzTransform(l2),
        sigma,
        s,
        class: NormalFormClass::Diagonal,
        abcd: None,
        residual,
        filters: None,
    })
}

fn eig_dyn(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let k = m.nrows();
    macro_rules! fixed {
        ($n:literal) => {{
            let f = nalgebra::SMatrix::<f64, $n, $n>::from_fn(|i, j| m[(i, j)]);
            let (v, w) = eig_symmetric(&f)?;
            Ok((v.iter().copied().collect(), DMatrix::from_fn(k, k, |i, j| w[(i, j)])))
        }};
    }
    match k {
        1 => Ok((vec![m[(0, 0)]], DMatrix::identity(1, 1))),
        2 => fixed!(2),
        3 => fixed!(3),
        4 => fixed!(4),
        _ => unreachable!("clusters have at most four members"),
    }
}

/// In-place Minkowski Gram–Schmidt, timelike vector first.
fn minkowski_gram_schmidt(cols: &mut [Vector4<f64>; 4]) -> Result<()> {
    for i in 0..4 {
        let mut v = cols[i];
        for j in 0..i {
            let nj = minkowski_dot(&cols[j], &cols[j]);
            v -= cols[j] * (minkowski_dot(&cols[j], &v) / nj);
        }
        let n = minkowski_dot(&v, &v);
        let want_positive = i == 0;
        if (n > 0.0) != want_positive || n.abs() < 1e-14 {
            return Err(Error::InternalInconsistency("Minkowski orthonormalization broke down".into()));
        }
        cols[i] = v / n.abs().sqrt();
    }
    Ok(())
}

/// Fills missing spatial columns so the set is Minkowski-orthonormal; returns
/// the indices that were filled.
fn complete_minkowski(cols: &mut [Option<Vector4<f64>>; 4]) -> Result<Vec<usize>> {
    let mut filled = Vec::new();
    for i in 1..4 {
        if cols[i].is_some() {
            continue;
        }
        let mut best: Option<Vector4<f64>> = None;
        for axis in [1usize, 2, 3, 0] {
            let mut v = Vector4::ith(axis, 1.0);
            for c in cols.iter().flatten() {
                v -= c * (minkowski_dot(c, &v) / minkowski_dot(c, c));
            }
            let n = -minkowski_dot(&v, &v);
            if n > 1e-3 && best.is_none_or(|b| n > -minkowski_dot(&b, &b)) {
                best = Some(v);
            }
        }
        let v = best.ok_or_else(|| Error::InternalInconsistency("cannot complete Lorentz frame".into()))?;
        cols[i] = Some(v / (-minkowski_dot(&v, &v)).sqrt());
        filled.push(i);
    }
    Ok(filled)
}

fn is_null_bloch(v: &Vector4<f64>) -> bool {
    // Smallest over largest eigenvalue of the marginal (v0 ± |v⃗|)/2.
    let spatial = (v[1] * v[1] + v[2] * v[2] + v[3] * v[3]).sqrt();
    (v[0] - spatial) <= tol::RANK * (v[0] + spatial)
}

/// Detects `R = r_A r_Bᵀ / R00` with at least one pure marginal and builds the
/// corresponding separable normal form.
fn product_structure(rm: &RMat4, rho: &Mat4) -> Result<Option<LsvdResult>> {
    let r00 = rm[(0, 0)];
    let col: Vector4<f64> = rm.column(0).into_owned();
    let row: Vector4<f64> = rm.row(0).transpose();
    let outer = col * row.transpose() / r00;
    if max_abs_real(&(rm - outer)) > tol::RANK * r00 {
        return Ok(None);
    }
    let (a_pure, b_pure) = (is_null_bloch(&col), is_null_bloch(&row));
    let class = match (a_pure, b_pure) {
        (true, true) => NormalFormClass::SeparablePure,
        (false, true) => NormalFormClass::SeparableProjectorA,
        (true, false) => NormalFormClass::SeparableProjectorB,
        (false, false) => return Ok(None),
    };
    let rho_a = marginal_of(rho, 0)?;
    let rho_b = marginal_of(rho, 1)?;
    let (fa, fb) = match class {
        NormalFormClass::SeparablePure => {
            let g = r00.powf(-0.25);
            (scaled_rotation_to_zero(&rho_a, g)?, scaled_rotation_to_zero(&rho_b, g)?)
        }
        NormalFormClass::SeparableProjectorA => {
            let (w, det) = whitening(&rho_a)?;
            let g = (0.5 / det.sqrt()).sqrt();
            (w, scaled_rotation_to_zero(&rho_b, g)?)
        }
        _ => {
            let (w, det) = whitening(&rho_b)?;
            let g = (0.5 / det.sqrt()).sqrt();
            (scaled_rotation_to_zero(&rho_a, g)?, w)
        }
    };
    let abcd = match class {
        NormalFormClass::SeparablePure => [1.0, 1.0, 1.0, 0.0],
        NormalFormClass::SeparableProjectorA => [1.0, 1.0, 0.0, 0.0],
        _ => [1.0, 0.0, 1.0, 0.0],
    };
    finish_nondiagonal(rm, rho, class, fa, fb, Some(abcd)).map(Some)
}

/// `diag(g, 1/g) · U` with `U` the SU(2) rotation taking the top eigenvector
/// of a rank-one marginal to `|0⟩`.
fn scaled_rotation_to_zero(marginal: &Mat2, g: f64) -> Result<Mat2> {
    let eig = eig_hermitian(marginal)?;
    let e = eig.vectors.column(0);
    let u = Mat2::new(e[0].conj(), e[1].conj(), -e[1], e[0]);
    Ok(Mat2::new(r(g), ZERO, ZERO, r(1.0 / g)) * u)
}

/// Determinant-one `σ^{-1/2}` scaled so `A σ A† = √det σ · I`; returns it with `det σ`.
fn whitening(sigma: &Mat2) -> Result<(Mat2, f64)> {
    let det = det2(sigma).re;
    if det <= 0.0 {
        return Err(Error::SingularMarginal);
    }
    let inv_sqrt = crate::algebra::hermitian_fn(sigma, |x| 1.0 / x.sqrt())?;
    Ok((inv_sqrt * r(det.powf(0.25)), det))
}

/// Builds the non-diagonal result from normalizing filters: measures `Σ`,
/// fits the template by least squares and checks the family.
fn finish_nondiagonal(
    rm: &RMat4,
    rho: &Mat4,
    expected: NormalFormClass,
    fa: Mat2,
    fb: Mat2,
    exact_abcd: Option<[f64; 4]>,
) -> Result<LsvdResult> {
    let normal = apply_local2(rho, &fa, &fb);
    let measured = r_of(&normal)?;
    let (fit, fit_residual) = fit_template(&measured);
    let scale = rm[(0, 0)].max(measured[(0, 0)]);
    if fit_residual > 1e-6 * scale {
        return Err(Error::InternalInconsistency(format!(
            "normal-form template fit residual {fit_residual:.3e}"
        )));
    }
    let abcd = exact_abcd.unwrap_or(fit);
    let class = classify_normal_form(fit)?;
    if class != expected {
        return Err(Error::InternalInconsistency(format!("fit gives {class}, expected {expected}")));
    }
    let inv = |m: &Mat2| m.try_inverse().ok_or(Error::SingularFilter);
    let l1 = lorentz_of(&inv(&fa)?);
    let l2 = lorentz_of(&inv(&fb)?);
    for l in [&l1, &l2] {
        if l[(0, 0)] > 1e6 {
            return Err(Error::InternalInconsistency("finite reduction exceeds the boost cap".into()));
        }
        check_lorentz(l, tol::DETERMINANT)?;
    }
    let sigma = template(abcd);
    let residual = max_abs_real(&(l1 * sigma * l2.transpose() - rm));
    Ok(LsvdResult {
        l1: LorentzTransform(l1),
        l2: LorentzTransform(l2),
        sigma,
        s: nondiagonal_singular_values(abcd),
        class,
        abcd: Some(abcd),
        residual,
        filters: Some((fa, fb)),
    })
}

/// Least-squares `(a, b, c, d)` for the non-diagonal template, and the
/// largest entrywise residual of the fit.
pub(crate) fn fit_template(measured: &RMat4) -> ([f64; 4], f64) {
    // Each entry of the template is linear in (a, b, c, d).
    let rows: [((usize, usize), [f64; 4]); 6] = [
        ((0, 0), [1.0, 0.0, 0.0, 0.0]),
        ((0, 3), [0.0, 1.0, 0.0, 0.0]),
        ((3, 0), [0.0, 0.0, 1.0, 0.0]),
        ((3, 3), [-1.0, 1.0, 1.0, 0.0]),
        ((1, 1), [0.0, 0.0, 0.0, 1.0]),
        ((2, 2), [0.0, 0.0, 0.0, 1.0]),
    ];
    let design = nalgebra::SMatrix::<f64, 6, 4>::from_fn(|i, j| rows[i].1[j]);
    let rhs = nalgebra::SVector::<f64, 6>::from_fn(|i, _| measured[rows[i].0]);
    let normal = design.transpose() * design;
    let x = normal
        .try_inverse()
        .expect("template design has full column rank")
        * design.transpose()
        * rhs;
    let abcd = [x[0], x[1], x[2], x[3]];
    (abcd, max_abs_real(&(measured - template(abcd))))
}

/// Reduces a defective state to the quasi-distillable normal form
/// `½ [[a, ., ., .], [., a/2, d, .], [., d, a/2, .], [., ., ., 0]]` with
/// explicit finite filters.
fn quasi_distillable(rm: &RMat4, rho: &Mat4) -> Result<LsvdResult> {
    let (fa, fb) = quasi_distillable_filters(rho)?;
    finish_nondiagonal(rm, rho, NormalFormClass::QuasiDistillable, fa, fb, None)
}

/// Determinant-one filters bringing a quasi-distillable operator to its normal form.
pub(crate) fn quasi_distillable_filters(rho: &Mat4) -> Result<(Mat2, Mat2)> {
    let eig = eig_hermitian(rho)?;
    let lead = eig.values[0];
    let rank = eig.values.iter().filter(|&&x| x > tol::RANK * lead).count();
    let kernel_matrix = |k: usize| {
        let v = eig.vectors.column(k);
        Matrix2::new(v[0], v[1], v[2], v[3])
    };
    let product = match rank {
        3 => kernel_matrix(3),
        2 => {
            // det(u K1 + v K2) = αu² + βuv + γv² has a double root.
            let (k1, k2) = (kernel_matrix(2), kernel_matrix(3));
            let alpha = det2(&k1);
            let gamma = det2(&k2);
            let beta = k1[(0, 0)] * k2[(1, 1)] + k2[(0, 0)] * k1[(1, 1)]
                - k1[(0, 1)] * k2[(1, 0)]
                - k2[(0, 1)] * k1[(1, 0)];
            if alpha.norm() >= gamma.norm() {
                k1 * (-beta) + k2 * (alpha * 2.0)
            } else {
                k1 * (gamma * 2.0) + k2 * (-beta)
            }
        }
        _ => {
            return Err(Error::InternalInconsistency(format!(
                "defective R-picture with rank-{rank} state"
            )))
        }
    };
    let n = product.norm();
    if n == 0.0 || det2(&product).norm() > 1e-6 * n * n {
        return Err(Error::InternalInconsistency("kernel holds no product vector".into()));
    }
    let product = product / r(n);
    let (e, f) = rank_one_factors(&product);

    // Rotate the product kernel vector onto |11⟩.
    let to_one = |e: &nalgebra::Vector2<C64>| Mat2::new(-e[1], e[0], e[0].conj(), e[1].conj()) * c(0.0, 1.0);
    let (ua, ub) = (to_one(&e), to_one(&f));
    let rho1 = apply_local2(rho, &ua, &ub);

    // Upper-triangular filters keep span{00, 01, 10}; they balance the middle
    // block and cancel the coherences with |00⟩.
    let q = rho1[(1, 1)].re;
    let s = rho1[(2, 2)].re;
    if q <= 0.0 || s <= 0.0 {
        return Err(Error::InternalInconsistency("empty middle block".into()));
    }
    let mu = (s / q).powf(0.25);
    let middle_t = Mat2::new(rho1[(1, 1)], rho1[(2, 1)], rho1[(1, 2)], rho1[(2, 2)]);
    let rhs = nalgebra::Vector2::new(-rho1[(0, 1)], -rho1[(0, 2)]);
    let pinv = crate::algebra::hermitian_fn(&middle_t, |x| {
        if x.abs() > tol::RANK * (q + s) {
            1.0 / x
        } else {
            0.0
        }
    })?;
    let uv = pinv * rhs;
    let (u1, v1) = (uv[0], uv[1]);
    let row0 = nalgebra::RowVector3::new(ONE, u1, v1);
    let block = nalgebra::Matrix3::from_fn(|i, j| rho1[(i, j)]);
    let p1 = (row0 * block * row0.adjoint())[(0, 0)].re;
    let q_bal = (q * s).sqrt();
    if p1 <= 0.0 {
        return Err(Error::InternalInconsistency("no |00⟩ weight after reduction".into()));
    }
    let kappa = (2.0 * q_bal / p1).sqrt();
    let alpha = (kappa * mu).sqrt();
    let alpha_b = (kappa / mu).sqrt();
    let beta_b = u1 * r(kappa / alpha);
    let beta = v1 * r(kappa / alpha_b);

    let off = rho1[(1, 2)];
    let phi = -off.arg() / 2.0;
    let phase = Mat2::new(C64::from_polar(1.0, phi), ZERO, ZERO, C64::from_polar(1.0, -phi));
    let ta = Mat2::new(r(alpha), beta, ZERO, r(1.0 / alpha));
    let tb = Mat2::new(r(alpha_b), beta_b, ZERO, r(1.0 / alpha_b));
    Ok((phase * ta * ua, tb * ub))
}

/// `K = e fᵀ` for a rank-one 2×2 matrix with unit Frobenius norm.
fn rank_one_factors(k: &Mat2) -> (nalgebra::Vector2<C64>, nalgebra::Vector2<C64>) {
    let c0 = k.column(0).into_owned();
    let c1 = k.column(1).into_owned();
    let e = if c0.norm() >= c1.norm() { c0 } else { c1 };
    let e = e / r(e.norm());
    let f0 = k.row(0).transpose();
    let f1 = k.row(1).transpose();
    let f = if f0.norm() >= f1.norm() { f0 } else { f1 };
    let f = f / r(f.norm());
    (e, f)
}

/// Convenience: LSVD of a density matrix.
pub fn lsvd_of(rho: &crate::algebra::DensityMatrix2Q) -> Result<LsvdResult> {
    lsvd(&crate::lorentz::rho_to_r(rho)?)
}

/// LSVD of an unnormalized Hermitian operator.
#[cfg(test)]
pub(crate) fn lsvd_raw(m: &Mat4) -> Result<LsvdResult> {
    let rm = r_of(m)?;
    lsvd(&RMatrix::new(rm)?)
}
