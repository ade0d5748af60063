//! Optimal single-copy GHZ distillation.
//!
//! Starting from a base triple `(A0, B0, C0)` taking ψ to `τ^{1/4}|GHZ⟩`, the
//! remaining freedom is `diag(a, 1/a) A0`, `diag(b, 1/b) B0`,
//! `diag(1/ab, ab) C0`. The image of ψ does not change, so the success
//! probability is `√τ / λmax` and only `λmax` is minimized.
//!
//! With `H = X X†` for each base filter, `κ = √(h11 h22)` and
//! `c = ½ ln(h11/h22)`, each party's factor is
//! `λ(z) = κ cosh z + √(κ² cosh² z − 1)` in the shifted log-parameter
//! `z1 = 2 ln a + c1`, `z2 = 2 ln b + c2`, `z3 = −2 ln a − 2 ln b + c3`.
//! Equal eigenvector ratios `β/α` mean `sinh z_i = ρ |h12_i| / κ_i` for one
//! common `ρ`; the sum constraint `Σ z = Σ c` then fixes `ρ` by bisection.

use nalgebra::{SMatrix, Vector2};

use crate::algebra::{apply_local3, det2, hermiticity_defect, kron3, lambda_max2, r, Mat2, ThreeQubitPure, C64, ONE, ZERO};
use crate::error::{Error, Result};
use crate::optimize::minimize;

use super::filters::{ghz_filters, FilterTriple};
use super::three_tangle;

#[derive(Debug, Clone)]
pub struct GhzDistillResult {
    pub filters: FilterTriple,
    pub a_opt: f64,
    pub b_opt: f64,
    pub tau: f64,
    pub p_opt: f64,
    /// Product of the three party-wise largest eigenvalues.
    pub lambda_max: f64,
    /// Largest spread of the normalized ratios `β_i / √(α_i² + β_i²)`
    /// over parties with `α_i > 0`.
    pub ratio_residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Party {
    kappa: f64,
    shift: f64,
    coupling: f64,
}

impl Party {
    fn of(x: &Mat2) -> Self {
        let h = x * x.adjoint();
        let (h11, h22) = (h[(0, 0)].re, h[(1, 1)].re);
        Self { kappa: (h11 * h22).sqrt(), shift: 0.5 * (h11 / h22).ln(), coupling: h[(0, 1)].norm() }
    }

    fn lambda(&self, z: f64) -> f64 {
        // κ² cosh² z − 1 = κ² sinh² z + |h12|² since det H = 1; this form
        // does not cancel near λ = 1.
        let k = self.kappa * z.sinh();
        self.kappa * z.cosh() + (k * k + self.coupling * self.coupling).sqrt()
    }

    fn z_at(&self, rho: f64) -> f64 {
        (rho * self.coupling / self.kappa).asinh()
    }

    /// `(α, β)` of the largest-eigenvector formula at log-parameter `z`.
    fn alpha_beta(&self, z: f64) -> (f64, f64) {
        (2.0 * self.coupling, 2.0 * self.kappa * z.sinh())
    }
}

/// Solves `Σ z_i(ρ) = target` for the common ratio `ρ`.
fn solve_ratio(parties: &[Party; 3], target: f64) -> Result<[f64; 3]> {
    let scale = parties.iter().map(|p| p.coupling / p.kappa).fold(0.0, f64::max);
    if scale < 1e-14 {
        // No coupling anywhere: every split of the sum with a common sign is
        // optimal; take the equal one.
        return Ok([target / 3.0; 3]);
    }
    let total = |rho: f64| parties.iter().map(|p| p.z_at(rho)).sum::<f64>() - target;
    let mut hi = 1.0;
    let sign = if target >= 0.0 { 1.0 } else { -1.0 };
    let mut iters = 0;
    while sign * total(sign * hi) < 0.0 {
        hi *= 2.0;
        iters += 1;
        if iters > 2000 {
            return Err(Error::BracketFailure(format!("ratio bracket exceeded {hi:e} for target {target}")));
        }
    }
    let (mut lo, mut up) = if sign > 0.0 { (0.0, hi) } else { (-hi, 0.0) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + up);
        if total(mid) < 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
        if up - lo <= 1e-16 * up.abs().max(lo.abs()).max(1e-300) {
            break;
        }
    }
    let rho = 0.5 * (lo + up);
    let mut z = [parties[0].z_at(rho), parties[1].z_at(rho), parties[2].z_at(rho)];
    // Put the leftover bisection error in one slot so the sum is exact.
    let err = z.iter().sum::<f64>() - target;
    z[2] -= err;
    Ok(z)
}

fn ratio_residual(parties: &[Party; 3], z: &[f64; 3]) -> f64 {
    let n: Vec<f64> = parties
        .iter()
        .zip(z)
        .filter(|(p, _)| p.coupling > 1e-12)
        .map(|(p, &zi)| {
            let (a, b) = p.alpha_beta(zi);
            b / a.hypot(b)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..n.len() {
        for j in 0..i {
            worst = worst.max((n[i] - n[j]).abs());
        }
    }
    worst
}

fn diag(x: f64) -> Mat2 {
    Mat2::new(r(x), ZERO, ZERO, r(1.0 / x))
}

/// Scales the base triple by the diagonal GHZ symmetries with real `a`, `b`.
fn scaled(base: &[Mat2; 3], a: f64, b: f64) -> [Mat2; 3] {
    [diag(a) * base[0], diag(b) * base[1], diag(1.0 / (a * b)) * base[2]]
}

pub fn optimal_ghz_distillation(psi: &ThreeQubitPure) -> Result<GhzDistillResult> {
    let base = ghz_filters(psi)?.matrices();
    let tau = three_tangle(psi);
    let parties = base.map(|x| Party::of(&x));
    let target: f64 = parties.iter().map(|p| p.shift).sum();
    let z = solve_ratio(&parties, target)?;
    let a = ((z[0] - parties[0].shift) / 2.0).exp();
    let b = ((z[1] - parties[1].shift) / 2.0).exp();
    let lambda_max: f64 = parties.iter().zip(&z).map(|(p, &zi)| p.lambda(zi)).product();
    let filters = FilterTriple::from_matrices(psi, scaled(&base, a, b))?;
    let p_opt = tau.sqrt() / lambda_max;
    if (filters.success_probability - p_opt).abs() > 1e-7 * p_opt.max(1e-3) {
        return Err(Error::InternalInconsistency(format!(
            "branch probability {} disagrees with √τ/λmax = {p_opt}",
            filters.success_probability
        )));
    }
    Ok(GhzDistillResult { filters, a_opt: a, b_opt: b, tau, p_opt, lambda_max, ratio_residual: ratio_residual(&parties, &z) })
}

/// Largest eigenvalue of the full 8×8 operator `Y† Y`, computed without the
/// tensor-product factorization.
pub fn lambda_max8(m: &[Mat2; 3]) -> f64 {
    let [a, b, c] = m.map(|x| x.adjoint() * x);
    let y: SMatrix<C64, 8, 8> = kron3(&a, &b, &c);
    y.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Independent optimum: a 200×200 grid over `(ln a, ln b)` followed by a
/// simplex refinement, using the full 8×8 eigenvalue and the actual filtered
/// norm `‖Yψ‖² / λmax`. Returns `(p, a, b)`.
pub fn ghz_distillation_oracle(psi: &ThreeQubitPure) -> Result<(f64, f64, f64)> {
    let base = ghz_filters(psi)?.matrices();
    let parties = base.map(|x| Party::of(&x));
    let objective = |u: &[f64]| {
        let m = scaled(&base, u[0].exp(), u[1].exp());
        let image = apply_local3(psi.amplitudes(), &m[0], &m[1], &m[2]);
        -image.norm_squared() / lambda_max8(&m)
    };
    let centre = [-parties[0].shift / 2.0, -parties[1].shift / 2.0];
    let n = 200;
    let mut best = (f64::INFINITY, centre.to_vec());
    for i in 0..n {
        for j in 0..n {
            let u = [
                centre[0] - 3.0 + 6.0 * i as f64 / (n - 1) as f64,
                centre[1] - 3.0 + 6.0 * j as f64 / (n - 1) as f64,
            ];
            let v = objective(&u);
            if v < best.0 {
                best = (v, u.to_vec());
            }
        }
    }
    let (u, v) = minimize(objective, &best.1, 0.05, 4000);
    let (u, v) = if v <= best.0 { (u, v) } else { (best.1, best.0) };
    Ok((-v, u[0].exp(), u[1].exp()))
}

/// Checks the closed-form largest eigenvector `v = (α, −β + √(α² + β²))` of
/// `D h D` with `D = diag(s, 1/s)`. Returns `‖(D h D) v − λ v‖ / ‖v‖`;
/// a degenerate spectrum, where the formula gives `v = 0`, counts as 0.
pub fn eigvec_formula_check(h: &Mat2, scale: f64) -> Result<f64> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
    }
    if hermiticity_defect(h) > 1e-10 {
        return Err(Error::NotHermitian(hermiticity_defect(h)));
    }
    let d = det2(h);
    if (d - ONE).norm() > 1e-9 {
        return Err(Error::NotUnitDeterminant(d.norm()));
    }
    // The phase of h12 is a local unitary; remove it so the formula applies.
    let phase = if h[(0, 1)].norm() > 0.0 { h[(0, 1)] / h[(0, 1)].norm() } else { ONE };
    let u = Mat2::new(ONE, ZERO, ZERO, phase);
    let hr = u * h * u.adjoint();
    let k = diag(scale) * hr * diag(scale);
    let alpha = 2.0 * k[(0, 1)].re;
    let beta = k[(0, 0)].re - k[(1, 1)].re;
    let v = Vector2::new(r(alpha), r(-beta + alpha.hypot(beta)));
    if v.norm() < 1e-300 {
        return Ok(0.0);
    }
    let lambda = lambda_max2(&k);
    Ok((k * v - v * r(lambda)).norm() / v.norm())
}

/// The two curves on which the extremal equations hold, for a weight vector
/// `z0` indexed 1..8 as `z0[k-1]`:
/// `a⁴ = (z5 + z7/b²)/(z4 + z2 b²)` and `b⁴ = (z3 + z7/a²)/(z6 + z2 a²)`.
pub fn curve_a_of_b(z0: &[f64; 8], b: f64) -> f64 {
    ((z0[4] + z0[6] / (b * b)) / (z0[3] + z0[1] * b * b)).powf(0.25)
}

pub fn curve_b_of_a(z0: &[f64; 8], a: f64) -> f64 {
    ((z0[2] + z0[6] / (a * a)) / (z0[5] + z0[1] * a * a)).powf(0.25)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveCrossings {
    /// Sign changes of `ln b2(a1(b)) − ln b` on the scan grid.
    pub count: usize,
    /// Crossing `(a, b)` located by bisection, one per sign change.
    pub points: Vec<(f64, f64)>,
}

/// Counts and locates crossings of the two curves in the positive quadrant by
/// scanning `u = ln b` over `[−60, 60]`.
pub fn curve_crossings(z0: &[f64; 8]) -> Result<CurveCrossings> {
    if z0.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidParameter("curve weights must be positive".into()));
    }
    let g = |u: f64| {
        let b = u.exp();
        curve_b_of_a(z0, curve_a_of_b(z0, b)).ln() - u
    };
    let n = 24_001;
    let grid: Vec<f64> = (0..n).map(|i| -60.0 + 120.0 * i as f64 / (n - 1) as f64).collect();
    let mut points = Vec::new();
    let mut prev = g(grid[0]);
    for w in grid.windows(2) {
        let next = g(w[1]);
        if prev == 0.0 || prev.signum() != next.signum() {
            let (mut lo, mut hi) = (w[0], w[1]);
            let slo = g(lo).signum();
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if g(mid).signum() == slo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let b = (0.5 * (lo + hi)).exp();
            points.push((curve_a_of_b(z0, b), b));
        }
        prev = next;
    }
    Ok(CurveCrossings { count: points.len(), points })
}
