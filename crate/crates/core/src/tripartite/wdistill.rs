//! Single-copy W distillation by search over the W symmetry family.
//!
//! For the base triple `X` from [`w_filters`] and a family element `S(x, y, z)`,
//! `(S X) ψ = x (X ψ)` is still along W, so the branch probability is
//! `|x|² ‖Xψ‖² / Π λmax(S_i X_i)†(S_i X_i)`. The search forces one factor
//! `S_i X_i` to be unitary by cancelling the triangular part of `X_i = R Q`
//! and optimizes the remaining complex parameter.

use rand::Rng;

use crate::algebra::{apply_local3, c, lambda_max2, Mat2, ThreeQubitPure, C64};
use crate::error::Result;
use crate::optimize::minimize;
use crate::random::trial_rng;

use super::filters::{w_family_matrices, w_filters, FilterTriple};

#[derive(Debug, Clone)]
pub struct WDistillResult {
    pub filters: FilterTriple,
    pub probability: f64,
    /// Best probability with party 0, 1, 2 forced unitary.
    pub restricted: [f64; 3],
    pub unitary_party: usize,
    /// Best probability found over the full family, as evidence for the
    /// unitary-party restriction; not used to pick the filters.
    pub unrestricted: f64,
    /// Probability of the unoptimized base triple.
    pub base_probability: f64,
}

/// `X = R Q` with `R = [[r, s], [0, 1/r]]`, `r > 0`, `Q` unitary, for
/// `det X = 1`. Returns `(r, s)`.
fn rq_triangle(x: &Mat2) -> (f64, C64) {
    let row2 = x.row(1).into_owned();
    let n2 = row2.norm();
    let q2 = row2 / c(n2, 0.0);
    let s = (x.row(0) * q2.adjoint())[(0, 0)];
    (1.0 / n2, s)
}

struct Problem {
    base: [Mat2; 3],
    norm0: f64,
}

impl Problem {
    fn probability(&self, x: C64, y: C64, z: C64) -> f64 {
        let s = w_family_matrices(x, y, z);
        let lam: f64 = (0..3)
            .map(|i| {
                let m = s[i] * self.base[i];
                lambda_max2(&(m * m.adjoint()))
            })
            .product();
        x.norm_sqr() * self.norm0 / lam
    }

    /// Family parameters with party `k` unitary and free complex `w`.
    fn restricted(&self, k: usize, w: C64) -> (C64, C64, C64) {
        let (rk, sk) = rq_triangle(&self.base[k]);
        let x = c(1.0 / rk, 0.0);
        match k {
            0 => (x, -sk, w),
            1 => (x, w, -sk),
            _ => (x, w, sk - w),
        }
    }
}

/// Maximizes the W branch probability with 20 seeded restarts per restricted
/// case plus a start at zero.
pub fn optimal_w_distillation(psi: &ThreeQubitPure, restarts: usize, seed: u64) -> Result<WDistillResult> {
    let base_triple = w_filters(psi)?;
    let base = base_triple.matrices();
    let norm0 = apply_local3(psi.amplitudes(), &base[0], &base[1], &base[2]).norm_squared();
    let problem = Problem { base, norm0 };

    let mut restricted = [0.0; 3];
    let mut best_params = [(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)); 3];
    for k in 0..3 {
        let f = |u: &[f64]| {
            let (x, y, z) = problem.restricted(k, c(u[0], u[1]));
            -problem.probability(x, y, z)
        };
        let mut best = (f64::INFINITY, vec![0.0, 0.0]);
        for start in 0..=restarts {
            let u0 = if start == 0 {
                vec![0.0, 0.0]
            } else {
                let mut rng = trial_rng(seed, (k * 1000 + start) as u64);
                vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]
            };
            let (u, v) = minimize(f, &u0, 0.25, 2000);
            if v < best.0 {
                best = (v, u);
            }
        }
        restricted[k] = -best.0;
        best_params[k] = problem.restricted(k, c(best.1[0], best.1[1]));
    }
    let unitary_party = (0..3).max_by(|&i, &j| restricted[i].total_cmp(&restricted[j])).unwrap_or(0);
    let (x, y, z) = best_params[unitary_party];
    let s = w_family_matrices(x, y, z);
    let filters = FilterTriple::from_matrices(psi, [s[0] * base[0], s[1] * base[1], s[2] * base[2]])?;

    let full = |u: &[f64]| -problem.probability(c(u[0].exp(), 0.0), c(u[1], u[2]), c(u[3], u[4]));
    let mut unrestricted = base_triple.success_probability;
    for start in 0..=restarts {
        let u0: Vec<f64> = if start == 0 {
            vec![0.0; 5]
        } else {
            let mut rng = trial_rng(seed, (10_000 + start) as u64);
            (0..5).map(|_| rng.random_range(-2.0..2.0)).collect()
        };
        let (_, v) = minimize(full, &u0, 0.25, 4000);
        unrestricted = unrestricted.max(-v);
    }

    Ok(WDistillResult {
        probability: filters.success_probability,
        filters,
        restricted,
        unitary_party,
        unrestricted,
        base_probability: base_triple.success_probability,
    })
}
