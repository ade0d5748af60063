//! Probabilistic SLOCC convertibility between two-qubit states.
//!
//! Both states are reduced to their Bell-diagonal normal forms with ordered
//! weights `λ` and `μ`. Conversion is declared possible iff `μ` is a mixture
//! of `λ` with a separable Bell-diagonal state on the separable boundary
//! (largest weight ½):
//!
//! ```text
//! (μ1, P(μ2, μ3, μ4)) = (1 − x) λ + x (½, y, z, t),   0 ≤ x ≤ 1,  y, z, t ≥ 0,  y + z + t = ½
//! ```
//!
//! for some permutation `P`. That this criterion is both necessary and
//! sufficient is an unproven conjecture, so every verdict is conditional on it.

use std::fmt;

use nalgebra::Vector4;

use crate::algebra::DensityMatrix2Q;
use crate::error::{Error, Result};
use crate::lsvd::{lsvd_of, NormalFormClass};
use crate::monotones::{monotones_from_spectrum, sign_matrix, LorentzSpectrum};

/// Bell-diagonal weights, descending, summing to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellSpectrum(pub [f64; 4]);

impl BellSpectrum {
    pub fn new(lam: [f64; 4]) -> Result<Self> {
        let sum: f64 = lam.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || lam.iter().any(|&x| x < -1e-10) {
            return Err(Error::InvalidParameter(format!("{lam:?} is not a distribution")));
        }
        if lam.windows(2).any(|w| w[0] + 1e-10 < w[1]) {
            return Err(Error::InvalidParameter(format!("{lam:?} is not descending")));
        }
        Ok(Self(lam))
    }

    /// Sorts and validates arbitrary nonnegative weights.
    pub fn from_unsorted(mut lam: [f64; 4]) -> Result<Self> {
        lam.sort_by(|a, b| b.total_cmp(a));
        Self::new(lam)
    }

    pub fn is_entangled(&self) -> bool {
        self.0[0] > 0.5 + BOUNDARY
    }

    /// Concurrence of the Bell-diagonal state, `max(0, 2λ1 − 1)`.
    pub fn concurrence(&self) -> f64 {
        (2.0 * self.0[0] - 1.0).max(0.0)
    }
}

const BOUNDARY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConvertReason {
    TrivialSeparableTarget,
    PureEntangledSource,
    MixingWitness,
    Infeasible,
    /// A normal form is not diagonal; the criterion says nothing.
    NormalFormObstruction,
}

impl fmt::Display for ConvertReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Solution of the mixing system: the permutation applied to `(μ2, μ3, μ4)`
/// and the mixing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub permutation: [usize; 3],
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvertVerdict {
    /// Meaningless when `reason` is `NormalFormObstruction`; see [`Self::is_determined`].
    pub feasible: bool,
    pub witness: Option<Witness>,
    pub reason: ConvertReason,
}

impl ConvertVerdict {
    fn of(feasible: bool, reason: ConvertReason) -> Self {
        Self { feasible, witness: None, reason }
    }

    pub fn is_determined(&self) -> bool {
        self.reason != ConvertReason::NormalFormObstruction
    }

    /// Every verdict rests on the unproven mixing criterion.
    pub fn conjecture_conditional(&self) -> bool {
        true
    }
}

/// Lexicographic permutations of three items.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Weights of the Bell-diagonal normal form, `λ = Hᵀ s / (4 s0)` sorted.
pub fn bell_spectrum(rho: &DensityMatrix2Q) -> Result<BellSpectrum> {
    let d = lsvd_of(rho)?;
    if d.class != NormalFormClass::Diagonal {
        return Err(Error::NormalFormObstruction);
    }
    bell_spectrum_from_lorentz(&d.s)
}

pub fn bell_spectrum_from_lorentz(s: &[f64; 4]) -> Result<BellSpectrum> {
    let lam = sign_matrix().transpose() * Vector4::from(*s) / (4.0 * s[0]);
    BellSpectrum::from_unsorted([0, 1, 2, 3].map(|i| if lam[i].abs() < 1e-14 { 0.0 } else { lam[i] }))
}

/// Largest constraint violation of a witness; zero for an exact solution.
pub fn witness_residual(lam: &BellSpectrum, mu: &BellSpectrum, w: &Witness) -> f64 {
    let target = [mu.0[0], mu.0[1 + w.permutation[0]], mu.0[1 + w.permutation[1]], mu.0[1 + w.permutation[2]]];
    let partner = [0.5, w.y, w.z, w.t];
    let mut worst = (w.y + w.z + w.t - 0.5).abs();
    for i in 0..4 {
        worst = worst.max(((1.0 - w.x) * lam.0[i] + w.x * partner[i] - target[i]).abs());
    }
    for v in [-w.x, w.x - 1.0, -w.y, -w.z, -w.t] {
        worst = worst.max(v);
    }
    worst
}

/// Solves the mixing system for each permutation in lexicographic order and
/// returns the first solution.
///
/// A source on the separable boundary (`λ1 = ½`) or inside it can only reach
/// separable targets.
pub fn solve_mixing_system(lam: &BellSpectrum, mu: &BellSpectrum) -> ConvertVerdict {
    if !lam.is_entangled() {
        return if mu.is_entangled() {
            ConvertVerdict::of(false, ConvertReason::Infeasible)
        } else {
            ConvertVerdict::of(true, ConvertReason::TrivialSeparableTarget)
        };
    }
    let x = (lam.0[0] - mu.0[0]) / (lam.0[0] - 0.5);
    if !(-BOUNDARY..=1.0 + BOUNDARY).contains(&x) {
        return ConvertVerdict::of(false, ConvertReason::Infeasible);
    }
    let x = x.clamp(0.0, 1.0);
    for perm in PERMUTATIONS {
        let target = [mu.0[1 + perm[0]], mu.0[1 + perm[1]], mu.0[1 + perm[2]]];
        let witness = if x < 1e-12 {
            // No mixing: the tails must already agree.
            if (0..3).any(|i| (target[i] - lam.0[i + 1]).abs() > 1e-9) {
                continue;
            }
            Witness { permutation: perm, x: 0.0, y: 1.0 / 6.0, z: 1.0 / 6.0, t: 1.0 / 6.0 }
        } else {
            let solve = |i: usize| (target[i] - (1.0 - x) * lam.0[i + 1]) / x;
            let (y, z, t) = (solve(0), solve(1), solve(2));
            if y < -BOUNDARY || z < -BOUNDARY || t < -BOUNDARY || (y + z + t - 0.5).abs() > 1e-9 {
                continue;
            }
            Witness { permutation: perm, x, y: y.max(0.0), z: z.max(0.0), t: t.max(0.0) }
        };
        return ConvertVerdict { feasible: true, witness: Some(witness), reason: ConvertReason::MixingWitness };
    }
    ConvertVerdict::of(false, ConvertReason::Infeasible)
}

/// Signed distance of the best permutation from the feasibility boundary:
/// positive inside, negative outside. Used to keep randomized comparisons
/// away from pairs whose verdict flips under tiny perturbations.
pub fn mixing_margin(lam: &BellSpectrum, mu: &BellSpectrum) -> f64 {
    if !lam.is_entangled() {
        return f64::NAN;
    }
    let x = (lam.0[0] - mu.0[0]) / (lam.0[0] - 0.5);
    let mut best = f64::NEG_INFINITY;
    for perm in PERMUTATIONS {
        let target = [mu.0[1 + perm[0]], mu.0[1 + perm[1]], mu.0[1 + perm[2]]];
        let mut m = x.min(1.0 - x);
        if x.abs() > 1e-12 {
            for i in 0..3 {
                m = m.min((target[i] - (1.0 - x) * lam.0[i + 1]) / x);
            }
        }
        best = best.max(m);
    }
    best
}

/// Brute-force feasibility: scans the separable partner `(½, y, z, ½ − y − z)`
/// on a grid of spacing `step`, with `x` fixed by the first component, and
/// accepts if some permutation matches `μ` within one grid cell.
///
/// Independent of [`solve_mixing_system`]; meant for cross-checks away from
/// the feasibility boundary.
pub fn grid_feasibility(lam: &BellSpectrum, mu: &BellSpectrum, step: f64) -> bool {
    if !lam.is_entangled() {
        return !mu.is_entangled();
    }
    let x = (lam.0[0] - mu.0[0]) / (lam.0[0] - 0.5);
    if !(0.0..=1.0).contains(&x) {
        return false;
    }
    let n = (0.5 / step).round() as usize;
    let tol = x * step + 1e-12;
    for i in 0..=n {
        let y = i as f64 * step;
        for j in 0..=(n - i) {
            let z = j as f64 * step;
            let t = 0.5 - y - z;
            let mixed = [(1.0 - x) * lam.0[1] + x * y, (1.0 - x) * lam.0[2] + x * z, (1.0 - x) * lam.0[3] + x * t];
            let hit = PERMUTATIONS.iter().any(|p| (0..3).all(|k| (mixed[k] - mu.0[1 + p[k]]).abs() <= tol));
            if hit {
                return true;
            }
        }
    }
    false
}

/// Decides whether `rho1` can be converted into `rho2` with nonzero probability.
pub fn convertible(rho1: &DensityMatrix2Q, rho2: &DensityMatrix2Q) -> Result<ConvertVerdict> {
    let d2 = lsvd_of(rho2)?;
    let c2 = monotones_from_spectrum(&LorentzSpectrum(d2.s)).1 / 2.0;
    if c2 <= BOUNDARY {
        return Ok(ConvertVerdict::of(true, ConvertReason::TrivialSeparableTarget));
    }
    let d1 = lsvd_of(rho1)?;
    let c1 = monotones_from_spectrum(&LorentzSpectrum(d1.s)).1 / 2.0;
    if c1 > BOUNDARY && rho1.rank() == 1 {
        return Ok(ConvertVerdict::of(true, ConvertReason::PureEntangledSource));
    }
    if c1 <= BOUNDARY {
        return Ok(ConvertVerdict::of(false, ConvertReason::Infeasible));
    }
    if d1.class != NormalFormClass::Diagonal || d2.class != NormalFormClass::Diagonal {
        return Ok(ConvertVerdict::of(false, ConvertReason::NormalFormObstruction));
    }
    let lam = bell_spectrum_from_lorentz(&d1.s)?;
    let mu = bell_spectrum_from_lorentz(&d2.s)?;
    Ok(solve_mixing_system(&lam, &mu))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bell, r};
    use crate::random::{werner, wishart_state, trial_rng};
    use approx::assert_abs_diff_eq;

    fn spec(l: [f64; 4]) -> BellSpectrum {
        BellSpectrum::new(l).unwrap()
    }

    #[test]
    fn spectrum_examples() {
        let b = bell_spectrum(&DensityMatrix2Q::from_pure(&bell::phi_plus()).unwrap()).unwrap();
        for (g, w) in b.0.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
        let p = 0.3;
        let b = bell_spectrum(&werner(p).unwrap()).unwrap();
        let q = (1.0 - p) / 4.0;
        for (g, w) in b.0.iter().zip([(1.0 + 3.0 * p) / 4.0, q, q, q]) {
            assert_abs_diff_eq!(*g, w, epsilon = 1e-12);
        }
        let psi = bell::psi_plus();
        let mut m = psi * psi.adjoint() * r(0.5);
        m[(0, 0)] += r(0.5);
        let rho2 = DensityMatrix2Q::new(m).unwrap();
        assert_eq!(bell_spectrum(&rho2).unwrap_err(), Error::NormalFormObstruction);
    }

    #[test]
    fn grid_agrees_with_solver_away_from_boundary() {
        let mut rng = trial_rng(40, 0);
        let mut compared = 0;
        for _ in 0..200 {
            let raw = crate::random::simplex4(&mut rng);
            let u: f64 = rand::Rng::random(&mut rng);
            let lam = BellSpectrum::from_unsorted([0.5 + 0.5 * raw[0], 0.5 * raw[1], 0.5 * raw[2], 0.5 * raw[3]]).unwrap();
            let raw2 = crate::random::simplex4(&mut rng);
            let mu = BellSpectrum::from_unsorted([u * raw2[0] + (1.0 - u), u * raw2[1], u * raw2[2], u * raw2[3]]).unwrap();
            if mixing_margin(&lam, &mu).abs() < 0.01 {
                continue;
            }
            compared += 1;
            assert_eq!(grid_feasibility(&lam, &mu, 1e-3), solve_mixing_system(&lam, &mu).feasible, "{lam:?} {mu:?}");
        }
        assert!(compared > 50);
    }

    #[test]
    fn mixing_examples() {
        let v = solve_mixing_system(&spec([1.0, 0.0, 0.0, 0.0]), &spec([0.6, 0.2, 0.1, 0.1]));
        assert!(v.feasible);
        let w = v.witness.unwrap();
        assert_eq!(w.permutation, [0, 1, 2]);
        assert_abs_diff_eq!(w.x, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(w.y, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(w.z, 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(w.t, 0.125, epsilon = 1e-12);

        let lam = spec([0.6, 0.4, 0.0, 0.0]);
        let mu = spec([0.9, 0.1, 0.0, 0.0]);
        assert_abs_diff_eq!((lam.0[0] - mu.0[0]) / (lam.0[0] - 0.5), -3.0, epsilon = 1e-12);
        assert!(!solve_mixing_system(&lam, &mu).feasible);

        let lam = spec([0.7, 0.15, 0.1, 0.05]);
        let v = solve_mixing_system(&lam, &lam);
        assert!(v.feasible);
        assert_eq!(v.witness.unwrap().x, 0.0);
    }

    #[test]
    fn boundary_source_reaches_only_separable() {
        let lam = spec([0.5, 0.3, 0.2, 0.0]);
        assert!(!solve_mixing_system(&lam, &spec([0.6, 0.2, 0.1, 0.1])).feasible);
        assert!(solve_mixing_system(&lam, &spec([0.4, 0.3, 0.2, 0.1])).feasible);
    }

    #[test]
    fn convertible_examples() {
        let bell_state = DensityMatrix2Q::from_pure(&bell::phi_plus()).unwrap();
        for p in [0.2, 0.5, 0.9] {
            assert!(convertible(&bell_state, &werner(p).unwrap()).unwrap().feasible);
        }
        let v = convertible(&werner(0.6).unwrap(), &werner(0.9).unwrap()).unwrap();
        assert!(!v.feasible);
        assert_eq!(v.reason, ConvertReason::Infeasible);
        let any = wishart_state(&mut trial_rng(2, 0));
        let v = convertible(&any, &DensityMatrix2Q::maximally_mixed()).unwrap();
        assert_eq!(v.reason, ConvertReason::TrivialSeparableTarget);
    }

    #[test]
    fn obstruction_is_reported() {
        let psi = bell::psi_plus();
        let mut m = psi * psi.adjoint() * r(0.5);
        m[(0, 0)] += r(0.5);
        let rho2 = DensityMatrix2Q::new(m).unwrap();
        let v = convertible(&rho2, &werner(0.9).unwrap()).unwrap();
        assert!(!v.is_determined());
        let v = convertible(&werner(0.9).unwrap(), &rho2).unwrap();
        assert_eq!(v.reason, ConvertReason::NormalFormObstruction);
    }

    #[test]
    fn witness_satisfies_system() {
        let lam = spec([0.8, 0.1, 0.06, 0.04]);
        let mu = spec([0.62, 0.2, 0.1, 0.08]);
        let v = solve_mixing_system(&lam, &mu);
        if let Some(w) = v.witness {
            assert!(witness_residual(&lam, &mu, &w) <= 1e-9);
        }
    }
}
