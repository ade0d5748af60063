//! Fixed-point filtering: alternately whiten each party's marginal with a
//! determinant-one filter until both are proportional to the identity.
//!
//! This is an independent route to the diagonal normal form. States whose
//! normal form is not diagonal never converge, since reaching it would take
//! an infinite boost.

use nalgebra::Matrix3;

use crate::algebra::{apply_local2, det2, hermitian_fn, marginal_of, r, DensityMatrix2Q, Filter2, Mat2, Mat4};
use crate::error::{Error, Result};
use crate::lorentz::r_of;

#[derive(Debug, Clone)]
pub struct FilteringOutcome {
    /// The filtered state, renormalized to unit trace.
    pub normal: DensityMatrix2Q,
    /// Accumulated determinant-one filters `(A, B)`.
    pub filters: (Filter2, Filter2),
    pub converged: bool,
    pub iterations: usize,
    /// Trace of the unnormalized filtered operator; the Lorentz singular
    /// values of the input are this scale times those of `normal`.
    pub scale: f64,
}

impl FilteringOutcome {
    /// Lorentz singular values read off the filtered state:
    /// `scale · (1, σ1, σ2, ±σ3)` with `σ` the singular values of its spatial
    /// correlation block and the sign of the last one taken from its determinant.
    pub fn spectrum(&self) -> Result<[f64; 4]> {
        let rm = r_of(self.normal.matrix())?;
        let t = Matrix3::from_fn(|i, j| rm[(i + 1, j + 1)]);
        let mut sv: Vec<f64> = t.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        let sign = if t.determinant() < 0.0 { -1.0 } else { 1.0 };
        let k = self.scale * rm[(0, 0)];
        Ok([k, k * sv[0], k * sv[1], sign * k * sv[2]])
    }
}

fn whitening(marginal: &Mat2) -> Result<Mat2> {
    let det = det2(marginal).re;
    let trace = (marginal[(0, 0)] + marginal[(1, 1)]).re;
    if det <= 1e-14 * trace * trace {
        return Err(Error::SingularMarginal);
    }
    Ok(hermitian_fn(marginal, |x| 1.0 / x.sqrt())? * r(det.powf(0.25)))
}

fn marginal_defect(m: &Mat4, party: usize) -> Result<f64> {
    let mg = marginal_of(m, party)?;
    let half = (mg[(0, 0)] + mg[(1, 1)]) * 0.5;
    let diff = mg - Mat2::identity() * half;
    Ok(diff.iter().fold(0.0f64, |acc, z| acc.max(z.norm())))
}

/// Runs at most `max_iter` rounds of A-side then B-side whitening.
///
/// Converged means both marginals of the normalized state are `I/2` within
/// `tol`. A marginal with a zero eigenvalue cannot be whitened and returns
/// [`Error::SingularMarginal`]: the state has a product-projector structure.
pub fn filtering_normal_form_oracle(rho: &DensityMatrix2Q, max_iter: usize, tol: f64) -> Result<FilteringOutcome> {
    if max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
    }
    let mut m = *rho.matrix();
    let mut acc_a = Mat2::identity();
    let mut acc_b = Mat2::identity();
    let mut scale = 1.0;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=max_iter {
        iterations = it;
        if marginal_defect(&m, 0)? <= tol && marginal_defect(&m, 1)? <= tol {
            converged = true;
            break;
        }
        let a = whitening(&marginal_of(&m, 0)?)?;
        m = apply_local2(&m, &a, &Mat2::identity());
        acc_a = a * acc_a;
        let b = whitening(&marginal_of(&m, 1)?)?;
        m = apply_local2(&m, &Mat2::identity(), &b);
        acc_b = b * acc_b;

        let t = m.trace().re;
        scale *= t;
        m /= r(t);
        m = (m + m.adjoint()) * r(0.5);
    }

    Ok(FilteringOutcome {
        normal: DensityMatrix2Q::from_unnormalized(m)?,
        filters: (
            Filter2 { m: acc_a, det_normalized: true },
            Filter2 { m: acc_b, det_normalized: true },
        ),
        converged,
        iterations,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bell, max_abs};
    use crate::lsvd::lsvd_of;
    use crate::random::{bell_diagonal, trial_rng, wishart_state};
    use approx::assert_abs_diff_eq;

    #[test]
    fn bell_diagonal_converges_immediately() {
        let rho = bell_diagonal([0.5, 0.2, 0.2, 0.1]).unwrap();
        let out = filtering_normal_form_oracle(&rho, 10, 1e-12).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.filters.0.m, Mat2::identity());
        assert_eq!(out.filters.1.m, Mat2::identity());
    }

    #[test]
    fn agrees_with_lsvd_on_random_states() {
        for i in 0..20 {
            let rho = wishart_state(&mut trial_rng(3, i));
            let out = filtering_normal_form_oracle(&rho, 2000, 1e-12).unwrap();
            assert!(out.converged);
            let s = out.spectrum().unwrap();
            let want = lsvd_of(&rho).unwrap().s;
            for k in 0..4 {
                assert_abs_diff_eq!(s[k], want[k], epsilon = 1e-6);
            }
            // the accumulated filters reproduce the normal form
            let rebuilt = apply_local2(rho.matrix(), &out.filters.0.m, &out.filters.1.m) / r(out.scale);
            assert!(max_abs(&(rebuilt - out.normal.matrix())) < 1e-9);
        }
    }

    #[test]
    fn quasi_distillable_never_converges() {
        let p = bell::psi_plus();
        let mut m = p * p.adjoint() * r(0.5);
        m[(0, 0)] += r(0.5);
        let rho = DensityMatrix2Q::new(m).unwrap();
        let out = filtering_normal_form_oracle(&rho, 500, 1e-12).unwrap();
        assert!(!out.converged);
    }

    #[test]
    fn product_projector_is_singular() {
        let mut m = Mat4::zeros();
        m[(0, 0)] = r(0.5);
        m[(2, 2)] = r(0.5);
        let rho = DensityMatrix2Q::new(m).unwrap();
        assert_eq!(filtering_normal_form_oracle(&rho, 10, 1e-12).unwrap_err(), Error::SingularMarginal);
    }
}
