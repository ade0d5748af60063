//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use nalgebra::{SMatrix, SVector};

use crate::algebra::{hermiticity_defect, C64};
use crate::error::{Error, Result};
use crate::tol;

/// Eigen-decomposition of a Hermitian matrix: `values` descending, eigenvectors
/// in the matching columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<const N: usize> {
    pub values: SVector<f64, N>,
    pub vectors: SMatrix<C64, N, N>,
}

const MAX_SWEEPS: usize = 100;

pub fn eig_hermitian<const N: usize>(m: &SMatrix<C64, N, N>) -> Result<HermitianEigen<N>> {
    let scale = m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if !scale.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = hermiticity_defect(m);
    if defect > tol::EIG_HERMITIAN * scale.max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let mut a = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut v = SMatrix::<C64, N, N>::identity();
    if scale == 0.0 {
        return Ok(HermitianEigen { values: SVector::zeros(), vectors: v });
    }

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..N)
            .flat_map(|p| (p + 1..N).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let mut values = SVector::<f64, N>::zeros();
    let mut vectors = SMatrix::<C64, N, N>::zeros();
    for (k, &src) in order.iter().enumerate() {
        values[k] = a[(src, src)].re;
        vectors.set_column(k, &v.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate<const N: usize>(
    a: &mut SMatrix<C64, N, N>,
    v: &mut SMatrix<C64, N, N>,
    p: usize,
    q: usize,
) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let u00 = C64::new(cs, 0.0);
    let u01 = C64::new(sn, 0.0);
    let u10 = -phase.conj() * sn;
    let u11 = phase.conj() * cs;

    for k in 0..N {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u00 + akq * u10;
        a[(k, q)] = akp * u01 + akq * u11;
    }
    for k in 0..N {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u00.conj() * apk + u10.conj() * aqk;
        a[(q, k)] = u01.conj() * apk + u11.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    for k in 0..N {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Same solver for real symmetric input, returning real eigenvectors.
pub fn eig_symmetric<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<(SVector<f64, N>, SMatrix<f64, N, N>)> {
    let e = eig_hermitian(&m.map(|x| C64::new(x, 0.0)))?;
    // For real symmetric input the rotation phases are ±1, so vectors stay real.
    Ok((e.values, e.vectors.map(|z| z.re)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{r, Mat2, Mat4, ONE, ZERO};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn diagonal_input() {
        let m = Mat2::new(r(1.0), ZERO, ZERO, r(3.0));
        let e = eig_hermitian(&m).unwrap();
        assert_eq!(e.values[0], 3.0);
        assert_eq!(e.values[1], 1.0);
        assert_abs_diff_eq!(e.vectors[(1, 0)].norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn sigma_x() {
        let m = Mat2::new(ZERO, ONE, ONE, ZERO);
        let e = eig_hermitian(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], -1.0, epsilon = 1e-15);
        let v = e.vectors.column(0);
        assert_abs_diff_eq!((v[0] - v[1]).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Mat2::new(ZERO, ONE, ZERO, ZERO);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn agrees_with_nalgebra() {
        let mut m = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = C64::new((i * 7 + j * 3) as f64 % 5.0 - 2.0, (i as f64 - j as f64) * 0.3);
            }
        }
        let h = m + m.adjoint();
        let ours = eig_hermitian(&h).unwrap();
        let mut theirs: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for k in 0..4 {
            assert_abs_diff_eq!(ours.values[k], theirs[k], epsilon = 1e-12);
        }
    }

    fn hermitian_strategy() -> impl Strategy<Value = Mat4> {
        prop::collection::vec(-1.0f64..1.0, 32).prop_map(|xs| {
            let m = Mat4::from_fn(|i, j| C64::new(xs[4 * i + j], xs[16 + 4 * i + j]));
            m + m.adjoint()
        })
    }

    proptest! {
        #[test]
        fn reconstruction_and_orthonormality(h in hermitian_strategy()) {
            let e = eig_hermitian(&h).unwrap();
            let mut rebuilt = Mat4::zeros();
            for k in 0..4 {
                let v = e.vectors.column(k);
                rebuilt += v * v.adjoint() * r(e.values[k]);
                let resid = (h * v - v * r(e.values[k])).norm();
                prop_assert!(resid <= 1e-9);
            }
            prop_assert!((rebuilt - h).norm() <= 1e-9);
            let gram = e.vectors.adjoint() * e.vectors;
            prop_assert!((gram - Mat4::identity()).norm() <= 1e-12);
            for k in 0..3 {
                prop_assert!(e.values[k] >= e.values[k + 1]);
            }
        }
    }
}
