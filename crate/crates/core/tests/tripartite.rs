use nalgebra::Matrix2;
use slocc::algebra::{apply_local3, Mat2, ThreeQubitPure, C64};
use slocc::random::{ghz_class, haar_unitary2, random_contraction, trial_rng, w_class};
use slocc::tripartite::*;

fn sqrt_complement(a: &Mat2) -> Mat2 {
    // √(I − A†A) through the eigendecomposition of the Hermitian complement
    let e = (Matrix2::identity() - a.adjoint() * a).symmetric_eigen();
    let d = Mat2::from_diagonal(&e.eigenvalues.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)));
    e.eigenvectors * d * e.eigenvectors.adjoint()
}

fn on_party(psi: &ThreeQubitPure, m: &Mat2, party: usize) -> nalgebra::SVector<C64, 8> {
    let id = Mat2::identity();
    let ops = [if party == 0 { m } else { &id }, if party == 1 { m } else { &id }, if party == 2 { m } else { &id }];
    apply_local3(psi.amplitudes(), ops[0], ops[1], ops[2])
}

#[test]
fn ghz_probability_does_not_increase_under_local_povms() {
    for i in 0..40u64 {
        let mut rng = trial_rng(77, i);
        let psi = ghz_class(&mut rng, 2.0);
        let before = optimal_ghz_distillation(&psi).unwrap().p_opt;
        let a = random_contraction(&mut rng) * haar_unitary2(&mut rng);
        let party = (i % 3) as usize;
        let mut expected = 0.0;
        for m in [a, sqrt_complement(&a)] {
            let v = on_party(&psi, &m, party);
            let p = v.norm_squared();
            if p < 1e-12 {
                continue;
            }
            let branch = ThreeQubitPure::normalized(v).unwrap();
            if classify3(&branch).unwrap() == Slocc3Class::GHZclass {
                expected += p * optimal_ghz_distillation(&branch).unwrap().p_opt;
            }
        }
        assert!(expected <= before + 1e-7, "trial {i}: {expected} > {before}");
    }
}

#[test]
fn ghz_solver_agrees_with_oracle() {
    for i in 0..6u64 {
        let psi = ghz_class(&mut trial_rng(31, i), 3.0);
        let res = optimal_ghz_distillation(&psi).unwrap();
        let (p, _, _) = ghz_distillation_oracle(&psi).unwrap();
        assert!((res.p_opt - p).abs() <= 1e-6, "solver {} oracle {p}", res.p_opt);
        assert!(res.ratio_residual <= 1e-8);
        assert!((res.p_opt - res.tau.sqrt() / res.lambda_max).abs() <= 1e-9);
    }
}

#[test]
fn single_branch_povm_is_feasible() {
    let psi = ghz_class(&mut trial_rng(3, 3), 2.0);
    let res = optimal_ghz_distillation(&psi).unwrap();
    let q = (1.0 / res.lambda_max).sqrt();
    let m = res.filters.matrices();
    assert!(povm_feasible(&[(q, m)]).unwrap());
    assert!(!povm_feasible(&[(2.0 * q, m)]).unwrap());
}

#[test]
fn orbit_classes_are_stable() {
    for i in 0..30u64 {
        let mut rng = trial_rng(90, i);
        assert_eq!(classify3(&ghz_class(&mut rng, 3.0)).unwrap(), Slocc3Class::GHZclass);
        assert_eq!(classify3(&w_class(&mut rng, 3.0)).unwrap(), Slocc3Class::Wclass);
    }
}

#[test]
fn w_restricted_optima_are_reported() {
    let psi = w_class(&mut trial_rng(12, 0), 2.0);
    let res = optimal_w_distillation(&psi, 20, 5).unwrap();
    let best = res.restricted.iter().copied().fold(0.0, f64::max);
    assert!((res.probability - best).abs() <= 1e-9);
    assert!(res.probability >= res.base_probability - 1e-12);
    assert!(res.restricted.iter().all(|&p| p > 0.0 && p <= 1.0 + 1e-9));
}
