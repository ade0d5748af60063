use approx::assert_abs_diff_eq;
use rand::Rng;

use super::*;
use crate::algebra::{c, det2, r, Ket8, Mat2, ThreeQubitPure, ONE, ZERO};
use crate::random::{ghz_class, haar_pure3, trial_rng, w_class};

fn ket(amps: [(usize, f64); 3]) -> ThreeQubitPure {
    let mut v = Ket8::zeros();
    for (i, a) in amps {
        v[i] = r(a);
    }
    ThreeQubitPure::normalized(v).unwrap()
}

fn unit_dets(t: &FilterTriple) {
    for m in t.matrices() {
        assert!((det2(&m) - ONE).norm() < 1e-9);
    }
}

#[test]
fn tangle_reference_values() {
    assert_abs_diff_eq!(three_tangle(&ThreeQubitPure::ghz()), 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(three_tangle(&ThreeQubitPure::w()), 0.0, epsilon = 1e-12);
    let g = ThreeQubitPure::generalized_ghz(0.25).unwrap();
    assert_abs_diff_eq!(three_tangle(&g), 0.75, epsilon = 1e-12);
}

#[test]
fn tangle_scales_with_filter_determinants() {
    let mut rng = trial_rng(11, 0);
    for _ in 0..20 {
        let psi = haar_pure3(&mut rng);
        let m: [Mat2; 3] = std::array::from_fn(|_| Mat2::from_fn(|_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))));
        let image = crate::algebra::apply_local3(psi.amplitudes(), &m[0], &m[1], &m[2]);
        let n2 = image.norm_squared();
        let lhs = three_tangle(&ThreeQubitPure::normalized(image).unwrap()) * n2 * n2;
        let dets: f64 = m.iter().map(|x| det2(x).norm_sqr()).product();
        assert_abs_diff_eq!(lhs, three_tangle(&psi) * dets, epsilon = 1e-8);
    }
}

#[test]
fn classify_examples() {
    assert_eq!(classify3(&ket([(0, 1.0), (0, 1.0), (0, 1.0)])).unwrap(), Slocc3Class::FullProduct);
    // |0⟩ ⊗ (|00⟩ + |11⟩)
    assert_eq!(classify3(&ket([(0, 1.0), (3, 1.0), (3, 1.0)])).unwrap(), Slocc3Class::BiseparableBC);
    // (|00⟩ + |11⟩)_AC ⊗ |0⟩_B
    assert_eq!(classify3(&ket([(0, 1.0), (5, 1.0), (5, 1.0)])).unwrap(), Slocc3Class::BiseparableAC);
    assert_eq!(classify3(&ket([(0, 1.0), (6, 1.0), (6, 1.0)])).unwrap(), Slocc3Class::BiseparableAB);
    assert_eq!(classify3(&ThreeQubitPure::w()).unwrap(), Slocc3Class::Wclass);
    assert_eq!(classify3(&ThreeQubitPure::ghz()).unwrap(), Slocc3Class::GHZclass);
}

#[test]
fn classification_constant_on_orbits() {
    for i in 0..10 {
        let mut rng = trial_rng(5, i);
        assert_eq!(classify3(&ghz_class(&mut rng, 3.0)).unwrap(), Slocc3Class::GHZclass);
        assert_eq!(classify3(&w_class(&mut rng, 3.0)).unwrap(), Slocc3Class::Wclass);
    }
}

#[test]
fn ghz_filters_on_ghz_are_trivial() {
    let t = ghz_filters(&ThreeQubitPure::ghz()).unwrap();
    unit_dets(&t);
    assert_abs_diff_eq!(t.success_probability, 1.0, epsilon = 1e-9);
    for m in t.matrices() {
        // identity up to a phase
        let ph = m[(0, 0)];
        assert!((m - Mat2::identity() * ph).norm() < 1e-9, "{m}");
    }
}

#[test]
fn ghz_filters_reach_ghz() {
    let ghz = *ThreeQubitPure::ghz().amplitudes();
    let mut states = vec![ThreeQubitPure::generalized_ghz(0.25).unwrap()];
    for i in 0..20 {
        states.push(ghz_class(&mut trial_rng(9, i), 4.0));
    }
    for psi in &states {
        let t = ghz_filters(psi).unwrap();
        unit_dets(&t);
        assert!(ray_residual(&t.apply(psi), &ghz) < 1e-7);
        assert!(t.success_probability > 0.0 && t.success_probability <= 1.0 + 1e-12);
    }
    // diagonal filters on the two-term state
    let t = ghz_filters(&states[0]).unwrap();
    for m in t.matrices() {
        assert!(m[(0, 1)].norm() < 1e-9 && m[(1, 0)].norm() < 1e-9);
    }
}

#[test]
fn ghz_filters_reject_w() {
    assert!(matches!(ghz_filters(&ThreeQubitPure::w()), Err(crate::Error::ClassMismatch { .. })));
    assert!(matches!(w_filters(&ThreeQubitPure::ghz()), Err(crate::Error::ClassMismatch { .. })));
}

#[test]
fn ghz_family_preserves_image() {
    let ghz = *ThreeQubitPure::ghz().amplitudes();
    let id = ghz_filters(&ThreeQubitPure::ghz()).unwrap();
    let same = ghz_symmetry_family(&ThreeQubitPure::ghz(), &id, ONE, ONE).unwrap();
    assert_eq!(same.matrices(), id.matrices());
    let t = ghz_symmetry_family(&ThreeQubitPure::ghz(), &id, r(2.0), ONE).unwrap();
    assert!(ray_residual(&t.apply(&ThreeQubitPure::ghz()), &ghz) < 1e-8);
    assert!((t.a.m[(0, 0)] / id.a.m[(0, 0)] - r(2.0)).norm() < 1e-12);
    assert!((t.c.m[(0, 0)] / id.c.m[(0, 0)] - r(0.5)).norm() < 1e-12);
    assert!(t.success_probability < 1.0);

    let psi = ghz_class(&mut trial_rng(2, 0), 3.0);
    let base = ghz_filters(&psi).unwrap();
    let t = ghz_symmetry_family(&psi, &base, c(0.3, 1.1), c(-2.0, 0.4)).unwrap();
    unit_dets(&t);
    assert!(ray_residual(&t.apply(&psi), &ghz) < 1e-8);
    assert!(ghz_symmetry_family(&psi, &base, ZERO, ONE).is_err());
}

#[test]
fn w_filters_reach_w() {
    let w = *ThreeQubitPure::w().amplitudes();
    let t = w_filters(&ThreeQubitPure::w()).unwrap();
    assert_abs_diff_eq!(t.success_probability, 1.0, epsilon = 1e-9);
    for m in t.matrices() {
        assert!((m - Mat2::identity() * m[(0, 0)]).norm() < 1e-9, "{m}");
    }
    let uneven = ket([(4, 0.8), (2, 0.436), (1, 0.412)]);
    let t = w_filters(&uneven).unwrap();
    assert!(ray_residual(&t.apply(&uneven), &w) < 1e-7);
    for m in t.matrices() {
        assert!(m[(0, 1)].norm() < 1e-9 && m[(1, 0)].norm() < 1e-9, "{m}");
    }
    for i in 0..20 {
        let psi = w_class(&mut trial_rng(8, i), 4.0);
        let t = w_filters(&psi).unwrap();
        unit_dets(&t);
        assert!(ray_residual(&t.apply(&psi), &w) < 1e-7);
    }
}

#[test]
fn w_family_preserves_image() {
    let w = *ThreeQubitPure::w().amplitudes();
    let psi = w_class(&mut trial_rng(4, 1), 3.0);
    let base = w_filters(&psi).unwrap();
    let same = w_symmetry_family(&psi, &base, ONE, ZERO, ZERO).unwrap();
    for (x, y) in same.matrices().iter().zip(base.matrices()) {
        assert!((x - y).norm() < 1e-12);
    }
    let t = w_symmetry_family(&psi, &base, c(0.7, 0.2), c(1.0, -1.0), c(0.3, 2.0)).unwrap();
    assert!(ray_residual(&t.apply(&psi), &w) < 1e-8);
    let m = w_family_matrices(ONE, ONE, -ONE);
    assert_eq!(m[2][(0, 1)], ZERO);
    assert!(w_symmetry_family(&psi, &base, ZERO, ONE, ONE).is_err());
}

#[test]
fn povm_feasibility_probes() {
    let m = [Mat2::new(r(2.0), ZERO, ZERO, r(0.5)), Mat2::identity(), Mat2::new(r(0.5), ZERO, ZERO, r(2.0))];
    let q = 1.0 / 4.0; // λmax = 4 · 1 · 4 = 16 and q² = 1/16
    assert!(povm_feasible(&[(q, m)]).unwrap());
    assert!(!povm_feasible(&[(2.0 * q, m)]).unwrap());
    let h = q / 2f64.sqrt();
    assert!(povm_feasible(&[(h, m), (h, m)]).unwrap());
}

#[test]
fn lambda_max_factorizes() {
    let mut rng = trial_rng(1, 1);
    for _ in 0..10 {
        let m: [Mat2; 3] = std::array::from_fn(|_| crate::lorentz::random_filter(&mut rng, 2.0).m);
        let prod: f64 = m.iter().map(|x| crate::algebra::lambda_max2(&(x.adjoint() * x))).product();
        assert_abs_diff_eq!(lambda_max8(&m), prod, epsilon = 1e-10 * prod);
    }
}

#[test]
fn ghz_distillation_on_ghz() {
    let res = optimal_ghz_distillation(&ThreeQubitPure::ghz()).unwrap();
    assert_abs_diff_eq!(res.a_opt, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(res.b_opt, 1.0, epsilon = 1e-9);
    assert_abs_diff_eq!(res.p_opt, 1.0, epsilon = 1e-9);
}

#[test]
fn ghz_distillation_generalized() {
    let psi = ThreeQubitPure::generalized_ghz(0.25).unwrap();
    let res = optimal_ghz_distillation(&psi).unwrap();
    assert_abs_diff_eq!(res.p_opt, 0.5, epsilon = 1e-9);
    assert_abs_diff_eq!(res.p_opt, res.tau.sqrt() / res.lambda_max, epsilon = 1e-12);
    let (p, _, _) = ghz_distillation_oracle(&psi).unwrap();
    assert_abs_diff_eq!(res.p_opt, p, epsilon = 1e-6);
}

#[test]
fn ghz_distillation_matches_oracle() {
    for i in 0..4 {
        let psi = ghz_class(&mut trial_rng(21, i), 3.0);
        let res = optimal_ghz_distillation(&psi).unwrap();
        assert!(res.ratio_residual < 1e-8, "ratio residual {}", res.ratio_residual);
        assert_abs_diff_eq!(res.filters.success_probability, res.p_opt, epsilon = 1e-9);
        let (p, _, _) = ghz_distillation_oracle(&psi).unwrap();
        assert!(res.p_opt >= p - 1e-6 && res.p_opt <= p + 1e-6, "solver {} oracle {p}", res.p_opt);
    }
}

#[test]
fn eigvec_formula() {
    assert_eq!(eigvec_formula_check(&Mat2::identity(), 1.0).unwrap(), 0.0);
    let s3 = 3f64.sqrt();
    let h = Mat2::new(r(2.0), r(s3), r(s3), r(2.0));
    assert!(eigvec_formula_check(&h, 1.0).unwrap() < 1e-9);
    let mut rng = trial_rng(6, 0);
    for _ in 0..50 {
        let x = crate::lorentz::random_filter(&mut rng, 3.0).m;
        let h = x * x.adjoint();
        let scale = rng.random_range(0.5..2.0);
        assert!(eigvec_formula_check(&h, scale).unwrap() < 1e-9);
    }
    assert!(eigvec_formula_check(&Mat2::identity(), 0.0).is_err());
}

#[test]
fn curves_cross_once() {
    let mut rng = trial_rng(13, 0);
    for _ in 0..20 {
        let z0: [f64; 8] = std::array::from_fn(|_| 10f64.powf(rng.random_range(-3.0..3.0)));
        let x = curve_crossings(&z0).unwrap();
        assert_eq!(x.count, 1);
        let (a, b) = x.points[0];
        assert_abs_diff_eq!(curve_a_of_b(&z0, b), a, epsilon = 1e-8 * a);
        assert_abs_diff_eq!(curve_b_of_a(&z0, a), b, epsilon = 1e-6 * b);
    }
}

#[test]
fn w_distillation_dominates_base() {
    let w = optimal_w_distillation(&ThreeQubitPure::w(), 4, 0).unwrap();
    assert_abs_diff_eq!(w.probability, 1.0, epsilon = 1e-7);

    let psi = ket([(4, 0.8), (2, 0.436), (1, 0.412)]);
    let res = optimal_w_distillation(&psi, 20, 1).unwrap();
    assert!(res.probability >= res.base_probability - 1e-12);
    let best = res.restricted.iter().copied().fold(0.0, f64::max);
    assert_abs_diff_eq!(res.probability, best, epsilon = 1e-9);
    assert!(res.probability <= 1.0 + 1e-9);
    let image = res.filters.apply(&psi);
    assert!(ray_residual(&image, ThreeQubitPure::w().amplitudes()) < 1e-7);
}
