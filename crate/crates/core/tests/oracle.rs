use fgs::config::SingularityConfig;
use fgs::finitegap::FiniteGapSet;
use fgs::measure::build_measure;
use fgs::mfunc::build_f;
use fgs::oracle::{
    jacobi_by_discretization, jacobi_from_measure, jacobi_from_moments, verblunsky_from_measure,
    verblunsky_from_moments,
};
use fgs::stripping::{strip_cmv_with, AlphaConvention, ALPHA_CONVENTION};
use fgs::Complex64 as C;

#[test]
fn semicircle_moments_give_the_free_coefficients() {
    // Catalan numbers at even orders.
    let m = [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0, 0.0, 14.0, 0.0, 42.0];
    let (a, b) = jacobi_from_moments(&m, 5).unwrap();
    for k in 0..5 {
        assert!((a[k] - 1.0).abs() < 1e-12 && b[k].abs() < 1e-12, "{a:?} {b:?}");
    }
}

#[test]
fn lebesgue_moments_give_zero_verblunsky() {
    let c: Vec<C> = (0..6).map(|k| C::new(if k == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
    let al = verblunsky_from_moments(&c, 5).unwrap();
    assert!(al.iter().all(|a| a.norm() < 1e-15));
}

#[test]
fn two_jacobi_oracles_agree() {
    let set = FiniteGapSet::line(&[(-2.0, -1.0), (1.0, 2.0)]).unwrap();
    let cfg = SingularityConfig::line(&[0.3, 2.6], &[]);
    let mu = build_measure(&set, &cfg).unwrap();
    let (a, b) = jacobi_from_measure(&mu, 8).unwrap();
    let (a2, b2) = jacobi_by_discretization(&mu, 8, 400).unwrap();
    for k in 0..8 {
        assert!((a[k] - a2[k]).abs() < 1e-9 && (b[k] - b2[k]).abs() < 1e-9);
    }
}

#[test]
fn alpha_convention_is_pinned_by_the_szego_recursion() {
    // A set without reflection symmetry, so the two conventions differ.
    let set = FiniteGapSet::circle(&[0.4, 1.9, 2.7, 5.3]).unwrap();
    let cfg = SingularityConfig::circle(&[0.1], &[(C::from_polar(1.0, 2.3), 1)]);
    let f = build_f(&set, &cfg).unwrap();
    let oracle = verblunsky_from_measure(&build_measure(&set, &cfg).unwrap(), 1).unwrap()[0];
    let (id, _) = strip_cmv_with(&f, AlphaConvention::Identity).unwrap();
    let (cj, _) = strip_cmv_with(&f, AlphaConvention::Conjugate).unwrap();
    assert!(oracle.im.abs() > 1e-3, "{oracle}");
    assert!((id - oracle).norm() < 1e-9 && (cj - oracle).norm() > 1e-3);
    assert_eq!(ALPHA_CONVENTION, AlphaConvention::Identity);
}
