mod common;

use common::{arc, close, free, two_band};
use fgs::config::{DirichletPoint, SingularityConfig};
use fgs::finitegap::{Setting, Sheet};
use fgs::measure::build_measure;
use fgs::mfunc::{build_f, build_m, AlgebraicFunction, AlgebraicHerglotz};
use fgs::oracle::{
    comparison_points, continued_fraction_m, jacobi_from_measure, standing_corpus, verblunsky_from_measure,
};
use fgs::poly::Poly;
use fgs::stripping::{
    dress_cmv, dress_jacobi, forward_cmv, forward_jacobi, jacobi_coefficients, recover_cmv, recover_jacobi, strip_cmv,
    strip_jacobi, torus_continuation_cmv, verblunsky_coefficients, JacobiPrefix,
};
use fgs::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

fn same<F: AlgebraicFunction>(x: &F, y: &F, tol: f64) -> bool {
    (x.p() - y.p()).norm() <= tol * y.p().norm().max(1.0) && (x.a() - y.a()).norm() <= tol * y.a().norm()
}

fn free_m() -> AlgebraicHerglotz {
    build_m(&free(), &SingularityConfig::line(&[], &[])).unwrap()
}

#[test]
fn free_m_strips_to_itself() {
    let m = free_m();
    let (a1, b1, m1) = strip_jacobi(&m).unwrap();
    assert!(close(a1, 1.0, 1e-12) && b1.abs() < 1e-12);
    assert!(same(&m1, &m, 1e-12));
    assert!(same(&dress_jacobi(&m, 1.0, 0.0).unwrap(), &m, 1e-12));
}

#[test]
fn one_eigenvalue_strip_and_dress() {
    let r5 = 5f64.sqrt();
    let m = build_m(&free(), &SingularityConfig::line(&[3.0], &[])).unwrap();
    let (a1, b1, m1) = strip_jacobi(&m).unwrap();
    // b₁ as a moment and as 3 + m_free((3)₊).
    assert!(close(b1, (3.0 + r5) / 2.0, 1e-12) && close(b1, 3.0 + (r5 - 3.0) / 2.0, 1e-12));
    assert!(close(a1, 1.0, 1e-12));
    assert!(same(&m1, &free_m(), 1e-10));
    let back = dress_jacobi(&free_m(), 1.0, (3.0 + r5) / 2.0).unwrap();
    assert!(same(&back, &m, 1e-9));
}

#[test]
fn minimal_functions_stay_minimal() {
    let set = two_band();
    for (pos, sheet) in [(0.0, Sheet::Minus), (0.5, Sheet::Plus), (-0.8, Sheet::Minus)] {
        let d = [DirichletPoint { gap: 1, pos, sheet }];
        let mut m = build_m(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
        for _ in 0..6 {
            m = strip_jacobi(&m).unwrap().2;
            let rep = m.verify_equal_degree();
            assert!(rep.minimal && rep.infinity_minus_pole && m.a().degree() == set.l(), "{rep:?}");
        }
    }
}

#[test]
fn arc_minimal_has_geronimus_coefficients() {
    // Constant |α| = 1/√2 opens the gap |θ| < π/2.
    let set = arc();
    for (pos, sheet) in [(0.0f64, Sheet::Minus), (0.3, Sheet::Plus), (-1.0, Sheet::Minus)] {
        let d = [DirichletPoint { gap: 1, pos: pos.rem_euclid(2.0 * PI), sheet }];
        let cfg = SingularityConfig::from_dirichlet(&set, &d);
        let f = build_f(&set, &cfg).unwrap();
        let alpha = verblunsky_coefficients(&f, 6).unwrap();
        for a in &alpha {
            assert!((a - alpha[0]).norm() < 1e-9 && close(a.norm(), FRAC_1_SQRT_2, 1e-9), "{alpha:?}");
        }
        let oracle = verblunsky_from_measure(&build_measure(&set, &cfg).unwrap(), 6).unwrap();
        for (x, y) in alpha.iter().zip(&oracle) {
            assert!((x - y).norm() < 1e-8, "{alpha:?} {oracle:?}");
        }
        let (_, f1) = strip_cmv(&f).unwrap();
        assert!(f1.verify_equal_degree().minimal && f1.a().degree() == set.l());
    }
}

#[test]
fn cmv_degree_bookkeeping() {
    let set = arc();
    let cfg = SingularityConfig::circle(&[0.0], &[(C::new(0.5, 0.0), 1), (C::new(2.0, 0.0), 1)]);
    let f = build_f(&set, &cfg).unwrap();
    assert_eq!((f.s(), f.a().degree()), (1, 3));
    let (_, f1) = strip_cmv(&f).unwrap();
    assert_eq!(f1.a().degree(), 1);
    assert!(f1.verify_equal_degree().minimal);

    let d = [DirichletPoint { gap: 1, pos: 0.2, sheet: Sheet::Plus }];
    let minimal = build_f(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    let torus = torus_continuation_cmv(&minimal).unwrap();
    let g = dress_cmv(&minimal, torus).unwrap();
    assert!(g.a().degree() == 1 && g.verify_equal_degree().minimal);
    let g = dress_cmv(&minimal, torus * 0.5).unwrap();
    assert_eq!((g.s(), g.a().degree()), (1, 3));
    let (al, back) = strip_cmv(&g).unwrap();
    assert!((al - torus * 0.5).norm() < 1e-10);
    assert!(same(&back, &minimal, 1e-9));
}

#[test]
fn continued_fraction_matches_dressing() {
    let set = two_band();
    let d = [DirichletPoint { gap: 1, pos: 0.3, sheet: Sheet::Minus }];
    let tail = build_m(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    let prefix = JacobiPrefix { a: vec![0.7, 1.3, 1.1], b: vec![0.5, -0.2, 1.0], tail: d.to_vec() };
    let m = forward_jacobi(&set, &prefix).unwrap();
    for z in comparison_points(&set, 10, 3) {
        let v = m.eval(fgs::finitegap::SheetPoint::plus(z)).finite().unwrap();
        let o = continued_fraction_m(&prefix, &tail, z).unwrap();
        assert!((v - o).norm() <= 1e-10 * o.norm());
    }
    let rec = recover_jacobi(&m, 8).unwrap();
    assert_eq!(rec.prefix.a.len(), rec.s);
    let (a, b) = jacobi_coefficients(&m, 3).unwrap();
    for k in 0..3 {
        assert!(close(a[k], prefix.a[k], 1e-9) && close(b[k], prefix.b[k], 1e-9), "{a:?} {b:?}");
    }
}

#[test]
fn corpus_recover_forward_round_trip() {
    for e in standing_corpus(21, 2) {
        match e.set.setting() {
            Setting::Line => {
                let m = build_m(&e.set, &e.config).unwrap();
                let rec = recover_jacobi(&m, 8).unwrap();
                assert_eq!(rec.s, e.s);
                let back = forward_jacobi(&e.set, &rec.prefix).unwrap();
                assert!(same(&back, &m, 1e-8));
                let (a, b) = jacobi_coefficients(&m, 8).unwrap();
                let (oa, ob) = jacobi_from_measure(&build_measure(&e.set, &e.config).unwrap(), 8).unwrap();
                for k in 0..8 {
                    assert!((a[k] - oa[k]).abs() < 1e-6 && (b[k] - ob[k]).abs() < 1e-6);
                }
            }
            Setting::Circle => {
                let f = build_f(&e.set, &e.config).unwrap();
                let rec = recover_cmv(&f, 8).unwrap();
                assert_eq!(rec.s, e.s);
                let back = forward_cmv(&e.set, &rec.prefix).unwrap();
                assert!(same(&back, &f, 1e-8));
            }
        }
    }
}

#[test]
fn dressing_rejects_bad_coefficients() {
    assert!(dress_jacobi(&free_m(), 0.0, 0.0).is_err());
    assert!(dress_jacobi(&free_m(), 1.0, f64::NAN).is_err());
    let set = arc();
    let d = [DirichletPoint { gap: 1, pos: 0.0, sheet: Sheet::Minus }];
    let f = build_f(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    assert!(dress_cmv(&f, C::new(1.0, 0.0)).is_err());
    let bad = AlgebraicHerglotz::new(free(), Poly::from_real(&[0.0, 1.0]), Poly::from_real(&[2.0])).unwrap();
    assert!(strip_jacobi(&bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn dress_then_strip_is_identity(pos in -0.95f64..0.95, plus in any::<bool>(), a1 in 0.3f64..2.0, b1 in -2.0f64..2.0, depth in 1usize..3) {
        let set = two_band();
        let sheet = if plus { Sheet::Plus } else { Sheet::Minus };
        let d = [DirichletPoint { gap: 1, pos, sheet }];
        let mut m1 = build_m(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
        for k in 1..depth {
            m1 = dress_jacobi(&m1, 1.0 + 0.1 * k as f64, -0.3 * k as f64).unwrap();
        }
        let m = dress_jacobi(&m1, a1, b1).unwrap();
        let (sa, sb, back) = strip_jacobi(&m).unwrap();
        prop_assert!((sa - a1).abs() <= 1e-9 * a1.max(1.0) && (sb - b1).abs() <= 1e-9 * b1.abs().max(1.0), "({}, {}) vs ({}, {})", sa, sb, a1, b1);
        prop_assert!(same(&back, &m1, 1e-9));
    }

    #[test]
    fn cmv_dress_then_strip_is_identity(pos in -1.4f64..1.4, plus in any::<bool>(), r in 0.0f64..0.9, t in 0.0f64..TAU) {
        let set = arc();
        let sheet = if plus { Sheet::Plus } else { Sheet::Minus };
        let d = [DirichletPoint { gap: 1, pos: pos.rem_euclid(2.0 * PI), sheet }];
        let f1 = build_f(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
        let alpha = C::from_polar(r, t);
        let f = dress_cmv(&f1, alpha).unwrap();
        let (al, back) = strip_cmv(&f).unwrap();
        prop_assert!((al - alpha).norm() <= 1e-9);
        prop_assert!(same(&back, &f1, 1e-9));
    }
}
