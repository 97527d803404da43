mod common;

use common::{arc, close, config_distance, free, two_band};
use fgs::config::{DirichletPoint, SingularityConfig};
use fgs::error::Error;
use fgs::finitegap::{Setting, Sheet, SheetPoint};
use fgs::measure::build_measure;
use fgs::mfunc::{build_f, build_m, build_m_partial_fractions, AlgebraicFunction, AlgebraicHerglotz};
use fgs::oracle::{cauchy_transform, comparison_points, herglotz_scan, standing_corpus};
use fgs::poly::Poly;
use fgs::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

#[test]
fn free_m() {
    let m = build_m(&free(), &SingularityConfig::line(&[], &[])).unwrap();
    assert!((m.p() - &Poly::from_real(&[0.0, -1.0])).norm() < 1e-13);
    assert!((m.a() - &Poly::from_real(&[2.0])).norm() < 1e-13);
    // m = 1/(−z − m) at sample points.
    for z in comparison_points(m.set(), 20, 4) {
        let v = m.eval(SheetPoint::plus(z)).finite().unwrap();
        assert!((v - 1.0 / (-z - v)).norm() < 1e-12 * v.norm());
    }
    let v = m.eval(SheetPoint::plus(c(3.0))).finite().unwrap();
    assert!(close(v.re, (5f64.sqrt() - 3.0) / 2.0, 1e-13));
    let v = m.eval(SheetPoint::minus(c(3.0))).finite().unwrap();
    assert!(close(v.re, (-5f64.sqrt() - 3.0) / 2.0, 1e-13));
    let lp = m.eval_at_infinity(Sheet::Plus, 2);
    assert_eq!(lp.leading_power, -1);
    assert!((lp.coeff(-1) + 1.0).norm() < 1e-12);
    let rep = m.poles().unwrap();
    assert!(rep.config.eigenvalues.is_empty() && rep.config.resonances.is_empty());
    assert!(rep.infinity_minus_pole && !rep.infinity_plus_pole);
    assert!(m.residue_at(SheetPoint::plus(c(3.0))).is_err());
    let eq = m.verify_equal_degree();
    assert!(eq.minimal && eq.deg_a == 0 && eq.s == Some(0), "{eq:?}");
}

#[test]
fn one_eigenvalue_m() {
    let r5 = 5f64.sqrt();
    let m = build_m(&free(), &SingularityConfig::line(&[3.0], &[])).unwrap();
    assert!((m.p() - &Poly::from_real(&[3.0 + r5, -1.0])).norm() < 1e-12);
    assert!((m.a() - &Poly::from_real(&[3.0 * (3.0 + r5), -(3.0 + r5)])).norm() < 1e-12);
    let rep = m.poles().unwrap();
    assert_eq!(rep.config.eigenvalues.len(), 1);
    assert!((rep.config.eigenvalues[0] - c(3.0)).norm() < 1e-12 && rep.config.resonances.is_empty());
    let res = m.residue_at(SheetPoint::plus(c(3.0))).unwrap();
    assert!(close(res.re, -(3.0 * r5 - 5.0) / 2.0, 1e-12));
    assert!(m.eval(SheetPoint::minus(c(3.0))).finite().is_some());
    let eq = m.verify_equal_degree();
    assert!(eq.equal_degree() && eq.deg_m == 1 && eq.s == Some(1), "{eq:?}");
}

#[test]
fn anti_bound_state() {
    let cfg = SingularityConfig::line(&[], &[(c(3.0), 1)]);
    let m = build_m(&free(), &cfg).unwrap();
    let rep = m.poles().unwrap();
    assert!(rep.config.eigenvalues.is_empty());
    assert_eq!(rep.config.resonances.len(), 1);
    assert!((rep.config.resonances[0].point - c(3.0)).norm() < 1e-10);
    assert!(m.eval(SheetPoint::minus(c(3.0))).is_infinite());
    assert!(m.eval(SheetPoint::plus(c(3.0))).finite().is_some());
}

#[test]
fn two_band_minimal_with_dirichlet_pole() {
    let set = two_band();
    let d = [DirichletPoint { gap: 1, pos: 0.0, sheet: Sheet::Minus }];
    let m = build_m(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    assert_eq!(m.a().degree(), 1);
    let rep = m.poles().unwrap();
    assert!(rep.infinity_minus_pole);
    assert!(config_distance(&rep.config, &SingularityConfig::line(&[], &[(c(0.0), 1)])) < 1e-12);
    assert!(herglotz_scan(&m, 200, 5) > 0.0);

    // Sheet + pole: residue negative.
    let d = [DirichletPoint { gap: 1, pos: 0.25, sheet: Sheet::Plus }];
    let m = build_m(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    let res = m.residue_at(SheetPoint::plus(c(0.25))).unwrap();
    assert!(res.re < 0.0 && res.im.abs() < 1e-12, "{res}");
}

#[test]
fn double_pole_pair_is_reported() {
    let set = free();
    let a = Poly::from_real(&[9.0, -6.0, 1.0]);
    let m = AlgebraicHerglotz::new(set, Poly::from_real(&[1.0]), a).unwrap();
    let eq = m.verify_equal_degree();
    assert!(eq.failures.iter().any(|f| f.starts_with("(2a)")), "{eq:?}");
    assert!(matches!(m.poles(), Err(Error::Invariant(_))));
    assert!(m.poles().unwrap_err().to_string().contains("(2a)"));
}

#[test]
fn arc_functions() {
    let set = arc();
    // The arc's gap contains θ = 0; a sheet − pole there.
    let d = [DirichletPoint { gap: 1, pos: 0.0, sheet: Sheet::Minus }];
    let f = build_f(&set, &SingularityConfig::from_dirichlet(&set, &d)).unwrap();
    assert!((f.value_at_zero() - 1.0).norm() < 1e-12);
    assert!(herglotz_scan(&f, 200, 6) > 0.0);
    let eq = f.verify_equal_degree();
    assert!(eq.minimal && eq.deg_m == 1, "{eq:?}");

    let cfg = SingularityConfig::circle(&[0.0], &[]);
    let f = build_f(&set, &cfg).unwrap();
    let mu = build_measure(&set, &cfg).unwrap();
    let res = f.residue_at(SheetPoint::plus(c(1.0))).unwrap();
    assert!((res + 2.0 * mu.masses()[0].w).norm() < 1e-10);

    let odd = SingularityConfig::circle(&[0.0, PI / 4.0], &[]);
    assert!(matches!(build_f(&set, &odd), Err(Error::Inadmissible(_))));
}

#[test]
fn corpus_properties() {
    for (i, e) in standing_corpus(11, 3).into_iter().enumerate() {
        let seed = i as u64;
        let mu = build_measure(&e.set, &e.config).unwrap();
        match e.set.setting() {
            Setting::Line => {
                let m = build_m(&e.set, &e.config).unwrap();
                let pf = build_m_partial_fractions(&e.set, &e.config).unwrap();
                assert!((m.p() - pf.p()).norm() <= 1e-9 * m.p().norm().max(1.0));
                assert!((m.a() - pf.a()).norm() <= 1e-9 * m.a().norm());
                assert!(config_distance(&m.poles().unwrap().config, &e.config) <= 1e-8);
                // A minimal m-function also has its pole at ∞₋: deg m = l + 1.
                let eq = m.verify_equal_degree();
                let degree_ok = if e.s == 0 { eq.minimal && eq.deg_m == eq.deg_a + 1 } else { eq.equal_degree() };
                assert!(degree_ok && eq.s == Some(e.s), "{eq:?}");
                for z in comparison_points(&e.set, 20, seed) {
                    let v = m.eval(SheetPoint::plus(z)).finite().unwrap();
                    let o = cauchy_transform(&mu, z).unwrap();
                    assert!((v - o).norm() <= 1e-6 * o.norm());
                }
            }
            Setting::Circle => {
                let f = build_f(&e.set, &e.config).unwrap();
                assert!((f.value_at_zero() - 1.0).norm() < 1e-10);
                assert!(config_distance(&f.poles().unwrap().config, &e.config) <= 1e-8);
                let eq = f.verify_equal_degree();
                assert!(eq.equal_degree() && eq.s == Some(e.s), "{eq:?}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jump_symmetry_and_positivity(seed in 0u64..1000, x in -4.0f64..4.0, y in -4.0f64..4.0) {
        let z = C::new(x, y);
        for e in standing_corpus(seed, 1) {
            match e.set.setting() {
                Setting::Line => {
                    let m = build_m(&e.set, &e.config).unwrap();
                    let (Some(p), Some(q)) = (m.eval(SheetPoint::plus(z)).finite(), m.eval(SheetPoint::minus(z)).finite()) else { continue };
                    let jump = 2.0 * e.set.sqrt_r(SheetPoint::plus(z)) / m.a().eval(z);
                    prop_assert!(((p - q) - jump).norm() <= 1e-10 * jump.norm());
                    let w = m.eval(SheetPoint::plus(z.conj())).finite().unwrap();
                    prop_assert!((w.conj() - p).norm() <= 1e-10 * p.norm());
                    if y > 0.0 {
                        prop_assert!(p.im > 0.0);
                    }
                }
                Setting::Circle => {
                    let f = build_f(&e.set, &e.config).unwrap();
                    let (Some(p), Some(q)) = (f.eval(SheetPoint::plus(z)).finite(), f.eval(SheetPoint::minus(z)).finite()) else { continue };
                    let jump = 2.0 * f.root_part(SheetPoint::plus(z)) / f.a().eval(z);
                    prop_assert!(((p - q) - jump).norm() <= 1e-10 * jump.norm());
                    if let Some(w) = f.eval(SheetPoint::plus(1.0 / z.conj())).finite() {
                        prop_assert!((w + p.conj()).norm() <= 1e-9 * p.norm());
                    }
                    if z.norm() < 1.0 {
                        prop_assert!(p.re > 0.0);
                    }
                }
            }
        }
    }
}
