use fgs::error::Error;
use fgs::poly::{divide_exact, hermite_solve, roots, sqrt_series_at_infinity, HermiteNode, Poly, DIVIDE_TOL};
use fgs::Complex64 as C;
use proptest::prelude::*;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn sorted(mut r: Vec<(C, usize)>) -> Vec<(C, usize)> {
    r.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    r
}

#[test]
fn roots_of_simple_quadratics() {
    let r = sorted(roots(&Poly::from_real(&[-4.0, 0.0, 1.0])).unwrap().roots);
    assert_eq!(r.len(), 2);
    assert!((r[0].0 - c(-2.0)).norm() < 1e-12 && (r[1].0 - c(2.0)).norm() < 1e-12);
    assert!(r.iter().all(|x| x.1 == 1));

    let r = roots(&Poly::from_real(&[9.0, -6.0, 1.0])).unwrap();
    assert_eq!(r.roots.len(), 1);
    assert_eq!(r.roots[0].1, 2);
    assert!((r.roots[0].0 - c(3.0)).norm() < 1e-10);

    let r = sorted(roots(&Poly::from_real(&[1.0, 0.0, 1.0])).unwrap().roots);
    assert!((r[0].0 - C::new(0.0, -1.0)).norm() < 1e-12 && (r[1].0 - C::new(0.0, 1.0)).norm() < 1e-12);
}

#[test]
fn roots_of_zero_polynomial_fail() {
    assert!(matches!(roots(&Poly::zero()), Err(Error::ZeroPolynomial)));
}

#[test]
fn exact_division_examples() {
    let p = Poly::from_real(&[-4.0, 0.0, 1.0]);
    let q = divide_exact(&p, &Poly::from_real(&[-2.0, 1.0]), DIVIDE_TOL).unwrap();
    assert!((&q - &Poly::from_real(&[2.0, 1.0])).norm() < 1e-14);
    assert!(matches!(divide_exact(&p, &Poly::from_real(&[-1.0, 1.0]), DIVIDE_TOL), Err(Error::Divisibility { .. })));

    // p² − R over a for the one-eigenvalue m-function.
    let r5 = 5f64.sqrt();
    let pp = Poly::from_real(&[3.0 + r5, -1.0]);
    let num = &(&pp * &pp) - &p;
    let a = Poly::from_real(&[3.0 * (3.0 + r5), -(3.0 + r5)]);
    let h = divide_exact(&num, &a, DIVIDE_TOL).unwrap();
    assert!(h.degree() <= 1);
    assert!((&(&h * &a) - &num).norm() < 1e-12 * num.norm());
}

#[test]
fn sqrt_series_examples() {
    let s = sqrt_series_at_infinity(&Poly::from_real(&[-4.0, 0.0, 1.0]), 4).unwrap();
    let want = [1.0, 0.0, -2.0, 0.0, -2.0];
    for (k, w) in want.iter().enumerate() {
        assert!((s[k] - c(*w)).norm() < 1e-14, "{s:?}");
    }
    // Truncation checked against the closed form at z = 10⁶.
    let z = 1e6;
    let approx = z - 2.0 / z - 2.0 / (z * z * z);
    assert!(((z * z - 4.0f64).sqrt() - approx).abs() < 1e-9);

    let s = sqrt_series_at_infinity(&Poly::from_real(&[4.0, 0.0, -5.0, 0.0, 1.0]), 2).unwrap();
    assert!((s[0] - c(1.0)).norm() < 1e-14 && s[1].norm() < 1e-14 && (s[2] - c(-2.5)).norm() < 1e-14);

    let s = sqrt_series_at_infinity(&Poly::from_real(&[-4.0, 0.0, 1.0]), 0).unwrap();
    assert_eq!(s.len(), 1);
    assert!((s[0] - c(1.0)).norm() < 1e-14);

    assert!(matches!(sqrt_series_at_infinity(&Poly::from_real(&[0.0, 0.0, 0.0, 1.0]), 2), Err(Error::Domain(_))));
}

#[test]
fn hermite_examples() {
    let r5 = 5f64.sqrt();
    // p = −z + c₀ with p(3) = √5: one unknown, solved on the basis {1} after
    // moving −z to the target.
    let nodes = [HermiteNode { point: c(3.0), multiplicity: 1, targets: vec![c(r5 + 3.0)] }];
    let s = hermite_solve(&nodes, 0).unwrap();
    assert!((s.poly.coeff(0) - c(3.0 + r5)).norm() < 1e-13);

    let nodes = [
        HermiteNode { point: c(2.0), multiplicity: 1, targets: vec![c(0.0)] },
        HermiteNode { point: c(-2.0), multiplicity: 1, targets: vec![c(0.0)] },
    ];
    assert!(hermite_solve(&nodes, 1).unwrap().poly.norm() < 1e-15);

    // Value and derivative given with multiplicity one.
    let bad = [HermiteNode { point: c(1.0), multiplicity: 1, targets: vec![c(1.0), c(0.0)] }];
    assert!(hermite_solve(&bad, 1).is_err());
    // Two conditions against three unknowns.
    let two = [HermiteNode { point: c(1.0), multiplicity: 2, targets: vec![c(1.0), c(0.0)] }];
    assert!(matches!(hermite_solve(&two, 2), Err(Error::ConditionCount { conditions: 2, unknowns: 3 })));
}

#[test]
fn colliding_nodes_are_named() {
    let nodes = [
        HermiteNode { point: c(1.0), multiplicity: 1, targets: vec![c(0.0)] },
        HermiteNode { point: c(1.0), multiplicity: 1, targets: vec![c(1.0)] },
    ];
    assert!(matches!(hermite_solve(&nodes, 1), Err(Error::SingularSystem { .. })));
}

fn coeffs(max_deg: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..=max_deg + 1)
}

fn cpoint() -> impl Strategy<Value = C> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| C::new(x, y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn division_recovers_the_factor(p in coeffs(8), d in coeffs(8)) {
        let (p, d) = (Poly::from_real(&p), Poly::from_real(&d));
        prop_assume!(p.norm() > 1e-3 && d.leading().norm() > 0.1);
        let q = divide_exact(&(&p * &d), &d, DIVIDE_TOL).unwrap();
        prop_assert!((&q - &p).norm() <= 1e-10 * p.norm().max(1.0), "{:?} vs {:?}", q, p);
    }

    #[test]
    fn roots_reexpand(pts in prop::collection::vec(cpoint(), 1..=12)) {
        // Separated roots keep the clustering out of play.
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[..i] {
                prop_assume!((a - b).norm() > 0.2);
            }
        }
        let p = Poly::from_roots(&pts);
        let rl = roots(&p).unwrap();
        prop_assert_eq!(rl.total_multiplicity(), pts.len());
        let flat: Vec<C> = rl.roots.iter().flat_map(|&(z, m)| std::iter::repeat_n(z, m)).collect();
        let back = Poly::from_roots(&flat);
        prop_assert!((&back - &p).norm() <= 1e-8 * p.norm());
    }

    #[test]
    fn hermite_meets_conditions_in_any_order(
        pts in prop::collection::vec(cpoint(), 2..=4),
        mults in prop::collection::vec(1usize..=2, 4),
        vals in prop::collection::vec(-2.0f64..2.0, 8),
    ) {
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[..i] {
                prop_assume!((a - b).norm() > 0.4);
            }
        }
        let mut k = 0;
        let nodes: Vec<HermiteNode> = pts.iter().zip(&mults).map(|(&point, &m)| {
            let targets = (0..m).map(|_| { k += 1; c(vals[k - 1]) }).collect();
            HermiteNode { point, multiplicity: m, targets }
        }).collect();
        let n: usize = nodes.iter().map(|x| x.multiplicity).sum();
        let s = hermite_solve(&nodes, n - 1).unwrap();
        let scale = s.poly.norm().max(1.0);
        for node in &nodes {
            let t = s.poly.taylor_at(node.point, node.multiplicity - 1);
            for (j, want) in node.targets.iter().enumerate() {
                prop_assert!((t[j] - want).norm() <= 1e-9 * scale);
            }
        }
        let mut rev = nodes.clone();
        rev.reverse();
        let s2 = hermite_solve(&rev, n - 1).unwrap();
        prop_assert!((&s2.poly - &s.poly).norm() <= 1e-10 * scale);
    }

    #[test]
    fn infinity_series_matches_the_root(edges in prop::collection::vec(-1.0f64..1.0, 2..=6), order in 0usize..4) {
        let mut e = edges.clone();
        e.sort_by(f64::total_cmp);
        let e = if e.len() % 2 == 1 { e[..e.len() - 1].to_vec() } else { e };
        let r = Poly::from_roots(&e.iter().map(|&x| c(x)).collect::<Vec<_>>());
        let s = sqrt_series_at_infinity(&r, order).unwrap();
        let m = (e.len() / 2) as i32;
        let z = C::new(1e3, 0.0);
        let exact: C = e.iter().map(|&x| (z - x).sqrt()).product();
        let approx: C = s.iter().enumerate().map(|(k, &a)| a * z.powi(m - k as i32)).sum();
        let rel = (exact - approx).norm() / exact.norm();
        // With edges in [−1, 1] the omitted Laurent coefficients are bounded
        // by those of (1 − 1/z)^{−n/2}.
        let n = e.len();
        let lead = (0..=order).fold(1.0, |acc, j| acc * (n as f64 / 2.0 + j as f64) / (j as f64 + 1.0));
        let bound = 1.01 * lead * 10f64.powi(-3 * (order as i32 + 1));
        prop_assert!(rel <= bound, "order {} rel {} bound {}", order, rel, bound);
    }
}
