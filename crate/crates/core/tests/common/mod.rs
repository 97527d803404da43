#![allow(dead_code)]

use fgs::config::SingularityConfig;
use fgs::finitegap::FiniteGapSet;
use fgs::Complex64 as C;
use std::f64::consts::PI;

pub fn free() -> FiniteGapSet {
    FiniteGapSet::line(&[(-2.0, 2.0)]).unwrap()
}

pub fn two_band() -> FiniteGapSet {
    FiniteGapSet::line(&[(-2.0, -1.0), (1.0, 2.0)]).unwrap()
}

pub fn arc() -> FiniteGapSet {
    FiniteGapSet::circle(&[PI / 2.0, 3.0 * PI / 2.0]).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// Largest distance in a one-to-one pairing of two configurations that
/// keeps eigenvalues with eigenvalues and resonances with resonances of the
/// same multiplicity; infinite when no such pairing exists.
pub fn config_distance(a: &SingularityConfig, b: &SingularityConfig) -> f64 {
    let (a, b) = (a.normalized(), b.normalized());
    let ea: Vec<(C, usize)> = a.eigenvalues.iter().map(|&z| (z, 0)).collect();
    let eb: Vec<(C, usize)> = b.eigenvalues.iter().map(|&z| (z, 0)).collect();
    let ra: Vec<(C, usize)> = a.resonances.iter().map(|r| (r.point, r.mult)).collect();
    let rb: Vec<(C, usize)> = b.resonances.iter().map(|r| (r.point, r.mult)).collect();
    pairing(&ea, &eb).max(pairing(&ra, &rb))
}

fn pairing(a: &[(C, usize)], b: &[(C, usize)]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for &(z, m) in a {
        let best = b
            .iter()
            .enumerate()
            .filter(|&(j, w)| !used[j] && w.1 == m)
            .map(|(j, w)| (j, (z - w.0).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}
