//! Brute-force cross-checks: transforms of a measure by quadrature,
//! recurrence coefficients from moments, continued fractions and positivity
//! scans.

use crate::config::{validate, Resonance, SingularityConfig};
use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, SheetPoint};
use crate::measure::{build_measure, SpectralMeasure};
use crate::mfunc::{build_f, build_m, AlgebraicFunction, AlgebraicHerglotz};
use crate::stripping::{jacobi_coefficients, verblunsky_coefficients, JacobiPrefix};
use num_complex::Complex64 as C;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Agreement expected between a primary value and its oracle.
pub const ORACLE_TOL: f64 = 1e-6;
/// Transforms refuse points closer than this to the support.
pub const SUPPORT_MARGIN: f64 = 1e-6;

/// One primary/oracle comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub quantity: String,
    pub primary: C,
    pub oracle: C,
    pub abs: f64,
    pub rel: f64,
}

impl OracleReport {
    pub fn new(quantity: impl Into<String>, primary: C, oracle: C) -> Self {
        let abs = (primary - oracle).norm();
        let rel = abs / oracle.norm().max(f64::MIN_POSITIVE);
        OracleReport { quantity: quantity.into(), primary, oracle, abs, rel }
    }

    /// Relative agreement, falling back to absolute near zero.
    pub fn passes(&self, tol: f64) -> bool {
        self.abs <= tol * self.oracle.norm().max(1.0)
    }
}

fn support_distance(measure: &SpectralMeasure, z: C) -> f64 {
    let set = measure.set();
    let bands = set.bands().into_iter().map(|(lo, hi)| match set.setting() {
        Setting::Line => {
            let x = z.re.clamp(lo, hi);
            (z - C::new(x, 0.0)).norm()
        }
        Setting::Circle => {
            let t = z.arg().rem_euclid(TAU);
            let t = if t < lo { t + TAU } else { t };
            let t = if t > hi {
                if t - hi < lo + TAU - t {
                    hi
                } else {
                    lo
                }
            } else {
                t
            };
            (z - C::from_polar(1.0, t)).norm()
        }
    });
    let masses = measure.masses().iter().map(|m| (z - set.point(m.at)).norm());
    bands.chain(masses).fold(f64::INFINITY, f64::min)
}

/// `∫ dμ(x)/(x - z)`.
pub fn cauchy_transform(measure: &SpectralMeasure, z: C) -> Result<C> {
    if measure.set().setting() != Setting::Line {
        return Err(Error::Domain("the Cauchy transform needs a line measure".into()));
    }
    let dist = support_distance(measure, z);
    if dist <= SUPPORT_MARGIN {
        return Err(Error::Accuracy { estimate: format!("z = {z}"), discrepancy: dist });
    }
    measure.integrate(|x| 1.0 / (C::new(x, 0.0) - z))
}

/// `∫ (e^{iθ}+z)/(e^{iθ}-z) dμ(θ)`.
pub fn caratheodory_transform(measure: &SpectralMeasure, z: C) -> Result<C> {
    if measure.set().setting() != Setting::Circle {
        return Err(Error::Domain("the Carathéodory transform needs a circle measure".into()));
    }
    let dist = support_distance(measure, z);
    if dist <= SUPPORT_MARGIN {
        return Err(Error::Accuracy { estimate: format!("z = {z}"), discrepancy: dist });
    }
    measure.integrate(|t| {
        let e = C::from_polar(1.0, t);
        (e + z) / (e - z)
    })
}

/// `(a₁..a_n, b₁..b_n)` from moments `μ_0..μ_{2n}` by Cholesky
/// factorization of the Hankel matrix.
pub fn jacobi_from_moments(moments: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if moments.len() < 2 * n + 1 {
        return Err(Error::Domain(format!("{n} coefficients need {} moments", 2 * n + 1)));
    }
    let m = n + 1;
    // Upper factor r with H = rᵀr.
    let mut r = vec![vec![0.0; m]; m];
    for i in 0..m {
        let d = moments[2 * i] - (0..i).map(|k| r[k][i] * r[k][i]).sum::<f64>();
        if !(d > 0.0) {
            return Err(Error::Breakdown { stable: i.saturating_sub(1) });
        }
        r[i][i] = d.sqrt();
        for j in i + 1..m {
            let v = moments[i + j] - (0..i).map(|k| r[k][i] * r[k][j]).sum::<f64>();
            r[i][j] = v / r[i][i];
        }
    }
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for k in 0..n {
        let prev = if k == 0 { 0.0 } else { r[k - 1][k] / r[k - 1][k - 1] };
        b.push(r[k][k + 1] / r[k][k] - prev);
        a.push(r[k + 1][k + 1] / r[k][k]);
    }
    Ok((a, b))
}

/// Jacobi coefficients from modified moments `ν_k = ∫ p_k dμ` against
/// monic polynomials with recurrence `p_{k+1} = (x - c_k)p_k - d_k p_{k-1}`
/// (modified Chebyshev algorithm). Needs `ν_0..ν_{2n+1}` and `c, d` to the
/// same length.
pub fn jacobi_from_modified_moments(nu: &[f64], c: &[f64], d: &[f64], n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let len = 2 * n + 2;
    if nu.len() < len || c.len() < len || d.len() < len {
        return Err(Error::Domain(format!("{n} coefficients need {len} modified moments")));
    }
    if !(nu[0] > 0.0) {
        return Err(Error::Breakdown { stable: 0 });
    }
    let mut alpha = vec![c[0] + nu[1] / nu[0]];
    let mut beta = vec![nu[0]];
    let mut prev2 = vec![0.0; len];
    let mut prev = nu[..len].to_vec();
    for k in 1..=n {
        let mut cur = vec![0.0; len];
        for l in k..len - k {
            cur[l] = prev[l + 1] - (alpha[k - 1] - c[l]) * prev[l] - beta[k - 1] * prev2[l] + d[l] * prev[l - 1];
        }
        if !(cur[k] > 0.0) {
            return Err(Error::Breakdown { stable: k - 1 });
        }
        alpha.push(c[k] + cur[k + 1] / cur[k] - prev[k] / prev[k - 1]);
        beta.push(cur[k] / prev[k - 1]);
        prev2 = prev;
        prev = cur;
    }
    Ok(((1..=n).map(|k| beta[k].sqrt()).collect(), alpha[..n].to_vec()))
}

/// Jacobi coefficients of a line measure: Gram–Schmidt (Stieltjes
/// procedure) in the `L²` space of a discretization of the measure, run at
/// two resolutions that must agree.
pub fn jacobi_from_measure(measure: &SpectralMeasure, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a1, b1) = jacobi_by_discretization(measure, n, 2049)?;
    let (a2, b2) = jacobi_by_discretization(measure, n, 4097)?;
    let gap = a1.iter().zip(&a2).chain(b1.iter().zip(&b2)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if gap > 1e-9 {
        return Err(Error::Accuracy { estimate: format!("{b2:?}"), discrepancy: gap });
    }
    Ok((a2, b2))
}

/// Stieltjes procedure on `nodes` Gauss points per band plus the point masses.
pub fn jacobi_by_discretization(measure: &SpectralMeasure, n: usize, nodes: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if measure.set().setting() != Setting::Line {
        return Err(Error::Domain("Jacobi coefficients need a line measure".into()));
    }
    let pts = measure.discretize(nodes);
    let mut prev = vec![0.0; pts.len()];
    let norm0: f64 = pts.iter().map(|p| p.1).sum();
    let mut cur: Vec<f64> = vec![1.0 / norm0.sqrt(); pts.len()];
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut a_prev = 0.0;
    for k in 0..n {
        let bk: f64 = pts.iter().zip(&cur).map(|(p, q)| p.1 * p.0 * q * q).sum();
        let mut next: Vec<f64> =
            pts.iter().zip(cur.iter().zip(&prev)).map(|(p, (q, r))| (p.0 - bk) * q - a_prev * r).collect();
        let nn: f64 = pts.iter().zip(&next).map(|(p, q)| p.1 * q * q).sum::<f64>().sqrt();
        if !(nn > 0.0) {
            return Err(Error::Breakdown { stable: k });
        }
        next.iter_mut().for_each(|q| *q /= nn);
        b.push(bk);
        a.push(nn);
        a_prev = nn;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok((a, b))
}

/// `(α₀..α_{n-1})` from trigonometric moments `c_k = ∫e^{-ikθ}dμ`,
/// `k = 0..n`, by the Szegő recursion `Φ_{k+1} = zΦ_k - ᾱ_k Φ_k*`.
pub fn verblunsky_from_moments(c: &[C], n: usize) -> Result<Vec<C>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if c.len() < n + 1 {
        return Err(Error::Domain(format!("{n} coefficients need {} moments", n + 1)));
    }
    let mut phi = vec![C::new(1.0, 0.0)];
    let mut norm = c[0].re;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if !(norm > 0.0) {
            return Err(Error::Breakdown { stable: k.saturating_sub(1) });
        }
        let s: C = phi.iter().enumerate().map(|(j, p)| p * c[j + 1].conj()).sum();
        let alpha = (s / norm).conj();
        if !(alpha.norm() < 1.0) {
            return Err(Error::Breakdown { stable: k.saturating_sub(1) });
        }
        let mut next = vec![C::new(0.0, 0.0); k + 2];
        for (j, p) in phi.iter().enumerate() {
            next[j + 1] += p;
            // Φ_k*(z) = Σ conj(φ_j) z^{k-j}
            next[k - j] -= alpha.conj() * p.conj();
        }
        phi = next;
        norm *= 1.0 - alpha.norm_sqr();
        out.push(alpha);
    }
    Ok(out)
}

pub fn verblunsky_from_measure(measure: &SpectralMeasure, n: usize) -> Result<Vec<C>> {
    if measure.set().setting() != Setting::Circle {
        return Err(Error::Domain("Verblunsky coefficients need a circle measure".into()));
    }
    verblunsky_from_moments(&measure.moments(n)?, n)
}

/// `m(z)` from a coefficient prefix over a tail m-function, by the backward
/// recurrence `m = 1/(b - z - a² m_next)`.
pub fn continued_fraction_m(prefix: &JacobiPrefix, tail: &AlgebraicHerglotz, z: C) -> Result<C> {
    if z.im == 0.0 {
        return Err(Error::Domain(format!("{z} is on the real axis")));
    }
    let mut m =
        tail.eval(SheetPoint::plus(z)).finite().ok_or_else(|| Error::Domain(format!("tail has a pole at {z}")))?;
    for (&a, &b) in prefix.a.iter().zip(&prefix.b).rev() {
        m = 1.0 / (b - z - a * a * m);
    }
    Ok(m)
}

/// Sample points in `ℂ₊` (line) or `𝔻` (circle).
pub fn sample_points<F: AlgebraicFunction + ?Sized>(f: &F, count: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let set = f.set();
    match set.setting() {
        Setting::Line => {
            let (lo, hi) = set.hull();
            (0..count)
                .map(|_| {
                    let x = rng.random_range(lo - 3.0..hi + 3.0);
                    let y = 10f64.powf(rng.random_range(-3.0..1.0));
                    C::new(x, y)
                })
                .collect()
        }
        Setting::Circle => (0..count)
            .map(|_| {
                let r = rng.random_range(0.0f64..0.999).sqrt();
                C::from_polar(r, rng.random_range(0.0..TAU))
            })
            .collect(),
    }
}

/// Points at distance at least `0.1` from the line or circle, where the
/// quadrature transforms reach full accuracy.
pub fn comparison_points(set: &FiniteGapSet, count: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match set.setting() {
        Setting::Line => {
            let (lo, hi) = set.hull();
            (0..count)
                .map(|_| C::new(rng.random_range(lo - 3.0..hi + 3.0), 10f64.powf(rng.random_range(-1.0..1.0))))
                .collect()
        }
        Setting::Circle => (0..count)
            .map(|_| C::from_polar(rng.random_range(0.0f64..0.81).sqrt(), rng.random_range(0.0..TAU)))
            .collect(),
    }
}

/// Minimum of `Im m` over samples in `ℂ₊`, or of `Re F` over samples in
/// `𝔻`. A pole at a sample counts as `-∞`.
pub fn herglotz_scan<F: AlgebraicFunction + ?Sized>(f: &F, count: usize, seed: u64) -> f64 {
    let line = f.set().setting() == Setting::Line;
    sample_points(f, count, seed)
        .into_iter()
        .map(|z| match f.eval(SheetPoint::plus(z)).finite() {
            Some(v) if line => v.im,
            Some(v) => v.re,
            None => f64::NEG_INFINITY,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Primary/oracle comparisons for one corpus entry: the transform at
/// `points` sample points and the first `depth` recurrence coefficients.
pub fn oracle_reports(entry: &CorpusEntry, points: usize, depth: usize, seed: u64) -> Result<Vec<OracleReport>> {
    let set = &entry.set;
    let mu = build_measure(set, &entry.config)?;
    let mut out = Vec::new();
    match set.setting() {
        Setting::Line => {
            let m = build_m(set, &entry.config)?;
            for z in comparison_points(set, points, seed) {
                let primary =
                    m.eval(SheetPoint::plus(z)).finite().ok_or_else(|| Error::Domain(format!("pole at {z}")))?;
                out.push(OracleReport::new(format!("m({z:.4})"), primary, cauchy_transform(&mu, z)?));
            }
            let (a, b) = jacobi_coefficients(&m, depth)?;
            let (oa, ob) = jacobi_from_measure(&mu, depth)?;
            for k in 0..depth {
                out.push(OracleReport::new(format!("a{}", k + 1), C::new(a[k], 0.0), C::new(oa[k], 0.0)));
                out.push(OracleReport::new(format!("b{}", k + 1), C::new(b[k], 0.0), C::new(ob[k], 0.0)));
            }
        }
        Setting::Circle => {
            let f = build_f(set, &entry.config)?;
            for z in comparison_points(set, points, seed) {
                let primary =
                    f.eval(SheetPoint::plus(z)).finite().ok_or_else(|| Error::Domain(format!("pole at {z}")))?;
                out.push(OracleReport::new(format!("F({z:.4})"), primary, caratheodory_transform(&mu, z)?));
            }
            let alpha = verblunsky_coefficients(&f, depth)?;
            let oracle = verblunsky_from_measure(&mu, depth)?;
            for k in 0..depth {
                out.push(OracleReport::new(format!("alpha{k}"), alpha[k], oracle[k]));
            }
        }
    }
    Ok(out)
}

/// One admissible configuration of the standing test corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub set: FiniteGapSet,
    pub config: SingularityConfig,
    pub s: usize,
}

/// Minimum distance between distinct corpus points, and from band edges.
pub const CORPUS_SEPARATION: f64 = 0.05;
/// Corpus points stay within this modulus.
pub const CORPUS_RADIUS: f64 = 6.0;

/// The band sets of the standing corpus with their largest `s`.
pub fn corpus_sets() -> Vec<(FiniteGapSet, usize)> {
    let line = |b: &[(f64, f64)]| FiniteGapSet::line(b).expect("valid corpus set");
    let circle = |t: &[f64]| FiniteGapSet::circle(t).expect("valid corpus set");
    vec![
        (line(&[(-2.0, 2.0)]), 3),
        (line(&[(-2.0, -1.0), (1.0, 2.0)]), 3),
        (line(&[(-3.0, -2.0), (-1.0, 0.5), (1.5, 3.0)]), 3),
        (circle(&[std::f64::consts::FRAC_PI_2, 3.0 * std::f64::consts::FRAC_PI_2]), 2),
        (circle(&[0.4, 1.9, 2.7, 5.3]), 2),
    ]
}

fn random_gap_coordinate(set: &FiniteGapSet, rng: &mut ChaCha8Rng) -> f64 {
    match set.setting() {
        Setting::Line => loop {
            let x = rng.random_range(-CORPUS_RADIUS..CORPUS_RADIUS);
            if set.gap_of(x).is_some() {
                return x;
            }
        },
        Setting::Circle => loop {
            let t = rng.random_range(0.0..TAU);
            if set.gap_of(t).is_some() {
                return t;
            }
        },
    }
}

fn well_separated(set: &FiniteGapSet, pts: &[C]) -> bool {
    let edges = set.branch_points();
    for (i, z) in pts.iter().enumerate() {
        let on_edge = edges.iter().any(|e| (z - e).norm() <= 1e-14);
        if !on_edge && edges.iter().any(|e| (z - e).norm() < CORPUS_SEPARATION) {
            return false;
        }
        let off_curve = match set.setting() {
            Setting::Line => z.im.abs(),
            Setting::Circle => (z.norm() - 1.0).abs(),
        };
        if off_curve > 0.0 && off_curve < CORPUS_SEPARATION {
            return false;
        }
        if pts[..i].iter().any(|w| (z - w).norm() < CORPUS_SEPARATION) {
            return false;
        }
    }
    true
}

/// Random candidate with `K + N = l + s` (line) or `l + 2s` (circle) mixing
/// eigenvalues, real or unimodular resonances, symmetric resonance pairs
/// and band-edge resonances. Not necessarily admissible.
pub fn random_candidate(set: &FiniteGapSet, s: usize, rng: &mut ChaCha8Rng) -> SingularityConfig {
    let line = set.setting() == Setting::Line;
    let n = if line { set.l() + s } else { set.l() + 2 * s };
    let mut cfg = SingularityConfig::empty(set.setting());
    let mut left = n;
    let mut edges_used: Vec<usize> = Vec::new();
    while left > 0 {
        let kind = rng.random_range(0..4u32);
        match kind {
            0 => {
                cfg.eigenvalues.push(set.point(random_gap_coordinate(set, rng)));
                left -= 1;
            }
            1 => {
                let mult = if left >= 2 && rng.random_range(0..4u32) == 0 { 2 } else { 1 };
                cfg.resonances.push(Resonance { point: set.point(random_gap_coordinate(set, rng)), mult });
                left -= mult;
            }
            2 if left >= 2 => {
                let z = if line {
                    let y = rng.random_range(CORPUS_SEPARATION..4.0);
                    C::new(rng.random_range(-CORPUS_RADIUS..CORPUS_RADIUS), y)
                } else {
                    C::from_polar(rng.random_range(0.25..0.95), rng.random_range(0.0..TAU))
                };
                cfg.resonances.push(Resonance { point: z, mult: 1 });
                cfg.resonances.push(Resonance { point: set.reflect(z), mult: 1 });
                left -= 2;
            }
            3 => {
                let j = rng.random_range(0..set.branch_points().len());
                if !edges_used.contains(&j) {
                    edges_used.push(j);
                    cfg.resonances.push(Resonance { point: set.branch_points()[j], mult: 1 });
                    left -= 1;
                }
            }
            _ => {}
        }
    }
    cfg
}

/// Rejection-samples an admissible, well-separated configuration of order `s`.
pub fn random_admissible(
    set: &FiniteGapSet,
    s: usize,
    rng: &mut ChaCha8Rng,
    attempts: usize,
) -> Option<SingularityConfig> {
    (0..attempts).find_map(|_| {
        let cfg = random_candidate(set, s, rng);
        let ok = well_separated(set, &cfg.points()) && matches!(validate(set, &cfg), Ok(t) if t == s);
        ok.then_some(cfg)
    })
}

/// `per_case` admissible configurations for every corpus set and every
/// `s` up to its bound.
pub fn standing_corpus(seed: u64, per_case: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (set, smax) in corpus_sets() {
        for s in 0..=smax {
            for _ in 0..per_case {
                if let Some(config) = random_admissible(&set, s, &mut rng, 5000) {
                    out.push(CorpusEntry { set: set.clone(), config, s });
                }
            }
        }
    }
    out
}
