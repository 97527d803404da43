//! Spectral measures `√|R|/|d|` on the bands plus point masses at the
//! eigenvalues, built from an admissible configuration.

use crate::config::{Condition, SingularityConfig, ViolationReport};
use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, SheetPoint, POINT_TOL};
use crate::poly::{roots, Poly};
use crate::quad::integrate_0_pi;
use num_complex::Complex64 as C;
use std::f64::consts::{PI, TAU};

/// Samples per band used by the sign test.
pub const SIGN_SAMPLES: usize = 32;

/// Point mass at a spectral coordinate (`x` on the line, `θ` on the circle).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass {
    pub at: f64,
    pub w: f64,
}

#[derive(Clone, Debug)]
pub struct SpectralMeasure {
    set: FiniteGapSet,
    d: Poly,
    masses: Vec<PointMass>,
    s: usize,
    /// Zeros of `d` with multiplicity, band edges snapped exactly.
    zeros: Vec<C>,
}

impl SpectralMeasure {
    /// Assembles a measure from stored parts; weights must be positive.
    pub fn from_parts(set: FiniteGapSet, d: Poly, masses: Vec<PointMass>, s: usize) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if let Some(m) = masses.iter().find(|m| !(m.w > 0.0) || !m.at.is_finite()) {
            return Err(Error::Invariant(format!("point mass at {} has weight {}", m.at, m.w)));
        }
        let zeros = roots(&d)?
            .roots
            .into_iter()
            .flat_map(|(z, k)| {
                let z = set.branch_points().iter().copied().find(|b| (z - b).norm() <= 1e-8).unwrap_or(z);
                std::iter::repeat_n(z, k)
            })
            .collect();
        Ok(SpectralMeasure { set, d, masses, s, zeros })
    }

    fn with_zeros(set: FiniteGapSet, d: Poly, masses: Vec<PointMass>, s: usize, zeros: Vec<C>) -> Self {
        SpectralMeasure { set, d, masses, s, zeros }
    }

    pub fn set(&self) -> &FiniteGapSet {
        &self.set
    }

    /// Density denominator, including the normalizer.
    pub fn d(&self) -> &Poly {
        &self.d
    }

    pub fn masses(&self) -> &[PointMass] {
        &self.masses
    }

    /// Perturbation order of the configuration the measure came from.
    pub fn s(&self) -> usize {
        self.s
    }

    /// `√|R|/|d|` at a band coordinate.
    pub fn density(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || !self.set.on_band(x) {
            return Err(Error::Domain(format!("{x} is not on a band")));
        }
        let z = self.set.point(x);
        let r = self.set.r_polynomial().eval(z).norm();
        Ok(r.sqrt() / self.abs_d(z, None))
    }

    /// `|d(z)|` as a product over its zeros; `own` gives band `k`'s edge
    /// distances `(x - lo, hi - x)` computed without cancellation.
    fn abs_d(&self, z: C, own: Option<(usize, f64, f64)>) -> f64 {
        let lead = self.d.leading().norm();
        let edge = |k: usize, j: usize| self.set.branch_points()[2 * (k - 1) + j];
        self.zeros
            .iter()
            .map(|&w| match own {
                Some((k, dl, _)) if w == edge(k, 0) => dl,
                Some((k, _, dh)) if w == edge(k, 1) => dh,
                _ => (z - w).norm(),
            })
            .product::<f64>()
            * lead
    }

    /// Density times `dx/dt` under `x = c - r cos t` on band `k`.
    fn weight_dt(&self, k: usize, t: f64) -> (f64, f64) {
        let (lo, hi) = self.set.band(k);
        let (c, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let x = c - r * t.cos();
        let z = self.set.point(x);
        let (sh, ch) = ((0.5 * t).sin(), (0.5 * t).cos());
        let others: f64 = match self.set.setting() {
            Setting::Line => self
                .set
                .edges()
                .chunks(2)
                .enumerate()
                .filter(|(j, _)| j + 1 != k)
                .map(|(_, ab)| ((x - ab[0]) * (x - ab[1])).abs())
                .product(),
            Setting::Circle => self
                .set
                .edges()
                .iter()
                .enumerate()
                .filter(|(j, _)| j / 2 + 1 != k)
                .map(|(_, &th)| 2.0 * (0.5 * (x - th)).sin().abs())
                .product(),
        };
        let (own, dl, dh) = match self.set.setting() {
            // (x-α)(β-x) = (2r sin²(t/2))(2r cos²(t/2))
            Setting::Line => {
                let (dl, dh) = (2.0 * r * sh * sh, 2.0 * r * ch * ch);
                (dl * dh, dl, dh)
            }
            Setting::Circle => {
                let (dl, dh) = (2.0 * (r * sh * sh).sin(), 2.0 * (r * ch * ch).sin());
                (dl * dh, dl, dh)
            }
        };
        let w = (own * others).sqrt() / self.abs_d(z, Some((k, dl, dh))) * r * t.sin();
        (x, w)
    }

    /// `∫ f dμ` over the absolutely continuous part only.
    pub fn integrate_bands<F: Fn(f64) -> C>(&self, f: F) -> Result<C> {
        let mut total = C::new(0.0, 0.0);
        for k in 1..=self.set.band_count() {
            total += integrate_0_pi(|t| {
                let (x, w) = self.weight_dt(k, t);
                if w == 0.0 {
                    C::new(0.0, 0.0)
                } else {
                    f(x) * w
                }
            })?;
        }
        Ok(total)
    }

    /// `∫ f dμ`, with `f` taking the spectral coordinate.
    pub fn integrate<F: Fn(f64) -> C>(&self, f: F) -> Result<C> {
        let ac = self.integrate_bands(&f)?;
        Ok(ac + self.masses.iter().map(|m| f(m.at) * m.w).sum::<C>())
    }

    /// Discrete measure: `n` Gauss nodes per band in the angle variable plus
    /// the point masses, as `(coordinate, weight)`.
    pub fn discretize(&self, n: usize) -> Vec<(f64, f64)> {
        let nodes = crate::quad::rule(n.max(1));
        let mut out: Vec<(f64, f64)> = (1..=self.set.band_count())
            .flat_map(|k| {
                nodes.iter().map(move |&(t, w)| {
                    let (x, dw) = self.weight_dt(k, t);
                    (x, dw * w)
                })
            })
            .collect();
        out.extend(self.masses.iter().map(|m| (m.at, m.w)));
        out
    }

    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.integrate(|_| C::new(1.0, 0.0))?.re)
    }

    /// `∫ x^k dμ` (line) or `∫ e^{-ikθ} dμ` (circle), `k = 0..=n`.
    pub fn moments(&self, n: usize) -> Result<Vec<C>> {
        (0..=n)
            .map(|k| match self.set.setting() {
                Setting::Line => self.integrate(|x| C::new(x.powi(k as i32), 0.0)),
                Setting::Circle => self.integrate(|t| C::from_polar(1.0, -(k as f64) * t)),
            })
            .collect()
    }
}

/// The unique probability measure of an admissible configuration.
///
/// The admissibility gate here works on `d = A·∏(z-R_j)^{n_j}∏(z-E_j)`
/// directly: band sign pattern, simple zeros at the eigenvalues, positive
/// signed weights. It does not consult [`crate::config::validate`].
pub fn build_measure(set: &FiniteGapSet, config: &SingularityConfig) -> Result<SpectralMeasure> {
    if config.setting != set.setting() {
        return Err(Error::Schema("configuration setting does not match the band set".into()));
    }
    let cfg = config.normalized();
    let (d0, unit, s) = gate(set, &cfg)?;
    let dd0 = d0.derivative();
    let raw_weight = |e: C| TAU * set.r_polynomial().eval(e).norm().sqrt() / dd0.eval(e).norm();
    let trial = SpectralMeasure::with_zeros(set.clone(), d0.scale(unit), Vec::new(), s, snapped_points(set, &cfg));
    let ac = trial.integrate_bands(|_| C::new(1.0, 0.0))?.re;
    let total = ac + cfg.eigenvalues.iter().map(|&e| raw_weight(e)).sum::<f64>();
    let mut d = d0.scale(unit * total);
    if set.setting() == Setting::Line {
        d = d.into_real(1e-9)?;
    }
    let mut masses: Vec<PointMass> =
        cfg.eigenvalues.iter().map(|&e| PointMass { at: mass_coordinate(set, e), w: raw_weight(e) / total }).collect();
    masses.sort_by(|a, b| a.at.total_cmp(&b.at));
    if let Some(m) = masses.iter().find(|m| !(m.w > 0.0)) {
        return Err(Error::Invariant(format!("point mass at {} has weight {}", m.at, m.w)));
    }
    Ok(SpectralMeasure::with_zeros(set.clone(), d, masses, s, snapped_points(set, &cfg)))
}

fn snapped_points(set: &FiniteGapSet, cfg: &SingularityConfig) -> Vec<C> {
    cfg.points()
        .into_iter()
        .map(|z| set.branch_points().iter().copied().find(|b| (z - b).norm() <= POINT_TOL).unwrap_or(z))
        .collect()
}

fn mass_coordinate(set: &FiniteGapSet, e: C) -> f64 {
    match set.setting() {
        Setting::Line => e.re,
        Setting::Circle => e.arg().rem_euclid(TAU),
    }
}

/// Returns the monic zero polynomial, the unimodular normalizer phase and `s`.
fn gate(set: &FiniteGapSet, cfg: &SingularityConfig) -> Result<(Poly, C, usize)> {
    let mut rep = ViolationReport::default();
    let tol = POINT_TOL;
    let line = set.setting() == Setting::Line;

    for (i, e) in cfg.eigenvalues.iter().enumerate() {
        let on_curve = if line { e.im.abs() <= tol } else { (e.norm() - 1.0).abs() <= tol };
        if !(e.re.is_finite() && e.im.is_finite()) || !on_curve {
            rep.push(Condition::O3, format!("eigenvalue {e} cannot carry a point mass"));
        } else if set.contains(*e, tol) {
            rep.push(Condition::O3, format!("eigenvalue {e} lies on the bands"));
        }
        if cfg.eigenvalues[..i].iter().any(|f| (f - e).norm() <= tol) {
            rep.push(Condition::O3, format!("eigenvalue {e} is a multiple zero of d"));
        }
        if cfg.resonances.iter().any(|r| (r.point - e).norm() <= tol) {
            rep.push(Condition::O1, format!("eigenvalue {e} is a multiple zero of d"));
        }
    }
    for r in &cfg.resonances {
        let z = r.point;
        if r.mult == 0 || !(z.re.is_finite() && z.im.is_finite()) {
            rep.push(Condition::O4, format!("resonance {z} is malformed"));
        } else if !line && z.norm() <= tol {
            rep.push(Condition::O4, "d vanishes at 0".to_string());
        } else if set.in_open_band(z, tol) {
            rep.push(Condition::O4, format!("d vanishes at {z} inside a band"));
        } else if set.is_branch_point(z, tol) && r.mult > 1 {
            rep.push(Condition::O4, format!("d has a zero of order {} at the band edge {z}", r.mult));
        }
    }
    if !rep.is_empty() {
        return Err(Error::Inadmissible(rep));
    }

    let points = cfg.points();
    let d0 = Poly::from_roots(&points);
    let deg = points.len() as i64;
    let l = set.l() as i64;
    if deg < l {
        rep.push(Condition::O5, format!("Deg d = {deg} is below l = {l}"));
    }
    if !line && (deg - l).rem_euclid(2) == 1 {
        rep.push(Condition::O5, format!("Deg d = {deg} and l = {l} differ in parity"));
    }
    if line {
        if d0.imag_defect() > 1e-9 {
            rep.push(Condition::O4, "d is not real on the real line");
        }
    } else {
        for r in &cfg.resonances {
            if set.on_curve(r.point, tol) {
                continue;
            }
            let mirror = set.reflect(r.point);
            let m: usize = cfg.resonances.iter().filter(|q| (q.point - mirror).norm() <= tol).map(|q| q.mult).sum();
            if m != r.mult {
                rep.push(Condition::O4, format!("zero {} of d is not paired with {mirror}", r.point));
            }
        }
    }
    if !rep.is_empty() {
        return Err(Error::Inadmissible(rep));
    }
    let s = if line { deg - l } else { (deg - l) / 2 } as usize;

    // Band sign pattern: the quantity below must be a positive multiple of
    // one common unimodular constant on every band sample.
    let sg = set.sign_profile();
    let ratio = |k: usize, x: f64| -> C {
        let z = set.point(x);
        match set.setting() {
            Setting::Line => C::new(f64::from(sg.band(k)) * d0.eval(z).re, 0.0),
            Setting::Circle => {
                let sq = set.sqrt_r(SheetPoint::plus(z));
                z.powi(s as i32) * sq / (C::i() * d0.eval(z))
            }
        }
    };
    let (lo, hi) = set.band(1);
    let ref_val = ratio(1, 0.5 * (lo + hi));
    let unit = if line { C::new(ref_val.re.signum(), 0.0) } else { ref_val / ref_val.norm() };
    'bands: for k in 1..=set.band_count() {
        let (lo, hi) = set.band(k);
        for i in 0..SIGN_SAMPLES {
            let t = (i as f64 + 0.5) / SIGN_SAMPLES as f64;
            let x = lo + (hi - lo) * 0.5 * (1.0 - (PI * t).cos());
            let q = ratio(k, x) / unit;
            if !(q.re > 0.0) || q.im.abs() > 1e-8 * q.norm() {
                rep.push(Condition::O2, format!("density sign pattern fails on band {k}"));
                break 'bands;
            }
        }
    }
    if !rep.is_empty() {
        return Err(Error::Inadmissible(rep));
    }

    // Signed weights at the eigenvalues.
    let dd0 = d0.derivative();
    for &e in &cfg.eigenvalues {
        let sq = set.sqrt_r(SheetPoint::plus(e));
        let dp = dd0.eval(e) * unit;
        let signed = match set.setting() {
            Setting::Line => -TAU * sq / dp,
            Setting::Circle => TAU * C::i() * e.powi(s as i32 - 1) * sq / dp,
        };
        if !(signed.re > 0.0) || signed.im.abs() > 1e-8 * signed.norm() {
            rep.push(Condition::O1, format!("weight at eigenvalue {e} would not be positive"));
        }
    }
    if !rep.is_empty() {
        return Err(Error::Inadmissible(rep));
    }
    Ok((d0, unit, s))
}
