//! Finite gap sets on the real line and on the unit circle, the polynomial
//! `R`, and the single-valued square root `√R` on the two-sheeted surface.
//!
//! Line sets carry bands `[α_j, β_j]`, `j = 1..=l+1`, and `R = ∏(z-α_j)(z-β_j)`.
//! Circle sets carry angles `θ_1 < … < θ_{2l} < θ_1 + 2π`; band `k` is the arc
//! `[θ_{2k-1}, θ_{2k}]` and gap `k` the arc `[θ_{2k}, θ_{2k+1}]` with
//! `θ_{2l+1} = θ_1 + 2π`.

use crate::error::{Error, Result};
use crate::poly::{series_sqrt, sqrt_series_at_infinity, Poly};
use num_complex::Complex64 as C;
use std::f64::consts::{PI, TAU};

/// Distance below which an evaluation point is replaced by the branch point.
pub const BRANCH_SNAP: f64 = 1e-12;
/// Absolute tolerance for deciding that two points coincide.
pub const POINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sheet::Plus => "+",
            Sheet::Minus => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Sheet> {
        match s {
            "+" => Some(Sheet::Plus),
            "-" => Some(Sheet::Minus),
            _ => None,
        }
    }
}

/// A point of the two-sheeted surface.
#[derive(Clone, Copy, Debug)]
pub struct SheetPoint {
    pub z: C,
    pub sheet: Sheet,
}

impl SheetPoint {
    pub fn new(z: C, sheet: Sheet) -> Self {
        SheetPoint { z, sheet }
    }

    pub fn plus(z: C) -> Self {
        SheetPoint { z, sheet: Sheet::Plus }
    }

    pub fn minus(z: C) -> Self {
        SheetPoint { z, sheet: Sheet::Minus }
    }

    /// Surface equality; the sheets are identified over branch points.
    pub fn same_as(&self, other: &SheetPoint, set: &FiniteGapSet, tol: f64) -> bool {
        if (self.z - other.z).norm() > tol {
            return false;
        }
        self.sheet == other.sheet || set.is_branch_point(self.z, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    Line,
    Circle,
}

/// A closed gap in spectral coordinates (`x` on the line, `θ` on the circle).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gap {
    /// Line: `0..=l+1`, with `0` and `l+1` unbounded. Circle: `1..=l`.
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
    pub bounded: bool,
}

/// Band-wise sign `sg`: `(-1)^{l+1-k}` on line band `k`, `(-1)^{k-1}` on
/// circle band `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignProfile {
    signs: Vec<i8>,
}

impl SignProfile {
    /// Sign on band `k` (1-based).
    pub fn band(&self, k: usize) -> i8 {
        self.signs[k - 1]
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// Per-band factor of the circle square root, cut exactly on the band arc.
#[derive(Clone, Debug)]
struct ArcFactor {
    a: C,
    b: C,
    rho: C,
    sqrt_rho: C,
}

impl ArcFactor {
    fn new(a: C, b: C, mid: C) -> Self {
        let u = (mid - a) / (mid - b);
        let rho = -u.norm() / u;
        ArcFactor { a, b, rho, sqrt_rho: rho.sqrt() }
    }

    /// `(z-b)·√(ρ(z-a)/(z-b))/√ρ`, squaring to `(z-a)(z-b)`; on the arc the
    /// limit from inside the disk is taken.
    fn eval(&self, z: C) -> C {
        let w = self.rho * (z - self.a) / (z - self.b);
        let root = if w.re < 0.0 && w.im.abs() <= 1e-13 * w.norm() {
            let dw = -z * self.rho * (self.a - self.b) / ((z - self.b) * (z - self.b));
            let mag = (-w.re).sqrt();
            if dw.im >= 0.0 {
                C::new(0.0, mag)
            } else {
                C::new(0.0, -mag)
            }
        } else {
            w.sqrt()
        };
        (z - self.b) * root / self.sqrt_rho
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGapSet {
    setting: Setting,
    edges: Vec<f64>,
    r: Poly,
    branch: Vec<C>,
    arcs: Vec<ArcFactor>,
    scale: C,
}

impl FiniteGapSet {
    /// Line set from bands `(α_j, β_j)`, strictly increasing.
    pub fn line(bands: &[(f64, f64)]) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::InvalidSet("a line set needs at least one band".into()));
        }
        let edges: Vec<f64> = bands.iter().flat_map(|&(a, b)| [a, b]).collect();
        if edges.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSet("band edges must be finite".into()));
        }
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidSet(format!("band edges not strictly increasing: {edges:?}")));
        }
        let branch: Vec<C> = edges.iter().map(|&x| C::new(x, 0.0)).collect();
        let r = Poly::from_roots(&branch);
        Ok(FiniteGapSet { setting: Setting::Line, edges, r, branch, arcs: Vec::new(), scale: C::new(1.0, 0.0) })
    }

    /// Circle set from angles `θ_1 < … < θ_{2l} < θ_1 + 2π`, `l ≥ 1`.
    pub fn circle(angles: &[f64]) -> Result<Self> {
        if angles.len() < 2 || angles.len() % 2 == 1 {
            return Err(Error::InvalidSet(format!(
                "a circle set needs an even, positive number of angles, got {}",
                angles.len()
            )));
        }
        if angles.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidSet("angles must be finite".into()));
        }
        if angles.windows(2).any(|w| !(w[0] < w[1])) || !(angles[angles.len() - 1] < angles[0] + TAU) {
            return Err(Error::InvalidSet(format!("angles not strictly increasing within one period: {angles:?}")));
        }
        let branch: Vec<C> = angles.iter().map(|&t| C::from_polar(1.0, t)).collect();
        let phase: C = angles.iter().map(|&t| C::from_polar(1.0, -t / 2.0)).product();
        let mut r = Poly::from_roots(&branch).scale(phase);
        let l = angles.len() / 2;
        let tm = 0.5 * (angles[0] + angles[1]);
        let zm = C::from_polar(1.0, tm);
        let probe = r.eval(zm) / zm.powi(l as i32);
        if probe.re > 0.0 {
            r = r.scale(C::new(-1.0, 0.0));
        }
        let arcs: Vec<ArcFactor> = (0..l)
            .map(|k| {
                let (t0, t1) = (angles[2 * k], angles[2 * k + 1]);
                ArcFactor::new(branch[2 * k], branch[2 * k + 1], C::from_polar(1.0, 0.5 * (t0 + t1)))
            })
            .collect();
        let mut set =
            FiniteGapSet { setting: Setting::Circle, edges: angles.to_vec(), r, branch, arcs, scale: C::new(1.0, 0.0) };
        let lead = set.r.leading();
        set.scale = lead.sqrt();
        // e^{-ilθ/2}√R must lie in iℝ₊ at the first band midpoint.
        let v = set.sqrt_r_plus(zm) * C::from_polar(1.0, -(l as f64) * tm / 2.0);
        if v.im < 0.0 {
            set.scale = -set.scale;
        }
        Ok(set)
    }

    pub fn setting(&self) -> Setting {
        self.setting
    }

    /// Number of bounded gaps.
    pub fn l(&self) -> usize {
        match self.setting {
            Setting::Line => self.edges.len() / 2 - 1,
            Setting::Circle => self.edges.len() / 2,
        }
    }

    pub fn band_count(&self) -> usize {
        self.edges.len() / 2
    }

    /// Band edges `α_1, β_1, …` (line) or angles `θ_1, …, θ_{2l}` (circle).
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Band `k` (1-based) as a coordinate interval.
    pub fn band(&self, k: usize) -> (f64, f64) {
        (self.edges[2 * k - 2], self.edges[2 * k - 1])
    }

    pub fn r_polynomial(&self) -> &Poly {
        &self.r
    }

    pub fn branch_points(&self) -> &[C] {
        &self.branch
    }

    pub fn is_branch_point(&self, z: C, tol: f64) -> bool {
        self.branch.iter().any(|&b| (z - b).norm() <= tol)
    }

    /// Degree of `√R` at infinity: `l+1` (line) or `l` (circle).
    pub fn half_degree(&self) -> usize {
        self.r.degree() / 2
    }

    /// `√R` on the given sheet.
    pub fn sqrt_r(&self, pt: SheetPoint) -> C {
        self.sqrt_r_plus(pt.z) * pt.sheet.sign()
    }

    fn sqrt_r_plus(&self, z: C) -> C {
        if self.is_branch_point(z, BRANCH_SNAP) {
            return C::new(0.0, 0.0);
        }
        match self.setting {
            Setting::Line => {
                // -0.0 imaginary parts would select the lower-half-plane limit.
                let z = C::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
                self.edges.chunks(2).map(|ab| (z - ab[0]).sqrt() * (z - ab[1]).sqrt()).product()
            }
            Setting::Circle => self.scale * self.arcs.iter().map(|f| f.eval(z)).product::<C>(),
        }
    }

    /// Taylor coefficients of `√R` on sheet `+` at `z0`, orders `0..=order`.
    /// Orders above zero fail at branch points.
    pub fn sqrt_r_taylor(&self, z0: C, order: usize) -> Result<Vec<C>> {
        let g0 = self.sqrt_r_plus(z0);
        if order == 0 {
            return Ok(vec![g0]);
        }
        let t = self.r.taylor_at(z0, order);
        series_sqrt(&t, g0, order + 1)
    }

    /// Laurent coefficients of `√R` on sheet `+` at infinity: the
    /// coefficients of `z^m, z^{m-1}, …, z^{m-order}`, `m = half_degree()`.
    pub fn sqrt_r_at_infinity(&self, order: usize) -> Vec<C> {
        let mut s = sqrt_series_at_infinity(&self.r, order).expect("R has even degree");
        let m = self.half_degree() as i32;
        let big = C::from_polar(1e4, 0.7);
        let probe = self.sqrt_r_plus(big) / (s[0] * big.powi(m));
        if probe.re < 0.0 {
            s.iter_mut().for_each(|c| *c = -*c);
        }
        s
    }

    pub fn sign_profile(&self) -> SignProfile {
        let n = self.band_count();
        let l = self.l();
        let signs = (1..=n)
            .map(|k| {
                let e = match self.setting {
                    Setting::Line => l + 1 - k,
                    Setting::Circle => k - 1,
                };
                if e % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        SignProfile { signs }
    }

    /// Spectral coordinate of a point: `Re z` (line) or `arg z` (circle).
    pub fn coordinate(&self, z: C) -> f64 {
        match self.setting {
            Setting::Line => z.re,
            Setting::Circle => z.arg(),
        }
    }

    /// Point of the plane at a spectral coordinate.
    pub fn point(&self, x: f64) -> C {
        match self.setting {
            Setting::Line => C::new(x, 0.0),
            Setting::Circle => C::from_polar(1.0, x),
        }
    }

    pub fn gaps(&self) -> Vec<Gap> {
        let e = &self.edges;
        match self.setting {
            Setting::Line => {
                let l = self.l();
                let mut g = vec![Gap { index: 0, lo: f64::NEG_INFINITY, hi: e[0], bounded: false }];
                for k in 1..=l {
                    g.push(Gap { index: k, lo: e[2 * k - 1], hi: e[2 * k], bounded: true });
                }
                g.push(Gap { index: l + 1, lo: e[2 * l + 1], hi: f64::INFINITY, bounded: false });
                g
            }
            Setting::Circle => {
                let l = self.l();
                (1..=l)
                    .map(|k| {
                        let hi = if k == l { e[0] + TAU } else { e[2 * k] };
                        Gap { index: k, lo: e[2 * k - 1], hi, bounded: true }
                    })
                    .collect()
            }
        }
    }

    /// Bounded gaps only (line `1..=l`, circle all).
    pub fn bounded_gaps(&self) -> Vec<Gap> {
        self.gaps().into_iter().filter(|g| g.bounded).collect()
    }

    /// Gap containing the coordinate (edges included) together with the
    /// coordinate unwrapped into `[gap.lo, gap.hi]`; `None` strictly inside a band.
    pub fn locate_in_gap(&self, x: f64) -> Option<(Gap, f64)> {
        match self.setting {
            Setting::Line => self.gaps().into_iter().find(|g| g.lo <= x && x <= g.hi).map(|g| (g, x)),
            Setting::Circle => self.gaps().into_iter().find_map(|g| {
                let t = (x - g.lo).rem_euclid(TAU);
                let len = g.hi - g.lo;
                if t <= len {
                    Some((g, g.lo + t))
                } else if TAU - t <= 1e-14 {
                    Some((g, g.lo))
                } else {
                    None
                }
            }),
        }
    }

    pub fn gap_of(&self, x: f64) -> Option<Gap> {
        self.locate_in_gap(x).map(|(g, _)| g)
    }

    /// Band containing the coordinate (closed), 1-based.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        (1..=self.band_count()).find(|&k| {
            let (lo, hi) = self.band(k);
            match self.setting {
                Setting::Line => lo <= x && x <= hi,
                Setting::Circle => (x - lo).rem_euclid(TAU) <= hi - lo,
            }
        })
    }

    /// Closed-band membership of a coordinate.
    pub fn on_band(&self, x: f64) -> bool {
        self.band_of(x).is_some()
    }

    /// Whether `z` lies on the set (closed) within `tol`.
    pub fn contains(&self, z: C, tol: f64) -> bool {
        if !self.on_curve(z, tol) {
            return false;
        }
        let x = self.coordinate(z);
        self.on_band(x) || self.is_branch_point(z, tol)
    }

    /// Whether `z` lies strictly inside a band, more than `tol` from every edge.
    pub fn in_open_band(&self, z: C, tol: f64) -> bool {
        self.contains(z, tol) && !self.is_branch_point(z, tol)
    }

    /// Whether `z` lies on `ℝ` (line) or `∂𝔻` (circle) within `tol`.
    pub fn on_curve(&self, z: C, tol: f64) -> bool {
        match self.setting {
            Setting::Line => z.im.abs() <= tol,
            Setting::Circle => (z.norm() - 1.0).abs() <= tol,
        }
    }

    /// Mirror image fixing the curve: `z̄` (line) or `1/z̄` (circle).
    pub fn reflect(&self, z: C) -> C {
        match self.setting {
            Setting::Line => z.conj(),
            Setting::Circle => C::new(1.0, 0.0) / z.conj(),
        }
    }

    /// Coordinates of band midpoints.
    pub fn band_midpoints(&self) -> Vec<f64> {
        (1..=self.band_count())
            .map(|k| {
                let (lo, hi) = self.band(k);
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// `e^{-ilθ/2}` with the half-power cut at the midpoint of the last gap.
    pub fn circle_half_phase(&self, theta: f64) -> C {
        let l = self.l() as f64;
        let e = &self.edges;
        let cut = 0.5 * (e[e.len() - 1] + e[0] + TAU);
        let t = cut - (cut - theta).rem_euclid(TAU);
        let t = if t <= cut - TAU { t + TAU } else { t };
        C::from_polar(1.0, -l * t / 2.0)
    }

    /// Pairs of coordinates bounding each band, used for sampling.
    pub fn bands(&self) -> Vec<(f64, f64)> {
        (1..=self.band_count()).map(|k| self.band(k)).collect()
    }

    /// A coordinate interval containing every band with margin (line only
    /// meaningful; circle returns one period).
    pub fn hull(&self) -> (f64, f64) {
        match self.setting {
            Setting::Line => (self.edges[0], self.edges[self.edges.len() - 1]),
            Setting::Circle => (-PI, PI),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_factor_squares_back() {
        let set = FiniteGapSet::circle(&[0.4, 1.9, 3.0, 5.5]).unwrap();
        for &z in &[C::new(0.3, 0.2), C::new(-1.5, 0.7), C::new(0.0, -0.2)] {
            let s = set.sqrt_r(SheetPoint::plus(z));
            let r = set.r_polynomial().eval(z);
            assert!((s * s - r).norm() <= 1e-12 * r.norm());
        }
    }

    #[test]
    fn circle_locate_wraps_last_gap() {
        let set = FiniteGapSet::circle(&[PI / 2.0, 3.0 * PI / 2.0]).unwrap();
        let (g, t) = set.locate_in_gap(0.0).unwrap();
        assert_eq!(g.index, 1);
        assert!((t - TAU).abs() < 1e-15);
        assert!(set.locate_in_gap(PI).is_none());
    }
}
