//! Algebraic m-functions `(p + √R)/a` on line sets and Carathéodory
//! functions `(p + z^s√R)/a` on circle sets: construction by confluent
//! interpolation, evaluation on either sheet, Laurent data at infinity, and
//! pole classification.

use crate::config::{validate, Resonance, SingularityConfig};
use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, Sheet, SheetPoint};
use crate::measure::build_measure;
use crate::poly::{hermite_solve_basis, roots, series_div, series_mul, HermiteNode, Poly};
use num_complex::Complex64 as C;
use std::f64::consts::PI;

/// Relative size below which a numerator value counts as vanishing.
pub const SHEET_TOL: f64 = 1e-8;
/// A sheet is regular when its numerator is this much smaller than on the
/// other sheet.
pub const SHEET_RATIO: f64 = 1e-4;
/// Relative tolerance for recognizing a root of `a` at a branch point.
const BRANCH_MATCH: f64 = 1e-8;

/// Value of a function on the surface: finite, or a pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SheetValue {
    Finite(C),
    Infinite,
}

impl SheetValue {
    pub fn finite(self) -> Option<C> {
        match self {
            SheetValue::Finite(c) => Some(c),
            SheetValue::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SheetValue::Infinite)
    }
}

/// `Σ_j coeffs[j]·z^{leading_power - j}` near infinity.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent {
    pub leading_power: i64,
    pub coeffs: Vec<C>,
}

impl Laurent {
    /// Coefficient of `z^power` (zero above the leading power).
    pub fn coeff(&self, power: i64) -> C {
        let j = self.leading_power - power;
        if j < 0 {
            C::new(0.0, 0.0)
        } else {
            self.coeffs.get(j as usize).copied().unwrap_or(C::new(0.0, 0.0))
        }
    }
}

/// How one root of `a` shows up on the surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RootKind {
    /// Pole on one sheet only.
    Pole { sheet: Sheet },
    /// Root at a band edge; `order` counts powers of `(z-z0)^{1/2}`.
    Branch { order: usize, vanishing_p: bool },
    /// Both sheets polar: the equal-degree condition (2a) fails.
    BothSheets,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleInfo {
    pub point: C,
    pub mult: usize,
    pub kind: RootKind,
}

/// Singularities of a function, sorted into a configuration.
#[derive(Clone, Debug)]
pub struct PoleReport {
    pub config: SingularityConfig,
    pub poles: Vec<PoleInfo>,
    /// Roots of `a` located at band edges.
    pub branch_point_singularities: Vec<C>,
    pub infinity_plus_pole: bool,
    pub infinity_minus_pole: bool,
}

/// Result of the equal-degree analysis.
#[derive(Clone, Debug)]
pub struct EqualDegreeReport {
    pub l: usize,
    pub deg_a: usize,
    pub deg_p: usize,
    /// Pole count on the surface, with multiplicity.
    pub deg_m: usize,
    pub infinity_plus_pole: bool,
    pub infinity_minus_pole: bool,
    /// Minimal: `Deg a = l` with one pole per gap (and, on the line, `∞₋`).
    pub minimal: bool,
    /// `Deg a - l` (line) or `(Deg a - l)/2` (circle) when `deg m = Deg a`.
    pub s: Option<usize>,
    /// Failed conditions, each tagged `(2a)`, `(2b)`, `(2c)` or `order`.
    pub failures: Vec<String>,
}

impl EqualDegreeReport {
    pub fn equal_degree(&self) -> bool {
        self.deg_m == self.deg_a
    }
}

/// Shared behaviour of `(p + z^k√R)/a`.
pub trait AlgebraicFunction {
    fn set(&self) -> &FiniteGapSet;
    fn p(&self) -> &Poly;
    fn a(&self) -> &Poly;
    /// Power `k` of `z` multiplying `√R` in the numerator.
    fn root_power(&self) -> usize;

    /// `z^k √R` on the given sheet.
    fn root_part(&self, pt: SheetPoint) -> C {
        pt.z.powi(self.root_power() as i32) * self.set().sqrt_r(pt)
    }

    fn numerator(&self, pt: SheetPoint) -> C {
        self.p().eval(pt.z) + self.root_part(pt)
    }

    /// Value on the surface; poles are reported as [`SheetValue::Infinite`].
    fn eval(&self, pt: SheetPoint) -> SheetValue {
        let a = self.a();
        let az = a.eval(pt.z);
        let ascale = eval_scale(a, pt.z);
        if az.norm() > 1e-13 * ascale {
            return SheetValue::Finite(self.numerator(pt) / az);
        }
        // Zero of a: the value is finite only if the numerator vanishes to
        // the same order on this sheet.
        let deg = a.degree();
        let ta = a.taylor_at(pt.z, deg);
        let order = (0..=deg).find(|&j| ta[j].norm() > 1e-9 * ascale).unwrap_or(deg);
        if self.set().is_branch_point(pt.z, crate::finitegap::BRANCH_SNAP) {
            return SheetValue::Infinite;
        }
        let Ok(tn) = numerator_taylor(self, pt, order) else {
            return SheetValue::Infinite;
        };
        let nscale = self.p().norm() + self.root_part(SheetPoint::plus(pt.z)).norm();
        if (0..order).all(|j| tn[j].norm() <= SHEET_TOL * nscale) {
            SheetValue::Finite(tn[order] / ta[order])
        } else {
            SheetValue::Infinite
        }
    }

    /// Laurent expansion at `∞` on the given sheet with `order+1` terms,
    /// starting at the first coefficient that is not negligible.
    fn eval_at_infinity(&self, sheet: Sheet, order: usize) -> Laurent {
        let top = self.p().degree().max(self.set().half_degree() + self.root_power()) as i64 - self.a().degree() as i64;
        let raw = infinity_series(self, sheet, top, top.max(0) as usize + order + 12);
        let scale = (self.p().norm() + 1.0) / self.a().leading().norm();
        let skip = raw.iter().position(|c| c.norm() > SHEET_TOL * scale).unwrap_or(raw.len());
        let coeffs: Vec<C> = raw.iter().skip(skip).take(order + 1).copied().collect();
        Laurent { leading_power: top - skip as i64, coeffs }
    }

    /// Sheet on which the numerator vanishes over `z`: within
    /// [`SHEET_TOL`] of its scale, or [`SHEET_RATIO`] times smaller than on
    /// the other sheet (near band edges both values are small).
    fn regular_sheet(&self, z: C) -> Option<Sheet> {
        let pz = self.p().eval(z);
        let rz = self.root_part(SheetPoint::plus(z));
        let scale = eval_scale(self.p(), z) + rz.norm();
        let (vp, vm) = ((pz + rz).norm(), (pz - rz).norm());
        if vp <= SHEET_TOL * scale || vp <= SHEET_RATIO * vm {
            Some(Sheet::Plus)
        } else if vm <= SHEET_TOL * scale || vm <= SHEET_RATIO * vp {
            Some(Sheet::Minus)
        } else {
            None
        }
    }

    /// Classification of every root of `a`.
    fn root_classes(&self) -> Result<Vec<PoleInfo>> {
        if self.a().is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let rl = roots(self.a())?;
        let set = self.set();
        let mut out = Vec::new();
        for (z, mult) in rl.roots {
            let snap = set.branch_points().iter().copied().find(|b| (z - b).norm() <= BRANCH_MATCH * (1.0 + b.norm()));
            if let Some(b) = snap {
                let vanishing_p = self.p().eval(b).norm() <= SHEET_TOL * (eval_scale(self.p(), b) + 1.0);
                if vanishing_p {
                    out.push(PoleInfo { point: b, mult, kind: RootKind::Branch { order: 2 * mult - 1, vanishing_p } });
                    continue;
                }
                // Close to the edge but p does not vanish: an ordinary pole
                // unless neither sheet is regular.
                match self.regular_sheet(z) {
                    Some(reg) if mult == 1 => {
                        out.push(PoleInfo { point: z, mult, kind: RootKind::Pole { sheet: reg.flip() } })
                    }
                    _ => out.push(PoleInfo { point: b, mult, kind: RootKind::Branch { order: 2 * mult, vanishing_p } }),
                }
                continue;
            }
            let kind = match self.regular_sheet(z) {
                Some(reg) => RootKind::Pole { sheet: reg.flip() },
                None => RootKind::BothSheets,
            };
            out.push(PoleInfo { point: z, mult, kind });
        }
        Ok(out)
    }

    /// Eigenvalues (sheet `+` poles) and resonances (sheet `-` poles and
    /// band-edge singularities). Fails when a root is polar on both sheets.
    fn poles(&self) -> Result<PoleReport> {
        let classes = self.root_classes()?;
        let setting = self.set().setting();
        let mut config = SingularityConfig::empty(setting);
        let mut branch = Vec::new();
        for pi in &classes {
            match pi.kind {
                RootKind::Pole { sheet: Sheet::Plus } => {
                    for _ in 0..pi.mult {
                        config.eigenvalues.push(canonical_point(self.set(), pi.point));
                    }
                }
                RootKind::Pole { sheet: Sheet::Minus } => {
                    config.resonances.push(Resonance { point: canonical_point(self.set(), pi.point), mult: pi.mult });
                }
                RootKind::Branch { vanishing_p, .. } => {
                    branch.push(pi.point);
                    if vanishing_p {
                        config.resonances.push(Resonance { point: pi.point, mult: pi.mult });
                    } else {
                        config.eigenvalues.push(pi.point);
                    }
                }
                RootKind::BothSheets => {
                    return Err(Error::Invariant(format!("(2a): both sheets are polar over {}", pi.point)));
                }
            }
        }
        let inf_plus = self.eval_at_infinity(Sheet::Plus, 0).leading_power > 0;
        let inf_minus = self.eval_at_infinity(Sheet::Minus, 0).leading_power > 0;
        Ok(PoleReport {
            config: config.normalized(),
            poles: classes,
            branch_point_singularities: branch,
            infinity_plus_pole: inf_plus,
            infinity_minus_pole: inf_minus,
        })
    }

    /// Residue in `z` at a simple pole.
    fn residue_at(&self, pt: SheetPoint) -> Result<C> {
        let a = self.a();
        let z = pt.z;
        if self.set().is_branch_point(z, crate::finitegap::BRANCH_SNAP) {
            return Err(Error::Domain(format!("{z} is a branch point; no residue in z")));
        }
        let ascale = eval_scale(a, z);
        if a.eval(z).norm() > 1e-10 * ascale {
            return Err(Error::Domain(format!("{z} is not a pole")));
        }
        let da = a.derivative().eval(z);
        if da.norm() <= 1e-10 * ascale {
            return Err(Error::Domain(format!("pole at {z} is not simple")));
        }
        let num = self.numerator(pt);
        let nscale = self.p().eval(z).norm() + self.root_part(pt).norm();
        if num.norm() <= SHEET_TOL * nscale {
            return Err(Error::Domain(format!("{z} is regular on sheet {}", pt.sheet.symbol())));
        }
        Ok(num / da)
    }

    /// Equal-degree analysis and degree classification.
    fn verify_equal_degree(&self) -> EqualDegreeReport {
        let set = self.set();
        let l = set.l();
        let deg_a = self.a().degree();
        let deg_p = self.p().degree();
        let mut failures = Vec::new();
        let mut deg_m = 0usize;
        let mut gap_poles = vec![0usize; l + 2];
        match self.root_classes() {
            Ok(classes) => {
                for pi in classes {
                    match pi.kind {
                        RootKind::Pole { .. } => {
                            deg_m += pi.mult;
                            if let Some(g) = set.gap_of(set.coordinate(pi.point)) {
                                if set.on_curve(pi.point, 1e-8) {
                                    gap_poles[g.index] += pi.mult;
                                }
                            }
                        }
                        RootKind::Branch { order, .. } => {
                            deg_m += order;
                            if order > 1 {
                                failures.push(format!("(2b): pole of order {order} at the band edge {}", pi.point));
                            }
                            if let Some(g) = set.gap_of(set.coordinate(pi.point)) {
                                gap_poles[g.index] += pi.mult;
                            }
                        }
                        RootKind::BothSheets => {
                            deg_m += 2 * pi.mult;
                            failures.push(format!("(2a): both sheets are polar over {}", pi.point));
                        }
                    }
                }
            }
            Err(e) => failures.push(format!("roots: {e}")),
        }
        let lp = self.eval_at_infinity(Sheet::Plus, 0).leading_power;
        let lm = self.eval_at_infinity(Sheet::Minus, 0).leading_power;
        let infinity_plus_pole = lp > 0;
        let infinity_minus_pole = lm > 0;
        deg_m += lp.max(0) as usize + lm.max(0) as usize;
        if infinity_plus_pole || infinity_minus_pole {
            failures.push(format!("(2c): pole at {}", if infinity_plus_pole { "∞₊" } else { "∞₋" }));
        }
        let one_per_gap = set.bounded_gaps().iter().all(|g| gap_poles[g.index] == 1);
        let minimal = deg_a == l
            && one_per_gap
            && match set.setting() {
                Setting::Line => infinity_minus_pole && deg_m == l + 1,
                Setting::Circle => deg_m == l && self.root_power() == 0,
            };
        let equal = deg_m == deg_a;
        let s = match set.setting() {
            Setting::Line if equal && deg_a > l => Some(deg_a - l),
            Setting::Line if minimal => Some(0),
            Setting::Circle if equal && deg_a >= l && (deg_a - l).is_multiple_of(2) => Some((deg_a - l) / 2),
            _ => None,
        };
        if let (Setting::Circle, Some(s)) = (set.setting(), s) {
            if s != self.root_power() {
                failures.push(format!("order: z-power {} differs from (Deg a - l)/2 = {s}", self.root_power()));
            }
        }
        if s.is_none() && !minimal {
            failures.push(format!("order: deg m = {deg_m} and Deg a = {deg_a} do not classify"));
        }
        EqualDegreeReport { l, deg_a, deg_p, deg_m, infinity_plus_pole, infinity_minus_pole, minimal, s, failures }
    }
}

fn canonical_point(set: &FiniteGapSet, z: C) -> C {
    match set.setting() {
        Setting::Line if z.im.abs() <= 1e-9 * (1.0 + z.re.abs()) => C::new(z.re, 0.0),
        Setting::Circle if (z.norm() - 1.0).abs() <= 1e-9 => z / z.norm(),
        _ => z,
    }
}

pub(crate) fn eval_scale(p: &Poly, z: C) -> f64 {
    let r = z.norm();
    p.coeffs().iter().enumerate().map(|(j, c)| c.norm() * r.powi(j as i32)).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Taylor coefficients of the numerator `p + σ z^k √R` at a non-branch point.
fn numerator_taylor<F: AlgebraicFunction + ?Sized>(f: &F, pt: SheetPoint, order: usize) -> Result<Vec<C>> {
    let n = order + 1;
    let sq = f.set().sqrt_r_taylor(pt.z, order)?;
    let zk = Poly::monomial(f.root_power(), C::new(1.0, 0.0)).taylor_at(pt.z, order);
    let rp = series_mul(&zk, &sq, n);
    let tp = f.p().taylor_at(pt.z, order);
    Ok((0..n).map(|j| tp[j] + rp[j] * pt.sheet.sign()).collect())
}

/// Raw Laurent coefficients of `f` at `∞` on a sheet, for powers
/// `top, top-1, …` (`count` of them).
pub(crate) fn infinity_series<F: AlgebraicFunction + ?Sized>(f: &F, sheet: Sheet, top: i64, count: usize) -> Vec<C> {
    let p = f.p();
    let a = f.a();
    let h = f.set().half_degree() + f.root_power();
    let t = p.degree().max(h);
    let da = a.degree();
    // g(w) = N(w)/A(w) with N = Σ n_j w^j the numerator scaled by z^{-t}.
    let lead_shift = t as i64 - da as i64;
    let first = (lead_shift - top).max(0) as usize;
    let need = first + count;
    let s = f.set().sqrt_r_at_infinity(need + 1);
    let num: Vec<C> = (0..need)
        .map(|j| {
            let pj = if j <= t { p.coeff(t - j) } else { C::new(0.0, 0.0) };
            // z^k √R contributes s_i z^{h-i}; power t-j means i = j - (t-h).
            let sj = (j + h).checked_sub(t).and_then(|i| s.get(i).copied()).unwrap_or(C::new(0.0, 0.0));
            pj + sj * sheet.sign()
        })
        .collect();
    let den: Vec<C> = (0..need).map(|j| if j <= da { a.coeff(da - j) } else { C::new(0.0, 0.0) }).collect();
    let g = series_div(&num, &den, need).expect("leading coefficient of a is nonzero");
    (0..count)
        .map(|i| {
            // power top - i corresponds to g index lead_shift - (top - i).
            let j = lead_shift - top + i as i64;
            if j < 0 {
                C::new(0.0, 0.0)
            } else {
                g[j as usize]
            }
        })
        .collect()
}

/// `m(z) = (p(z) + √R(z))/a(z)` over a line set.
#[derive(Clone, Debug)]
pub struct AlgebraicHerglotz {
    set: FiniteGapSet,
    p: Poly,
    a: Poly,
}

impl AlgebraicHerglotz {
    /// Wraps `(p, a)` without checking any invariant beyond the setting.
    pub fn new(set: FiniteGapSet, p: Poly, a: Poly) -> Result<Self> {
        if set.setting() != Setting::Line {
            return Err(Error::Domain("m-functions live over line sets".into()));
        }
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(AlgebraicHerglotz { set, p, a })
    }

    /// Perturbation order `Deg a - l`, or `None` below `l`.
    pub fn order(&self) -> Option<usize> {
        self.a.degree().checked_sub(self.set.l())
    }

    /// Checks `m ∼ -1/z` at `∞₊` within `tol`.
    pub fn check_normalization(&self, tol: f64) -> Result<()> {
        let c = infinity_series(self, Sheet::Plus, 1, 3);
        let scale = (self.p.norm() + 1.0) / self.a.leading().norm();
        if c[0].norm() > tol * scale || c[1].norm() > tol * scale || (c[2] + 1.0).norm() > tol {
            return Err(Error::InvalidFunction(format!("expected m ~ -1/z at infinity, leading coefficients {:?}", c)));
        }
        Ok(())
    }
}

impl AlgebraicFunction for AlgebraicHerglotz {
    fn set(&self) -> &FiniteGapSet {
        &self.set
    }
    fn p(&self) -> &Poly {
        &self.p
    }
    fn a(&self) -> &Poly {
        &self.a
    }
    fn root_power(&self) -> usize {
        0
    }
}

/// `F(z) = (p(z) + z^s√R(z))/a(z)` over a circle set.
#[derive(Clone, Debug)]
pub struct AlgebraicCaratheodory {
    set: FiniteGapSet,
    p: Poly,
    a: Poly,
    s: usize,
}

impl AlgebraicCaratheodory {
    pub fn new(set: FiniteGapSet, p: Poly, a: Poly, s: usize) -> Result<Self> {
        if set.setting() != Setting::Circle {
            return Err(Error::Domain("Carathéodory functions live over circle sets".into()));
        }
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if a.coeff(0).norm() <= 1e-14 * a.norm() {
            return Err(Error::InvalidFunction("a(0) = 0".into()));
        }
        Ok(AlgebraicCaratheodory { set, p, a, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// `F(0₊)`.
    pub fn value_at_zero(&self) -> C {
        self.eval(SheetPoint::plus(C::new(0.0, 0.0))).finite().unwrap_or(C::new(f64::NAN, f64::NAN))
    }

    /// Taylor coefficients of `F` at `0₊`, orders `0..=order`.
    pub fn taylor_at_zero(&self, order: usize) -> Result<Vec<C>> {
        let z0 = SheetPoint::plus(C::new(0.0, 0.0));
        let num = numerator_taylor(self, z0, order)?;
        let den = self.a.taylor_at(z0.z, order);
        series_div(&num, &den, order + 1)
    }
}

impl AlgebraicFunction for AlgebraicCaratheodory {
    fn set(&self) -> &FiniteGapSet {
        &self.set
    }
    fn p(&self) -> &Poly {
        &self.p
    }
    fn a(&self) -> &Poly {
        &self.a
    }
    fn root_power(&self) -> usize {
        self.s
    }
}

/// Interpolation nodes: `(p - z^k√R)(E₊) = 0` at eigenvalues and
/// `(p + z^k√R)^{(j)}(R₊) = 0`, `j < n`, at resonances.
fn interpolation_nodes(set: &FiniteGapSet, cfg: &SingularityConfig, k: usize) -> Result<Vec<HermiteNode>> {
    let mut nodes = Vec::new();
    let one = C::new(1.0, 0.0);
    for &e in &cfg.eigenvalues {
        let v = e.powi(k as i32) * set.sqrt_r(SheetPoint::plus(e));
        nodes.push(HermiteNode { point: e, multiplicity: 1, targets: vec![v] });
    }
    for r in &cfg.resonances {
        let order = r.mult - 1;
        let sq = if set.is_branch_point(r.point, crate::finitegap::POINT_TOL) {
            vec![C::new(0.0, 0.0)]
        } else {
            set.sqrt_r_taylor(r.point, order)?
        };
        let zk = Poly::monomial(k, one).taylor_at(r.point, order);
        let t = series_mul(&zk, &sq, r.mult);
        nodes.push(HermiteNode { point: r.point, multiplicity: r.mult, targets: t.iter().map(|c| -c).collect() });
    }
    Ok(nodes)
}

/// The m-function of the unique Jacobi operator with the given eigenvalues
/// and resonances.
pub fn build_m(set: &FiniteGapSet, config: &SingularityConfig) -> Result<AlgebraicHerglotz> {
    if set.setting() != Setting::Line {
        return Err(Error::Domain("build_m needs a line set".into()));
    }
    validate(set, config)?;
    let cfg = config.normalized();
    let l = set.l();
    let n = cfg.k() + cfg.n();
    let s_ser = set.sqrt_r_at_infinity(l + 3);
    // Coefficient of z^j in the √R series at ∞₊ (j ≤ l+1).
    let sc = |j: i64| -> C {
        let i = l as i64 + 1 - j;
        if i < 0 {
            C::new(0.0, 0.0)
        } else {
            s_ser.get(i as usize).copied().unwrap_or(C::new(0.0, 0.0))
        }
    };
    let one = C::new(1.0, 0.0);
    let (offset, free) = if n == l {
        (&Poly::monomial(l + 1, -one) - &Poly::monomial(l, sc(l as i64)), l)
    } else if n == l + 1 {
        (Poly::monomial(l + 1, -one), l + 1)
    } else {
        (Poly::zero(), n)
    };
    let basis: Vec<Poly> = (0..free).map(|j| Poly::monomial(j, one)).collect();
    let nodes = interpolation_nodes(set, &cfg, 0)?;
    let (x, _cond) = hermite_solve_basis(&nodes, &basis, &offset)?;
    let p = &offset + &Poly::new(x);
    let lead = if n >= 1 { p.coeff(n - 1) } else { C::new(0.0, 0.0) } + sc(n as i64 - 1);
    let a_const = -lead;
    if a_const.im.abs() > 1e-8 * a_const.norm() {
        return Err(Error::Invariant(format!("normalizer {a_const} is not real")));
    }
    let a = Poly::from_roots(&cfg.points()).scale(C::new(a_const.re, 0.0)).into_real(1e-8)?;
    let p = p.into_real(1e-8)?;
    let m = AlgebraicHerglotz::new(set.clone(), p, a)?;
    let (lo, hi) = set.band(1);
    let sign = m.a.eval(C::new(0.5 * (lo + hi), 0.0)).re.signum();
    if sign != f64::from(set.sign_profile().band(1)) {
        return Err(Error::Invariant("constructed a has the wrong sign on the first band".into()));
    }
    Ok(m)
}

/// Independent construction of `build_m` through the partial-fraction
/// representation, with `a = d/π` taken from the spectral measure.
pub fn build_m_partial_fractions(set: &FiniteGapSet, config: &SingularityConfig) -> Result<AlgebraicHerglotz> {
    let measure = build_measure(set, config)?;
    let cfg = config.normalized();
    let a = measure.d().scale(C::new(1.0 / PI, 0.0));
    let l = set.l();
    let n = cfg.k() + cfg.n();
    let s_ser = set.sqrt_r_at_infinity(1);
    let one = C::new(1.0, 0.0);
    let q = if n >= l + 2 {
        Poly::zero()
    } else if n == l + 1 {
        Poly::monomial(l + 1, one)
    } else {
        &Poly::monomial(l + 1, one) + &Poly::monomial(l, s_ser[1])
    };
    let a_lead = a.leading();
    // a divided by (z - x)^j, built from the remaining factors.
    let cofactor = |x: C, j: usize| -> Poly {
        let mut pts = cfg.points();
        for _ in 0..j {
            let i = pts
                .iter()
                .position(|y| (*y - x).norm() <= crate::finitegap::POINT_TOL)
                .expect("point of the configuration");
            pts.remove(i);
        }
        Poly::from_roots(&pts).scale(a_lead)
    };
    let mut p = -&q;
    let da = a.derivative();
    for &e in &cfg.eigenvalues {
        let c = (set.sqrt_r(SheetPoint::plus(e)) + q.eval(e)) / da.eval(e);
        p = &p + &cofactor(e, 1).scale(c);
    }
    for r in &cfg.resonances {
        let nj = r.mult;
        let b = cofactor(r.point, nj);
        let sq = if set.is_branch_point(r.point, crate::finitegap::POINT_TOL) {
            vec![C::new(0.0, 0.0)]
        } else {
            set.sqrt_r_taylor(r.point, nj - 1)?
        };
        let tq = q.taylor_at(r.point, nj - 1);
        let num: Vec<C> = (0..nj).map(|j| sq[j] - tq[j]).collect();
        let g = series_div(&num, &b.taylor_at(r.point, nj - 1), nj)?;
        for sj in 1..=nj {
            let d = g[nj - sj];
            p = &p - &cofactor(r.point, sj).scale(d);
        }
    }
    AlgebraicHerglotz::new(set.clone(), p.into_real(1e-8)?, a)
}

/// The Carathéodory function of the unique CMV operator with the given
/// eigenvalues and resonances, normalized by `F(0₊) = 1`.
pub fn build_f(set: &FiniteGapSet, config: &SingularityConfig) -> Result<AlgebraicCaratheodory> {
    if set.setting() != Setting::Circle {
        return Err(Error::Domain("build_f needs a circle set".into()));
    }
    let s = validate(set, config)?;
    let cfg = config.normalized();
    let l = set.l();
    let n = l + 2 * s;
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let a0 = Poly::from_roots(&cfg.points());
    let t = set.sqrt_r_at_infinity(0)[0];
    let sq0 = set.sqrt_r(SheetPoint::plus(zero));
    if n == 0 {
        let p = Poly::constant(-(sq0 + t) / 2.0);
        return AlgebraicCaratheodory::new(set.clone(), p, Poly::constant((sq0 - t) / 2.0), 0);
    }
    // F(0₊) = 1 pins p(0); F(∞₊) = -1 pins the z^n coefficient.
    let offset = if s == 0 { -&(&Poly::constant(sq0) + &Poly::monomial(n, t)) } else { Poly::zero() };
    let mut basis = vec![&Poly::constant(a0.coeff(0)) - &Poly::monomial(n, one)];
    basis.extend((1..n).map(|j| Poly::monomial(j, one)));
    let nodes = interpolation_nodes(set, &cfg, s)?;
    let (x, _cond) = hermite_solve_basis(&nodes, &basis, &offset)?;
    let mut p = offset.clone();
    for (b, c) in basis.iter().zip(&x) {
        p = &p + &b.scale(*c);
    }
    let a = a0.scale(x[0]);
    AlgebraicCaratheodory::new(set.clone(), p, a, s)
}
