//! Coefficient stripping and its inverse for m-functions (Jacobi) and
//! Carathéodory functions (CMV), in the rational representation, plus full
//! recovery of the coefficient prefix and the tail's Dirichlet data.

use crate::config::{DirichletPoint, SingularityConfig};
use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, Sheet, SheetPoint};
use crate::mfunc::{
    build_f, build_m, infinity_series, AlgebraicCaratheodory, AlgebraicFunction, AlgebraicHerglotz, RootKind,
};
use crate::poly::{divide_exact_deg, roots, Poly};
use num_complex::Complex64 as C;

/// Relative size allowed for coefficients dropped by degree truncation.
const TRUNC_TOL: f64 = 1e-6;
/// Exact-division tolerance along strip/dress chains, where rounding from
/// earlier steps is carried in the coefficients.
pub const CHAIN_DIVIDE_TOL: f64 = 1e-7;
/// Relative tolerance for recognizing torus-continuation coefficients.
const TORUS_TOL: f64 = 1e-9;

/// How the first Verblunsky coefficient relates to `F'(0₊)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaConvention {
    /// `α₀ = F'(0₊)/2`.
    Identity,
    /// `α₀ = conj(F'(0₊)/2)`.
    Conjugate,
}

/// Convention matching the Szegő recursion on moments `∫e^{-ikθ}dμ`.
pub const ALPHA_CONVENTION: AlphaConvention = AlphaConvention::Identity;

impl AlphaConvention {
    fn apply(self, g: C) -> C {
        match self {
            AlphaConvention::Identity => g,
            AlphaConvention::Conjugate => g.conj(),
        }
    }
}

/// Leading Jacobi coefficients and the tail's Dirichlet data.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiPrefix {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub tail: Vec<DirichletPoint>,
}

/// Leading Verblunsky coefficients and the tail's Dirichlet data.
#[derive(Clone, Debug, PartialEq)]
pub struct VerblunskyPrefix {
    pub alpha: Vec<C>,
    pub tail: Vec<DirichletPoint>,
}

#[derive(Clone, Debug)]
pub struct RecoveredJacobi {
    pub prefix: JacobiPrefix,
    /// `Deg a - l` of the input.
    pub s: usize,
    pub minimal: AlgebraicHerglotz,
}

#[derive(Clone, Debug)]
pub struct RecoveredCmv {
    pub prefix: VerblunskyPrefix,
    pub s: usize,
    pub minimal: AlgebraicCaratheodory,
}

/// `Deg a` expected after one Jacobi strip from `Deg a = l + s`.
pub fn stripped_degree(l: usize, s: usize) -> usize {
    if s <= 2 {
        l
    } else {
        l + s - 2
    }
}

/// `(a₁, b₁, m⁽¹⁾)` with `a₁² m⁽¹⁾ = b₁ - z - 1/m`.
pub fn strip_jacobi(m: &AlgebraicHerglotz) -> Result<(f64, f64, AlgebraicHerglotz)> {
    m.check_normalization(1e-6)?;
    let m = &normalized_at_infinity(m)?;
    let set = m.set();
    let l = set.l();
    let s = m.order().ok_or_else(|| Error::InvalidFunction("Deg a is below l".into()))?;
    let r = set.r_polynomial();
    let n1 = stripped_degree(l, s);
    let h = divide_exact_deg(&(&(m.p() * m.p()) - r), m.a(), n1, CHAIN_DIVIDE_TOL)?;
    // m = h/(p - √R) at ∞₊; the moments come from requiring p₁ + √R, with
    // p₁ = (b₁ - z)h - p, to vanish above z^{n₁-1} and to equal -a₁²h at
    // z^{n₁-1}. The leading coefficient of h, unlike that of a, stays O(1).
    let half = set.half_degree();
    let sq = set.sqrt_r_at_infinity(half + 3);
    let minus = |k: i64| -> C {
        let pk = if k >= 0 { m.p().coeff(k as usize) } else { C::new(0.0, 0.0) };
        let rk = usize::try_from(half as i64 - k).ok().and_then(|i| sq.get(i).copied()).unwrap_or_default();
        pk - rk
    };
    let hc = |k: i64| if k >= 0 { h.coeff(k as usize) } else { C::new(0.0, 0.0) };
    let top = n1 as i64;
    let lead = hc(top);
    let b1 = ((hc(top - 1) + minus(top)) / lead).re;
    let a1sq = ((hc(top - 2) + minus(top - 1) - hc(top - 1) * b1) / lead).re;
    if !(a1sq > 0.0) {
        return Err(Error::InvalidFunction(format!("a₁² = {a1sq} is not positive")));
    }
    let p1 = &(&Poly::from_real(&[b1, -1.0]) * &h) - m.p();
    let p1 = p1.truncate_checked(n1.saturating_sub(1).max(l + 1), TRUNC_TOL, "strip numerator")?;
    let a1p = h.scale(C::new(a1sq, 0.0));
    let m1 = AlgebraicHerglotz::new(set.clone(), p1.into_real(1e-8)?, a1p.into_real(1e-8)?)?;
    Ok((a1sq.sqrt(), b1, normalized_at_infinity(&m1)?))
}

/// Resets the top coefficients of `p` so that `p + √R` cancels at `∞₊` and
/// `m ∼ -1/z` holds exactly. With a small leading coefficient of `a` the
/// Laurent coefficients amplify any mismatch there by powers of `1/a_n`.
fn normalized_at_infinity(m: &AlgebraicHerglotz) -> Result<AlgebraicHerglotz> {
    let set = m.set();
    let h = set.half_degree();
    let a = m.a();
    let n = a.degree();
    let sq = set.sqrt_r_at_infinity(h + 1);
    let r = |k: usize| if k <= h { sq[h - k] } else { C::new(0.0, 0.0) };
    let top = m.p().degree().max(h);
    let mut coeffs: Vec<C> = (0..=top).map(|k| m.p().coeff(k)).collect();
    let scale = m.p().norm() + a.norm();
    let first = if n == 0 { 0 } else { n - 1 };
    for (k, coeff) in coeffs.iter_mut().enumerate().skip(first) {
        let want = if k + 1 == n { -r(k) - a.leading() } else { -r(k) };
        if (*coeff - want).norm() > TRUNC_TOL * scale {
            return Err(Error::InvalidFunction(format!(
                "p does not match the normalization at ∞₊ (power {k}: {coeff} vs {want})"
            )));
        }
        *coeff = want;
    }
    let p = Poly::new(coeffs).into_real(1e-8)?;
    AlgebraicHerglotz::new(set.clone(), p, a.clone())
}

/// Coefficients `(a₁, b₁)` that keep `1/(b₁ - z - a₁² m⁽¹⁾)` minimal, read
/// from `m⁽¹⁾ ∼ k₁z + k₀` at `∞₋`.
pub fn torus_continuation_jacobi(m1: &AlgebraicHerglotz) -> Result<(f64, f64)> {
    let c = infinity_series(m1, Sheet::Minus, 1, 2);
    let (k1, k0) = (c[0].re, c[1].re);
    if !(k1 < 0.0) {
        return Err(Error::InvalidFunction(format!("no pole with negative residue at ∞₋ (k₁ = {k1})")));
    }
    Ok(((-1.0 / k1).sqrt(), -k0 / k1))
}

/// `m = 1/(b₁ - z - a₁² m⁽¹⁾)`, rationalized.
pub fn dress_jacobi(m1: &AlgebraicHerglotz, a1: f64, b1: f64) -> Result<AlgebraicHerglotz> {
    if !(a1 > 0.0) || !b1.is_finite() {
        return Err(Error::Domain(format!("dressing needs a₁ > 0 and finite b₁, got ({a1}, {b1})")));
    }
    let set = m1.set();
    let l = set.l();
    let s1 = m1.order().ok_or_else(|| Error::InvalidFunction("Deg a is below l".into()))?;
    let s_new = if s1 == 0 {
        let (ta, tb) = torus_continuation_jacobi(m1)?;
        if (a1 - ta).abs() > TORUS_TOL * ta.max(1.0) {
            2
        } else if (b1 - tb).abs() > TORUS_TOL * tb.abs().max(1.0) {
            1
        } else {
            0
        }
    } else {
        s1 + 2
    };
    let a1sq = a1 * a1;
    let d = &(&Poly::from_real(&[b1, -1.0]) * m1.a()) - &m1.p().scale(C::new(a1sq, 0.0));
    let num = &(&d * &d) - &set.r_polynomial().scale(C::new(a1sq * a1sq, 0.0));
    let n = l + s_new;
    let a_new = divide_exact_deg(&num, m1.a(), n, CHAIN_DIVIDE_TOL)?;
    let inv = C::new(1.0 / a1sq, 0.0);
    let a = a_new.scale(inv);
    let p = d.scale(inv).truncate_checked((l + 1).max(n.saturating_sub(1)), TRUNC_TOL, "dress numerator")?;
    normalized_at_infinity(&AlgebraicHerglotz::new(set.clone(), p.into_real(1e-8)?, a.into_real(1e-8)?)?)
}

/// `(α₀, F⁽¹⁾)` by the inverse Schur step, with the default convention.
pub fn strip_cmv(f: &AlgebraicCaratheodory) -> Result<(C, AlgebraicCaratheodory)> {
    strip_cmv_with(f, ALPHA_CONVENTION)
}

pub fn strip_cmv_with(f: &AlgebraicCaratheodory, conv: AlphaConvention) -> Result<(C, AlgebraicCaratheodory)> {
    let set = f.set();
    let l = set.l();
    let s = f.s();
    let t = f.taylor_at_zero(1)?;
    if (t[0] - 1.0).norm() > 1e-6 {
        return Err(Error::InvalidFunction(format!("F(0₊) = {} instead of 1", t[0])));
    }
    let g = t[1] / 2.0;
    if !(g.norm() < 1.0) {
        return Err(Error::InvalidFunction(format!("|α₀| = {} is not below 1", g.norm())));
    }
    let one = C::new(1.0, 0.0);
    let z = Poly::monomial(1, one);
    let (p, a) = (f.p(), f.a());
    let y2 = set.r_polynomial().shift_up(2 * s);
    let pa = p + a;
    let pm = p - a;
    let xn = &(&z.scale(one - g) * &pa) + &pm.scale(one - g.conj());
    let xd = &(&z.scale(one + g) * &pa) - &pm.scale(one + g.conj());
    let u = &z.scale(one - g) + &Poly::constant(one - g.conj());
    let v = &z.scale(one + g) - &Poly::constant(one + g.conj());
    let x = &(&xn * &xd) - &(&(&u * &v) * &y2);
    let zz = &(&xd * &xd) - &(&(&v * &v) * &y2);
    let j = if s >= 1 { 2 } else { 1 };
    let s1 = s.saturating_sub(1);
    let c = 4.0 * (1.0 - g.norm_sqr());
    let den = a.shift_up(j).scale(C::new(c, 0.0));
    let n1 = l + 2 * s1;
    let p1 = divide_exact_deg(&x, &den, n1, CHAIN_DIVIDE_TOL)?;
    let a1 = divide_exact_deg(&zz, &den, n1, CHAIN_DIVIDE_TOL)?;
    let f1 = AlgebraicCaratheodory::new(set.clone(), p1, a1, s1)?;
    Ok((conv.apply(g), f1))
}

/// The first coefficient keeping the dressed function minimal: `γ` with
/// `F⁽¹⁾(0₋) = (γ̄ - 1)/(γ̄ + 1)`.
pub fn torus_continuation_cmv(f1: &AlgebraicCaratheodory) -> Result<C> {
    let v = f1
        .eval(SheetPoint::minus(C::new(0.0, 0.0)))
        .finite()
        .ok_or_else(|| Error::InvalidFunction("F has a pole at 0₋".into()))?;
    let one = C::new(1.0, 0.0);
    Ok(((one + v) / (one - v)).conj())
}

/// Inverse of [`strip_cmv`] with the default convention.
pub fn dress_cmv(f1: &AlgebraicCaratheodory, alpha: C) -> Result<AlgebraicCaratheodory> {
    dress_cmv_with(f1, alpha, ALPHA_CONVENTION)
}

pub fn dress_cmv_with(f1: &AlgebraicCaratheodory, alpha: C, conv: AlphaConvention) -> Result<AlgebraicCaratheodory> {
    if !(alpha.norm() < 1.0) {
        return Err(Error::Domain(format!("|α₀| = {} is not below 1", alpha.norm())));
    }
    let g = conv.apply(alpha);
    let set = f1.set();
    let l = set.l();
    let k = f1.s();
    let torus = k == 0 && f1.a().degree() == l && (g - torus_continuation_cmv(f1)?).norm() <= TORUS_TOL;
    let one = C::new(1.0, 0.0);
    let z = Poly::monomial(1, one);
    let (p1, a1) = (f1.p(), f1.a());
    let y2 = set.r_polynomial().shift_up(2 * k);
    let u = &Poly::constant(one + g.conj()) + &z.scale(one + g);
    let v = &Poly::constant(one + g.conj()) - &z.scale(one + g);
    let xn = &(&u * p1) + &(&(&Poly::constant(one - g.conj()) - &z.scale(one - g)) * a1);
    let xd = &(&v * p1) + &(&(&Poly::constant(one - g.conj()) + &z.scale(one - g)) * a1);
    let x = &(&xn * &xd) - &(&(&u * &v) * &y2);
    let zz = &(&xd * &xd) - &(&(&v * &v) * &y2);
    let c = C::new(4.0 * (1.0 - g.norm_sqr()), 0.0);
    let (den, s_new) = if torus { (a1.shift_up(1).scale(c), 0) } else { (a1.scale(c), k + 1) };
    let n = l + 2 * s_new;
    let p = divide_exact_deg(&x, &den, n, CHAIN_DIVIDE_TOL)?;
    let a = divide_exact_deg(&zz, &den, n, CHAIN_DIVIDE_TOL)?;
    AlgebraicCaratheodory::new(set.clone(), p, a, s_new)
}

/// One pole per gap of a minimal function, as Dirichlet data.
pub fn dirichlet_data<F: AlgebraicFunction>(f: &F) -> Result<Vec<DirichletPoint>> {
    let set = f.set();
    let mut out = Vec::new();
    for pi in f.root_classes()? {
        let sheet = match pi.kind {
            RootKind::Pole { sheet } => sheet,
            RootKind::Branch { vanishing_p: true, .. } => Sheet::Minus,
            _ => {
                return Err(Error::InvalidFunction(format!("singularity at {} is not a Dirichlet pole", pi.point)));
            }
        };
        if pi.mult != 1 || !set.on_curve(pi.point, 1e-8) {
            return Err(Error::InvalidFunction(format!("pole at {} is not a simple real pole", pi.point)));
        }
        let (gap, pos) = locate_pole(set, pi.point)?;
        out.push(DirichletPoint { gap: gap.index, pos, sheet });
    }
    out.sort_by_key(|d| d.gap);
    let gaps = set.bounded_gaps();
    if out.len() != gaps.len() || out.iter().zip(&gaps).any(|(d, g)| d.gap != g.index) {
        return Err(Error::InvalidFunction("poles are not one per gap".into()));
    }
    Ok(out)
}

/// Gap of a pole; a pole within `EDGE_SLACK` inside a band is moved to the edge.
fn locate_pole(set: &FiniteGapSet, z: C) -> Result<(crate::finitegap::Gap, f64)> {
    const EDGE_SLACK: f64 = 1e-6;
    let x = set.coordinate(z);
    if let Some(found) = set.locate_in_gap(x) {
        return Ok(found);
    }
    set.branch_points()
        .iter()
        .filter(|b| (*b - z).norm() <= EDGE_SLACK)
        .find_map(|b| set.locate_in_gap(set.coordinate(*b)))
        .ok_or_else(|| Error::InvalidFunction(format!("pole at {z} lies on a band")))
}

fn ensure_minimal<F: AlgebraicFunction>(f: &F) -> Result<()> {
    let rep = f.verify_equal_degree();
    if !rep.minimal {
        return Err(Error::Invariant(format!(
            "minimality signatures fail: Deg a = {}, deg m = {}, ∞₋ pole {}, {:?}",
            rep.deg_a, rep.deg_m, rep.infinity_minus_pole, rep.failures
        )));
    }
    Ok(())
}

/// Strips `s = Deg a - l` times, reads the tail from the minimal function
/// reached, then strips twice more to confirm the minimal class is kept.
///
/// A strip from `Deg a > l` must lower `Deg a`; once at `l` it must stay.
pub fn recover_jacobi(m: &AlgebraicHerglotz, max_steps: usize) -> Result<RecoveredJacobi> {
    let l = m.set().l();
    let s = m.order().ok_or_else(|| Error::InvalidFunction("Deg a is below l".into()))?;
    if s > max_steps {
        return Err(Error::Domain(format!("perturbation order {s} exceeds max_steps {max_steps}")));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let mut cur = m.clone();
    for _ in 0..s {
        let before = cur.a().degree();
        let (a1, b1, next) = strip_jacobi(&cur)?;
        check_ladder(before, next.a().degree(), l)?;
        a.push(a1);
        b.push(b1);
        cur = next;
    }
    ensure_minimal(&cur)?;
    let mut probe = cur.clone();
    for _ in 0..2 {
        probe = strip_jacobi(&probe)?.2;
        ensure_minimal(&probe)?;
    }
    let tail = dirichlet_data(&cur)?;
    Ok(RecoveredJacobi { prefix: JacobiPrefix { a, b, tail }, s, minimal: cur })
}

fn check_ladder(before: usize, after: usize, l: usize) -> Result<()> {
    if (before > l && after >= before) || (before == l && after != l) {
        return Err(Error::Invariant(format!("strip took Deg a from {before} to {after} (l = {l})")));
    }
    Ok(())
}

pub fn recover_cmv(f: &AlgebraicCaratheodory, max_steps: usize) -> Result<RecoveredCmv> {
    let l = f.set().l();
    let deg = f.a().degree();
    if deg < l || (deg - l) % 2 == 1 {
        return Err(Error::InvalidFunction(format!("Deg a = {deg} does not fit l = {l}")));
    }
    let s = (deg - l) / 2;
    if s > max_steps {
        return Err(Error::Domain(format!("perturbation order {s} exceeds max_steps {max_steps}")));
    }
    let mut alpha = Vec::new();
    let mut cur = f.clone();
    for _ in 0..s {
        let before = cur.a().degree();
        let (a0, next) = strip_cmv(&cur)?;
        check_ladder(before, next.a().degree(), l)?;
        alpha.push(a0);
        cur = next;
    }
    ensure_minimal(&cur)?;
    let mut probe = cur.clone();
    for _ in 0..2 {
        probe = strip_cmv(&probe)?.1;
        ensure_minimal(&probe)?;
    }
    let tail = dirichlet_data(&cur)?;
    Ok(RecoveredCmv { prefix: VerblunskyPrefix { alpha, tail }, s, minimal: cur })
}

/// First `n` Jacobi coefficients `(a, b)` by repeated stripping.
pub fn jacobi_coefficients(m: &AlgebraicHerglotz, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut a, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut cur = m.clone();
    for _ in 0..n {
        let (a1, b1, next) = strip_jacobi(&cur)?;
        a.push(a1);
        b.push(b1);
        cur = next;
    }
    Ok((a, b))
}

/// First `n` Verblunsky coefficients by repeated stripping.
pub fn verblunsky_coefficients(f: &AlgebraicCaratheodory, n: usize) -> Result<Vec<C>> {
    let mut alpha = Vec::with_capacity(n);
    let mut cur = f.clone();
    for _ in 0..n {
        let (a0, next) = strip_cmv(&cur)?;
        alpha.push(a0);
        cur = next;
    }
    Ok(alpha)
}

/// Rebuilds the m-function from a coefficient prefix and tail data.
pub fn forward_jacobi(set: &FiniteGapSet, prefix: &JacobiPrefix) -> Result<AlgebraicHerglotz> {
    if prefix.a.len() != prefix.b.len() {
        return Err(Error::Schema("a and b prefixes differ in length".into()));
    }
    if set.setting() != Setting::Line {
        return Err(Error::Domain("Jacobi data needs a line set".into()));
    }
    let mut m = build_m(set, &SingularityConfig::from_dirichlet(set, &prefix.tail))?;
    for (&a, &b) in prefix.a.iter().zip(&prefix.b).rev() {
        m = dress_jacobi(&m, a, b)?;
    }
    Ok(m)
}

/// Rebuilds the Carathéodory function from Verblunsky coefficients and tail data.
pub fn forward_cmv(set: &FiniteGapSet, prefix: &VerblunskyPrefix) -> Result<AlgebraicCaratheodory> {
    if set.setting() != Setting::Circle {
        return Err(Error::Domain("Verblunsky data needs a circle set".into()));
    }
    let mut f = build_f(set, &SingularityConfig::from_dirichlet(set, &prefix.tail))?;
    for &al in prefix.alpha.iter().rev() {
        f = dress_cmv(&f, al)?;
    }
    Ok(f)
}

/// Minimal m-function or Carathéodory function from Dirichlet data; roots of
/// `a` are re-read to confirm the data.
pub fn minimal_from_dirichlet(set: &FiniteGapSet, data: &[DirichletPoint]) -> Result<MinimalFunction> {
    let cfg = SingularityConfig::from_dirichlet(set, data);
    let f = match set.setting() {
        Setting::Line => MinimalFunction::Line(build_m(set, &cfg)?),
        Setting::Circle => MinimalFunction::Circle(build_f(set, &cfg)?),
    };
    let n_roots = match &f {
        MinimalFunction::Line(m) => roots(m.a())?.total_multiplicity(),
        MinimalFunction::Circle(c) => roots(c.a())?.total_multiplicity(),
    };
    if n_roots != set.l() {
        return Err(Error::Invariant("minimal function has the wrong number of poles".into()));
    }
    Ok(f)
}

#[derive(Clone, Debug)]
pub enum MinimalFunction {
    Line(AlgebraicHerglotz),
    Circle(AlgebraicCaratheodory),
}
