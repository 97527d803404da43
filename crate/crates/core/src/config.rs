//! Eigenvalue/resonance configurations and their admissibility.

use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, Sheet, POINT_TOL};
use num_complex::Complex64 as C;
use std::fmt;

/// A resonance `R_j` with multiplicity `n_j ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    pub point: C,
    pub mult: usize,
}

/// Eigenvalues (real on the line, unimodular on the circle) and a resonance
/// multiset.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularityConfig {
    pub setting: Setting,
    pub eigenvalues: Vec<C>,
    pub resonances: Vec<Resonance>,
}

/// One pole of a minimal function: a gap, a coordinate inside it and a sheet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirichletPoint {
    pub gap: usize,
    pub pos: f64,
    pub sheet: Sheet,
}

impl SingularityConfig {
    pub fn empty(setting: Setting) -> Self {
        SingularityConfig { setting, eigenvalues: Vec::new(), resonances: Vec::new() }
    }

    pub fn line(eigenvalues: &[f64], resonances: &[(C, usize)]) -> Self {
        SingularityConfig {
            setting: Setting::Line,
            eigenvalues: eigenvalues.iter().map(|&x| C::new(x, 0.0)).collect(),
            resonances: resonances.iter().map(|&(point, mult)| Resonance { point, mult }).collect(),
        }
    }

    /// Circle configuration with eigenvalues given as angles.
    pub fn circle(eigen_angles: &[f64], resonances: &[(C, usize)]) -> Self {
        SingularityConfig {
            setting: Setting::Circle,
            eigenvalues: eigen_angles.iter().map(|&t| C::from_polar(1.0, t)).collect(),
            resonances: resonances.iter().map(|&(point, mult)| Resonance { point, mult }).collect(),
        }
    }

    /// Minimal-function data: sheet `+` gives an eigenvalue, sheet `-` a
    /// resonance; points on a band edge are resonances either way.
    pub fn from_dirichlet(set: &FiniteGapSet, data: &[DirichletPoint]) -> Self {
        let mut cfg = SingularityConfig::empty(set.setting());
        for d in data {
            let z = set.point(d.pos);
            if d.sheet == Sheet::Plus && !set.is_branch_point(z, POINT_TOL) {
                cfg.eigenvalues.push(z);
            } else {
                cfg.resonances.push(Resonance { point: z, mult: 1 });
            }
        }
        cfg
    }

    /// Number of eigenvalues `N`.
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Total resonance multiplicity `K`.
    pub fn k(&self) -> usize {
        self.resonances.iter().map(|r| r.mult).sum()
    }

    /// Merges coincident resonances and sorts both lists.
    pub fn normalized(&self) -> Self {
        let mut res: Vec<Resonance> = Vec::new();
        for r in &self.resonances {
            match res.iter_mut().find(|q| (q.point - r.point).norm() <= POINT_TOL) {
                Some(q) => q.mult += r.mult,
                None => res.push(*r),
            }
        }
        let key = |a: &C, b: &C| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
        res.sort_by(|a, b| key(&a.point, &b.point));
        let mut eig = self.eigenvalues.clone();
        eig.sort_by(key);
        SingularityConfig { setting: self.setting, eigenvalues: eig, resonances: res }
    }

    /// Every zero of `d`, listed with multiplicity.
    pub fn points(&self) -> Vec<C> {
        let mut v = self.eigenvalues.clone();
        for r in &self.resonances {
            v.extend(std::iter::repeat_n(r.point, r.mult));
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    O1,
    O2,
    O3,
    O4,
    O5,
}

impl Condition {
    pub fn label(self) -> &'static str {
        match self {
            Condition::O1 => "O1",
            Condition::O2 => "O2",
            Condition::O3 => "O3",
            Condition::O4 => "O4",
            Condition::O5 => "O5",
        }
    }

    /// Display form with a subscript, e.g. `(O₁)`.
    pub fn symbol(self) -> &'static str {
        match self {
            Condition::O1 => "(O₁)",
            Condition::O2 => "(O₂)",
            Condition::O3 => "(O₃)",
            Condition::O4 => "(O₄)",
            Condition::O5 => "(O₅)",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn push(&mut self, condition: Condition, detail: impl Into<String>) {
        self.violations.push(Violation { condition, detail: detail.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct violated conditions, sorted.
    pub fn conditions(&self) -> Vec<Condition> {
        let mut c: Vec<Condition> = self.violations.iter().map(|v| v.condition).collect();
        c.sort();
        c.dedup();
        c
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| format!("{} {}", v.condition, v.detail)).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Per-gap interlacing test on spectral coordinates.
///
/// Bounded gaps forbid an eigenvalue at an even position counted from
/// either end of the merged sorted sequence (multiplicities kept). An
/// unbounded line gap is counted from its finite end only. Eigenvalues and
/// resonances must be disjoint.
pub fn oddly_interlacing(set: &FiniteGapSet, eigenvalues: &[f64], real_resonances: &[(f64, usize)]) -> Result<bool> {
    let mut items: Vec<(usize, f64, bool, bool, bool)> = Vec::new();
    let mut place = |x: f64, is_e: bool, mult: usize| -> Result<()> {
        let (g, pos) = set.locate_in_gap(x).ok_or_else(|| Error::Domain(format!("point {x} lies inside a band")))?;
        let from_left = g.lo.is_finite();
        let from_right = g.hi.is_finite();
        for _ in 0..mult {
            items.push((g.index, pos, is_e, from_left, from_right));
        }
        Ok(())
    };
    for &e in eigenvalues {
        place(e, true, 1)?;
    }
    for &(r, m) in real_resonances {
        place(r, false, m)?;
    }
    for &e in eigenvalues {
        if real_resonances.iter().any(|&(r, _)| circ_dist(set, e, r) <= POINT_TOL) {
            return Ok(false);
        }
    }
    items.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut start = 0;
    while start < items.len() {
        let gap = items[start].0;
        let end = items[start..].iter().position(|it| it.0 != gap).map_or(items.len(), |p| start + p);
        let group = &items[start..end];
        let m = group.len();
        for (i, it) in group.iter().enumerate() {
            if !it.2 {
                continue;
            }
            let left = i + 1;
            let right = m - i;
            if (it.3 && left.is_multiple_of(2)) || (it.4 && right.is_multiple_of(2)) {
                return Ok(false);
            }
        }
        start = end;
    }
    Ok(true)
}

fn circ_dist(set: &FiniteGapSet, a: f64, b: f64) -> f64 {
    (set.point(a) - set.point(b)).norm()
}

/// Admissibility check. Returns the perturbation order `s`: `K+N-l` on the
/// line, `(K+N-l)/2` on the circle.
pub fn validate(set: &FiniteGapSet, config: &SingularityConfig) -> Result<usize> {
    if config.setting != set.setting() {
        return Err(Error::Schema("configuration setting does not match the band set".into()));
    }
    let cfg = config.normalized();
    let mut rep = ViolationReport::default();
    let tol = POINT_TOL;
    let l = set.l() as i64;
    let finite = |z: &C| z.re.is_finite() && z.im.is_finite();

    // (O3): eigenvalues on the curve, off the closed set, simple.
    let mut eig_ok = Vec::new();
    for (i, e) in cfg.eigenvalues.iter().enumerate() {
        if !finite(e) {
            rep.push(Condition::O3, format!("eigenvalue {e} is not finite"));
        } else if !set.on_curve(*e, tol) {
            rep.push(Condition::O3, format!("eigenvalue {e} is off the {}", curve_name(set)));
        } else if set.contains(*e, tol) {
            rep.push(Condition::O3, format!("eigenvalue {e} lies on the spectrum"));
        } else {
            eig_ok.push(set.coordinate(*e));
        }
        if cfg.eigenvalues[..i].iter().any(|f| (f - e).norm() <= tol) {
            rep.push(Condition::O3, format!("eigenvalue {e} is repeated"));
        }
    }

    // (O4): resonances off the open bands, simple at edges, symmetric.
    let mut res_on_curve = Vec::new();
    for r in &cfg.resonances {
        let z = r.point;
        if r.mult == 0 {
            rep.push(Condition::O4, format!("resonance {z} has multiplicity 0"));
            continue;
        }
        if !finite(&z) {
            rep.push(Condition::O4, format!("resonance {z} is not finite"));
            continue;
        }
        if set.setting() == Setting::Circle && z.norm() <= tol {
            rep.push(Condition::O4, "resonance at 0".to_string());
            continue;
        }
        if set.in_open_band(z, tol) {
            rep.push(Condition::O4, format!("resonance {z} lies inside a band"));
            continue;
        }
        if set.is_branch_point(z, tol) && r.mult > 1 {
            rep.push(Condition::O4, format!("band-edge resonance {z} has multiplicity {}", r.mult));
        }
        if set.on_curve(z, tol) {
            res_on_curve.push((set.coordinate(z), r.mult, z));
        } else {
            let mirror = set.reflect(z);
            let partner = cfg.resonances.iter().find(|q| (q.point - mirror).norm() <= tol);
            match partner {
                Some(q) if q.mult == r.mult => {}
                Some(q) => rep.push(
                    Condition::O4,
                    format!("resonance {z} (mult {}) mirrored with multiplicity {}", r.mult, q.mult),
                ),
                None => rep.push(Condition::O4, format!("resonance {z} lacks its mirror {mirror}")),
            }
        }
    }

    // (O1): disjointness and interlacing.
    for e in &cfg.eigenvalues {
        if cfg.resonances.iter().any(|r| (r.point - e).norm() <= tol) {
            rep.push(Condition::O1, format!("eigenvalue {e} coincides with a resonance"));
        }
    }
    let real_res: Vec<(f64, usize)> =
        res_on_curve.iter().filter(|(x, _, _)| set.gap_of(*x).is_some()).map(|&(x, m, _)| (x, m)).collect();
    let eig_in_gaps: Vec<f64> = eig_ok.iter().copied().filter(|&x| set.gap_of(x).is_some()).collect();
    if !oddly_interlacing(set, &eig_in_gaps, &real_res)? {
        rep.push(Condition::O1, "eigenvalues and resonances do not oddly interlace");
    }

    // (O2): odd count in every bounded gap.
    for g in set.bounded_gaps() {
        let count: usize = eig_in_gaps.iter().filter(|&&x| set.gap_of(x) == Some(g)).count()
            + real_res.iter().filter(|(x, _)| set.gap_of(*x) == Some(g)).map(|&(_, m)| m).sum::<usize>();
        if count.is_multiple_of(2) {
            rep.push(Condition::O2, format!("gap {} holds {count} points, expected an odd count", g.index));
        }
    }

    // (O5): singularity count.
    let total = (cfg.k() + cfg.n()) as i64;
    let s = match set.setting() {
        Setting::Line => {
            if total < l {
                rep.push(Condition::O5, format!("K+N = {total} is below l = {l}"));
            }
            total - l
        }
        Setting::Circle => {
            if total < l {
                rep.push(Condition::O5, format!("K+N = {total} is below l = {l}"));
            } else if (total - l) % 2 != 0 {
                rep.push(Condition::O5, format!("K+N = {total} and l = {l} differ in parity"));
            }
            (total - l) / 2
        }
    };
    if rep.is_empty() {
        Ok(s as usize)
    } else {
        Err(Error::Inadmissible(rep))
    }
}

fn curve_name(set: &FiniteGapSet) -> &'static str {
    match set.setting() {
        Setting::Line => "real line",
        Setting::Circle => "unit circle",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_sums_multiplicities() {
        let cfg = SingularityConfig::line(&[], &[(C::new(3.0, 0.0), 1), (C::new(3.0, 0.0), 2)]);
        let n = cfg.normalized();
        assert_eq!(n.resonances.len(), 1);
        assert_eq!(n.resonances[0].mult, 3);
    }

    #[test]
    fn unbounded_gap_counts_from_finite_end() {
        let set = FiniteGapSet::line(&[(-2.0, 2.0)]).unwrap();
        assert!(oddly_interlacing(&set, &[3.0], &[(4.0, 1)]).unwrap());
        assert!(!oddly_interlacing(&set, &[4.0], &[(3.0, 1)]).unwrap());
        assert!(!oddly_interlacing(&set, &[-4.0], &[(-3.0, 1)]).unwrap());
        assert!(oddly_interlacing(&set, &[-3.0], &[(-4.0, 1)]).unwrap());
    }
}
