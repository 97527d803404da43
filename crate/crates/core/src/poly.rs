//! Dense complex polynomials, root finding with multiplicity clustering,
//! tolerance-checked exact division, truncated power series and confluent
//! (Hermite) interpolation solves.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Default relative tolerance for [`divide_exact`].
pub const DIVIDE_TOL: f64 = 1e-9;
/// Default relative residual tolerance for merging root clusters.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Interpolation systems with a larger 1-norm condition number are rejected.
pub const MAX_CONDITION: f64 = 1e14;

/// Polynomial with complex coefficients in ascending degree.
///
/// Exact trailing zeros are always trimmed. `is_real` holds when every
/// coefficient has an exactly zero imaginary part.
#[derive(Clone, PartialEq, Default)]
pub struct Poly {
    coeffs: Vec<C>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| *c == ZERO) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Poly::new(vec![c])
    }

    /// `c z^k`.
    pub fn monomial(k: usize, c: C) -> Self {
        let mut v = vec![ZERO; k + 1];
        v[k] = c;
        Poly::new(v)
    }

    /// Monic polynomial with the given roots (repeated roots listed repeatedly).
    pub fn from_roots(roots: &[C]) -> Self {
        roots.iter().fold(Poly::constant(ONE), |p, &r| &p * &Poly::new(vec![-r, ONE]))
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn deg(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn degree(&self) -> usize {
        self.deg().unwrap_or(0)
    }

    pub fn leading(&self) -> C {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest imaginary part relative to the coefficient norm.
    pub fn imag_defect(&self) -> f64 {
        let n = self.norm();
        if n == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / n
    }

    /// Drops imaginary parts, failing when they exceed `tol` relative.
    pub fn into_real(self, tol: f64) -> Result<Poly> {
        let defect = self.imag_defect();
        if defect > tol {
            return Err(Error::Invariant(format!("polynomial expected real, imaginary defect {defect:.3e}")));
        }
        Ok(Poly::new(self.coeffs.iter().map(|c| C::new(c.re, 0.0)).collect()))
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    /// Taylor coefficients `p^{(k)}(z0)/k!` for `k = 0..=order`.
    pub fn taylor_at(&self, z0: C, order: usize) -> Vec<C> {
        let mut work = self.coeffs.clone();
        let mut out = Vec::with_capacity(order + 1);
        for _ in 0..=order {
            if work.is_empty() {
                out.push(ZERO);
                continue;
            }
            // Synthetic division by (z - z0): remainder is the next coefficient.
            let n = work.len();
            let mut acc = ZERO;
            let mut quot = vec![ZERO; n.saturating_sub(1)];
            for k in (0..n).rev() {
                acc = acc * z0 + work[k];
                if k > 0 {
                    quot[k - 1] = acc;
                }
            }
            out.push(acc);
            work = quot;
        }
        out
    }

    /// The polynomial `h ↦ p(z0 + h)`.
    pub fn shift(&self, z0: C) -> Poly {
        match self.deg() {
            None => Poly::zero(),
            Some(d) => Poly::new(self.taylor_at(z0, d)),
        }
    }

    pub fn scale(&self, c: C) -> Poly {
        Poly::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    /// `z^k p(z)`.
    pub fn shift_up(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ZERO; k];
        v.extend_from_slice(&self.coeffs);
        Poly::new(v)
    }

    /// Keeps coefficients of degree ≤ `deg`.
    pub fn truncate(&self, deg: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(deg + 1).copied().collect())
    }

    /// Truncates to degree `deg`, failing when a dropped coefficient exceeds
    /// `tol` relative to the coefficient norm.
    pub fn truncate_checked(&self, deg: usize, tol: f64, what: &str) -> Result<Poly> {
        let scale = self.norm().max(f64::MIN_POSITIVE);
        let excess = self.coeffs.iter().skip(deg + 1).map(|c| c.norm()).fold(0.0, f64::max);
        if excess > tol * scale {
            return Err(Error::Invariant(format!(
                "{what}: expected degree {deg}, coefficient of size {:.3e} above it",
                excess / scale
            )));
        }
        Ok(self.truncate(deg))
    }

    /// Removes leading coefficients whose modulus is at most `tol` times the norm.
    pub fn trim(&self, tol: f64) -> Poly {
        let bound = tol * self.norm();
        let mut v = self.coeffs.clone();
        while v.last().is_some_and(|c| c.norm() <= bound) {
            v.pop();
        }
        Poly::new(v)
    }

    /// Quotient and remainder of polynomial long division.
    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.deg().ok_or(Error::ZeroPolynomial)?;
        let Some(pd) = self.deg() else {
            return Ok((Poly::zero(), Poly::zero()));
        };
        if pd < dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![ZERO; pd - dd + 1];
        for k in (0..=pd - dd).rev() {
            let c = r[k + dd] / lead;
            q[k] = c;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= c * dc;
            }
            r[k + dd] = ZERO;
        }
        r.truncate(dd);
        Ok((Poly::new(q), Poly::new(r)))
    }

    /// Scales so the leading coefficient is 1.
    pub fn monic(&self) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(self.scale(ONE / self.leading()))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-ONE)
    }
}

/// Quotient `p / d`, failing unless the remainder norm is at most
/// `tol·(‖p‖ + ‖d‖·‖q‖)`.
pub fn divide_exact(p: &Poly, d: &Poly, tol: f64) -> Result<Poly> {
    let dd = d.deg().ok_or(Error::ZeroPolynomial)?;
    match p.deg() {
        None => Ok(Poly::zero()),
        Some(pd) if pd < dd => divisibility_check(p, d, Poly::zero(), tol),
        Some(pd) => divide_exact_deg(p, d, pd - dd, tol),
    }
}

/// [`divide_exact`] with the quotient degree fixed in advance: the
/// quotient is the least-squares solution of `d·q = p` over all
/// coefficients, so noise in coefficients of `p` above `deg d + qdeg`
/// lands in the remainder instead of the quotient.
pub fn divide_exact_deg(p: &Poly, d: &Poly, qdeg: usize, tol: f64) -> Result<Poly> {
    let dd = d.deg().ok_or(Error::ZeroPolynomial)?;
    let rows = (dd + qdeg + 1).max(p.coeffs.len());
    let cols = qdeg + 1;
    let mut m = DMatrix::<C>::zeros(rows, cols);
    for j in 0..cols {
        for (i, &c) in d.coeffs.iter().enumerate() {
            m[(i + j, j)] = c;
        }
    }
    let b = DVector::from_iterator(rows, (0..rows).map(|k| p.coeff(k)));
    // The convolution matrix has full column rank, so thin QR solves the
    // least-squares problem stably.
    let qr = m.qr();
    let x = qr
        .r()
        .solve_upper_triangular(&(qr.q().adjoint() * b))
        .ok_or_else(|| Error::Invariant("least-squares division hit a singular system".into()))?;
    divisibility_check(p, d, Poly::new(x.iter().copied().collect()), tol)
}

fn divisibility_check(p: &Poly, d: &Poly, q: Poly, tol: f64) -> Result<Poly> {
    let remainder = (p - &(d * &q)).norm();
    let bound = tol * (p.norm() + d.norm() * q.norm());
    if remainder > bound {
        return Err(Error::Divisibility { remainder, bound });
    }
    Ok(q)
}

/// Roots with multiplicities, plus the worst relative residual `|p(r)|`.
#[derive(Clone, Debug)]
pub struct RootList {
    pub roots: Vec<(C, usize)>,
    pub residual: f64,
}

impl RootList {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.1).sum()
    }
}

/// Roots of `p` with the default clustering tolerance.
pub fn roots(p: &Poly) -> Result<RootList> {
    roots_with(p, CLUSTER_TOL)
}

/// Companion-matrix eigenvalues, clustered into multiplicities.
///
/// Two clusters merge when the polynomial's Taylor coefficients of order
/// below the merged multiplicity are small at the merged centroid, relative
/// to the natural evaluation scale. Merged clusters are polished by Newton
/// steps on `p^{(m-1)}`, simple roots by Newton steps on `p`.
pub fn roots_with(p: &Poly, cluster_tol: f64) -> Result<RootList> {
    let n = p.deg().ok_or(Error::ZeroPolynomial)?;
    if n == 0 {
        return Ok(RootList { roots: Vec::new(), residual: 0.0 });
    }
    let q = p.monic()?;
    let raw: Vec<C> = if n == 1 {
        vec![-q.coeff(0)]
    } else {
        let mut m = DMatrix::<C>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = ONE;
        }
        for i in 0..n {
            m[(i, n - 1)] = -q.coeff(i);
        }
        let schur = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Accuracy { estimate: "companion eigenvalues".into(), discrepancy: f64::NAN })?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::Accuracy { estimate: "companion eigenvalues".into(), discrepancy: f64::NAN })?;
        ev.iter().map(|&z| newton_polish(&q, z, 1)).collect()
    };

    // (sum, multiplicity) per cluster; centroid = sum / multiplicity.
    let mut clusters: Vec<(C, usize)> = raw.iter().map(|&z| (z, 1)).collect();
    loop {
        let mut pairs = Vec::new();
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let ci = clusters[i].0 / clusters[i].1 as f64;
                let cj = clusters[j].0 / clusters[j].1 as f64;
                let dist = (ci - cj).norm();
                if dist <= 1e-2 * (1.0 + ci.norm().max(cj.norm())) {
                    pairs.push((dist, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged = false;
        for &(_, i, j) in &pairs {
            let m = clusters[i].1 + clusters[j].1;
            let c = (clusters[i].0 + clusters[j].0) / m as f64;
            if cluster_residual_ok(&q, c, m, cluster_tol) {
                clusters[i] = (clusters[i].0 + clusters[j].0, m);
                clusters.remove(j);
                merged = true;
                break;
            }
        }
        if !merged {
            break;
        }
    }

    let mut out: Vec<(C, usize)> = clusters
        .into_iter()
        .map(|(sum, m)| {
            let c = sum / m as f64;
            (newton_polish(&q, c, m), m)
        })
        .collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let residual = out.iter().map(|&(r, _)| q.eval(r).norm() / eval_scale(&q, r, 0)).fold(0.0, f64::max);
    Ok(RootList { roots: out, residual })
}

/// `Σ_j |p_j|·C(j,k)·|z|^{j-k}`, the natural size of `p^{(k)}(z)/k!`.
fn eval_scale(p: &Poly, z: C, k: usize) -> f64 {
    let r = z.norm();
    let s: f64 =
        p.coeffs().iter().enumerate().skip(k).map(|(j, c)| c.norm() * binomial(j, k) * r.powi((j - k) as i32)).sum();
    s.max(f64::MIN_POSITIVE)
}

fn cluster_residual_ok(p: &Poly, c: C, m: usize, tol: f64) -> bool {
    let t = p.taylor_at(c, m - 1);
    (0..m).all(|k| t[k].norm() <= tol * eval_scale(p, c, k))
}

fn newton_polish(p: &Poly, z0: C, m: usize) -> C {
    let mut g = p.clone();
    for _ in 1..m {
        g = g.derivative();
    }
    let dg = g.derivative();
    let mut z = z0;
    let mut fz = g.eval(z).norm();
    for _ in 0..8 {
        let d = dg.eval(z);
        if d == ZERO {
            break;
        }
        let cand = z - g.eval(z) / d;
        let fc = g.eval(cand).norm();
        if !(fc < fz) || !cand.re.is_finite() || !cand.im.is_finite() {
            break;
        }
        z = cand;
        fz = fc;
    }
    z
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Product of truncated power series (first `n` terms).
pub fn series_mul(a: &[C], b: &[C], n: usize) -> Vec<C> {
    (0..n)
        .map(|k| (0..=k).map(|i| a.get(i).copied().unwrap_or(ZERO) * b.get(k - i).copied().unwrap_or(ZERO)).sum())
        .collect()
}

/// Quotient of truncated power series; `b[0]` must be nonzero.
pub fn series_div(a: &[C], b: &[C], n: usize) -> Result<Vec<C>> {
    let b0 = b.first().copied().unwrap_or(ZERO);
    if b0 == ZERO {
        return Err(Error::Domain("series division by a series with zero constant term".into()));
    }
    let mut q: Vec<C> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = a.get(k).copied().unwrap_or(ZERO);
        for i in 1..=k {
            acc -= b.get(i).copied().unwrap_or(ZERO) * q[k - i];
        }
        q.push(acc / b0);
    }
    Ok(q)
}

/// Square root `g` of a power series `a` with the prescribed `g[0]`
/// (`g[0]² = a[0]`, nonzero).
pub fn series_sqrt(a: &[C], g0: C, n: usize) -> Result<Vec<C>> {
    if g0 == ZERO {
        return Err(Error::Domain("series square root at a zero of the radicand".into()));
    }
    let mut g: Vec<C> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(g);
    }
    g.push(g0);
    for k in 1..n {
        let mut acc = a.get(k).copied().unwrap_or(ZERO);
        for i in 1..k {
            acc -= g[i] * g[k - i];
        }
        g.push(acc / (g0 * 2.0));
    }
    Ok(g)
}

/// Laurent coefficients of the principal-leading `√R` at infinity: the
/// coefficients of `z^m, z^{m-1}, …, z^{m-order}` where `Deg R = 2m`.
pub fn sqrt_series_at_infinity(r: &Poly, order: usize) -> Result<Vec<C>> {
    let d = r.deg().ok_or(Error::ZeroPolynomial)?;
    if d % 2 == 1 {
        return Err(Error::Domain(format!("odd degree {d} has no square root at infinity")));
    }
    let lead = r.leading();
    let u: Vec<C> = (0..=order).map(|k| if k <= d { r.coeff(d - k) / lead } else { ZERO }).collect();
    let g = series_sqrt(&u, ONE, order + 1)?;
    let s = lead.sqrt();
    Ok(g.into_iter().map(|c| c * s).collect())
}

/// One interpolation node: conditions on the Taylor coefficients
/// `p^{(k)}(point)/k!`, `k < multiplicity`.
#[derive(Clone, Debug)]
pub struct HermiteNode {
    pub point: C,
    pub multiplicity: usize,
    pub targets: Vec<C>,
}

#[derive(Clone, Debug)]
pub struct HermiteSolution {
    pub poly: Poly,
    /// 1-norm condition number of the column-equilibrated system.
    pub condition: f64,
}

/// Polynomial of degree ≤ `degree_bound` meeting every node condition.
pub fn hermite_solve(nodes: &[HermiteNode], degree_bound: usize) -> Result<HermiteSolution> {
    let basis: Vec<Poly> = (0..=degree_bound).map(|k| Poly::monomial(k, ONE)).collect();
    let (x, condition) = hermite_solve_basis(nodes, &basis, &Poly::zero())?;
    Ok(HermiteSolution { poly: Poly::new(x), condition })
}

/// Coefficients `x` such that `offset + Σ x_j basis_j` meets every node
/// condition, with the condition number of the solve.
pub fn hermite_solve_basis(nodes: &[HermiteNode], basis: &[Poly], offset: &Poly) -> Result<(Vec<C>, f64)> {
    for node in nodes {
        if node.multiplicity == 0 || node.targets.len() != node.multiplicity {
            return Err(Error::Domain(format!(
                "node at {}: {} targets for multiplicity {}",
                node.point,
                node.targets.len(),
                node.multiplicity
            )));
        }
    }
    let conditions: usize = nodes.iter().map(|n| n.multiplicity).sum();
    if conditions != basis.len() {
        return Err(Error::ConditionCount { conditions, unknowns: basis.len() });
    }
    let n = conditions;
    if n == 0 {
        return Ok((Vec::new(), 1.0));
    }
    let mut m = DMatrix::<C>::zeros(n, n);
    let mut rhs = nalgebra::DVector::<C>::zeros(n);
    let mut row = 0;
    for node in nodes {
        let k = node.multiplicity - 1;
        let off = offset.taylor_at(node.point, k);
        let cols: Vec<Vec<C>> = basis.iter().map(|b| b.taylor_at(node.point, k)).collect();
        for j in 0..node.multiplicity {
            for (c, col) in cols.iter().enumerate() {
                m[(row, c)] = col[j];
            }
            rhs[row] = node.targets[j] - off[j];
            row += 1;
        }
    }
    let colscale: Vec<f64> = (0..n)
        .map(|c| {
            let s = m.column(c).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    for (c, &s) in colscale.iter().enumerate() {
        m.column_mut(c).iter_mut().for_each(|z| *z /= s);
    }
    let norm1 =
        |a: &DMatrix<C>| (0..a.ncols()).map(|c| a.column(c).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let lu = m.clone().lu();
    let singular = |condition: f64| {
        let (a, b) = closest_nodes(nodes);
        Error::SingularSystem { condition, a, b }
    };
    let inv = lu.try_inverse().ok_or_else(|| singular(f64::INFINITY))?;
    let condition = norm1(&m) * norm1(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(singular(condition));
    }
    let y = &inv * &rhs;
    // One step of iterative refinement.
    let resid = &rhs - &m * &y;
    let y = y + &inv * resid;
    Ok(((0..n).map(|c| y[c] / colscale[c]).collect(), condition))
}

fn closest_nodes(nodes: &[HermiteNode]) -> (String, String) {
    let mut best = (f64::INFINITY, String::from("-"), String::from("-"));
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            let d = (nodes[i].point - nodes[j].point).norm();
            if d < best.0 {
                best = (d, nodes[i].point.to_string(), nodes[j].point.to_string());
            }
        }
    }
    (best.1, best.2)
}
