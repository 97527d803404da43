//! Adaptive Gauss–Legendre quadrature on `[0, π]` with cached node sets.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::{Arc, Mutex, OnceLock};

/// Successive estimates must differ by less than this, relative to `∫|g|`.
pub const QUAD_TOL: f64 = 1e-10;
/// Node counts `2^k + 1` for `k` in this range.
const LEVELS: std::ops::RangeInclusive<u32> = 3..=14;

type Rule = Arc<Vec<(f64, f64)>>;

/// Gauss–Legendre nodes and weights on `[0, π]`.
pub(crate) fn rule(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("quadrature cache poisoned").get(&n) {
        return r.clone();
    }
    let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("positive node count"));
    let half = PI / 2.0;
    let nodes: Rule = Arc::new(gl.iter().map(|(x, w)| (half * (x + 1.0), half * w)).collect());
    cache.lock().expect("quadrature cache poisoned").insert(n, nodes.clone());
    nodes
}

/// `∫_0^π g(t) dt` by order doubling until two successive estimates agree.
pub fn integrate_0_pi<F: Fn(f64) -> C>(g: F) -> Result<C> {
    let mut prev: Option<C> = None;
    let mut last = C::new(0.0, 0.0);
    let mut last_gap = f64::INFINITY;
    for k in LEVELS {
        let n = (1usize << k) + 1;
        let nodes = rule(n);
        let mut est = C::new(0.0, 0.0);
        let mut abs = 0.0;
        for &(t, w) in nodes.iter() {
            let v = g(t);
            est += v * w;
            abs += v.norm() * w;
        }
        if !(est.re.is_finite() && est.im.is_finite()) {
            return Err(Error::Domain("integrand is not finite on the band".into()));
        }
        if let Some(p) = prev {
            let gap = (est - p).norm();
            if gap <= QUAD_TOL * abs.max(f64::MIN_POSITIVE) || abs == 0.0 {
                return Ok(est);
            }
            last_gap = gap;
        }
        prev = Some(est);
        last = est;
    }
    Err(Error::Accuracy { estimate: format!("{last}"), discrepancy: last_gap })
}
