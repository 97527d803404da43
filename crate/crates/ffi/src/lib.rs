//! C ABI over the `fgs` spectral maps.
//!
//! Objects cross the boundary as opaque handles released by their `_free`
//! function. Every fallible call returns an [`FgsStatus`]; on failure the
//! message is kept per thread and read with [`fgs_last_error`]. Strings
//! returned to the caller are released with [`fgs_string_free`].

use fgs::config::{validate, Resonance, SingularityConfig};
use fgs::finitegap::{FiniteGapSet, Setting, Sheet, SheetPoint};
use fgs::json::{self, Function};
use fgs::measure::{build_measure, SpectralMeasure};
use fgs::mfunc::{build_f, build_m, AlgebraicFunction, SheetValue};
use fgs::stripping::{recover_cmv, recover_jacobi};
use fgs::{Complex64, Error};
use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes; the first four match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgsStatus {
    Ok = 0,
    /// Configuration violates an admissibility condition.
    Inadmissible = 1,
    /// A numerical invariant failed.
    Numerical = 2,
    /// Malformed input data or JSON.
    Schema = 3,
    NullPointer = 4,
    /// Output buffer shorter than the result; the required length is still reported.
    BufferTooSmall = 5,
    /// The pole lies at the evaluation point.
    Pole = 6,
    Panic = 7,
}

/// A band set on the line or the circle.
pub struct FgsSet(FiniteGapSet);

/// Eigenvalues and resonances over a band set.
pub struct FgsConfig(SingularityConfig);

pub struct FgsMeasure(SpectralMeasure);

/// An m-function (line) or Carathéodory function (circle).
pub struct FgsFunction(Function);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(FgsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            1 => FgsStatus::Inadmissible,
            3 => FgsStatus::Schema,
            _ => FgsStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FgsStatus::NullPointer, format!("{what} is NULL"))
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> FgsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FgsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            FgsStatus::Panic
        }
    }
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &str) -> Result<&'a [T], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Failure(FgsStatus::Schema, format!("{what} is not UTF-8: {e}")))
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn store_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output string"));
    }
    *out = CString::new(s).map_err(|e| Failure(FgsStatus::Schema, e.to_string()))?.into_raw();
    Ok(())
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fgs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Line set from `n_edges` band edges `α₁, β₁, α₂, …`, strictly increasing.
///
/// # Safety
/// `edges` must hold `n_edges` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_set_line(edges: *const f64, n_edges: usize, out: *mut *mut FgsSet) -> FgsStatus {
    guard(|| {
        let e = slice(edges, n_edges, "edges")?;
        if e.len() % 2 == 1 {
            return Err(Failure(FgsStatus::Schema, "band edges come in pairs".into()));
        }
        let bands: Vec<(f64, f64)> = e.chunks(2).map(|c| (c[0], c[1])).collect();
        store(out, FgsSet(FiniteGapSet::line(&bands)?))
    })
}

/// Circle set from `n_angles` arc end angles in radians.
///
/// # Safety
/// `angles` must hold `n_angles` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_set_circle(angles: *const f64, n_angles: usize, out: *mut *mut FgsSet) -> FgsStatus {
    guard(|| store(out, FgsSet(FiniteGapSet::circle(slice(angles, n_angles, "angles")?)?)))
}

/// # Safety
/// `text_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_set_from_json(text_json: *const c_char, out: *mut *mut FgsSet) -> FgsStatus {
    guard(|| store(out, FgsSet(json::set_from_json(&json::parse(text(text_json, "json")?)?)?)))
}

/// Number of bounded gaps, or 0 for NULL.
///
/// # Safety
/// `set` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_set_l(set: *const FgsSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.l())
}

/// # Safety
/// `set` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_set_free(set: *mut FgsSet) {
    release(set)
}

/// Configuration over `set`. Eigenvalues are real points on the line and
/// angles on the circle; resonance `j` is `res_re[j] + i·res_im[j]` with
/// multiplicity `res_mult[j]`.
///
/// # Safety
/// Arrays must hold the stated counts; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_config_new(
    set: *const FgsSet,
    eigenvalues: *const f64,
    n_eigenvalues: usize,
    res_re: *const f64,
    res_im: *const f64,
    res_mult: *const usize,
    n_resonances: usize,
    out: *mut *mut FgsConfig,
) -> FgsStatus {
    guard(|| {
        let set = &reference(set, "set")?.0;
        let eig = slice(eigenvalues, n_eigenvalues, "eigenvalues")?;
        let re = slice(res_re, n_resonances, "res_re")?;
        let im = slice(res_im, n_resonances, "res_im")?;
        let mult = slice(res_mult, n_resonances, "res_mult")?;
        let eigenvalues = match set.setting() {
            Setting::Line => eig.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            Setting::Circle => eig.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        };
        let resonances =
            (0..n_resonances).map(|j| Resonance { point: Complex64::new(re[j], im[j]), mult: mult[j] }).collect();
        store(out, FgsConfig(SingularityConfig { setting: set.setting(), eigenvalues, resonances }))
    })
}

/// # Safety
/// `set` must be live, `text_json` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_config_from_json(
    set: *const FgsSet,
    text_json: *const c_char,
    out: *mut *mut FgsConfig,
) -> FgsStatus {
    guard(|| {
        let set = &reference(set, "set")?.0;
        let v = json::parse(text(text_json, "json")?)?;
        store(out, FgsConfig(json::config_from_json(&v, set.setting())?))
    })
}

/// # Safety
/// `config` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_config_free(config: *mut FgsConfig) {
    release(config)
}

/// Perturbation order of an admissible configuration. On
/// `FGS_STATUS_INADMISSIBLE` the last error names the violated conditions.
///
/// # Safety
/// Handles must be live; `s_out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_validate(set: *const FgsSet, config: *const FgsConfig, s_out: *mut usize) -> FgsStatus {
    guard(|| {
        let s = validate(&reference(set, "set")?.0, &reference(config, "config")?.0)?;
        if s_out.is_null() {
            return Err(null("s_out"));
        }
        *s_out = s;
        Ok(())
    })
}

/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_build_measure(
    set: *const FgsSet,
    config: *const FgsConfig,
    out: *mut *mut FgsMeasure,
) -> FgsStatus {
    guard(|| {
        let mu = build_measure(&reference(set, "set")?.0, &reference(config, "config")?.0)?;
        store(out, FgsMeasure(mu))
    })
}

/// Band density at a spectral coordinate (zero off the bands).
///
/// # Safety
/// `measure` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_measure_density(measure: *const FgsMeasure, x: f64, out: *mut f64) -> FgsStatus {
    guard(|| {
        let d = reference(measure, "measure")?.0.density(x)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = d;
        Ok(())
    })
}

/// Copies point masses (coordinate and weight) into buffers of length
/// `cap`; `count_out` receives the number of masses.
///
/// # Safety
/// `at` and `w` must hold `cap` doubles (may be NULL when `cap` is 0).
#[no_mangle]
pub unsafe extern "C" fn fgs_measure_masses(
    measure: *const FgsMeasure,
    at: *mut f64,
    w: *mut f64,
    cap: usize,
    count_out: *mut usize,
) -> FgsStatus {
    guard(|| {
        let masses = reference(measure, "measure")?.0.masses();
        if count_out.is_null() {
            return Err(null("count_out"));
        }
        *count_out = masses.len();
        if masses.len() > cap {
            return Err(Failure(FgsStatus::BufferTooSmall, format!("{} masses, buffer holds {cap}", masses.len())));
        }
        if !masses.is_empty() && (at.is_null() || w.is_null()) {
            return Err(null("mass buffers"));
        }
        for (j, m) in masses.iter().enumerate() {
            *at.add(j) = m.at;
            *w.add(j) = m.w;
        }
        Ok(())
    })
}

/// # Safety
/// `measure` must be live; `out` writable. Free the string with [`fgs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fgs_measure_to_json(measure: *const FgsMeasure, out: *mut *mut c_char) -> FgsStatus {
    guard(|| {
        let v = json::tagged(json::measure_to_json(&reference(measure, "measure")?.0));
        store_string(out, json::to_canonical_string(&v))
    })
}

/// # Safety
/// `measure` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_measure_free(measure: *mut FgsMeasure) {
    release(measure)
}

/// m-function (line set) or Carathéodory function (circle set) of a configuration.
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_build_function(
    set: *const FgsSet,
    config: *const FgsConfig,
    out: *mut *mut FgsFunction,
) -> FgsStatus {
    guard(|| {
        let set = &reference(set, "set")?.0;
        let cfg = &reference(config, "config")?.0;
        let f = match set.setting() {
            Setting::Line => Function::M(build_m(set, cfg)?),
            Setting::Circle => Function::F(build_f(set, cfg)?),
        };
        store(out, FgsFunction(f))
    })
}

/// # Safety
/// `text_json` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_function_from_json(text_json: *const c_char, out: *mut *mut FgsFunction) -> FgsStatus {
    guard(|| store(out, FgsFunction(json::function_from_json(&json::parse(text(text_json, "json")?)?)?)))
}

/// # Safety
/// `f` must be live; `out` writable. Free the string with [`fgs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn fgs_function_to_json(f: *const FgsFunction, out: *mut *mut c_char) -> FgsStatus {
    guard(|| {
        let v = json::tagged(json::function_to_json(&reference(f, "function")?.0));
        store_string(out, json::to_canonical_string(&v))
    })
}

/// Value at `(re + i·im, sheet)` with `sheet` `+1` or `-1`.
/// `FGS_STATUS_POLE` when the point is a pole.
///
/// # Safety
/// `f` must be live; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_function_eval(
    f: *const FgsFunction,
    re: f64,
    im: f64,
    sheet: c_int,
    out_re: *mut f64,
    out_im: *mut f64,
) -> FgsStatus {
    guard(|| {
        let f = &reference(f, "function")?.0;
        let sheet = match sheet {
            1 => Sheet::Plus,
            -1 => Sheet::Minus,
            _ => return Err(Failure(FgsStatus::Schema, format!("sheet must be +1 or -1, got {sheet}"))),
        };
        let pt = SheetPoint::new(Complex64::new(re, im), sheet);
        let v = match f {
            Function::M(m) => m.eval(pt),
            Function::F(c) => c.eval(pt),
        };
        let SheetValue::Finite(v) = v else {
            return Err(Failure(FgsStatus::Pole, format!("pole at {re}{im:+}i")));
        };
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output"));
        }
        *out_re = v.re;
        *out_im = v.im;
        Ok(())
    })
}

/// Jacobi prefix `(a_k, b_k)` of an m-function. `s_out` receives the
/// perturbation order; buffers of length `cap` must hold `s` entries.
///
/// # Safety
/// `f` must be live; `a`, `b` hold `cap` doubles; `s_out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_recover_jacobi(
    f: *const FgsFunction,
    max_steps: usize,
    a: *mut f64,
    b: *mut f64,
    cap: usize,
    s_out: *mut usize,
) -> FgsStatus {
    guard(|| {
        let Function::M(m) = &reference(f, "function")?.0 else {
            return Err(Failure(FgsStatus::Schema, "Jacobi recovery needs an m-function".into()));
        };
        let r = recover_jacobi(m, max_steps)?;
        write_prefix(
            r.s,
            cap,
            s_out,
            |j| {
                *a.add(j) = r.prefix.a[j];
                *b.add(j) = r.prefix.b[j];
            },
            a.is_null() || b.is_null(),
        )
    })
}

/// Verblunsky prefix `α_k` of a Carathéodory function, split into real and
/// imaginary parts.
///
/// # Safety
/// `f` must be live; `re`, `im` hold `cap` doubles; `s_out` writable.
#[no_mangle]
pub unsafe extern "C" fn fgs_recover_verblunsky(
    f: *const FgsFunction,
    max_steps: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
    s_out: *mut usize,
) -> FgsStatus {
    guard(|| {
        let Function::F(c) = &reference(f, "function")?.0 else {
            return Err(Failure(FgsStatus::Schema, "Verblunsky recovery needs a Carathéodory function".into()));
        };
        let r = recover_cmv(c, max_steps)?;
        write_prefix(
            r.s,
            cap,
            s_out,
            |j| {
                *re.add(j) = r.prefix.alpha[j].re;
                *im.add(j) = r.prefix.alpha[j].im;
            },
            re.is_null() || im.is_null(),
        )
    })
}

unsafe fn write_prefix(
    s: usize,
    cap: usize,
    s_out: *mut usize,
    mut put: impl FnMut(usize),
    missing: bool,
) -> Result<(), Failure> {
    if s_out.is_null() {
        return Err(null("s_out"));
    }
    *s_out = s;
    if s > cap {
        return Err(Failure(FgsStatus::BufferTooSmall, format!("prefix has {s} entries, buffer holds {cap}")));
    }
    if s > 0 && missing {
        return Err(null("prefix buffers"));
    }
    (0..s).for_each(&mut put);
    Ok(())
}

/// # Safety
/// `f` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn fgs_function_free(f: *mut FgsFunction) {
    release(f)
}
