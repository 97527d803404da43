//! JSON encodings of sets, configurations, measures, functions and
//! coefficient streams, with a canonical writer: sorted keys, floats with 17
//! significant digits, complex numbers as `[re, im]`.

use crate::config::{DirichletPoint, Resonance, SingularityConfig, ViolationReport};
use crate::error::{Error, Result};
use crate::finitegap::{FiniteGapSet, Setting, Sheet};
use crate::measure::{PointMass, SpectralMeasure};
use crate::mfunc::{AlgebraicCaratheodory, AlgebraicFunction, AlgebraicHerglotz};
use crate::oracle::OracleReport;
use crate::poly::Poly;
use crate::stripping::{JacobiPrefix, VerblunskyPrefix};
use num_complex::Complex64 as C;
use serde_json::{json, Map, Value};

/// Version tag carried by every document.
pub const SCHEMA: &str = "fgs/1";

/// Canonical text: keys sorted, floats as `{:.16e}` with `-0` written as
/// `0`, no whitespace.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, &mut out);
    out
}

fn write_value(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                out.push_str(&format!("{:.16e}", if x == 0.0 { 0.0 } else { x }));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(&map[k], out);
            }
            out.push('}');
        }
    }
}

/// Parses text and checks the schema tag when present.
pub fn parse(text: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Schema(format!("malformed JSON: {e}")))?;
    if let Some(tag) = v.get("schema") {
        if tag.as_str() != Some(SCHEMA) {
            return Err(Error::Schema(format!("unsupported schema tag {tag}, expected \"{SCHEMA}\"")));
        }
    }
    Ok(v)
}

/// Adds the schema tag to an object.
pub fn tagged(mut v: Value) -> Value {
    if let Value::Object(map) = &mut v {
        map.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

fn float(x: f64) -> Value {
    let x = if x == 0.0 { 0.0 } else { x };
    // Non-finite values have no JSON form; they travel as strings.
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or_else(|| Value::String(x.to_string()))
}

fn complex(z: C) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Schema(format!("missing field \"{key}\"")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::Schema(format!("{what}: expected a number, got {v}")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::Schema(format!("{what}: expected a nonnegative integer, got {v}")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Schema(format!("{what}: expected an array, got {v}")))
}

/// A number, or a `[re, im]` pair.
fn as_complex(v: &Value, what: &str) -> Result<C> {
    if let Some(x) = v.as_f64() {
        return Ok(C::new(x, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(C::new(as_f64(re, what)?, as_f64(im, what)?)),
        _ => Err(Error::Schema(format!("{what}: expected a number or [re, im], got {v}"))),
    }
}

fn f64_list(v: &Value, what: &str) -> Result<Vec<f64>> {
    as_array(v, what)?.iter().map(|x| as_f64(x, what)).collect()
}

fn complex_list(v: &Value, what: &str) -> Result<Vec<C>> {
    as_array(v, what)?.iter().map(|x| as_complex(x, what)).collect()
}

fn poly_value(p: &Poly, real: bool) -> Value {
    Value::Array(p.coeffs().iter().map(|&c| if real { float(c.re) } else { complex(c) }).collect())
}

fn poly_from(v: &Value, what: &str) -> Result<Poly> {
    Ok(Poly::new(complex_list(v, what)?))
}

pub fn set_to_json(set: &FiniteGapSet) -> Value {
    match set.setting() {
        Setting::Line => json!({
            "type": "line",
            "bands": set.bands().iter().map(|&(a, b)| Value::Array(vec![float(a), float(b)])).collect::<Vec<_>>(),
        }),
        Setting::Circle => json!({
            "type": "circle",
            "angles": set.edges().iter().map(|&t| float(t)).collect::<Vec<_>>(),
        }),
    }
}

pub fn set_from_json(v: &Value) -> Result<FiniteGapSet> {
    match field(v, "type")?.as_str() {
        Some("line") => {
            let bands = as_array(field(v, "bands")?, "bands")?
                .iter()
                .map(|b| match f64_list(b, "band")?.as_slice() {
                    [lo, hi] => Ok((*lo, *hi)),
                    _ => Err(Error::Schema(format!("band: expected [lo, hi], got {b}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            FiniteGapSet::line(&bands)
        }
        Some("circle") => FiniteGapSet::circle(&f64_list(field(v, "angles")?, "angles")?),
        _ => Err(Error::Schema(format!("set type must be \"line\" or \"circle\", got {}", v["type"]))),
    }
}

pub fn config_to_json(cfg: &SingularityConfig) -> Value {
    let eig: Vec<Value> = match cfg.setting {
        Setting::Line => cfg.eigenvalues.iter().map(|e| float(e.re)).collect(),
        Setting::Circle => cfg.eigenvalues.iter().map(|e| float(e.arg())).collect(),
    };
    let res: Vec<Value> = cfg.resonances.iter().map(|r| json!({"point": complex(r.point), "mult": r.mult})).collect();
    json!({"eigenvalues": eig, "resonances": res})
}

/// Circle eigenvalues are read as angles.
pub fn config_from_json(v: &Value, setting: Setting) -> Result<SingularityConfig> {
    let eig = f64_list(field(v, "eigenvalues")?, "eigenvalues")?;
    let resonances = as_array(field(v, "resonances")?, "resonances")?
        .iter()
        .map(|r| {
            Ok(Resonance {
                point: as_complex(field(r, "point")?, "resonance point")?,
                mult: match r.get("mult") {
                    Some(m) => as_usize(m, "mult")?,
                    None => 1,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let eigenvalues = match setting {
        Setting::Line => eig.iter().map(|&x| C::new(x, 0.0)).collect(),
        Setting::Circle => eig.iter().map(|&t| C::from_polar(1.0, t)).collect(),
    };
    Ok(SingularityConfig { setting, eigenvalues, resonances })
}

pub fn violations_to_json(report: &ViolationReport) -> Value {
    let list: Vec<Value> =
        report.violations.iter().map(|v| json!({"condition": v.condition.symbol(), "detail": v.detail})).collect();
    json!({"violations": list})
}

pub fn measure_to_json(mu: &SpectralMeasure) -> Value {
    let real = mu.set().setting() == Setting::Line;
    json!({
        "set": set_to_json(mu.set()),
        "d": poly_value(mu.d(), real),
        "masses": mu.masses().iter().map(|m| json!({"at": float(m.at), "w": float(m.w)})).collect::<Vec<_>>(),
        "s": mu.s(),
    })
}

pub fn measure_from_json(v: &Value) -> Result<SpectralMeasure> {
    let set = set_from_json(field(v, "set")?)?;
    let d = poly_from(field(v, "d")?, "d")?;
    let masses = as_array(field(v, "masses")?, "masses")?
        .iter()
        .map(|m| Ok(PointMass { at: as_f64(field(m, "at")?, "at")?, w: as_f64(field(m, "w")?, "w")? }))
        .collect::<Result<Vec<_>>>()?;
    let s = match v.get("s") {
        Some(s) => as_usize(s, "s")?,
        None => 0,
    };
    SpectralMeasure::from_parts(set, d, masses, s)
}

/// An m-function or a Carathéodory function, by the setting of its set.
#[derive(Clone, Debug)]
pub enum Function {
    M(AlgebraicHerglotz),
    F(AlgebraicCaratheodory),
}

impl Function {
    pub fn set(&self) -> &FiniteGapSet {
        match self {
            Function::M(m) => m.set(),
            Function::F(f) => f.set(),
        }
    }
}

pub fn m_to_json(m: &AlgebraicHerglotz) -> Value {
    json!({
        "set": set_to_json(m.set()),
        "p": poly_value(m.p(), true),
        "a": poly_value(m.a(), true),
        "s": m.order().unwrap_or(0),
    })
}

/// `s` is the power of `z` multiplying `√R`.
pub fn f_to_json(f: &AlgebraicCaratheodory) -> Value {
    json!({
        "set": set_to_json(f.set()),
        "p": poly_value(f.p(), false),
        "a": poly_value(f.a(), false),
        "s": f.s(),
    })
}

pub fn function_to_json(f: &Function) -> Value {
    match f {
        Function::M(m) => m_to_json(m),
        Function::F(f) => f_to_json(f),
    }
}

pub fn function_from_json(v: &Value) -> Result<Function> {
    let set = set_from_json(field(v, "set")?)?;
    let p = poly_from(field(v, "p")?, "p")?;
    let a = poly_from(field(v, "a")?, "a")?;
    match set.setting() {
        Setting::Line => Ok(Function::M(AlgebraicHerglotz::new(set, p.into_real(1e-12)?, a.into_real(1e-12)?)?)),
        Setting::Circle => {
            let s = as_usize(field(v, "s")?, "s")?;
            Ok(Function::F(AlgebraicCaratheodory::new(set, p, a, s)?))
        }
    }
}

fn tail_to_json(tail: &[DirichletPoint]) -> Value {
    Value::Array(tail.iter().map(|d| json!({"gap": d.gap, "pos": float(d.pos), "sheet": d.sheet.symbol()})).collect())
}

fn tail_from_json(v: Option<&Value>) -> Result<Vec<DirichletPoint>> {
    let Some(v) = v else { return Ok(Vec::new()) };
    as_array(v, "tail")?
        .iter()
        .map(|d| {
            let sheet = field(d, "sheet")?
                .as_str()
                .and_then(Sheet::parse)
                .ok_or_else(|| Error::Schema(format!("sheet must be \"+\" or \"-\", got {}", d["sheet"])))?;
            Ok(DirichletPoint { gap: as_usize(field(d, "gap")?, "gap")?, pos: as_f64(field(d, "pos")?, "pos")?, sheet })
        })
        .collect()
}

pub fn jacobi_prefix_to_json(prefix: &JacobiPrefix, s: usize) -> Value {
    json!({
        "a": prefix.a.iter().map(|&x| float(x)).collect::<Vec<_>>(),
        "b": prefix.b.iter().map(|&x| float(x)).collect::<Vec<_>>(),
        "s": s,
        "tail": tail_to_json(&prefix.tail),
    })
}

pub fn verblunsky_prefix_to_json(prefix: &VerblunskyPrefix, s: usize) -> Value {
    json!({
        "alpha": prefix.alpha.iter().map(|&z| complex(z)).collect::<Vec<_>>(),
        "s": s,
        "tail": tail_to_json(&prefix.tail),
    })
}

/// A coefficient stream of either kind.
#[derive(Clone, Debug, PartialEq)]
pub enum Prefix {
    Jacobi(JacobiPrefix),
    Verblunsky(VerblunskyPrefix),
}

pub fn prefix_from_json(v: &Value) -> Result<Prefix> {
    let tail = tail_from_json(v.get("tail"))?;
    if let Some(alpha) = v.get("alpha") {
        return Ok(Prefix::Verblunsky(VerblunskyPrefix { alpha: complex_list(alpha, "alpha")?, tail }));
    }
    let a = f64_list(field(v, "a")?, "a")?;
    let b = f64_list(field(v, "b")?, "b")?;
    if a.len() != b.len() {
        return Err(Error::Schema(format!("a and b differ in length ({} vs {})", a.len(), b.len())));
    }
    Ok(Prefix::Jacobi(JacobiPrefix { a, b, tail }))
}

pub fn oracle_report_to_json(r: &OracleReport, tol: f64) -> Value {
    json!({
        "quantity": r.quantity,
        "primary": complex(r.primary),
        "oracle": complex(r.oracle),
        "abs": float(r.abs),
        "rel": float(r.rel),
        "pass": r.passes(tol),
    })
}

/// Error document for failed commands.
pub fn error_to_json(e: &Error) -> Value {
    let mut map = Map::new();
    map.insert("error".into(), Value::String(e.to_string()));
    map.insert("exit".into(), json!(e.exit_code()));
    if let Error::Inadmissible(report) = e {
        map.insert("violations".into(), violations_to_json(report)["violations"].clone());
    }
    Value::Object(map)
}

pub fn complex_to_json(z: C) -> Value {
    complex(z)
}

pub fn float_to_json(x: f64) -> Value {
    float(x)
}
