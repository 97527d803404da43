use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Dir {
        let p = std::env::temp_dir().join(format!("fgs-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn fgs(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fgs")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let doc = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), doc, String::from_utf8(out.stderr).unwrap())
}

const FREE: &str = r#"{"type":"line","bands":[[-2,2]]}"#;
const ARC: &str = r#"{"type":"circle","angles":[1.5707963267948966,4.71238898038469]}"#;

#[test]
fn validate_reports_order_and_violations() {
    let d = Dir::new("validate");
    let set = d.file("set.json", FREE);
    let ok = d.file("ok.json", r#"{"eigenvalues":[3],"resonances":[]}"#);
    let (code, doc, _) = fgs(&["validate", "--set", &set, "--config", &ok]);
    assert_eq!(code, 0);
    assert_eq!(doc["s"], 1);
    assert_eq!(doc["schema"], "fgs/1");

    let bad = d.file("bad.json", r#"{"eigenvalues":[3],"resonances":[{"point":[3,0],"mult":1}]}"#);
    let (code, doc, _) = fgs(&["validate", "--set", &set, "--config", &bad]);
    assert_eq!(code, 1);
    let text = doc.to_string();
    assert!(text.contains("(O₁)"), "{text}");
}

#[test]
fn io_and_usage_errors_exit_3() {
    let (code, _, err) = fgs(&["validate", "--set", "/nonexistent/set.json", "--config", "/nonexistent/c.json"]);
    assert_eq!(code, 3, "{err}");
    let (code, _, _) = fgs(&["frobnicate"]);
    assert_eq!(code, 3);
    let d = Dir::new("schema");
    let set = d.file("set.json", r#"{"schema":"fgs/9","type":"line","bands":[[-2,2]]}"#);
    let cfg = d.file("c.json", r#"{"eigenvalues":[],"resonances":[]}"#);
    let (code, _, _) = fgs(&["validate", "--set", &set, "--config", &cfg]);
    assert_eq!(code, 3);
}

#[test]
fn build_recover_forward_round_trip() {
    let d = Dir::new("roundtrip");
    let set = d.file("set.json", FREE);
    let cfg = d.file("c.json", r#"{"eigenvalues":[3],"resonances":[]}"#);
    let m = d.path("m.json");
    assert_eq!(fgs(&["build-m", "--set", &set, "--config", &cfg, "--out", &m]).0, 0);
    let (code, rec, _) = fgs(&["recover", "--func", &m]);
    assert_eq!(code, 0);
    assert_eq!(rec["s"], 1);
    let b1 = rec["b"][0].as_f64().unwrap();
    assert!((b1 - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
    let coeffs = d.file("coeffs.json", &rec.to_string());
    let (code, back, _) = fgs(&["forward", "--set", &set, "--coeffs", &coeffs]);
    assert_eq!(code, 0);
    let orig: Value = serde_json::from_str(&std::fs::read_to_string(&m).unwrap()).unwrap();
    for key in ["p", "a"] {
        let x = orig[key].as_array().unwrap();
        let y = back[key].as_array().unwrap();
        assert_eq!(x.len(), y.len());
        for (u, v) in x.iter().zip(y) {
            assert!((u.as_f64().unwrap() - v.as_f64().unwrap()).abs() < 1e-9);
        }
    }
    let (code, cls, _) = fgs(&["classify", "--func", &m]);
    assert_eq!(code, 0);
    assert_eq!(cls["s"], 1);
    assert_eq!(cls["config"]["eigenvalues"].as_array().unwrap().len(), 1);
    let (code, st, _) = fgs(&["strip", "--func", &m]);
    assert_eq!(code, 0);
    assert!((st["a"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn measure_and_density_table() {
    let d = Dir::new("measure");
    let set = d.file("set.json", FREE);
    let cfg = d.file("c.json", r#"{"eigenvalues":[],"resonances":[]}"#);
    let mu = d.path("mu.json");
    assert_eq!(fgs(&["build-measure", "--set", &set, "--config", &cfg, "--out", &mu]).0, 0);
    let (code, table, _) = fgs(&["density-table", "--measure", &mu, "--samples", "4"]);
    assert_eq!(code, 0);
    let xs = table["bands"][0]["x"].as_array().unwrap();
    let ds = table["bands"][0]["density"].as_array().unwrap();
    assert_eq!(xs.len(), 4);
    for (x, y) in xs.iter().zip(ds) {
        let x = x.as_f64().unwrap();
        assert!((y.as_f64().unwrap() - (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }
}

#[test]
fn circle_build_and_recover() {
    let d = Dir::new("circle");
    let set = d.file("set.json", ARC);
    let cfg = d.file("c.json", r#"{"eigenvalues":[0],"resonances":[]}"#);
    let f = d.path("f.json");
    assert_eq!(fgs(&["build-f", "--set", &set, "--config", &cfg, "--out", &f]).0, 0);
    let (code, rec, _) = fgs(&["recover", "--func", &f]);
    assert_eq!(code, 0, "{rec}");
    assert_eq!(rec["s"], 0);
    let odd = d.file("odd.json", r#"{"eigenvalues":[0, 0.5],"resonances":[]}"#);
    assert_eq!(fgs(&["build-f", "--set", &set, "--config", &odd]).0, 1);
}

#[test]
fn selftest_passes() {
    let (code, doc, err) = fgs(&["selftest", "--samples", "1", "--seed", "3"]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(doc["failures"], 0);
    assert!(!doc["reports"].as_array().unwrap().is_empty());
}
