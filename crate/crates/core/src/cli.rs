//! Command-line front end over JSON files.
//!
//! Exit status: 0 success, 1 inadmissible configuration (the output lists
//! the violated conditions), 2 numerical-invariant failure, 3 I/O or schema
//! error.

use crate::config::validate;
use crate::error::Error;
use crate::finitegap::{FiniteGapSet, Setting};
use crate::json::{self, Function, Prefix};
use crate::measure::{build_measure, SpectralMeasure};
use crate::mfunc::{build_f, build_m, AlgebraicFunction};
use crate::oracle::{oracle_reports, standing_corpus, ORACLE_TOL};
use crate::stripping::{forward_cmv, forward_jacobi, recover_cmv, recover_jacobi, strip_cmv, strip_jacobi};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "fgs",
    version,
    about = "Spectral maps for finite-range perturbations of finite gap Jacobi and CMV operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Band set JSON.
    #[arg(long, global = true, value_name = "FILE")]
    pub set: Option<PathBuf>,
    /// Eigenvalue/resonance configuration JSON.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// m-function or Carathéodory function JSON.
    #[arg(long, global = true, value_name = "FILE")]
    pub func: Option<PathBuf>,
    /// Coefficient stream JSON (forward).
    #[arg(long, global = true, value_name = "FILE")]
    pub coeffs: Option<PathBuf>,
    /// Spectral measure JSON (density-table).
    #[arg(long, global = true, value_name = "FILE")]
    pub measure: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Pass tolerance for selftest comparisons.
    #[arg(long, global = true, value_name = "X")]
    pub tol: Option<f64>,
    /// Seed for selftest sampling grids.
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    pub seed: u64,
    /// Grid size: density points per band, or selftest configurations per case.
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Largest perturbation order recover accepts.
    #[arg(long, global = true, value_name = "N", default_value_t = 16)]
    pub steps: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Admissibility check: prints the perturbation order or the violations.
    Validate,
    /// Spectral measure of a configuration.
    BuildMeasure,
    /// m-function of a configuration over a line set.
    BuildM,
    /// Carathéodory function of a configuration over a circle set.
    BuildF,
    /// Configuration read back from the poles of a function.
    Classify,
    /// One coefficient-stripping step.
    Strip,
    /// Coefficient prefix and tail Dirichlet data of a function.
    Recover,
    /// Function rebuilt from a coefficient prefix and tail data.
    Forward,
    /// Sampled band density of a measure.
    DensityTable,
    /// Oracle comparisons over a random corpus.
    Selftest,
}

/// A failed command: exit status and the document to emit.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub doc: Value,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: e.exit_code(), doc: json::error_to_json(&e), message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    let message = format!("{}: {e}", path.display());
    Failure { code: 3, doc: json!({"error": message, "exit": 3}), message }
}

fn read_json(path: &Option<PathBuf>, flag: &str) -> Result<Value, Failure> {
    let path = path.as_ref().ok_or_else(|| Failure::from(Error::Schema(format!("--{flag} FILE is required"))))?;
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    Ok(json::parse(&text)?)
}

fn read_set(cli: &Cli) -> Result<FiniteGapSet, Failure> {
    Ok(json::set_from_json(&read_json(&cli.set, "set")?)?)
}

fn read_set_and_config(cli: &Cli) -> Result<(FiniteGapSet, crate::config::SingularityConfig), Failure> {
    let set = read_set(cli)?;
    let cfg = json::config_from_json(&read_json(&cli.config, "config")?, set.setting())?;
    Ok((set, cfg))
}

fn read_function(cli: &Cli) -> Result<Function, Failure> {
    Ok(json::function_from_json(&read_json(&cli.func, "func")?)?)
}

/// Runs one command and returns its JSON document.
pub fn execute(cli: &Cli) -> Result<Value, Failure> {
    let doc = match cli.command {
        Command::Validate => {
            let (set, cfg) = read_set_and_config(cli)?;
            json!({"s": validate(&set, &cfg)?})
        }
        Command::BuildMeasure => {
            let (set, cfg) = read_set_and_config(cli)?;
            json::measure_to_json(&build_measure(&set, &cfg)?)
        }
        Command::BuildM => {
            let (set, cfg) = read_set_and_config(cli)?;
            json::m_to_json(&build_m(&set, &cfg)?)
        }
        Command::BuildF => {
            let (set, cfg) = read_set_and_config(cli)?;
            json::f_to_json(&build_f(&set, &cfg)?)
        }
        Command::Classify => {
            let (rep, eq) = match read_function(cli)? {
                Function::M(m) => (m.poles()?, m.verify_equal_degree()),
                Function::F(f) => (f.poles()?, f.verify_equal_degree()),
            };
            json!({
                "config": json::config_to_json(&rep.config),
                "s": eq.s,
                "minimal": eq.minimal,
                "infinity_plus_pole": rep.infinity_plus_pole,
                "infinity_minus_pole": rep.infinity_minus_pole,
            })
        }
        Command::Strip => match read_function(cli)? {
            Function::M(m) => {
                let (a, b, m1) = strip_jacobi(&m)?;
                json!({"a": json::float_to_json(a), "b": json::float_to_json(b), "function": json::m_to_json(&m1)})
            }
            Function::F(f) => {
                let (alpha, f1) = strip_cmv(&f)?;
                json!({"alpha": json::complex_to_json(alpha), "function": json::f_to_json(&f1)})
            }
        },
        Command::Recover => match read_function(cli)? {
            Function::M(m) => {
                let r = recover_jacobi(&m, cli.steps)?;
                json::jacobi_prefix_to_json(&r.prefix, r.s)
            }
            Function::F(f) => {
                let r = recover_cmv(&f, cli.steps)?;
                json::verblunsky_prefix_to_json(&r.prefix, r.s)
            }
        },
        Command::Forward => {
            let set = read_set(cli)?;
            match json::prefix_from_json(&read_json(&cli.coeffs, "coeffs")?)? {
                Prefix::Jacobi(p) => json::m_to_json(&forward_jacobi(&set, &p)?),
                Prefix::Verblunsky(p) => json::f_to_json(&forward_cmv(&set, &p)?),
            }
        }
        Command::DensityTable => {
            let mu = if cli.measure.is_some() {
                json::measure_from_json(&read_json(&cli.measure, "measure")?)?
            } else {
                let (set, cfg) = read_set_and_config(cli)?;
                build_measure(&set, &cfg)?
            };
            density_table(&mu, cli.samples.unwrap_or(64))?
        }
        Command::Selftest => selftest(cli.seed, cli.samples.unwrap_or(2), cli.tol.unwrap_or(ORACLE_TOL))?,
    };
    Ok(json::tagged(doc))
}

/// Density at `n` interior points of each band (midpoint grid in the
/// coordinate), plus the point masses.
pub fn density_table(mu: &SpectralMeasure, n: usize) -> Result<Value, Failure> {
    let mut bands = Vec::new();
    for (k, (lo, hi)) in mu.set().bands().into_iter().enumerate() {
        let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
        let ds = xs.iter().map(|&x| mu.density(x)).collect::<crate::Result<Vec<f64>>>()?;
        bands.push(json!({
            "band": k + 1,
            "x": xs.into_iter().map(json::float_to_json).collect::<Vec<_>>(),
            "density": ds.into_iter().map(json::float_to_json).collect::<Vec<_>>(),
        }));
    }
    let masses: Vec<Value> =
        mu.masses().iter().map(|m| json!({"at": json::float_to_json(m.at), "w": json::float_to_json(m.w)})).collect();
    let coordinate = match mu.set().setting() {
        Setting::Line => "x",
        Setting::Circle => "theta",
    };
    Ok(json!({"coordinate": coordinate, "bands": bands, "masses": masses}))
}

/// Oracle table over the standing corpus; fails with status 2 when any
/// comparison misses `tol`.
pub fn selftest(seed: u64, per_case: usize, tol: f64) -> Result<Value, Failure> {
    let mut rows = Vec::new();
    let mut failures = 0usize;
    for (i, entry) in standing_corpus(seed, per_case).iter().enumerate() {
        match oracle_reports(entry, 4, 8, seed.wrapping_add(i as u64)) {
            Ok(reports) => {
                for r in reports {
                    if !r.passes(tol) {
                        failures += 1;
                    }
                    let mut row = json::oracle_report_to_json(&r, tol);
                    row["entry"] = json!(i);
                    rows.push(row);
                }
            }
            Err(e) => {
                failures += 1;
                rows.push(json!({"entry": i, "error": e.to_string(), "pass": false}));
            }
        }
    }
    let doc = json!({"reports": rows, "failures": failures, "tolerance": json::float_to_json(tol)});
    if failures > 0 {
        let message = format!("{failures} oracle comparisons failed");
        return Err(Failure { code: 2, doc: json::tagged(doc), message });
    }
    Ok(doc)
}

fn emit(out: &Option<PathBuf>, doc: &Value) -> Result<(), Failure> {
    let mut text = json::to_canonical_string(doc);
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_failure(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses arguments, runs the command, writes the document and returns the
/// exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(doc) => match emit(&cli.out, &doc) {
            Ok(()) => 0,
            Err(f) => {
                eprintln!("fgs: {}", f.message);
                f.code
            }
        },
        Err(f) => {
            eprintln!("fgs: {}", f.message);
            let _ = emit(&cli.out, &json::tagged(f.doc));
            f.code
        }
    }
}
