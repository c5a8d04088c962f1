//! The `localprod` command line.
//!
//! Exit codes: 0 success, 1 a violation or failed check was found,
//! 2 invalid input, 3 a numerical failure (overflow, non-finite integrand,
//! refinement budget exhausted). Errors go to stderr as one JSON object.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::document::{HuntDocument, InstanceDocument, QuadratureSpec, Record, ValidationError};
use crate::error::Error;
use crate::falsify::hunt;
use crate::local_product::{compare_paths, local_product_closed, local_product_direct};
use crate::quadrature::{QuadratureConfig, DEFAULT_SEED};
use crate::selftest;
use crate::theorems::{modulus_bound_check, prop_swap_identity_check, report, CheckOptions, TheoremId, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "localprod", version, about = "Local products of sheet functions and the inequalities bounding them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    Direct,
    Closed,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TheoremArg {
    App2,
    App3,
}

impl From<TheoremArg> for TheoremId {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::App2 => TheoremId::App2,
            TheoremArg::App3 => TheoremId::App3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Swap,
    Modulus,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate G^k_f(a;b) for an instance file.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        path: PathArg,
        /// Monte Carlo seed; overrides the file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check app2 or app3 on an instance file (with `s`, not `k`).
    Check {
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        #[arg(long)]
        instance: PathBuf,
        /// Accept s = 0.
        #[arg(long)]
        allow_s_zero: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Randomized counterexample search.
    Hunt {
        /// Overrides the config's theorem.
        #[arg(long, value_enum)]
        theorem: Option<TheoremArg>,
        #[arg(long)]
        config: PathBuf,
        /// Violation records, one JSON object per line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Seeded property checks: swap identity or modulus bound.
    Props {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Run the acceptance criteria; JSONL on stdout.
    Selftest {
        /// Also write the log here.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

enum Failure {
    Invalid(ValidationError),
    Compute(Error),
    Io { path: PathBuf, message: String },
}

impl From<ValidationError> for Failure {
    fn from(e: ValidationError) -> Self {
        Failure::Invalid(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Compute(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_INVALID,
        }
    }

    fn to_json(&self) -> Value {
        let body = match self {
            Failure::Invalid(e) => json!({ "kind": "ValidationError", "field": e.field, "message": e.message }),
            Failure::Compute(e) => json!({ "kind": e.kind(), "message": e.to_string() }),
            Failure::Io { path, message } => json!({ "kind": "Io", "path": path.display().to_string(), "message": message }),
        };
        json!({ "error": body })
    }
}

type CliResult = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io { path: path.to_path_buf(), message: e.to_string() })
}

fn emit(out: &mut dyn Write, v: &Value) {
    let _ = writeln!(out, "{v}");
}

/// Parses `argv` (program name first) and runs the command, writing to the
/// given streams. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Eval { instance, path, seed } => eval(&instance, path, seed, stdout),
        Command::Check { theorem, instance, allow_s_zero, seed } => {
            check(theorem.into(), &instance, allow_s_zero, seed, stdout)
        }
        Command::Hunt { theorem, config, out, seed } => run_hunt(theorem.map(Into::into), &config, out.as_deref(), seed, stdout),
        Command::Props { suite, trials, seed } => props(suite, trials, seed, stdout),
        Command::Selftest { log } => run_selftest(log.as_deref(), stdout),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            emit(stderr, &f.to_json());
            f.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run(argv, &mut stdout.lock(), &mut stderr.lock());
    let _ = std::io::stdout().flush();
    code
}

fn eval(path: &Path, which: PathArg, seed: Option<u64>, out: &mut dyn Write) -> CliResult {
    let doc = InstanceDocument::parse(&read(path)?)?;
    let inst = doc.local_product_instance()?;
    let cfg = doc.quadrature_config(seed)?;
    let head = json!({
        "a": inst.a, "b": inst.b, "k": inst.k, "sheet": inst.sheet, "pairing": inst.pairing.name(),
        "quadrature": QuadratureSpec::from_config(&cfg),
    });
    let (body, converged) = match which {
        PathArg::Direct => {
            let d = local_product_direct(&inst, &cfg)?;
            (json!({ "direct": d }), d.converged)
        }
        PathArg::Closed => {
            let c = local_product_closed(&inst, &cfg)?;
            (json!({ "closed": c }), c.converged)
        }
        PathArg::Both => {
            let c = compare_paths(&inst, &cfg)?;
            (
                json!({ "direct": c.direct, "closed": c.closed, "abs_diff": c.abs_diff, "rel_diff": c.rel_diff }),
                c.direct.converged && c.closed.converged,
            )
        }
    };
    let mut obj = head;
    obj.as_object_mut().expect("object").extend(body.as_object().expect("object").clone());
    emit(out, &obj);
    Ok(if converged { EXIT_OK } else { EXIT_NUMERICAL })
}

fn check(theorem: TheoremId, path: &Path, allow_s_zero: bool, seed: Option<u64>, out: &mut dyn Write) -> CliResult {
    let doc = InstanceDocument::parse(&read(path)?)?;
    let s = doc.theorem_s(allow_s_zero)?;
    let cfg = doc.quadrature_config(seed)?;
    let (a, b) = doc.vectors();
    let r = report(theorem, &a, &b, s, &cfg, CheckOptions { allow_s_zero })?;
    let code = match (r.verdict, r.converged) {
        (Verdict::Violated, _) => EXIT_FOUND,
        (_, false) => EXIT_NUMERICAL,
        _ => EXIT_OK,
    };
    let _ = writeln!(out, "{}", Record::TheoremReport(r).to_line());
    Ok(code)
}

fn run_hunt(
    theorem: Option<TheoremId>,
    config: &Path,
    out_path: Option<&Path>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> CliResult {
    let mut doc = HuntDocument::parse(&read(config)?)?;
    if let Some(t) = theorem {
        doc.search.theorem = t;
    }
    if let Some(s) = seed {
        doc.search.seed = s;
    }
    let cfg: QuadratureConfig = doc
        .quadrature
        .clone()
        .unwrap_or_default()
        .to_config(doc.search.n_range[1], None)
        .map_err(|e| ValidationError { field: format!("quadrature.{}", e.field), message: e.message })?;
    let outcome = hunt(&doc.search, &cfg)?;
    if let Some(p) = out_path {
        let mut text = String::new();
        for r in &outcome.records {
            text.push_str(&Record::Violation(r.clone()).to_line());
            text.push('\n');
        }
        write_file(p, &text)?;
    }
    let mut failure_kinds = serde_json::Map::new();
    for f in &outcome.failures {
        let c = failure_kinds.entry(f.kind.clone()).or_insert(json!(0));
        *c = json!(c.as_u64().unwrap_or(0) + 1);
    }
    emit(
        out,
        &json!({
            "theorem": doc.search.theorem,
            "seed": doc.search.seed,
            "samples": outcome.samples,
            "holds": outcome.holds,
            "violations": outcome.records.len(),
            "inconclusive": outcome.inconclusive,
            "failures": outcome.failures.len(),
            "failure_kinds": failure_kinds,
            "refined_violations": outcome.records.iter().filter(|r| r.refined).count(),
        }),
    );
    Ok(if outcome.records.is_empty() { EXIT_OK } else { EXIT_FOUND })
}

fn props(suite: Suite, trials: usize, seed: u64, out: &mut dyn Write) -> CliResult {
    if trials == 0 {
        return Err(ValidationError { field: "trials".into(), message: "must be ≥ 1".into() }.into());
    }
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut redrawn = 0;
    let mut failures = Vec::new();
    let mut done = 0;
    // draws the kernel cannot evaluate are redrawn, bounded so a bad seed
    // cannot loop forever
    let max_draws = trials * 100;
    let mut draws = 0;
    while done < trials && draws < max_draws {
        draws += 1;
        let (inst, result) = match suite {
            Suite::Swap => {
                let inst = selftest::swap_instance(&mut rng);
                let r = prop_swap_identity_check(&inst, &cfg).map(|c| (c.pass, json!(c)));
                (inst, r)
            }
            Suite::Modulus => {
                let inst = selftest::modulus_instance(&mut rng);
                let r = modulus_bound_check(&inst, &cfg).map(|c| (c.pass, json!(c)));
                (inst, r)
            }
        };
        match result {
            Ok((pass, detail)) => {
                done += 1;
                if pass {
                    passed += 1;
                } else {
                    failures.push(json!({
                        "a": inst.a, "b": inst.b, "k": inst.k, "sheet": inst.sheet, "check": detail,
                    }));
                }
            }
            Err(_) => redrawn += 1,
        }
    }
    let suite_name = match suite {
        Suite::Swap => "swap",
        Suite::Modulus => "modulus",
    };
    emit(
        out,
        &json!({
            "suite": suite_name, "seed": seed, "trials": done, "passed": passed,
            "redrawn": redrawn, "failures": failures,
        }),
    );
    Ok(if failures.is_empty() && done == trials { EXIT_OK } else { EXIT_FOUND })
}

fn run_selftest(log: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let records = selftest::run_all();
    let text = selftest::to_jsonl(&records);
    if let Some(p) = log {
        write_file(p, &text)?;
    }
    let _ = out.write_all(text.as_bytes());
    Ok(if records.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FOUND })
}
