//! Acceptance suite. Runs `localprod selftest` twice in separate processes,
//! re-checks every logged measurement against the tolerances below, and
//! prints one PASS/FAIL line per criterion.

use std::path::Path;
use std::process::{Command, ExitCode};

use serde_json::Value;

const EXACTNESS_TOL: f64 = 1e-12;
const ORACLE_GL_TOL: f64 = 1e-8;
const ORACLE_MC_SIGMAS: f64 = 4.0;
const PATH_INSTANCES: u64 = 100;
const PATH_REL_TOL: f64 = 1e-6;
const APP2_LHS: f64 = 1.5;
const APP2_RHS: f64 = 15.154;
const APP2_LHS_TOL: f64 = 1e-9;
const APP2_RHS_TOL: f64 = 1e-3;
const APP3_RHS: f64 = 0.016946;
const APP3_LHS_TOL: f64 = 1e-9;
const APP3_RHS_TOL: f64 = 1e-6;
const SWEEP_INSTANCES: u64 = 200;
const SWEEP_MAX_INCONCLUSIVE: u64 = 4;
const SWAP_INSTANCES: u64 = 50;
const MODULUS_INSTANCES: u64 = 100;

fn run_selftest(log: &Path) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_localprod"))
        .arg("selftest")
        .arg("--log")
        .arg(log)
        .output()
        .expect("spawn localprod");
    let file = std::fs::read(log).unwrap_or_default();
    (out.status.code().unwrap_or(-1), out.stdout, file)
}

fn f(v: &Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[*k]).as_f64().unwrap_or(f64::NAN)
}

fn u(v: &Value, path: &[&str]) -> u64 {
    path.iter().fold(v, |v, k| &v[*k]).as_u64().unwrap_or(u64::MAX)
}

fn s<'a>(v: &'a Value, path: &[&str]) -> &'a str {
    path.iter().fold(v, |v, k| &v[*k]).as_str().unwrap_or("")
}

fn len(v: &Value, path: &[&str]) -> usize {
    path.iter().fold(v, |v, k| &v[*k]).as_array().map_or(usize::MAX, Vec::len)
}

/// Independent re-check of a criterion's logged measurements.
fn recheck(id: u64, d: &Value) -> (bool, String) {
    match id {
        1 => {
            let err = f(d, &["abs_err"]);
            (err <= EXACTNESS_TOL, format!("|Q - 4| = {err:.3e} (tol {EXACTNESS_TOL:e})"))
        }
        2 => {
            let gl = f(d, &["gl_abs_err"]);
            let sig = f(d, &["mc_sigmas"]);
            (
                gl <= ORACLE_GL_TOL && sig <= ORACLE_MC_SIGMAS,
                format!("GL err {gl:.3e} (tol {ORACLE_GL_TOL:e}), MC at {sig:.2} sigma (max {ORACLE_MC_SIGMAS})"),
            )
        }
        3 => {
            let worst = f(d, &["worst_rel_diff"]);
            let n = u(d, &["instances"]);
            (
                n == PATH_INSTANCES && len(d, &["failures"]) == 0,
                format!("{n} instances, worst rel diff {worst:.3e} (tol {PATH_REL_TOL:e})"),
            )
        }
        4 => {
            let (l, r) = (f(d, &["lhs"]), f(d, &["rhs"]));
            (
                (l - APP2_LHS).abs() <= APP2_LHS_TOL && (r - APP2_RHS).abs() <= APP2_RHS_TOL && s(d, &["verdict"]) == "Holds",
                format!("lhs {l:.12}, rhs {r:.6}, {}", s(d, &["verdict"])),
            )
        }
        5 => {
            let (l, r) = (f(d, &["lhs"]), f(d, &["rhs"]));
            (
                (l - std::f64::consts::LN_2).abs() <= APP3_LHS_TOL
                    && (r - APP3_RHS).abs() <= APP3_RHS_TOL
                    && s(d, &["verdict"]) == "Holds",
                format!("lhs {l:.12}, rhs {r:.8}, {}", s(d, &["verdict"])),
            )
        }
        6 => {
            let mut ok = true;
            let mut parts = Vec::new();
            for t in ["app2", "app3"] {
                let (n, viol, inc) = (u(d, &[t, "evaluated"]), u(d, &[t, "violated"]), u(d, &[t, "inconclusive"]));
                ok &= n == SWEEP_INSTANCES && viol == 0 && inc <= SWEEP_MAX_INCONCLUSIVE;
                parts.push(format!("{t}: {n} evaluated, {viol} violated, {inc} inconclusive"));
            }
            (ok, parts.join("; "))
        }
        7 => {
            let mut ok = true;
            let mut parts = Vec::new();
            for t in ["app2", "app3"] {
                let (viol, bad) = (u(d, &[t, "violations"]), u(d, &[t, "replay_failures"]));
                ok &= viol >= 1 && viol != u64::MAX && bad == 0;
                parts.push(format!("{t}: {viol} violations, {bad} failed replays"));
            }
            (ok, parts.join("; "))
        }
        8 => {
            let (n, p) = (u(d, &["instances"]), u(d, &["passed"]));
            (n == SWAP_INSTANCES && p == n, format!("{p}/{n} instances, worst rel err {:.3e}", f(d, &["worst_rel_err"])))
        }
        9 => {
            let n = u(d, &["instances"]);
            (
                n == MODULUS_INSTANCES && len(d, &["failures"]) == 0,
                format!("{n} instances, {} sheets covered", d["per_sheet"].as_object().map_or(0, |m| m.len())),
            )
        }
        _ => (false, "unknown criterion".into()),
    }
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("tempdir");
    let (code1, stdout1, log1) = run_selftest(&dir.path().join("first.jsonl"));
    let (_, _, log2) = run_selftest(&dir.path().join("second.jsonl"));

    let records: Vec<Value> = String::from_utf8_lossy(&log1)
        .lines()
        .filter_map(|l| serde_json::from_str(l).ok())
        .collect();
    let mut all = true;
    let mut line = |id: u64, name: &str, ok: bool, detail: String| {
        all &= ok;
        println!("{} [{id:>2}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    };
    for id in 1..=9u64 {
        match records.iter().find(|r| r["id"].as_u64() == Some(id)) {
            Some(r) => {
                let (ok, detail) = recheck(id, &r["detail"]);
                line(id, r["name"].as_str().unwrap_or("?"), ok && r["passed"] == Value::Bool(true), detail);
            }
            None => line(id, "missing", false, "no record in the selftest log".into()),
        }
    }
    let in_process = records.iter().any(|r| r["id"].as_u64() == Some(10) && r["passed"] == Value::Bool(true));
    let identical = !log1.is_empty() && log1 == log2 && stdout1 == log1;
    line(
        10,
        "determinism",
        in_process && identical,
        format!("two processes {} ({} bytes), in-process rerun {}", if identical { "byte-identical" } else { "differ" }, log1.len(), if in_process { "identical" } else { "differs" }),
    );
    let exit_ok = code1 == 0;
    if !exit_ok {
        println!("FAIL selftest exit code {code1}");
    }
    if all && exit_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
