//! The acceptance suite. Every criterion is deterministic: fixed seeds,
//! fixed quadrature configs, and no timing data in the log, so two runs
//! produce byte-identical JSONL.

use std::f64::consts::{E, LN_2};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::document::{CriterionRecord, Record};
use crate::error::Result;
use crate::falsify::{hunt, SearchConfig};
use crate::local_product::{compare_paths, LocalProductInstance};
use crate::quadrature::{gl_integrate, integrate_box, mc_integrate, Kernel, QuadratureConfig, DEFAULT_SEED};
use crate::sheet::Sheet;
use crate::space::{BoxDomain, Pairing, RealVector};
use crate::theorems::{
    modulus_bound_check, prop_swap_identity_check, thm_app2_report, thm_app3_report, TheoremId, Verdict,
};

pub const SELFTEST_SEED: u64 = 0x5EED_2024;

pub const EXACTNESS_TOL: f64 = 1e-12;
pub const ORACLE_GL_TOL: f64 = 1e-8;
pub const ORACLE_MC_SAMPLES: u64 = 100_000;
pub const ORACLE_MC_SIGMAS: f64 = 4.0;
pub const PATH_INSTANCES: usize = 100;
pub const PATH_REL_TOL: f64 = 1e-6;
pub const PATH_ABS_TOL: f64 = 1e-9;
pub const APP2_LHS: f64 = 1.5;
pub const APP2_LHS_TOL: f64 = 1e-9;
pub const APP2_RHS: f64 = 15.154;
pub const APP2_RHS_TOL: f64 = 1e-3;
pub const APP3_LHS_TOL: f64 = 1e-9;
pub const APP3_RHS: f64 = 0.016946;
pub const APP3_RHS_TOL: f64 = 1e-6;
pub const SWEEP_INSTANCES: u64 = 200;
pub const SWEEP_MAX_INCONCLUSIVE_FRACTION: f64 = 0.02;
pub const HUNT_SAMPLES: u64 = 10_000;
pub const REPLAY_REL_TOL: f64 = 1e-12;
pub const SWAP_INSTANCES: usize = 50;
pub const MODULUS_INSTANCES: usize = 100;

/// Exact value of the integral of `√(x² + y²)` over the unit square.
pub fn euclidean_unit_square_integral() -> f64 {
    (2f64.sqrt() + 1f64.asinh()) / 3.0
}

fn outcome(id: u32, name: &str, passed: bool, detail: Value) -> CriterionRecord {
    CriterionRecord { id, name: name.to_string(), passed, detail }
}

fn failed(id: u32, name: &str, err: impl std::fmt::Display) -> CriterionRecord {
    outcome(id, name, false, json!({ "error": err.to_string() }))
}

fn v(x: Vec<f64>) -> RealVector {
    RealVector::new(x).expect("finite draws")
}

/// Criterion 1: A 2-point Gauss–Legendre rule integrates x³ over [0, 2] to 4.
pub fn quadrature_exactness() -> CriterionRecord {
    let name = "quadrature exactness";
    let run = || -> Result<CriterionRecord> {
        let domain = BoxDomain::new(vec![0.0], vec![2.0])?;
        let r = gl_integrate(&Kernel::Monomial(vec![3]), &domain, 2)?;
        let err = (r.value.re - 4.0).abs() + r.value.im.abs();
        Ok(outcome(1, name, err <= EXACTNESS_TOL, json!({ "value": r.value.re, "abs_err": err, "tol": EXACTNESS_TOL })))
    };
    run().unwrap_or_else(|e| failed(1, name, e))
}

/// Criterion 2: Refined GL and Monte Carlo on the ℓ² norm over the unit square.
pub fn quadrature_oracle() -> CriterionRecord {
    let name = "quadrature oracle";
    let run = || -> Result<CriterionRecord> {
        let exact = euclidean_unit_square_integral();
        let domain = BoxDomain::new(vec![0.0, 0.0], vec![1.0, 1.0])?;
        let gl = integrate_box(&Kernel::LpNorm(2), &domain, &QuadratureConfig::default())?;
        let gl_err = (gl.value.re - exact).abs();
        let mc = mc_integrate(&Kernel::LpNorm(2), &domain, ORACLE_MC_SAMPLES, DEFAULT_SEED)?;
        let mc_dev = (mc.value.re - exact).abs();
        let passed = gl_err <= ORACLE_GL_TOL && mc_dev <= ORACLE_MC_SIGMAS * mc.error_estimate;
        Ok(outcome(
            2,
            name,
            passed,
            json!({
                "exact": exact,
                "gl": gl.value.re, "gl_abs_err": gl_err, "gl_tol": ORACLE_GL_TOL,
                "mc": mc.value.re, "mc_std_err": mc.error_estimate,
                "mc_sigmas": mc_dev / mc.error_estimate,
            }),
        ))
    };
    run().unwrap_or_else(|e| failed(2, name, e))
}

/// Random instance for the path-equivalence suite: n ∈ {1,2,3},
/// k ∈ {4,7,8}, components in [0.2, 2].
fn path_instance(rng: &mut ChaCha8Rng) -> LocalProductInstance {
    const SHEETS: [Sheet; 5] = [Sheet::Constant(1.0), Sheet::Log, Sheet::Identity, Sheet::Reciprocal, Sheet::ReciprocalLog];
    let n = rng.random_range(1..=3usize);
    let k = [4, 7, 8][rng.random_range(0..3usize)];
    let sheet = SHEETS[rng.random_range(0..SHEETS.len())];
    let mut draw = || v((0..n).map(|_| rng.random_range(0.2..=2.0)).collect());
    let a = draw();
    let b = draw();
    LocalProductInstance::new(a, b, k, sheet)
}

/// Criterion 3: Direct and closed-form paths agree on 100 seeded instances. Draws
/// outside a sheet's domain (overflowing kernels, `<a,b> = 1`) are redrawn.
pub fn path_equivalence() -> CriterionRecord {
    let name = "path equivalence";
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED);
    let mut checked = 0;
    let mut redrawn = 0;
    let mut worst_rel = 0.0_f64;
    let mut failures = Vec::new();
    while checked < PATH_INSTANCES {
        let inst = path_instance(&mut rng);
        let cmp = match compare_paths(&inst, &cfg) {
            Ok(c) => c,
            Err(_) => {
                redrawn += 1;
                continue;
            }
        };
        checked += 1;
        worst_rel = worst_rel.max(cmp.rel_diff);
        if !cmp.agrees(PATH_REL_TOL, PATH_ABS_TOL) {
            failures.push(json!({
                "a": inst.a, "b": inst.b, "k": inst.k, "sheet": inst.sheet,
                "abs_diff": cmp.abs_diff, "rel_diff": cmp.rel_diff,
            }));
        }
    }
    outcome(
        3,
        name,
        failures.is_empty(),
        json!({ "instances": checked, "redrawn": redrawn, "worst_rel_diff": worst_rel, "failures": failures }),
    )
}

/// Criterion 4: app2 at a = (1), b = (2), s = 1.
pub fn app2_analytic() -> CriterionRecord {
    let name = "app2 analytic case";
    let run = || -> Result<CriterionRecord> {
        let r = thm_app2_report(&v(vec![1.0]), &v(vec![2.0]), 1, &QuadratureConfig::default())?;
        let passed = (r.lhs - APP2_LHS).abs() <= APP2_LHS_TOL
            && (r.rhs - APP2_RHS).abs() <= APP2_RHS_TOL
            && r.verdict == Verdict::Holds;
        Ok(outcome(4, name, passed, json!({ "lhs": r.lhs, "rhs": r.rhs, "verdict": r.verdict })))
    };
    run().unwrap_or_else(|e| failed(4, name, e))
}

/// Criterion 5: app3 at a = (1), b = (2), s = 1.
pub fn app3_analytic() -> CriterionRecord {
    let name = "app3 analytic case";
    let run = || -> Result<CriterionRecord> {
        let r = thm_app3_report(&v(vec![1.0]), &v(vec![2.0]), 1, &QuadratureConfig::default())?;
        let passed = (r.lhs - LN_2).abs() <= APP3_LHS_TOL
            && (r.rhs - APP3_RHS).abs() <= APP3_RHS_TOL
            && r.verdict == Verdict::Holds;
        Ok(outcome(5, name, passed, json!({ "lhs": r.lhs, "rhs": r.rhs, "verdict": r.verdict })))
    };
    run().unwrap_or_else(|e| failed(5, name, e))
}

pub fn sweep_config(theorem: TheoremId) -> SearchConfig {
    let pairing_range = match theorem {
        TheoremId::App2 => [1.1, 10.0],
        TheoremId::App3 => [1.1, E],
    };
    SearchConfig {
        theorem,
        n_range: [1, 3],
        s_range: [1, 2],
        pairing_range: pairing_range.into(),
        component_range: [0.1, 4.0].into(),
        samples: SWEEP_INSTANCES,
        seed: SELFTEST_SEED,
        max_attempts_per_sample: 1000,
    }
}

/// Criterion 6: No violations when `<a,b>` is bounded away from 1 from above.
pub fn in_regime_sweep() -> CriterionRecord {
    let name = "in-regime sweep";
    let cfg = QuadratureConfig::default();
    let mut passed = true;
    let mut detail = serde_json::Map::new();
    for theorem in [TheoremId::App2, TheoremId::App3] {
        match hunt(&sweep_config(theorem), &cfg) {
            Ok(out) => {
                let evaluated = out.samples - out.failures.len() as u64;
                let ok = out.records.is_empty()
                    && out.failures.is_empty()
                    && out.inconclusive as f64 <= SWEEP_MAX_INCONCLUSIVE_FRACTION * out.samples as f64;
                passed &= ok;
                detail.insert(
                    theorem.to_string(),
                    json!({
                        "evaluated": evaluated, "holds": out.holds, "violated": out.records.len(),
                        "inconclusive": out.inconclusive, "failures": out.failures,
                    }),
                );
            }
            Err(e) => {
                passed = false;
                detail.insert(theorem.to_string(), json!({ "error": e.to_string() }));
            }
        }
    }
    outcome(6, name, passed, Value::Object(detail))
}

pub fn counterexample_config(theorem: TheoremId) -> SearchConfig {
    SearchConfig {
        theorem,
        n_range: [2, 2],
        s_range: [1, 1],
        pairing_range: [0.0, 0.1].into(),
        component_range: [0.001, 2.0].into(),
        samples: HUNT_SAMPLES,
        seed: SELFTEST_SEED,
        max_attempts_per_sample: 1000,
    }
}

/// Coarser quadrature for the 10⁴-sample hunts; the violations it finds
/// clear the verdict guard by orders of magnitude.
pub fn counterexample_quadrature() -> QuadratureConfig {
    QuadratureConfig::gauss_legendre(8).with_max_levels(3).with_rel_tol(1e-6)
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs())
}

/// Criterion 7: Near-orthogonal pairs inside the stated hypotheses violate both
/// inequalities, and every record replays.
pub fn counterexample_existence() -> CriterionRecord {
    let name = "counterexample existence";
    let cfg = counterexample_quadrature();
    let mut passed = true;
    let mut detail = serde_json::Map::new();
    for theorem in [TheoremId::App2, TheoremId::App3] {
        match hunt(&counterexample_config(theorem), &cfg) {
            Ok(out) => {
                let mut replay_failures = 0;
                for rec in &out.records {
                    let ok = match rec.replay(&cfg) {
                        Ok(r) => {
                            r.verdict == Verdict::Violated
                                && rel_close(r.lhs, rec.lhs, REPLAY_REL_TOL)
                                && rel_close(r.rhs, rec.rhs, REPLAY_REL_TOL)
                        }
                        Err(_) => false,
                    };
                    if !ok {
                        replay_failures += 1;
                    }
                }
                let ok = !out.records.is_empty() && replay_failures == 0;
                passed &= ok;
                let first = out.records.first().map(|r| {
                    json!({ "sample_index": r.sample_index, "a": r.a, "b": r.b, "lhs": r.lhs, "rhs": r.rhs })
                });
                detail.insert(
                    theorem.to_string(),
                    json!({
                        "samples": out.samples, "violations": out.records.len(),
                        "inconclusive": out.inconclusive, "sample_failures": out.failures.len(),
                        "replay_failures": replay_failures, "first": first,
                    }),
                );
            }
            Err(e) => {
                passed = false;
                detail.insert(theorem.to_string(), json!({ "error": e.to_string() }));
            }
        }
    }
    outcome(7, name, passed, Value::Object(detail))
}

/// Symplectic instance for the swap identity: magnitudes in [0.5, 2] with
/// random signs, k ∈ {4, 7}.
pub fn swap_instance(rng: &mut ChaCha8Rng) -> LocalProductInstance {
    let mut comp = || {
        let m: f64 = rng.random_range(0.5..=2.0);
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    };
    let a = v(vec![comp(), comp()]);
    let b = v(vec![comp(), comp()]);
    let k = if rng.random::<bool>() { 4 } else { 7 };
    LocalProductInstance::new(a, b, k, Sheet::Identity).with_pairing(Pairing::Symplectic2D)
}

/// Criterion 8: Swap identity on 50 symplectic instances.
pub fn swap_identity() -> CriterionRecord {
    let name = "swap identity";
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED ^ 8);
    let mut passed_count = 0;
    let mut worst = 0.0_f64;
    let mut errors = Vec::new();
    for _ in 0..SWAP_INSTANCES {
        let inst = swap_instance(&mut rng);
        match prop_swap_identity_check(&inst, &cfg) {
            Ok(c) => {
                worst = worst.max(c.rel_err);
                if c.pass {
                    passed_count += 1;
                }
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    outcome(
        8,
        name,
        passed_count == SWAP_INSTANCES,
        json!({ "instances": SWAP_INSTANCES, "passed": passed_count, "worst_rel_err": worst, "errors": errors }),
    )
}

/// Random instance over every sheet: n ∈ {1,2,3}, k ∈ 4..=8, components in
/// [0.2, 2] with random signs (log sheets need `<a,b>` > 0, so those keep
/// positive components).
pub fn modulus_instance(rng: &mut ChaCha8Rng) -> LocalProductInstance {
    const SHEETS: [Sheet; 6] = [
        Sheet::Constant(1.0),
        Sheet::Identity,
        Sheet::Reciprocal,
        Sheet::Log,
        Sheet::ReciprocalLog,
        Sheet::AbsoluteValue,
    ];
    let sheet = SHEETS[rng.random_range(0..SHEETS.len())];
    let n = rng.random_range(1..=3usize);
    let k = rng.random_range(4..=8u32);
    let signed = !sheet.is_logarithmic();
    let mut comp = || {
        let m: f64 = rng.random_range(0.2..=2.0);
        if signed && rng.random::<bool>() {
            -m
        } else {
            m
        }
    };
    let a = v((0..n).map(|_| comp()).collect());
    let b = v((0..n).map(|_| comp()).collect());
    LocalProductInstance::new(a, b, k, sheet)
}

/// Criterion 9: The modulus bound on 100 instances across all sheets. Draws whose
/// kernel overflows or leaves the sheet's domain are redrawn.
pub fn modulus_bound() -> CriterionRecord {
    let name = "modulus bound";
    let cfg = QuadratureConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SELFTEST_SEED ^ 9);
    let mut checked = 0;
    let mut redrawn = 0;
    let mut failures = Vec::new();
    let mut per_sheet = serde_json::Map::new();
    while checked < MODULUS_INSTANCES {
        let inst = modulus_instance(&mut rng);
        let c = match modulus_bound_check(&inst, &cfg) {
            Ok(c) => c,
            Err(_) => {
                redrawn += 1;
                continue;
            }
        };
        checked += 1;
        let count = per_sheet.entry(inst.sheet.name()).or_insert(json!(0));
        *count = json!(count.as_u64().unwrap_or(0) + 1);
        if !c.pass {
            failures.push(json!({ "sheet": inst.sheet, "k": inst.k, "a": inst.a, "b": inst.b, "g_abs": c.g_abs, "bound": c.bound }));
        }
    }
    outcome(
        9,
        name,
        failures.is_empty(),
        json!({ "instances": checked, "redrawn": redrawn, "per_sheet": per_sheet, "failures": failures }),
    )
}

/// Criteria 1–9 in order.
pub fn run_criteria() -> Vec<CriterionRecord> {
    vec![
        quadrature_exactness(),
        quadrature_oracle(),
        path_equivalence(),
        app2_analytic(),
        app3_analytic(),
        in_regime_sweep(),
        counterexample_existence(),
        swap_identity(),
        modulus_bound(),
    ]
}

pub fn to_jsonl(records: &[CriterionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&Record::Criterion(r.clone()).to_line());
        out.push('\n');
    }
    out
}

/// Criterion 10: Reruns criteria 1–9 and compares the serialized logs byte for byte.
pub fn determinism(first: &[CriterionRecord]) -> CriterionRecord {
    let a = to_jsonl(first);
    let b = to_jsonl(&run_criteria());
    let differing = a.lines().zip(b.lines()).filter(|(x, y)| x != y).count();
    outcome(
        10,
        "determinism",
        a == b,
        json!({ "log_bytes": a.len(), "differing_lines": differing }),
    )
}

/// The whole suite: criteria 1–9, then the rerun comparison.
pub fn run_all() -> Vec<CriterionRecord> {
    let mut records = run_criteria();
    let det = determinism(&records);
    records.push(det);
    records
}
