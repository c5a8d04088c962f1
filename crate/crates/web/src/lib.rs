//! Browser bindings for the local-product library.
//!
//! Each operation is a plain `&str -> Result<String, String>` function over
//! JSON, so it is testable natively; the `wasm32` build wraps them with
//! `wasm-bindgen`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use local_product::document::{InstanceDocument, QuadratureSpec};
use local_product::local_product::{compare_paths, scale_denominator};
use local_product::quadrature::Kernel;
use local_product::space::box_from_pair;
use local_product::theorems::{report, CheckOptions, TheoremId};
use local_product::Error;

/// Web builds cap the work per integration so a page never stalls.
pub const WEB_MAX_EVALUATIONS: u64 = 1 << 20;
pub const MAX_PROFILE_POINTS: usize = 2000;

fn error_json(kind: &str, field: Option<&str>, message: &str) -> String {
    json!({ "kind": kind, "field": field, "message": message }).to_string()
}

fn compute_error(e: Error) -> String {
    error_json(e.kind(), None, &e.to_string())
}

fn parse(input: &str) -> Result<InstanceDocument, String> {
    InstanceDocument::parse(input).map_err(|e| error_json("ValidationError", Some(&e.field), &e.message))
}

fn capped(doc: &InstanceDocument) -> Result<local_product::QuadratureConfig, String> {
    let mut cfg = doc
        .quadrature_config(None)
        .map_err(|e| error_json("ValidationError", Some(&e.field), &e.message))?;
    cfg.max_evaluations = cfg.max_evaluations.min(WEB_MAX_EVALUATIONS);
    Ok(cfg)
}

/// Both evaluation paths for an instance document (`a`, `b`, `k`, `sheet`).
pub fn evaluate(input: &str) -> Result<String, String> {
    let doc = parse(input)?;
    let inst = doc
        .local_product_instance()
        .map_err(|e| error_json("ValidationError", Some(&e.field), &e.message))?;
    let cfg = capped(&doc)?;
    let c = compare_paths(&inst, &cfg).map_err(compute_error)?;
    Ok(json!({
        "direct": c.direct,
        "closed": c.closed,
        "abs_diff": c.abs_diff,
        "rel_diff": c.rel_diff,
        "quadrature": QuadratureSpec::from_config(&cfg),
    })
    .to_string())
}

/// Theorem report for `theorem` ("app2" or "app3") on a document with `s`.
pub fn check(theorem: &str, input: &str) -> Result<String, String> {
    let theorem: TheoremId = theorem
        .parse()
        .map_err(|e: Error| error_json("ValidationError", Some("theorem"), &e.to_string()))?;
    let doc = parse(input)?;
    let s = doc
        .theorem_s(false)
        .map_err(|e| error_json("ValidationError", Some(&e.field), &e.message))?;
    let cfg = capped(&doc)?;
    let (a, b) = doc.vectors();
    let r = report(theorem, &a, &b, s, &cfg, CheckOptions::default()).map_err(compute_error)?;
    serde_json::to_string(&r).map_err(|e| error_json("Serialization", None, &e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRequest {
    a: Vec<f64>,
    b: Vec<f64>,
    k: u32,
    sheet: String,
    #[serde(default = "default_points")]
    points: usize,
}

fn default_points() -> usize {
    200
}

#[derive(Debug, Serialize)]
struct Profile {
    t: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    scale: f64,
}

/// The integrand `f(e(i^k ||x||_k / scale))` sampled along the box diagonal
/// from `|a|` to `|b|`, at `t ∈ [0, 1]`.
pub fn kernel_profile(input: &str) -> Result<String, String> {
    let req: ProfileRequest =
        serde_json::from_str(input).map_err(|e| error_json("ValidationError", None, &e.to_string()))?;
    if !(2..=MAX_PROFILE_POINTS).contains(&req.points) {
        return Err(error_json(
            "ValidationError",
            Some("points"),
            &format!("must be in 2..={MAX_PROFILE_POINTS}"),
        ));
    }
    if req.k == 0 {
        return Err(error_json("ValidationError", Some("k"), "k must be ≥ 1"));
    }
    let sheet = req
        .sheet
        .parse()
        .map_err(|e: Error| error_json("ValidationError", Some("sheet"), &e.to_string()))?;
    let a = local_product::RealVector::new(req.a).map_err(compute_error)?;
    let b = local_product::RealVector::new(req.b).map_err(compute_error)?;
    let domain = box_from_pair(&a, &b).map_err(compute_error)?;
    let scale = scale_denominator(&a, &b, req.k).map_err(compute_error)?;
    let kernel = Kernel::SheetPhase { sheet, k: req.k, scale };
    let mut p = Profile { t: Vec::new(), re: Vec::new(), im: Vec::new(), scale };
    let mut x = vec![0.0; domain.dim()];
    for i in 0..req.points {
        let t = i as f64 / (req.points - 1) as f64;
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = domain.lower()[j] + t * (domain.upper()[j] - domain.lower()[j]);
        }
        let z = kernel.eval(&x);
        p.t.push(t);
        // JSON has no infinities; overflowed samples become null
        p.re.push(z.re);
        p.im.push(z.im);
    }
    let v: Value = serde_json::to_value(&p).map_err(|e| error_json("Serialization", None, &e.to_string()))?;
    Ok(v.to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen(js_name = evaluate)]
    pub fn evaluate(input: &str) -> Result<String, JsValue> {
        super::evaluate(input).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = check)]
    pub fn check(theorem: &str, input: &str) -> Result<String, JsValue> {
        super::check(theorem, input).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen(js_name = kernelProfile)]
    pub fn kernel_profile(input: &str) -> Result<String, JsValue> {
        super::kernel_profile(input).map_err(|e| JsValue::from_str(&e))
    }
}
