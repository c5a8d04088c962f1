use local_product_web::{check, evaluate, kernel_profile};
use serde_json::Value;

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn evaluate_returns_both_paths() {
    let v = parse(&evaluate(r#"{"a":[1,1],"b":[2,3],"k":4,"sheet":"log"}"#).unwrap());
    let d = v["direct"]["value"]["im"].as_f64().unwrap();
    let c = v["closed"]["value"]["im"].as_f64().unwrap();
    assert!((d - c).abs() < 1e-12);
    assert!(v["rel_diff"].as_f64().unwrap() < 1e-10);
}

#[test]
fn evaluate_reports_field_errors() {
    let e = parse(&evaluate(r#"{"a":[1],"b":[2],"k":4,"sheet":"nope"}"#).unwrap_err());
    assert_eq!(e["field"], "sheet");
    let e = parse(&evaluate(r#"{"a":[1],"b":[2],"k":4,"sheet":"log","x":1}"#).unwrap_err());
    assert_eq!(e["field"], "x");
    let e = parse(&evaluate(r#"{"a":[1],"b":[1],"k":4,"sheet":"log"}"#).unwrap_err());
    assert_eq!(e["kind"], "DomainError");
}

#[test]
fn evaluation_budget_is_capped() {
    let v = parse(
        &evaluate(r#"{"a":[1,1,1],"b":[2,2,2],"k":4,"sheet":"id","quadrature":{"max_evaluations":100000000}}"#)
            .unwrap(),
    );
    assert_eq!(v["quadrature"]["max_evaluations"], local_product_web::WEB_MAX_EVALUATIONS);
}

#[test]
fn check_matches_known_case() {
    let v = parse(&check("app2", r#"{"a":[1],"b":[2],"s":1}"#).unwrap());
    assert!((v["lhs"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert_eq!(v["verdict"], "Holds");
    let v = parse(&check("app2", r#"{"a":[0.8,0.7],"b":[0.05,0.07],"s":1}"#).unwrap());
    assert_eq!(v["verdict"], "Violated");
    let e = parse(&check("app7", r#"{"a":[1],"b":[2],"s":1}"#).unwrap_err());
    assert_eq!(e["field"], "theorem");
}

#[test]
fn profile_samples_the_diagonal() {
    let v = parse(&kernel_profile(r#"{"a":[1],"b":[2],"k":4,"sheet":"id","points":5}"#).unwrap());
    let t: Vec<f64> = serde_json::from_value(v["t"].clone()).unwrap();
    assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    // k = 4: e(x / 33) has modulus one
    let re: Vec<f64> = serde_json::from_value(v["re"].clone()).unwrap();
    let im: Vec<f64> = serde_json::from_value(v["im"].clone()).unwrap();
    for (x, y) in re.iter().zip(&im) {
        assert!((x.hypot(*y) - 1.0).abs() < 1e-12);
    }
    assert_eq!(v["scale"].as_f64().unwrap(), 33.0);
    let at_start = 2.0 * std::f64::consts::PI / 33.0;
    assert!((re[0] - at_start.cos()).abs() < 1e-12 && (im[0] - at_start.sin()).abs() < 1e-12);
}

#[test]
fn profile_validation() {
    assert!(kernel_profile(r#"{"a":[1],"b":[2],"k":4,"sheet":"id","points":1}"#).is_err());
    assert!(kernel_profile(r#"{"a":[1],"b":[2],"k":0,"sheet":"id"}"#).is_err());
    assert!(kernel_profile(r#"{"a":[1],"b":[2,3],"k":4,"sheet":"id"}"#).is_err());
    assert!(kernel_profile(r#"{"a":[1],"b":[2],"k":4,"sheet":"id","extra":0}"#).is_err());
}
