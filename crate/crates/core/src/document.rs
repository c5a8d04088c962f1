//! JSON documents: the instance schema read by `eval`/`check`, the hunt
//! config, and the JSONL record envelope.
//!
//! ```json
//! {"a": [1, 1], "b": [2, 3], "k": 4, "sheet": "log", "pairing": "dot",
//!  "quadrature": {"method": "gl", "nodes": 16, "rel_tol": 1e-8, "max_levels": 6}}
//! ```

use std::fmt;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;
use crate::falsify::{SearchConfig, ViolationRecord};
use crate::local_product::LocalProductInstance;
use crate::quadrature::{
    QuadratureConfig, QuadratureMethod, DEFAULT_GL_NODES, DEFAULT_MAX_EVALUATIONS, DEFAULT_MAX_LEVELS,
    DEFAULT_MC_SAMPLES, DEFAULT_REL_TOL, DEFAULT_SEED, GL_AUTO_MAX_DIM,
};
use crate::sheet::Sheet;
use crate::space::{Pairing, RealVector};
use crate::theorems::TheoremReport;

/// A schema violation, naming the offending field (dotted path; `$` is the
/// document root).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationError {
    pub field: String,
    pub message: String,
}

impl ValidationError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        ValidationError { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for ValidationError {}

impl From<ValidationError> for Error {
    fn from(e: ValidationError) -> Self {
        Error::InvalidConfig(e.to_string())
    }
}

type VResult<T> = std::result::Result<T, ValidationError>;

fn parse_object(text: &str) -> VResult<Map<String, Value>> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ValidationError::new("$", "expected a JSON object")),
        Err(e) => Err(ValidationError::new("$", format!("malformed JSON: {e}"))),
    }
}

fn reject_unknown(obj: &Map<String, Value>, prefix: &str, allowed: &[&str]) -> VResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ValidationError::new(format!("{prefix}{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, prefix: &str, name: &str) -> VResult<Option<T>> {
    match obj.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| ValidationError::new(format!("{prefix}{name}"), e.to_string())),
    }
}

fn required<T: DeserializeOwned>(obj: &Map<String, Value>, prefix: &str, name: &str) -> VResult<T> {
    field(obj, prefix, name)?.ok_or_else(|| ValidationError::new(format!("{prefix}{name}"), "missing required field"))
}

/// Optional quadrature block; absent fields take library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_levels: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<u64>,
}

impl QuadratureSpec {
    const FIELDS: [&'static str; 7] = ["method", "nodes", "samples", "seed", "rel_tol", "max_levels", "max_evaluations"];

    pub fn from_value(v: &Value, prefix: &str) -> VResult<Self> {
        let Value::Object(obj) = v else {
            return Err(ValidationError::new(prefix.trim_end_matches('.'), "expected an object"));
        };
        reject_unknown(obj, prefix, &Self::FIELDS)?;
        let spec = QuadratureSpec {
            method: field(obj, prefix, "method")?,
            nodes: field(obj, prefix, "nodes")?,
            samples: field(obj, prefix, "samples")?,
            seed: field(obj, prefix, "seed")?,
            rel_tol: field(obj, prefix, "rel_tol")?,
            max_levels: field(obj, prefix, "max_levels")?,
            max_evaluations: field(obj, prefix, "max_evaluations")?,
        };
        spec.to_config(1, None).map_err(|e| ValidationError::new(format!("{prefix}{}", e.field), e.message))?;
        Ok(spec)
    }

    /// Builds the config for an `n`-dimensional problem. Seed precedence:
    /// `seed_override` (the CLI flag), then the file, then the default.
    pub fn to_config(&self, n: usize, seed_override: Option<u64>) -> VResult<QuadratureConfig> {
        let method = match self.method.as_deref() {
            None if n > GL_AUTO_MAX_DIM => "mc",
            None => "gl",
            Some(m @ ("gl" | "mc")) => m,
            Some(other) => return Err(ValidationError::new("method", format!("expected \"gl\" or \"mc\", got {other:?}"))),
        };
        let method = if method == "gl" {
            QuadratureMethod::GaussLegendre { nodes_per_dim: self.nodes.unwrap_or(DEFAULT_GL_NODES) }
        } else {
            QuadratureMethod::MonteCarlo {
                samples: self.samples.unwrap_or(DEFAULT_MC_SAMPLES),
                seed: seed_override.or(self.seed).unwrap_or(DEFAULT_SEED),
            }
        };
        let cfg = QuadratureConfig {
            method,
            max_levels: self.max_levels.unwrap_or(DEFAULT_MAX_LEVELS),
            rel_tol: self.rel_tol.unwrap_or(DEFAULT_REL_TOL),
            max_evaluations: self.max_evaluations.unwrap_or(DEFAULT_MAX_EVALUATIONS),
        };
        cfg.validate().map_err(|e| {
            let field = match &e {
                Error::InvalidConfig(m) if m.contains("nodes") => "nodes",
                Error::InvalidConfig(m) if m.contains("samples") => "samples",
                Error::InvalidConfig(m) if m.contains("max_levels") => "max_levels",
                Error::InvalidConfig(m) if m.contains("rel_tol") => "rel_tol",
                _ => "max_evaluations",
            };
            ValidationError::new(field, e.to_string())
        })?;
        Ok(cfg)
    }

    pub fn from_config(cfg: &QuadratureConfig) -> Self {
        let mut spec = QuadratureSpec {
            rel_tol: Some(cfg.rel_tol),
            max_levels: Some(cfg.max_levels),
            max_evaluations: Some(cfg.max_evaluations),
            ..Default::default()
        };
        match cfg.method {
            QuadratureMethod::GaussLegendre { nodes_per_dim } => {
                spec.method = Some("gl".into());
                spec.nodes = Some(nodes_per_dim);
            }
            QuadratureMethod::MonteCarlo { samples, seed } => {
                spec.method = Some("mc".into());
                spec.samples = Some(samples);
                spec.seed = Some(seed);
            }
        }
        spec
    }
}

/// The instance file read by `eval` and `check`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDocument {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sheet: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
}

impl InstanceDocument {
    const FIELDS: [&'static str; 7] = ["a", "b", "s", "k", "sheet", "pairing", "quadrature"];

    /// Parses and validates; nothing is computed on failure.
    pub fn parse(text: &str) -> VResult<Self> {
        let obj = parse_object(text)?;
        reject_unknown(&obj, "", &Self::FIELDS)?;
        let doc = InstanceDocument {
            a: required(&obj, "", "a")?,
            b: required(&obj, "", "b")?,
            s: field(&obj, "", "s")?,
            k: field(&obj, "", "k")?,
            sheet: field(&obj, "", "sheet")?,
            pairing: field(&obj, "", "pairing")?,
            quadrature: match obj.get("quadrature") {
                None | Some(Value::Null) => None,
                Some(v) => Some(QuadratureSpec::from_value(v, "quadrature.")?),
            },
        };
        doc.check_fields()?;
        Ok(doc)
    }

    fn check_fields(&self) -> VResult<()> {
        RealVector::new(self.a.clone()).map_err(|e| ValidationError::new("a", e.to_string()))?;
        RealVector::new(self.b.clone()).map_err(|e| ValidationError::new("b", e.to_string()))?;
        if self.a.len() != self.b.len() {
            return Err(ValidationError::new(
                "b",
                format!("length {} differs from a's length {}", self.b.len(), self.a.len()),
            ));
        }
        if let Some(name) = &self.sheet {
            name.parse::<Sheet>().map_err(|e| ValidationError::new("sheet", e.to_string()))?;
        }
        self.pairing_kind()?;
        Ok(())
    }

    fn pairing_kind(&self) -> VResult<Pairing> {
        let p = match self.pairing.as_deref() {
            None | Some("dot") => Pairing::DotProduct,
            Some("symplectic2d") => Pairing::Symplectic2D,
            Some(other) => {
                return Err(ValidationError::new("pairing", format!("expected \"dot\" or \"symplectic2d\", got {other:?}")))
            }
        };
        if !p.supports_dim(self.a.len()) {
            return Err(ValidationError::new("pairing", format!("{} is not defined for n = {}", p.name(), self.a.len())));
        }
        Ok(p)
    }

    pub fn vectors(&self) -> (RealVector, RealVector) {
        // validated in parse
        (
            RealVector::new(self.a.clone()).expect("validated"),
            RealVector::new(self.b.clone()).expect("validated"),
        )
    }

    pub fn quadrature_config(&self, seed_override: Option<u64>) -> VResult<QuadratureConfig> {
        self.quadrature
            .clone()
            .unwrap_or_default()
            .to_config(self.a.len(), seed_override)
            .map_err(|e| ValidationError::new(format!("quadrature.{}", e.field), e.message))
    }

    /// `eval` needs `k` and `sheet`, and no `s`.
    pub fn local_product_instance(&self) -> VResult<LocalProductInstance> {
        if self.s.is_some() {
            return Err(ValidationError::new("s", "eval takes k, not s"));
        }
        let k = self.k.ok_or_else(|| ValidationError::new("k", "missing required field"))?;
        if k == 0 {
            return Err(ValidationError::new("k", "k must be ≥ 1"));
        }
        let sheet: Sheet = self
            .sheet
            .as_deref()
            .ok_or_else(|| ValidationError::new("sheet", "missing required field"))?
            .parse()
            .map_err(|e: Error| ValidationError::new("sheet", e.to_string()))?;
        let (a, b) = self.vectors();
        Ok(LocalProductInstance::new(a, b, k, sheet).with_pairing(self.pairing_kind()?))
    }

    /// `check` needs `s` and no `k`; returns `s`.
    pub fn theorem_s(&self, allow_s_zero: bool) -> VResult<u32> {
        if self.k.is_some() {
            return Err(ValidationError::new("k", "check takes s, not k"));
        }
        if self.pairing_kind()? != Pairing::DotProduct {
            return Err(ValidationError::new("pairing", "theorems are stated for the dot product"));
        }
        let s = self.s.ok_or_else(|| ValidationError::new("s", "missing required field"))?;
        if s == 0 && !allow_s_zero {
            return Err(ValidationError::new("s", "s must be ≥ 1"));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Hunt config file: a [`SearchConfig`] plus an optional quadrature block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntDocument {
    #[serde(flatten)]
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
}

impl HuntDocument {
    pub fn parse(text: &str) -> VResult<Self> {
        let obj = parse_object(text)?;
        reject_unknown(
            &obj,
            "",
            &[
                "theorem",
                "n_range",
                "s_range",
                "pairing_range",
                "component_range",
                "samples",
                "seed",
                "max_attempts_per_sample",
                "quadrature",
            ],
        )?;
        for name in ["theorem", "n_range", "s_range", "pairing_range", "component_range", "samples"] {
            if !obj.contains_key(name) {
                return Err(ValidationError::new(name, "missing required field"));
            }
        }
        // field-by-field so a type error names its field
        let _: String = required(&obj, "", "theorem")?;
        let _: [usize; 2] = required(&obj, "", "n_range")?;
        let _: [u32; 2] = required(&obj, "", "s_range")?;
        let _: [f64; 2] = required(&obj, "", "pairing_range")?;
        let _: [f64; 2] = required(&obj, "", "component_range")?;
        let _: u64 = required(&obj, "", "samples")?;
        let _: Option<u64> = field(&obj, "", "seed")?;
        let _: Option<u32> = field(&obj, "", "max_attempts_per_sample")?;
        if let Some(v) = obj.get("quadrature") {
            QuadratureSpec::from_value(v, "quadrature.")?;
        }
        let doc: HuntDocument =
            serde_json::from_value(Value::Object(obj)).map_err(|e| ValidationError::new("theorem", e.to_string()))?;
        doc.search.validate().map_err(|e| {
            let msg = e.to_string();
            let field = ["n_range", "s_range", "component_range", "pairing_range", "max_attempts_per_sample"]
                .into_iter()
                .find(|f| msg.contains(f))
                .unwrap_or("$");
            ValidationError::new(field, msg)
        })?;
        Ok(doc)
    }
}

/// Selftest log line for one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

/// One JSONL line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Record {
    TheoremReport(TheoremReport),
    Violation(ViolationRecord),
    Criterion(CriterionRecord),
}

impl Record {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_document() {
        let doc = InstanceDocument::parse(r#"{"a":[1,1],"b":[2,3],"k":4,"sheet":"log"}"#).unwrap();
        let inst = doc.local_product_instance().unwrap();
        assert_eq!(inst.k, 4);
        assert_eq!(inst.sheet, Sheet::Log);
        assert_eq!(inst.pairing, Pairing::DotProduct);
        assert_eq!(doc.quadrature_config(None).unwrap(), QuadratureConfig::default());
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"b":[1]}"#, "a"),
            (r#"{"a":[1],"b":[1,2]}"#, "b"),
            (r#"{"a":[],"b":[]}"#, "a"),
            (r#"{"a":["x"],"b":[1]}"#, "a"),
            (r#"{"a":[1],"b":[1],"sheet":"sin"}"#, "sheet"),
            (r#"{"a":[1],"b":[1],"pairing":"symplectic2d"}"#, "pairing"),
            (r#"{"a":[1],"b":[1],"colour":1}"#, "colour"),
            (r#"{"a":[1],"b":[1],"quadrature":{"method":"simpson"}}"#, "quadrature.method"),
            (r#"{"a":[1],"b":[1],"quadrature":{"nodes":1}}"#, "quadrature.nodes"),
            (r#"{"a":[1],"b":[1],"quadrature":{"method":"mc","samples":5}}"#, "quadrature.samples"),
            (r#"{"a":[1],"b":[1],"quadrature":{"rel_tol":"tight"}}"#, "quadrature.rel_tol"),
            (r#"[1,2]"#, "$"),
            (r#"{"a":[1],"#, "$"),
        ];
        for (text, want) in cases {
            let err = InstanceDocument::parse(text).unwrap_err();
            assert_eq!(err.field, want, "{text}: {err}");
        }
    }

    #[test]
    fn command_specific_fields() {
        let doc = InstanceDocument::parse(r#"{"a":[1],"b":[2],"s":0}"#).unwrap();
        assert_eq!(doc.theorem_s(false).unwrap_err().field, "s");
        assert_eq!(doc.theorem_s(true).unwrap(), 0);
        assert_eq!(doc.local_product_instance().unwrap_err().field, "s");
        let doc = InstanceDocument::parse(r#"{"a":[1],"b":[2],"k":3}"#).unwrap();
        assert_eq!(doc.theorem_s(false).unwrap_err().field, "k");
        assert_eq!(doc.local_product_instance().unwrap_err().field, "sheet");
    }

    #[test]
    fn seed_precedence() {
        let doc = InstanceDocument::parse(r#"{"a":[1],"b":[2],"quadrature":{"method":"mc","seed":5}}"#).unwrap();
        let seed = |c: QuadratureConfig| match c.method {
            QuadratureMethod::MonteCarlo { seed, .. } => seed,
            _ => unreachable!(),
        };
        assert_eq!(seed(doc.quadrature_config(Some(9)).unwrap()), 9);
        assert_eq!(seed(doc.quadrature_config(None).unwrap()), 5);
        let doc = InstanceDocument::parse(r#"{"a":[1],"b":[2],"quadrature":{"method":"mc"}}"#).unwrap();
        assert_eq!(seed(doc.quadrature_config(None).unwrap()), DEFAULT_SEED);
    }

    #[test]
    fn high_dimension_defaults_to_monte_carlo() {
        let doc = InstanceDocument::parse(r#"{"a":[1,1,1,1,1,1,1],"b":[2,2,2,2,2,2,2]}"#).unwrap();
        assert!(matches!(doc.quadrature_config(None).unwrap().method, QuadratureMethod::MonteCarlo { .. }));
    }

    #[test]
    fn quadrature_spec_round_trips_config() {
        for cfg in [QuadratureConfig::gauss_legendre(12).with_rel_tol(1e-7), QuadratureConfig::monte_carlo(5000, 77)] {
            assert_eq!(QuadratureSpec::from_config(&cfg).to_config(2, None).unwrap(), cfg);
        }
    }

    #[test]
    fn hunt_document_validation() {
        let ok = r#"{"theorem":"app2","n_range":[2,2],"s_range":[1,1],"pairing_range":[0,0.1],
                    "component_range":[0.001,2],"samples":10,"quadrature":{"nodes":8}}"#;
        let doc = HuntDocument::parse(ok).unwrap();
        assert_eq!(doc.search.seed, DEFAULT_SEED);
        assert_eq!(doc.quadrature.unwrap().nodes, Some(8));

        let bad_theorem = ok.replace("app2", "app9");
        assert_eq!(HuntDocument::parse(&bad_theorem).unwrap_err().field, "theorem");
        let bad_range = ok.replace("[2,2]", "[3,2]");
        assert_eq!(HuntDocument::parse(&bad_range).unwrap_err().field, "n_range");
        let missing = ok.replace(r#""samples":10,"#, "");
        assert_eq!(HuntDocument::parse(&missing).unwrap_err().field, "samples");
    }

    #[test]
    fn records_carry_type_tag() {
        let rec = Record::Criterion(CriterionRecord { id: 1, name: "x".into(), passed: true, detail: Value::Null });
        let line = rec.to_line();
        assert!(line.starts_with(r#"{"type":"criterion""#), "{line}");
        assert_eq!(serde_json::from_str::<Record>(&line).unwrap(), rec);
    }
}
