//! Seeded, constrained random search for violations of the two inequalities.
//!
//! Sample `i` is drawn from its own generator seeded with `seed ^ i`, so
//! any sample can be regenerated alone and a parallel hunt returns the same
//! records as a sequential one.

use std::f64::consts::E;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ordered_map;
use crate::quadrature::{QuadratureConfig, DEFAULT_SEED};
use crate::space::{Pairing, RealVector};
use crate::theorems::{report, CheckOptions, TheoremId, TheoremReport, Verdict};

/// Closed real interval `[lo, hi]`. Used as `(lo, hi]` for pairing targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        RealInterval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `lo < x ≤ hi`.
    pub fn contains_half_open(&self, x: f64) -> bool {
        self.lo < x && x <= self.hi
    }
}

impl From<[f64; 2]> for RealInterval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        RealInterval { lo, hi }
    }
}

impl From<RealInterval> for [f64; 2] {
    fn from(r: RealInterval) -> Self {
        [r.lo, r.hi]
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_attempts() -> u32 {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub theorem: TheoremId,
    /// Inclusive range of dimensions.
    pub n_range: [usize; 2],
    /// Inclusive range of `s`.
    pub s_range: [u32; 2],
    /// Target `<a,b>` range, sampled as `(lo, hi]` and intersected with the
    /// theorem's hypothesis.
    pub pairing_range: RealInterval,
    pub component_range: RealInterval,
    pub samples: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_attempts")]
    pub max_attempts_per_sample: u32,
}

impl SearchConfig {
    /// The pairing target range after intersecting with the hypothesis.
    pub fn effective_pairing_range(&self) -> RealInterval {
        let mut r = self.pairing_range;
        r.lo = r.lo.max(0.0);
        if self.theorem == TheoremId::App3 {
            r.hi = r.hi.min(E);
        }
        r
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let [n0, n1] = self.n_range;
        if n0 < 1 || n0 > n1 {
            return bad(format!("n_range {:?} must satisfy 1 ≤ lo ≤ hi", self.n_range));
        }
        let [s0, s1] = self.s_range;
        if s0 < 1 || s0 > s1 {
            return bad(format!("s_range {:?} must satisfy 1 ≤ lo ≤ hi", self.s_range));
        }
        let c = self.component_range;
        if !(c.lo.is_finite() && c.hi.is_finite() && 0.0 <= c.lo && c.lo <= c.hi) {
            return bad(format!("component_range [{}, {}] must satisfy 0 ≤ lo ≤ hi", c.lo, c.hi));
        }
        let p = self.effective_pairing_range();
        if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
            return bad(format!(
                "pairing_range [{}, {}] is empty after intersecting with the {} hypothesis",
                self.pairing_range.lo, self.pairing_range.hi, self.theorem
            ));
        }
        if self.max_attempts_per_sample < 1 {
            return bad("max_attempts_per_sample must be ≥ 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledInstance {
    pub a: RealVector,
    pub b: RealVector,
    pub s: u32,
}

/// Draws `a` and a raw `b` uniformly from `component_range`, then rescales
/// `b` so `<a,b>` hits a uniform target in the pairing range. Draws whose
/// rescaled `b` leaves `component_range` are rejected.
pub fn sample_instance(sc: &SearchConfig, index: u64) -> Result<SampledInstance> {
    sc.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(sc.seed ^ index);
    let n = rng.random_range(sc.n_range[0]..=sc.n_range[1]);
    let s = rng.random_range(sc.s_range[0]..=sc.s_range[1]);
    let c = sc.component_range;
    let target_range = sc.effective_pairing_range();
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..n).map(|_| c.lo + rng.random::<f64>() * (c.hi - c.lo)).collect() };
    for _ in 0..sc.max_attempts_per_sample {
        let a = draw(&mut rng);
        let b_raw = draw(&mut rng);
        let u: f64 = rng.random();
        let target = target_range.hi - u * (target_range.hi - target_range.lo);
        let raw: f64 = a.iter().zip(&b_raw).map(|(x, y)| x * y).sum();
        if raw.is_nan() || raw <= 0.0 {
            continue;
        }
        let t = target / raw;
        let b: Vec<f64> = b_raw.iter().map(|y| y * t).collect();
        if !b.iter().all(|&y| c.contains(y)) {
            continue;
        }
        if sc.theorem == TheoremId::App3 && !a.iter().chain(&b).all(|&x| x > 0.0) {
            continue;
        }
        let (a, b) = (RealVector::new(a)?, RealVector::new(b)?);
        let p = Pairing::DotProduct.eval(&a, &b)?;
        if target_range.contains_half_open(p) && sc.theorem.pairing_in_hypothesis(p) {
            return Ok(SampledInstance { a, b, s });
        }
    }
    Err(Error::ConstraintUnsatisfiable {
        attempts: sc.max_attempts_per_sample,
        reason: format!(
            "no draw with components in [{}, {}] reached <a,b> in ({}, {}] for n = {n}",
            c.lo, c.hi, target_range.lo, target_range.hi
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub theorem: TheoremId,
    pub a: RealVector,
    pub b: RealVector,
    pub s: u32,
    pub k: u32,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub lhs_error: f64,
    pub sample_index: u64,
    /// Produced by the doubled-effort retry after an inconclusive first pass.
    pub refined: bool,
}

impl ViolationRecord {
    fn from_report(r: TheoremReport, sample_index: u64, refined: bool) -> Self {
        ViolationRecord {
            theorem: r.theorem,
            a: r.a,
            b: r.b,
            s: r.s,
            k: r.k,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            lhs_error: r.lhs_error,
            sample_index,
            refined,
        }
    }

    /// Recomputes the report with the hunt's quadrature config.
    pub fn replay(&self, cfg: &QuadratureConfig) -> Result<TheoremReport> {
        let cfg = if self.refined { cfg.doubled() } else { *cfg };
        report(self.theorem, &self.a, &self.b, self.s, &cfg, CheckOptions::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub sample_index: u64,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntOutcome {
    pub samples: u64,
    pub holds: u64,
    pub inconclusive: u64,
    /// Ordered by `sample_index`.
    pub records: Vec<ViolationRecord>,
    pub failures: Vec<SampleFailure>,
}

enum SampleResult {
    Verdict(Verdict, Option<ViolationRecord>),
    Failed(SampleFailure),
}

fn evaluate_sample(sc: &SearchConfig, cfg: &QuadratureConfig, index: u64) -> Result<(Verdict, Option<ViolationRecord>)> {
    let inst = sample_instance(sc, index)?;
    let opts = CheckOptions::default();
    let mut rep = report(sc.theorem, &inst.a, &inst.b, inst.s, cfg, opts)?;
    let mut refined = false;
    if rep.verdict == Verdict::Inconclusive {
        rep = report(sc.theorem, &inst.a, &inst.b, inst.s, &cfg.doubled(), opts)?;
        refined = true;
    }
    let verdict = rep.verdict;
    let record = (verdict == Verdict::Violated).then(|| ViolationRecord::from_report(rep, index, refined));
    Ok((verdict, record))
}

/// Runs the theorem report on every sampled instance and keeps the
/// violations. Per-sample errors are collected, never fatal.
pub fn hunt(sc: &SearchConfig, cfg: &QuadratureConfig) -> Result<HuntOutcome> {
    sc.validate()?;
    cfg.validate()?;
    let results = ordered_map(sc.samples as usize, |i| {
        let index = i as u64;
        match evaluate_sample(sc, cfg, index) {
            Ok((v, rec)) => SampleResult::Verdict(v, rec),
            Err(e) => SampleResult::Failed(SampleFailure {
                sample_index: index,
                kind: e.kind().to_string(),
                message: e.to_string(),
            }),
        }
    });
    let mut out = HuntOutcome { samples: sc.samples, holds: 0, inconclusive: 0, records: Vec::new(), failures: Vec::new() };
    for r in results {
        match r {
            SampleResult::Verdict(Verdict::Holds, _) => out.holds += 1,
            SampleResult::Verdict(Verdict::Inconclusive, _) => out.inconclusive += 1,
            SampleResult::Verdict(Verdict::Violated, rec) => out.records.extend(rec),
            SampleResult::Failed(f) => out.failures.push(f),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(theorem: TheoremId, pairing: [f64; 2], components: [f64; 2], n: usize) -> SearchConfig {
        SearchConfig {
            theorem,
            n_range: [n, n],
            s_range: [1, 1],
            pairing_range: pairing.into(),
            component_range: components.into(),
            samples: 50,
            seed: 7,
            max_attempts_per_sample: 200,
        }
    }

    #[test]
    fn samples_land_in_target_range() {
        let sc = config(TheoremId::App2, [0.0, 0.1], [0.001, 2.0], 2);
        for i in 0..200 {
            let inst = sample_instance(&sc, i).unwrap();
            let p = Pairing::DotProduct.eval(&inst.a, &inst.b).unwrap();
            assert!(p > 0.0 && p <= 0.1, "sample {i}: {p}");
            assert!(inst.b.as_slice().iter().all(|&y| (0.001..=2.0).contains(&y)));
        }
    }

    #[test]
    fn app3_samples_satisfy_hypothesis() {
        let sc = config(TheoremId::App3, [1.0, 10.0], [0.01, 2.0], 2);
        assert_eq!(sc.effective_pairing_range().hi, E);
        for i in 0..200 {
            let inst = sample_instance(&sc, i).unwrap();
            let p = Pairing::DotProduct.eval(&inst.a, &inst.b).unwrap();
            assert!(p > 1.0 && p <= E);
            assert!(inst.a.as_slice().iter().chain(inst.b.as_slice()).all(|&x| x > 0.0));
        }
    }

    #[test]
    fn cauchy_schwarz_makes_target_unreachable() {
        let sc = config(TheoremId::App2, [10.0, 20.0], [0.0, 0.5], 2);
        assert!(matches!(sample_instance(&sc, 0), Err(Error::ConstraintUnsatisfiable { .. })));
    }

    #[test]
    fn sampling_is_deterministic_per_index() {
        let sc = config(TheoremId::App2, [1.5, 5.0], [0.1, 2.0], 3);
        assert_eq!(sample_instance(&sc, 11).unwrap(), sample_instance(&sc, 11).unwrap());
        assert_ne!(sample_instance(&sc, 11).unwrap(), sample_instance(&sc, 12).unwrap());
    }

    #[test]
    fn empty_hunt() {
        let sc = SearchConfig { samples: 0, ..config(TheoremId::App2, [0.0, 0.1], [0.001, 2.0], 2) };
        let out = hunt(&sc, &QuadratureConfig::default()).unwrap();
        assert!(out.records.is_empty());
        assert_eq!(out.samples, 0);
    }

    #[test]
    fn invalid_configs() {
        let mut sc = config(TheoremId::App3, [3.0, 10.0], [0.1, 2.0], 2);
        assert!(sc.validate().is_err());
        sc.pairing_range = [0.5, 2.0].into();
        assert!(sc.validate().is_ok());
        sc.n_range = [3, 2];
        assert!(sc.validate().is_err());
        sc.n_range = [1, 2];
        sc.s_range = [0, 1];
        assert!(sc.validate().is_err());
    }

    #[test]
    fn near_orthogonal_hunt_finds_replayable_violations() {
        let sc = SearchConfig { samples: 40, ..config(TheoremId::App2, [0.0, 0.1], [0.001, 2.0], 2) };
        let cfg = QuadratureConfig::gauss_legendre(8).with_max_levels(3).with_rel_tol(1e-6);
        let out = hunt(&sc, &cfg).unwrap();
        assert!(!out.records.is_empty());
        assert!(out.records.windows(2).all(|w| w[0].sample_index < w[1].sample_index));
        for rec in &out.records {
            let rep = rec.replay(&cfg).unwrap();
            assert_eq!(rep.verdict, Verdict::Violated);
            assert_eq!(rep.lhs, rec.lhs);
            assert_eq!(rep.rhs, rec.rhs);
        }
        assert_eq!(out, hunt(&sc, &cfg).unwrap());
    }
}
