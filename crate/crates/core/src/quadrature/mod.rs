//! Signed box integration of complex-valued kernels.
//!
//! Two engines share one contract: the tensor-product Gauss–Legendre rule
//! with node doubling, and seeded Monte Carlo. Both split work into
//! fixed-size index chunks and reduce the chunk partials in index order, so
//! results do not depend on how many threads ran them.

mod gauss;
mod monte_carlo;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::ordered_map;
use crate::sheet::{sheet_phase_unchecked, Sheet};
use crate::space::{lp_norm_nonneg, BoxDomain, ComplexScalar};

pub use gauss::GaussRule;
pub use monte_carlo::mc_integrate;

pub const DEFAULT_GL_NODES: usize = 16;
pub const DEFAULT_MC_SAMPLES: u64 = 200_000;
pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_LEVELS: u32 = 6;
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Per-rule cap on tensor-product nodes; refinement stops (flagged) rather
/// than build a rule larger than this.
pub const DEFAULT_MAX_EVALUATIONS: u64 = 1 << 22;
/// Tensor rules above this dimension are refused.
pub const GL_MAX_DIM: usize = 8;
/// Dimension above which [`QuadratureConfig::for_dimension`] picks Monte Carlo.
pub const GL_AUTO_MAX_DIM: usize = 6;

const CHUNK: usize = 2048;

/// Integrand over a box.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Unit,
    /// `(Σ x_j^k)^(1/k)`
    LpNorm(u32),
    /// `1 / (Σ x_j^k)^(1/k)`; singular only at the origin.
    ReciprocalLpNorm(u32),
    /// `x ↦ f(e(i^k · ||x||_k / scale))`
    SheetPhase { sheet: Sheet, k: u32, scale: f64 },
    /// `∏ x_j^{p_j}`, for exactness checks.
    Monomial(Vec<u32>),
}

impl Kernel {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            Kernel::Unit => Ok(()),
            Kernel::LpNorm(k) | Kernel::ReciprocalLpNorm(k) => {
                if *k == 0 {
                    Err(Error::InvalidConfig("kernel order k must be ≥ 1".into()))
                } else {
                    Ok(())
                }
            }
            Kernel::SheetPhase { k, scale, .. } => {
                if *k == 0 {
                    Err(Error::InvalidConfig("kernel order k must be ≥ 1".into()))
                } else if !(scale.is_finite() && *scale > 0.0) {
                    Err(Error::InvalidConfig(format!("kernel scale must be positive, got {scale}")))
                } else {
                    Ok(())
                }
            }
            Kernel::Monomial(p) => {
                if p.len() == n {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch(format!(
                        "monomial has {} exponents for a {n}-dimensional box",
                        p.len()
                    )))
                }
            }
        }
    }

    /// Kernel value at `x`; no finiteness check.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> ComplexScalar {
        match self {
            Kernel::Unit => Complex64::new(1.0, 0.0),
            Kernel::LpNorm(k) => Complex64::new(lp_norm_nonneg(x, *k), 0.0),
            Kernel::ReciprocalLpNorm(k) => Complex64::new(1.0 / lp_norm_nonneg(x, *k), 0.0),
            Kernel::SheetPhase { sheet, k, scale } => {
                sheet_phase_unchecked(*sheet, *k, lp_norm_nonneg(x, *k) / scale)
            }
            Kernel::Monomial(p) => {
                Complex64::new(x.iter().zip(p).map(|(v, &e)| v.powi(e as i32)).product(), 0.0)
            }
        }
    }

    pub(crate) fn singular_at_origin(&self) -> bool {
        matches!(
            self,
            Kernel::ReciprocalLpNorm(_) | Kernel::SheetPhase { sheet: Sheet::ReciprocalLog, .. }
        )
    }

    /// Same kernel after reordering dimensions as in [`BoxDomain::permuted`].
    pub fn permuted(&self, perm: &[usize]) -> Kernel {
        match self {
            Kernel::Monomial(p) => Kernel::Monomial(perm.iter().map(|&i| p[i]).collect()),
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuadratureMethod {
    GaussLegendre { nodes_per_dim: usize },
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub method: QuadratureMethod,
    pub max_levels: u32,
    pub rel_tol: f64,
    pub max_evaluations: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig::gauss_legendre(DEFAULT_GL_NODES)
    }
}

impl QuadratureConfig {
    pub fn gauss_legendre(nodes_per_dim: usize) -> Self {
        QuadratureConfig {
            method: QuadratureMethod::GaussLegendre { nodes_per_dim },
            max_levels: DEFAULT_MAX_LEVELS,
            rel_tol: DEFAULT_REL_TOL,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }

    pub fn monte_carlo(samples: u64, seed: u64) -> Self {
        QuadratureConfig {
            method: QuadratureMethod::MonteCarlo { samples, seed },
            ..QuadratureConfig::default()
        }
    }

    /// Default method for an `n`-dimensional box: Gauss–Legendre up to
    /// n = 6, Monte Carlo above.
    pub fn for_dimension(n: usize) -> Self {
        if n <= GL_AUTO_MAX_DIM {
            QuadratureConfig::default()
        } else {
            QuadratureConfig::monte_carlo(DEFAULT_MC_SAMPLES, DEFAULT_SEED)
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_levels(mut self, max_levels: u32) -> Self {
        self.max_levels = max_levels;
        self
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        if let QuadratureMethod::MonteCarlo { seed, .. } = &mut self.method {
            *seed = new_seed;
        }
        self
    }

    /// Twice the base effort: double the starting nodes or the sample count.
    pub fn doubled(mut self) -> Self {
        match &mut self.method {
            QuadratureMethod::GaussLegendre { nodes_per_dim } => *nodes_per_dim *= 2,
            QuadratureMethod::MonteCarlo { samples, .. } => *samples *= 2,
        }
        self.max_evaluations = self.max_evaluations.saturating_mul(2);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.method {
            QuadratureMethod::GaussLegendre { nodes_per_dim } if nodes_per_dim < 2 => {
                return Err(Error::InvalidConfig(format!(
                    "Gauss-Legendre needs at least 2 nodes per dimension, got {nodes_per_dim}"
                )))
            }
            QuadratureMethod::MonteCarlo { samples, .. } if samples < 100 => {
                return Err(Error::InvalidConfig(format!(
                    "Monte Carlo needs at least 100 samples, got {samples}"
                )))
            }
            _ => {}
        }
        if self.max_levels < 1 {
            return Err(Error::InvalidConfig("max_levels must be at least 1".into()));
        }
        if !(self.rel_tol.is_finite() && self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_evaluations == 0 {
            return Err(Error::InvalidConfig("max_evaluations must be positive".into()));
        }
        Ok(())
    }
}

/// How a result was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MethodUsed {
    /// Zero-width box; nothing integrated.
    Degenerate,
    GaussLegendre { nodes_per_dim: usize, levels: u32 },
    MonteCarlo { samples: u64, seed: u64 },
}

impl fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodUsed::Degenerate => f.write_str("degenerate box"),
            MethodUsed::GaussLegendre { nodes_per_dim, levels } => {
                write!(f, "Gauss-Legendre {nodes_per_dim}/dim after {levels} refinements")
            }
            MethodUsed::MonteCarlo { samples, seed } => write!(f, "Monte Carlo {samples} samples, seed {seed:#x}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationResult {
    #[serde(with = "crate::space::complex_json")]
    pub value: ComplexScalar,
    /// Heuristic: last refinement difference (GL) or standard error (MC).
    pub error_estimate: f64,
    pub method_used: MethodUsed,
    pub evaluations: u64,
    /// False when refinement ran out of levels or evaluations before
    /// meeting `rel_tol`; `value` is then the best available.
    pub converged: bool,
}

impl IntegrationResult {
    fn degenerate() -> Self {
        IntegrationResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            method_used: MethodUsed::Degenerate,
            evaluations: 1,
            converged: true,
        }
    }

    /// Turns the budget flag into [`Error::BudgetExceeded`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::BudgetExceeded { value: self.value.re, error_estimate: self.error_estimate })
        }
    }
}

/// Signed integral of `kernel` over `domain`; each reversed edge contributes
/// a factor −1.
pub fn integrate_box(kernel: &Kernel, domain: &BoxDomain, cfg: &QuadratureConfig) -> Result<IntegrationResult> {
    cfg.validate()?;
    kernel.validate(domain.dim())?;
    if domain.is_degenerate() {
        return Ok(IntegrationResult::degenerate());
    }
    match cfg.method {
        QuadratureMethod::GaussLegendre { nodes_per_dim } => {
            if domain.dim() > GL_MAX_DIM {
                return Err(Error::InvalidConfig(format!(
                    "Gauss-Legendre is limited to n ≤ {GL_MAX_DIM}, got n = {}",
                    domain.dim()
                )));
            }
            refine_from(kernel, domain, nodes_per_dim, cfg.rel_tol, cfg.max_levels, cfg.max_evaluations)
        }
        QuadratureMethod::MonteCarlo { samples, seed } => mc_integrate(kernel, domain, samples, seed),
    }
}

/// Node-doubling refinement from the default starting rule.
pub fn refine_integrate(kernel: &Kernel, domain: &BoxDomain, rel_tol: f64, max_levels: u32) -> Result<IntegrationResult> {
    let cfg = QuadratureConfig::default().with_rel_tol(rel_tol).with_max_levels(max_levels);
    integrate_box(kernel, domain, &cfg)
}

fn refine_from(
    kernel: &Kernel,
    domain: &BoxDomain,
    m0: usize,
    rel_tol: f64,
    max_levels: u32,
    max_evaluations: u64,
) -> Result<IntegrationResult> {
    let n = domain.dim() as u32;
    let mut m = m0;
    let mut prev = gl_integrate(kernel, domain, m)?;
    let mut evaluations = prev.evaluations;
    let mut error_estimate = prev.value.norm();
    let mut converged = false;
    let mut levels = 0;
    while levels < max_levels {
        let next = m * 2;
        let cost = (next as u64).checked_pow(n).unwrap_or(u64::MAX);
        if cost > max_evaluations {
            break;
        }
        let cur = gl_integrate(kernel, domain, next)?;
        evaluations += cur.evaluations;
        levels += 1;
        m = next;
        error_estimate = (cur.value - prev.value).norm();
        prev = cur;
        if error_estimate <= rel_tol * prev.value.norm().max(1e-300) {
            converged = true;
            break;
        }
    }
    Ok(IntegrationResult {
        value: prev.value,
        error_estimate,
        method_used: MethodUsed::GaussLegendre { nodes_per_dim: m, levels },
        evaluations,
        converged,
    })
}

/// One tensor-product Gauss–Legendre rule with `m` nodes per dimension.
///
/// The error estimate of a single rule is unknown and reported as 0 with
/// `converged = true`; use [`integrate_box`] for refinement.
pub fn gl_integrate(kernel: &Kernel, domain: &BoxDomain, m: usize) -> Result<IntegrationResult> {
    kernel.validate(domain.dim())?;
    if m < 1 {
        return Err(Error::InvalidConfig("Gauss-Legendre needs at least one node".into()));
    }
    if domain.is_degenerate() {
        return Ok(IntegrationResult::degenerate());
    }
    let n = domain.dim();
    let rule = GaussRule::new(m);
    // per-dimension mapped nodes and signed weights
    // nodes laid out on the unoriented box; orientation is applied once at
    // the end so a reversed edge negates the sum bit-for-bit
    let sign: f64 = domain.orientation_signs().iter().product();
    let bounds = domain.unoriented();
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for j in 0..n {
        let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        xs.push(rule.nodes.iter().map(|t| mid + half * t).collect::<Vec<_>>());
        ws.push(rule.weights.iter().map(|w| half * w).collect::<Vec<_>>());
    }
    let total = m
        .checked_pow(n as u32)
        .ok_or_else(|| Error::InvalidConfig(format!("{m}^{n} nodes overflow")))?;
    let chunks = total.div_ceil(CHUNK);
    let partials = ordered_map(chunks, |c| {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut digits = vec![0usize; n];
        let mut rest = start;
        for d in digits.iter_mut() {
            *d = rest % m;
            rest /= m;
        }
        let mut point = vec![0.0; n];
        let mut acc = Complex64::new(0.0, 0.0);
        for _ in start..end {
            let mut w = 1.0;
            for j in 0..n {
                point[j] = xs[j][digits[j]];
                w *= ws[j][digits[j]];
            }
            let v = kernel.eval(&point);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { point });
            }
            acc += v * w;
            for d in digits.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Ok(acc)
    });
    let mut value = Complex64::new(0.0, 0.0);
    for p in partials {
        value += p?;
    }
    Ok(IntegrationResult {
        value: value * sign,
        error_estimate: 0.0,
        method_used: MethodUsed::GaussLegendre { nodes_per_dim: m, levels: 0 },
        evaluations: total as u64,
        converged: true,
    })
}
