//! Inequality reports for the ℓ^{4s} upper bound (`app2`) and the reciprocal
//! ℓ^{4s+3} lower bound (`app3`), plus the swap-identity and modulus-bound
//! checks on local products.
//!
//! ```text
//! app2:  |∫_box ||x||_{4s} dx|       ≤ <a,b> / (2π |ln<a,b>|) · (||a||^{4s+1} + ||b||^{4s+1}) · |vol|
//! app3:  |∫_box 1/||x||_{4s+3} dx|   ≥ 2π |ln<a,b>| · |vol| / (||a||^{4s+4} + ||b||^{4s+4})
//! ```

use std::f64::consts::{E, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_product::{local_product_direct, scale_denominator, LocalProductInstance};
use crate::quadrature::{integrate_box, Kernel, QuadratureConfig};
use crate::sheet::{sheet_phase_unchecked, Sheet};
use crate::space::{box_from_pair, lp_norm_nonneg, BoxDomain, ComplexScalar, Pairing, RealVector};

/// A report is inconclusive when `|margin| ≤ VERDICT_GUARD · lhs_error`.
pub const VERDICT_GUARD: f64 = 4.0;
/// Relative tolerance of the swap identity.
pub const SWAP_REL_TOL: f64 = 1e-6;
/// Slack on the modulus bound, absorbing quadrature rounding.
pub const MODULUS_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    App2,
    App3,
}

impl TheoremId {
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::App2 => "app2",
            TheoremId::App3 => "app3",
        }
    }

    /// Norm order used by the theorem for a given `s`.
    pub fn order(self, s: u32) -> u32 {
        match self {
            TheoremId::App2 => 4 * s,
            TheoremId::App3 => 4 * s + 3,
        }
    }

    /// Whether `<a,b> = t` is inside the stated hypothesis.
    pub fn pairing_in_hypothesis(self, t: f64) -> bool {
        match self {
            TheoremId::App2 => t > 0.0 && t != 1.0 && t.is_finite(),
            TheoremId::App3 => t > 0.0 && t != 1.0 && t <= E,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "app2" => Ok(TheoremId::App2),
            "app3" => Ok(TheoremId::App3),
            other => Err(Error::InvalidConfig(format!("unknown theorem {other:?}; expected app2 or app3"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// `margin > 0` means the inequality holds.
    pub fn classify(margin: f64, lhs_error: f64) -> Verdict {
        if margin.abs() <= VERDICT_GUARD * lhs_error {
            Verdict::Inconclusive
        } else if margin > 0.0 {
            Verdict::Holds
        } else {
            Verdict::Violated
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub a: RealVector,
    pub b: RealVector,
    pub s: u32,
    pub k: u32,
    pub pairing_value: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_error: f64,
    /// `rhs − lhs` for app2, `lhs − rhs` for app3.
    pub margin: f64,
    pub verdict: Verdict,
    pub converged: bool,
    pub evaluations: u64,
}

/// Which naturals `s` ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckOptions {
    /// Accept `s = 0` (outside the theorems' ℕ = {1, 2, …}).
    pub allow_s_zero: bool,
}

fn check_hypothesis(theorem: TheoremId, a: &RealVector, b: &RealVector, s: u32, opts: CheckOptions) -> Result<f64> {
    if s == 0 && !opts.allow_s_zero {
        return Err(Error::HypothesisViolated("s must be ≥ 1".into()));
    }
    if theorem.order(s) == 0 {
        return Err(Error::HypothesisViolated("norm order 4s must be ≥ 1".into()));
    }
    let p = Pairing::DotProduct.eval(a, b)?;
    match theorem {
        TheoremId::App2 => {
            if !(p > 0.0 && p != 1.0) {
                return Err(Error::HypothesisViolated(format!("app2 needs 0 < <a,b> ≠ 1, got {p}")));
            }
        }
        TheoremId::App3 => {
            if !a.as_slice().iter().chain(b.as_slice()).all(|&x| x > 0.0) {
                return Err(Error::HypothesisViolated("app3 needs every a_j, b_j > 0".into()));
            }
            if !(p > 0.0 && p <= E && p != 1.0) {
                return Err(Error::HypothesisViolated(format!("app3 needs 0 < <a,b> ≤ e, <a,b> ≠ 1, got {p}")));
            }
        }
    }
    Ok(p)
}

/// Right-hand side of app2. Quadrature-free.
pub fn app2_rhs(a: &RealVector, b: &RealVector, s: u32) -> Result<f64> {
    let p = Pairing::DotProduct.eval(a, b)?;
    let vol = box_from_pair(a, b)?.signed_volume().abs();
    let e = 4 * s as i32 + 1;
    let norms = a.euclidean_norm().powi(e) + b.euclidean_norm().powi(e);
    Ok(p.abs() / (TAU * p.ln().abs()) * norms * vol)
}

/// Right-hand side of app3. Quadrature-free.
pub fn app3_rhs(a: &RealVector, b: &RealVector, s: u32) -> Result<f64> {
    let p = Pairing::DotProduct.eval(a, b)?;
    let vol = box_from_pair(a, b)?.signed_volume().abs();
    let e = 4 * s as i32 + 4;
    let norms = a.euclidean_norm().powi(e) + b.euclidean_norm().powi(e);
    Ok(TAU * p.ln().abs() * vol / norms)
}

pub fn report(
    theorem: TheoremId,
    a: &RealVector,
    b: &RealVector,
    s: u32,
    cfg: &QuadratureConfig,
    opts: CheckOptions,
) -> Result<TheoremReport> {
    let pairing_value = check_hypothesis(theorem, a, b, s, opts)?;
    let k = theorem.order(s);
    let domain = box_from_pair(a, b)?;
    let (kernel, rhs) = match theorem {
        TheoremId::App2 => (Kernel::LpNorm(k), app2_rhs(a, b, s)?),
        TheoremId::App3 => (Kernel::ReciprocalLpNorm(k), app3_rhs(a, b, s)?),
    };
    let r = integrate_box(&kernel, &domain, cfg)?;
    let lhs = r.value.norm();
    let margin = match theorem {
        TheoremId::App2 => rhs - lhs,
        TheoremId::App3 => lhs - rhs,
    };
    Ok(TheoremReport {
        theorem,
        a: a.clone(),
        b: b.clone(),
        s,
        k,
        pairing_value,
        lhs,
        rhs,
        lhs_error: r.error_estimate,
        margin,
        verdict: Verdict::classify(margin, r.error_estimate),
        converged: r.converged,
        evaluations: r.evaluations,
    })
}

pub fn thm_app2_report(a: &RealVector, b: &RealVector, s: u32, cfg: &QuadratureConfig) -> Result<TheoremReport> {
    report(TheoremId::App2, a, b, s, cfg, CheckOptions::default())
}

pub fn thm_app3_report(a: &RealVector, b: &RealVector, s: u32, cfg: &QuadratureConfig) -> Result<TheoremReport> {
    report(TheoremId::App3, a, b, s, cfg, CheckOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapCheck {
    /// `G(a; b)`
    #[serde(with = "crate::space::complex_json")]
    pub lhs: ComplexScalar,
    /// `(−1)^(n+1) G(b; a)`
    #[serde(with = "crate::space::complex_json")]
    pub rhs: ComplexScalar,
    pub rel_err: f64,
    pub pass: bool,
}

/// `G(a; b) = (−1)^(n+1) G(b; a)` for the identity sheet over an
/// antisymmetric pairing.
pub fn prop_swap_identity_check(inst: &LocalProductInstance, cfg: &QuadratureConfig) -> Result<SwapCheck> {
    let n = inst.dim();
    if !inst.pairing.is_antisymmetric(n) {
        return Err(Error::PairingNotAntisymmetric);
    }
    if inst.sheet != Sheet::Identity {
        return Err(Error::InvalidConfig(format!(
            "swap identity needs the linear (id) sheet, got {}",
            inst.sheet
        )));
    }
    let lhs = local_product_direct(inst, cfg)?.value;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    let rhs = local_product_direct(&inst.swapped(), cfg)?.value * sign;
    let diff = (lhs - rhs).norm();
    let size = lhs.norm().max(rhs.norm());
    let rel_err = if diff == 0.0 { 0.0 } else { diff / size };
    Ok(SwapCheck { lhs, rhs, rel_err, pass: rel_err <= SWAP_REL_TOL })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusCheck {
    pub g_abs: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Grid points per dimension for the kernel-modulus probe: 32 up to n = 3,
/// then fewer so the grid stays at most 32³ points.
fn probe_points_per_dim(n: usize) -> usize {
    if n <= 3 {
        32
    } else {
        ((32f64.powi(3)).powf(1.0 / n as f64).floor() as usize).max(2)
    }
}

/// Max of `|f(e(i^k ||x||_k / scale))|` over a grid on `domain` that
/// includes every corner.
pub fn kernel_modulus_sup(sheet: Sheet, k: u32, scale: f64, domain: &BoxDomain) -> f64 {
    let bounds = domain.unoriented();
    let n = bounds.dim();
    let g = probe_points_per_dim(n);
    let axis: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let (lo, hi) = (bounds.lower()[j], bounds.upper()[j]);
            (0..g).map(|i| lo + (hi - lo) * i as f64 / (g - 1) as f64).collect()
        })
        .collect();
    let mut digits = vec![0usize; n];
    let mut point = vec![0.0; n];
    let mut sup = 0.0_f64;
    loop {
        for j in 0..n {
            point[j] = axis[j][digits[j]];
        }
        let m = sheet_phase_unchecked(sheet, k, lp_norm_nonneg(&point, k) / scale).norm();
        sup = if m.is_nan() { f64::INFINITY } else { sup.max(m) };
        let mut j = 0;
        loop {
            if j == n {
                return sup;
            }
            digits[j] += 1;
            if digits[j] < g {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}

/// `|G| ≤ |f(<a,b>)| · |vol| · sup |kernel|`.
pub fn modulus_bound_check(inst: &LocalProductInstance, cfg: &QuadratureConfig) -> Result<ModulusCheck> {
    let p = inst.validate()?;
    let g_abs = local_product_direct(inst, cfg)?.value.norm();
    let scale = scale_denominator(&inst.a, &inst.b, inst.k)?;
    let domain = inst.domain()?;
    let outer = inst.sheet.eval_real(p)?.norm();
    let vol = domain.signed_volume().abs();
    let bound = if vol == 0.0 || outer == 0.0 {
        0.0
    } else {
        outer * vol * kernel_modulus_sup(inst.sheet, inst.k, scale, &domain)
    };
    Ok(ModulusCheck { g_abs, bound, pass: g_abs <= bound * (1.0 + MODULUS_SLACK) })
}

/// Both sides of a sheet-dominance comparison `|G_f| ≤ |G_g|`, reported
/// without asserting either way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceComparison {
    pub abs_f: f64,
    pub abs_g: f64,
    pub f_below_g: bool,
}

pub fn sheet_dominance_compare(
    inst: &LocalProductInstance,
    other: Sheet,
    cfg: &QuadratureConfig,
) -> Result<DominanceComparison> {
    let abs_f = local_product_direct(inst, cfg)?.value.norm();
    let g_inst = LocalProductInstance { sheet: other, ..inst.clone() };
    let abs_g = local_product_direct(&g_inst, cfg)?.value.norm();
    Ok(DominanceComparison { abs_f, abs_g, f_below_g: abs_f <= abs_g })
}
