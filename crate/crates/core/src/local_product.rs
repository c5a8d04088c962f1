//! The k-th local product `G(a; b)` over a sheet, by direct quadrature of
//! the definition and by closed-form reductions for the special sheets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_box, IntegrationResult, Kernel, QuadratureConfig};
use crate::sheet::{phase_power_i, Sheet};
use crate::space::{box_from_pair, BoxDomain, ComplexScalar, Pairing, RealVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalProductInstance {
    pub a: RealVector,
    pub b: RealVector,
    pub k: u32,
    pub sheet: Sheet,
    #[serde(default)]
    pub pairing: Pairing,
}

impl LocalProductInstance {
    pub fn new(a: RealVector, b: RealVector, k: u32, sheet: Sheet) -> Self {
        LocalProductInstance { a, b, k, sheet, pairing: Pairing::DotProduct }
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    /// The instance with `a` and `b` exchanged.
    pub fn swapped(&self) -> Self {
        LocalProductInstance { a: self.b.clone(), b: self.a.clone(), ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn pairing_value(&self) -> Result<f64> {
        self.pairing.eval(&self.a, &self.b)
    }

    pub fn domain(&self) -> Result<BoxDomain> {
        box_from_pair(&self.a, &self.b)
    }

    /// Checks dimensions, `k ≥ 1`, and the sheet's requirements on `<a, b>`;
    /// returns the pairing value.
    pub fn validate(&self) -> Result<f64> {
        if self.k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        let p = self.pairing_value()?;
        match self.sheet {
            Sheet::Log | Sheet::ReciprocalLog if !(p > 0.0 && p != 1.0) => Err(Error::Domain(format!(
                "{} sheet needs <a,b> > 0 and <a,b> ≠ 1, got {p}",
                self.sheet
            ))),
            Sheet::Reciprocal if p == 0.0 => Err(Error::Domain("reciprocal sheet needs <a,b> ≠ 0".into())),
            _ => Ok(p),
        }
    }
}

/// `||a||^(k+1) + ||b||^(k+1)`.
pub fn scale_denominator(a: &RealVector, b: &RealVector, k: u32) -> Result<f64> {
    let (na, nb) = (a.euclidean_norm(), b.euclidean_norm());
    if na == 0.0 && nb == 0.0 {
        return Err(Error::DegenerateScale);
    }
    let e = k as i32 + 1;
    let s = na.powi(e) + nb.powi(e);
    if s == 0.0 {
        // both norms underflowed at this power
        return Err(Error::DegenerateScale);
    }
    if !s.is_finite() {
        return Err(Error::Overflow { exponent: f64::INFINITY });
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalProductValue {
    #[serde(with = "crate::space::complex_json")]
    pub value: ComplexScalar,
    /// Quadrature error estimate, scaled by the outer factor.
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

impl LocalProductValue {
    fn exact(value: ComplexScalar) -> Self {
        LocalProductValue { value, error_estimate: 0.0, evaluations: 0, converged: true }
    }

    fn scaled(factor: ComplexScalar, r: IntegrationResult) -> Self {
        LocalProductValue {
            value: factor * r.value,
            error_estimate: factor.norm() * r.error_estimate,
            evaluations: r.evaluations,
            converged: r.converged,
        }
    }
}

/// `f(<a,b>) · ∫_box f(e(i^k ||x||_k / scale)) dx`, integrated as written.
///
/// The absolute-value sheet integrates over the unoriented box.
pub fn local_product_direct(inst: &LocalProductInstance, cfg: &QuadratureConfig) -> Result<LocalProductValue> {
    let p = inst.validate()?;
    let outer = inst.sheet.eval_real(p)?;
    let scale = scale_denominator(&inst.a, &inst.b, inst.k)?;
    let mut domain = inst.domain()?;
    if inst.sheet == Sheet::AbsoluteValue {
        domain = domain.unoriented();
    }
    let kernel = Kernel::SheetPhase { sheet: inst.sheet, k: inst.k, scale };
    let r = integrate_box(&kernel, &domain, cfg)?;
    Ok(LocalProductValue::scaled(outer, r))
}

/// Closed-form reductions:
///
/// * constant `c`: `c² · vol`
/// * log: `2π i^(k+1) ln<a,b> / scale · ∫ ||x||_k`
/// * identity: `<a,b> · ∫ e(i^k r)`
/// * reciprocal: `<a,b>⁻¹ · ∫ e(−i^k r)`
/// * reciprocal log: `scale / (ln<a,b> · 2π i^(k+1)) · ∫ 1/||x||_k`
/// * absolute value, `k ≡ 0 (mod 4)`: `|<a,b>| · |vol|`
pub fn local_product_closed(inst: &LocalProductInstance, cfg: &QuadratureConfig) -> Result<LocalProductValue> {
    let p = inst.validate()?;
    let scale = scale_denominator(&inst.a, &inst.b, inst.k)?;
    let domain = inst.domain()?;
    let k = inst.k;
    let rot = phase_power_i(k + 1);
    match inst.sheet {
        Sheet::Constant(c) => Ok(LocalProductValue::exact(Complex64::new(c * c * domain.signed_volume(), 0.0))),
        Sheet::AbsoluteValue if k.is_multiple_of(4) => {
            Ok(LocalProductValue::exact(Complex64::new(p.abs() * domain.signed_volume().abs(), 0.0)))
        }
        Sheet::AbsoluteValue => Err(Error::UnsupportedSheetReduction { sheet: inst.sheet.to_string(), k }),
        Sheet::Log => {
            let factor = rot * (TAU * p.ln() / scale);
            let r = integrate_box(&Kernel::LpNorm(k), &domain, cfg)?;
            Ok(LocalProductValue::scaled(factor, r))
        }
        Sheet::ReciprocalLog => {
            let factor = (rot * (TAU * p.ln())).inv() * scale;
            let r = integrate_box(&Kernel::ReciprocalLpNorm(k), &domain, cfg)?;
            Ok(LocalProductValue::scaled(factor, r))
        }
        Sheet::Identity | Sheet::Reciprocal => {
            let factor = if inst.sheet == Sheet::Identity { p } else { 1.0 / p };
            let kernel = Kernel::SheetPhase { sheet: inst.sheet, k, scale };
            let r = integrate_box(&kernel, &domain, cfg)?;
            Ok(LocalProductValue::scaled(Complex64::new(factor, 0.0), r))
        }
    }
}

/// Direct and closed values with their relative discrepancy
/// `|direct − closed| / max(|closed|, tiny)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathComparison {
    pub direct: LocalProductValue,
    pub closed: LocalProductValue,
    pub abs_diff: f64,
    pub rel_diff: f64,
}

impl PathComparison {
    /// `|direct − closed| ≤ max(rel · |closed|, abs)`.
    pub fn agrees(&self, rel: f64, abs: f64) -> bool {
        self.abs_diff <= (rel * self.closed.value.norm()).max(abs)
    }
}

pub fn compare_paths(inst: &LocalProductInstance, cfg: &QuadratureConfig) -> Result<PathComparison> {
    let direct = local_product_direct(inst, cfg)?;
    let closed = local_product_closed(inst, cfg)?;
    let abs_diff = (direct.value - closed.value).norm();
    let rel_diff = abs_diff / closed.value.norm().max(f64::MIN_POSITIVE);
    Ok(PathComparison { direct, closed, abs_diff, rel_diff })
}
