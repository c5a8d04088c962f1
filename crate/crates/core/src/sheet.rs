//! Sheet functions and the composed kernel `f(e(i^k · r))`.
//!
//! Logarithmic sheets use the unwrapped convention `log(e(z)) = 2πi·z`,
//! never the principal branch of the exponential's logarithm.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{unit_phase_unchecked, ComplexScalar, EXP_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Sheet {
    Constant(f64),
    Identity,
    Reciprocal,
    Log,
    ReciprocalLog,
    AbsoluteValue,
}

impl Sheet {
    pub const ALL_NAMES: [&'static str; 6] = ["const", "id", "recip", "log", "reciplog", "abs"];

    pub fn name(&self) -> &'static str {
        match self {
            Sheet::Constant(_) => "const",
            Sheet::Identity => "id",
            Sheet::Reciprocal => "recip",
            Sheet::Log => "log",
            Sheet::ReciprocalLog => "reciplog",
            Sheet::AbsoluteValue => "abs",
        }
    }

    pub fn is_logarithmic(&self) -> bool {
        matches!(self, Sheet::Log | Sheet::ReciprocalLog)
    }

    /// `f(z)` for the outer factor `f(<a, b>)`.
    pub fn eval(&self, z: ComplexScalar) -> Result<ComplexScalar> {
        let positive_real = z.im == 0.0 && z.re > 0.0;
        match *self {
            Sheet::Constant(c) => Ok(Complex64::new(c, 0.0)),
            Sheet::Identity => Ok(z),
            Sheet::Reciprocal => {
                if z == Complex64::new(0.0, 0.0) {
                    Err(Error::Domain("reciprocal sheet at 0".into()))
                } else {
                    Ok(z.inv())
                }
            }
            Sheet::Log => {
                if positive_real {
                    Ok(Complex64::new(z.re.ln(), 0.0))
                } else {
                    Err(Error::Domain(format!("log sheet needs a positive real, got {z}")))
                }
            }
            Sheet::ReciprocalLog => {
                if !positive_real {
                    Err(Error::Domain(format!("reciprocal-log sheet needs a positive real, got {z}")))
                } else if z.re == 1.0 {
                    Err(Error::Domain("reciprocal-log sheet at 1 (ln 1 = 0)".into()))
                } else {
                    Ok(Complex64::new(1.0 / z.re.ln(), 0.0))
                }
            }
            Sheet::AbsoluteValue => Ok(Complex64::new(z.norm(), 0.0)),
        }
    }

    pub fn eval_real(&self, t: f64) -> Result<ComplexScalar> {
        self.eval(Complex64::new(t, 0.0))
    }
}

impl fmt::Display for Sheet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sheet::Constant(c) if *c != 1.0 => write!(f, "const:{c}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Sheet {
    type Err = Error;

    /// Accepts the lowercase names; `const` means the constant 1 and
    /// `const:<c>` any other finite constant.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(Sheet::Constant(1.0)),
            "id" => Ok(Sheet::Identity),
            "recip" => Ok(Sheet::Reciprocal),
            "log" => Ok(Sheet::Log),
            "reciplog" => Ok(Sheet::ReciprocalLog),
            "abs" => Ok(Sheet::AbsoluteValue),
            other => {
                if let Some(c) = other.strip_prefix("const:") {
                    let c: f64 = c
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad sheet constant {c:?}")))?;
                    if c.is_finite() {
                        return Ok(Sheet::Constant(c));
                    }
                }
                Err(Error::InvalidConfig(format!(
                    "unknown sheet {other:?}; expected one of {}",
                    Sheet::ALL_NAMES.join(", ")
                )))
            }
        }
    }
}

impl TryFrom<String> for Sheet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Sheet> for String {
    fn from(s: Sheet) -> String {
        s.to_string()
    }
}

pub fn sheet_eval(f: Sheet, z: ComplexScalar) -> Result<ComplexScalar> {
    f.eval(z)
}

/// `i^k`.
pub fn phase_power_i(k: u32) -> ComplexScalar {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `i^k · r` as (re, im) without a complex multiply.
#[inline]
fn rotate(k: u32, r: f64) -> (f64, f64) {
    match k % 4 {
        0 => (r, 0.0),
        1 => (0.0, r),
        2 => (-r, 0.0),
        _ => (0.0, -r),
    }
}

/// `f(e(i^k · r))` with the unwrapped logarithm.
pub fn sheet_phase_eval(f: Sheet, k: u32, r: f64) -> Result<ComplexScalar> {
    if !r.is_finite() {
        return Err(Error::Domain(format!("phase argument {r} is not finite")));
    }
    let (_, im) = rotate(k, r);
    let exponent = match f {
        Sheet::Identity | Sheet::AbsoluteValue => -TAU * im,
        Sheet::Reciprocal => TAU * im,
        _ => 0.0,
    };
    if exponent > EXP_LIMIT {
        return Err(Error::Overflow { exponent });
    }
    if f == Sheet::ReciprocalLog && r == 0.0 {
        return Err(Error::Domain("reciprocal-log kernel at r = 0".into()));
    }
    Ok(sheet_phase_unchecked(f, k, r))
}

/// Kernel hot path: may return non-finite values, which the integrator
/// turns into `NonFiniteIntegrand`.
#[inline]
pub(crate) fn sheet_phase_unchecked(f: Sheet, k: u32, r: f64) -> ComplexScalar {
    let (re, im) = rotate(k, r);
    match f {
        Sheet::Constant(c) => Complex64::new(c, 0.0),
        Sheet::Identity => unit_phase_unchecked(re, im),
        Sheet::Reciprocal => unit_phase_unchecked(-re, -im),
        Sheet::AbsoluteValue => Complex64::new((-TAU * im).exp(), 0.0),
        // 2πi · (re + i·im)
        Sheet::Log => Complex64::new(-TAU * im, TAU * re),
        Sheet::ReciprocalLog => Complex64::new(-TAU * im, TAU * re).inv(),
    }
}
