//! Vectors, pairings, norms, oriented boxes, and the unit phase `e(q)`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex values produced by sheets, kernels and local products.
pub type ComplexScalar = Complex64;

/// Serde adapter writing complex values as `{"re": .., "im": ..}`.
pub mod complex_json {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct ReIm {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        ReIm { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let ReIm { re, im } = ReIm::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Largest `x` with `exp(x)` finite.
pub(crate) const EXP_LIMIT: f64 = 709.782712893384;

/// A finite, nonempty real vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RealVector(Vec<f64>);

impl RealVector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = components.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteComponent { index, value });
        }
        Ok(RealVector(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn euclidean_norm(&self) -> f64 {
        euclidean_norm(&self.0)
    }

    /// Multiplies every component by `t`. `t` must be finite.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        RealVector::new(self.0.iter().map(|v| v * t).collect())
    }

    pub fn abs(&self) -> Self {
        RealVector(self.0.iter().map(|v| v.abs()).collect())
    }
}

impl TryFrom<Vec<f64>> for RealVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        RealVector::new(v)
    }
}

impl From<RealVector> for Vec<f64> {
    fn from(v: RealVector) -> Self {
        v.0
    }
}

impl std::ops::Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Row-major square matrix backing a custom bilinear form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl BilinearMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("bilinear matrix is empty".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "bilinear matrix row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteComponent { index, value });
        }
        Ok(BilinearMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

/// The bilinear form standing in for `<·,·>`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub enum Pairing {
    #[default]
    DotProduct,
    /// `a1 b2 - a2 b1`; only defined for n = 2.
    Symplectic2D,
    CustomBilinear(BilinearMatrix),
}

impl Pairing {
    pub fn name(&self) -> &'static str {
        match self {
            Pairing::DotProduct => "dot",
            Pairing::Symplectic2D => "symplectic2d",
            Pairing::CustomBilinear(_) => "bilinear",
        }
    }

    pub fn supports_dim(&self, n: usize) -> bool {
        match self {
            Pairing::DotProduct => n >= 1,
            Pairing::Symplectic2D => n == 2,
            Pairing::CustomBilinear(m) => m.dim() == n,
        }
    }

    /// `<a, b>` under this pairing.
    pub fn eval(&self, a: &RealVector, b: &RealVector) -> Result<f64> {
        let n = a.dim();
        if b.dim() != n {
            return Err(Error::DimensionMismatch(format!(
                "vectors have lengths {} and {}",
                n,
                b.dim()
            )));
        }
        if !self.supports_dim(n) {
            return Err(Error::DimensionMismatch(format!(
                "pairing {} is not defined for n = {n}",
                self.name()
            )));
        }
        let (a, b) = (a.as_slice(), b.as_slice());
        Ok(match self {
            Pairing::DotProduct => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Pairing::Symplectic2D => a[0] * b[1] - a[1] * b[0],
            Pairing::CustomBilinear(m) => (0..n)
                .map(|i| a[i] * (0..n).map(|j| m.get(i, j) * b[j]).sum::<f64>())
                .sum(),
        })
    }

    /// Checks `<e_i, e_j> = -<e_j, e_i>` on the standard basis of ℝⁿ.
    pub fn is_antisymmetric(&self, n: usize) -> bool {
        if !self.supports_dim(n) {
            return false;
        }
        let basis = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            RealVector(v)
        };
        for i in 0..n {
            for j in i..n {
                let (ei, ej) = (basis(i), basis(j));
                let (Ok(p), Ok(q)) = (self.eval(&ei, &ej), self.eval(&ej, &ei)) else {
                    return false;
                };
                if p != -q {
                    return false;
                }
            }
        }
        true
    }
}

pub fn pairing_eval(p: &Pairing, a: &RealVector, b: &RealVector) -> Result<f64> {
    p.eval(a, b)
}

/// ℓ² norm, accumulated with scaling so large components do not overflow.
pub fn euclidean_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |acc, &v| acc.hypot(v))
}

/// `(Σ x_j^k)^(1/k)`.
///
/// Nonnegative inputs take a scaled path (`max · (Σ (x_j/max)^k)^(1/k)`) that
/// neither overflows nor drops below the largest component. Even `k` uses
/// `|x_j|`. Odd `k` with a negative power sum has no real root.
pub fn lp_point_norm(x: &[f64], k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("lp norm order k must be at least 1".into()));
    }
    if k.is_multiple_of(2) || x.iter().all(|&v| v >= 0.0) {
        return Ok(lp_norm_nonneg(x, k));
    }
    let sum: f64 = x.iter().map(|v| v.powi(k as i32)).sum();
    if sum < 0.0 {
        return Err(Error::NegativeBaseOddRoot { k, sum });
    }
    Ok(sum.powf(1.0 / k as f64))
}

/// Hot-path ℓᵏ norm of `|x|`. Callers guarantee `k >= 1`.
#[inline]
pub(crate) fn lp_norm_nonneg(x: &[f64], k: u32) -> f64 {
    match k {
        1 => x.iter().map(|v| v.abs()).sum(),
        2 => euclidean_norm(x),
        _ => {
            let m = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
            if m == 0.0 || !m.is_finite() {
                return m;
            }
            if x.len() == 1 {
                return m;
            }
            let s: f64 = x.iter().map(|v| (v.abs() / m).powi(k as i32)).sum();
            m * s.powf(1.0 / k as f64)
        }
    }
}

/// Per-dimension orientation of a box edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Forward => 1.0,
            Orientation::Reversed => -1.0,
        }
    }
}

/// The region `∏ [|a_j|, |b_j|]`, keeping each edge's direction so that
/// integrals over it are signed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxDomain {
    /// Bounds must be finite, nonnegative and of equal nonzero length.
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "box bounds have lengths {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower.is_empty() {
            return Err(Error::EmptyVector);
        }
        for (index, &value) in lower.iter().chain(&upper).enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::Domain(format!(
                    "box bound #{index} must be finite and nonnegative, got {value}"
                )));
            }
        }
        Ok(BoxDomain { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Zero-width edges count as forward.
    pub fn orientation(&self, j: usize) -> Orientation {
        if self.upper[j] < self.lower[j] {
            Orientation::Reversed
        } else {
            Orientation::Forward
        }
    }

    pub fn orientation_signs(&self) -> Vec<f64> {
        (0..self.dim()).map(|j| self.orientation(j).sign()).collect()
    }

    /// `∏ (upper_j - lower_j)`.
    pub fn signed_volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo).product()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(lo, hi)| lo == hi)
    }

    /// The same point set with every edge running forward.
    pub fn unoriented(&self) -> BoxDomain {
        let (lower, upper) = self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| (lo.min(hi), lo.max(hi)))
            .unzip();
        BoxDomain { lower, upper }
    }

    /// Reorders dimensions: dimension `j` of the result is dimension `perm[j]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<BoxDomain> {
        if perm.len() != self.dim() {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        BoxDomain::new(
            perm.iter().map(|&p| self.lower[p]).collect(),
            perm.iter().map(|&p| self.upper[p]).collect(),
        )
    }

    /// Far corner from the origin in every coordinate.
    pub fn max_corner(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| lo.max(*hi)).collect()
    }

    pub fn min_corner(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| lo.min(*hi)).collect()
    }
}

impl fmt::Display for BoxDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if j > 0 {
                write!(f, "x")?;
            }
            write!(f, "[{lo}, {hi}]")?;
        }
        Ok(())
    }
}

/// `lower_j = |a_j|`, `upper_j = |b_j|`.
pub fn box_from_pair(a: &RealVector, b: &RealVector) -> Result<BoxDomain> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vectors have lengths {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    BoxDomain::new(
        a.as_slice().iter().map(|v| v.abs()).collect(),
        b.as_slice().iter().map(|v| v.abs()).collect(),
    )
}

pub fn signed_volume(domain: &BoxDomain) -> f64 {
    domain.signed_volume()
}

/// `e(z) = exp(2πiz)`.
///
/// The real part is reduced modulo 1 before scaling by 2π so large real
/// arguments keep full phase accuracy.
pub fn unit_phase_e(z: ComplexScalar) -> Result<ComplexScalar> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("unit phase of non-finite {z}")));
    }
    let exponent = -TAU * z.im;
    if exponent > EXP_LIMIT {
        return Err(Error::Overflow { exponent });
    }
    Ok(unit_phase_unchecked(z.re, z.im))
}

/// `exp(2πi(re + i·im))` without range checks; may return inf.
#[inline]
pub(crate) fn unit_phase_unchecked(re: f64, im: f64) -> ComplexScalar {
    let modulus = (-TAU * im).exp();
    if re == 0.0 {
        return Complex64::new(modulus, 0.0);
    }
    let frac = re - re.round();
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(modulus * c, modulus * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(x: &[f64]) -> RealVector {
        RealVector::new(x.to_vec()).unwrap()
    }

    #[test]
    fn vector_rejects_empty_and_nan() {
        assert_eq!(RealVector::new(vec![]), Err(Error::EmptyVector));
        assert!(matches!(
            RealVector::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteComponent { index: 1, .. })
        ));
        assert!(RealVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(Pairing::DotProduct.eval(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
        let s = Pairing::Symplectic2D;
        assert_eq!(s.eval(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(s.eval(&v(&[0.0, 1.0]), &v(&[1.0, 0.0])).unwrap(), -1.0);
        assert_eq!(Pairing::DotProduct.eval(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn pairing_dimension_errors() {
        assert!(matches!(
            Pairing::DotProduct.eval(&v(&[1.0]), &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            Pairing::Symplectic2D.eval(&v(&[1.0, 2.0, 3.0]), &v(&[1.0, 2.0, 3.0])),
            Err(Error::DimensionMismatch(_))
        ));
        let m = BilinearMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(Pairing::CustomBilinear(m).eval(&v(&[1.0]), &v(&[1.0])).is_err());
    }

    #[test]
    fn custom_bilinear_matches_matrix_product() {
        let m = BilinearMatrix::from_rows(vec![vec![0.0, 2.0], vec![-2.0, 0.0]]).unwrap();
        let p = Pairing::CustomBilinear(m);
        // aᵀ M b = 1*(2*4) + 3*(-2*5)
        assert_eq!(p.eval(&v(&[1.0, 3.0]), &v(&[5.0, 4.0])).unwrap(), 8.0 - 30.0);
        assert!(p.is_antisymmetric(2));
        assert!(!Pairing::DotProduct.is_antisymmetric(2));
        assert!(Pairing::Symplectic2D.is_antisymmetric(2));
        assert!(BilinearMatrix::from_rows(vec![vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_eq!(euclidean_norm(&[3.0, 4.0]), 5.0);
        assert_eq!(euclidean_norm(&[0.0, 0.0, 0.0]), 0.0);
        assert_eq!(euclidean_norm(&[1.0, 1.0, 1.0, 1.0]), 2.0);
        assert_eq!(euclidean_norm(&[1e200, 1e200]), 1e200 * 2f64.sqrt());
    }

    #[test]
    fn lp_norm_examples() {
        assert_eq!(lp_point_norm(&[3.0, 4.0], 2).unwrap(), 5.0);
        assert_abs_diff_eq!(lp_point_norm(&[1.0, 1.0], 4).unwrap(), 1.189_207_115_002_721, epsilon = 1e-15);
        assert_eq!(lp_point_norm(&[2.0, 0.0, 0.0], 7).unwrap(), 2.0);
        assert_eq!(lp_point_norm(&[1.0, 2.0], 1).unwrap(), 3.0);
    }

    #[test]
    fn lp_norm_odd_negative_sum_rejected() {
        assert!(matches!(
            lp_point_norm(&[1.0, -2.0], 3),
            Err(Error::NegativeBaseOddRoot { k: 3, .. })
        ));
        // positive power sum with a negative entry is still a real root
        let got = lp_point_norm(&[2.0, -1.0], 3).unwrap();
        assert_abs_diff_eq!(got, 7f64.cbrt(), epsilon = 1e-14);
        assert!(lp_point_norm(&[1.0], 0).is_err());
    }

    #[test]
    fn box_examples() {
        let bx = box_from_pair(&v(&[1.0, -2.0]), &v(&[2.0, 3.0])).unwrap();
        assert_eq!(bx.lower(), &[1.0, 2.0]);
        assert_eq!(bx.upper(), &[2.0, 3.0]);
        assert_eq!(bx.orientation_signs(), vec![1.0, 1.0]);
        assert_eq!(bx.signed_volume(), 1.0);

        let rev = box_from_pair(&v(&[2.0]), &v(&[1.0])).unwrap();
        assert_eq!(rev.orientation_signs(), vec![-1.0]);
        assert_eq!(rev.signed_volume(), -1.0);

        let unit = box_from_pair(&v(&[0.0, 0.0]), &v(&[1.0, 1.0])).unwrap();
        assert_eq!(unit.signed_volume(), 1.0);

        let flat = BoxDomain::new(vec![1.0, 0.0], vec![1.0, 5.0]).unwrap();
        assert_eq!(flat.signed_volume(), 0.0);
        assert_eq!(flat.orientation(0), Orientation::Forward);
        assert!(flat.is_degenerate());

        assert!(box_from_pair(&v(&[1.0]), &v(&[1.0, 2.0])).is_err());
        assert!(BoxDomain::new(vec![-1.0], vec![1.0]).is_err());
    }

    #[test]
    fn unit_phase_examples() {
        assert_eq!(unit_phase_e(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(1.0, 0.0));
        let half = unit_phase_e(Complex64::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(half.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(half.im, 0.0, epsilon = 1e-15);
        // e^{2π}
        let big = unit_phase_e(Complex64::new(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(big.re, 535.491_655_524_764_7, epsilon = 1e-10);
        assert_eq!(big.im, 0.0);
        assert!(matches!(
            unit_phase_e(Complex64::new(0.0, -200.0)),
            Err(Error::Overflow { .. })
        ));
    }
}
