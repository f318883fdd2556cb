use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::BiphotonGaussian;
use crate::{Error, Result, NORM_TOL};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(rename = "D")]
    d: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Two-qudit amplitudes `C[d1][d2]`, unit Frobenius norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct CoeffMatrix {
    m: DMatrix<Complex64>,
}

impl CoeffMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidParameter(format!("need a non-empty square matrix, got {}x{}", m.nrows(), m.ncols())));
        }
        let n = m.norm_squared();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!("coefficient norm^2 is {n}, expected 1")));
        }
        Ok(Self { m })
    }

    pub fn normalized(m: DMatrix<Complex64>) -> Result<Self> {
        let n = m.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!("cannot normalize a coefficient matrix of norm {n}")));
        }
        Self::new(m.unscale(n))
    }

    /// `I / sqrt(D)`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        Self::normalized(DMatrix::identity(d, d))
    }

    /// `C = a b^T` for single-photon amplitudes `a`, `b`.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::InvalidParameter("product factors differ in length".into()));
        }
        Self::normalized(DMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * b[j]))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, d1: usize, d2: usize) -> Complex64 {
        self.m[(d1, d2)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim()).map(|i| (0..self.dim()).map(|j| self.m[(i, j)]).collect()).collect()
    }
}

impl TryFrom<MatrixJson> for CoeffMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        let ok = |rows: &Vec<Vec<f64>>| rows.len() == j.d && rows.iter().all(|r| r.len() == j.d);
        if !ok(&j.re) || !ok(&j.im) {
            return Err(Error::Parse(format!("matrix arrays are not {0}x{0}", j.d)));
        }
        Self::new(DMatrix::from_fn(j.d, j.d, |r, c| Complex64::new(j.re[r][c], j.im[r][c])))
    }
}

impl From<CoeffMatrix> for MatrixJson {
    fn from(c: CoeffMatrix) -> Self {
        let d = c.dim();
        MatrixJson {
            d,
            re: (0..d).map(|r| (0..d).map(|k| c.m[(r, k)].re).collect()).collect(),
            im: (0..d).map(|r| (0..d).map(|k| c.m[(r, k)].im).collect()).collect(),
        }
    }
}

/// Narrow-slit pair amplitudes `C ~ psi_+(x1 + x2) psi_-(x1 - x2)` at the
/// slit centers `x = (d - (D - 1)/2) s`, evaluated as
/// `exp(-(s^2 / 4 Delta_+^2)(u1^2 - 2 R u1 u2 + u2^2))`.
pub fn entangled_coeffs(d: usize, spacing: f64, model: &BiphotonGaussian) -> Result<CoeffMatrix> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidParameter(format!("slit spacing must be positive, got {spacing}")));
    }
    let r = model.correlation_r();
    let a = spacing * spacing / 4.0 * model.inv_delta_plus_sq();
    let centre = 0.5 * (d as f64 - 1.0);
    let exponent = |i: usize, j: usize| {
        let (u1, u2) = (i as f64 - centre, j as f64 - centre);
        // 2R(u1 u2) is symmetric in (u1, u2) bit for bit.
        -a * (u1 * u1 - 2.0 * r * (u1 * u2) + u2 * u2)
    };
    let max = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| exponent(i, j)).fold(f64::MIN, f64::max);
    CoeffMatrix::normalized(DMatrix::from_fn(d, d, |i, j| Complex64::new((exponent(i, j) - max).exp(), 0.0)))
}

/// Singular values of a coefficient matrix and the entanglement entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtSpectrum {
    /// Non-increasing.
    pub singular_values: Vec<f64>,
    /// `-sum lambda^2 log2 lambda^2` in bits.
    pub entropy: f64,
}

pub fn schmidt_spectrum(c: &CoeffMatrix) -> SchmidtSpectrum {
    let mut sv: Vec<f64> = c.matrix().clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let entropy = sv
        .iter()
        .map(|s| s * s)
        .filter(|p| *p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0);
    SchmidtSpectrum { singular_values: sv, entropy }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_entangled_spectrum() {
        for d in 2..=6 {
            let s = schmidt_spectrum(&CoeffMatrix::maximally_entangled(d).unwrap());
            for v in &s.singular_values {
                assert!((v - 1.0 / (d as f64).sqrt()).abs() < 1e-12);
            }
            assert!((s.entropy - (d as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn product_has_zero_entropy() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(-1.0, 0.5)];
        let b = [Complex64::new(0.3, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let s = schmidt_spectrum(&CoeffMatrix::product(&a, &b).unwrap());
        assert!(s.entropy < 1e-9);
        assert!((s.singular_values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_slit_is_trivial() {
        let c = entangled_coeffs(1, 1.0, &BiphotonGaussian::new(9.0, 1.0).unwrap()).unwrap();
        assert_eq!(c.get(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn high_correlation_is_diagonal() {
        let m = BiphotonGaussian::from_correlation(9.0, 0.99998).unwrap();
        let c = entangled_coeffs(5, 1.0, &m).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(c.get(i, j).norm() < 1e-6 * c.get(i, i).norm());
                }
            }
        }
    }

    #[test]
    fn diagonal_reduces_to_kappa_plus_envelope() {
        let m = BiphotonGaussian::new(4.0, 0.3).unwrap();
        let c = entangled_coeffs(4, 1.0, &m).unwrap();
        // u = +-0.5, +-1.5: exp(-s^2 u^2 / kappa_+^2) up to normalization.
        let ratio = c.get(0, 0).re / c.get(1, 1).re;
        assert!((ratio - (-(2.25 - 0.25) / 16.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_normalized() {
        let m = BiphotonGaussian::new(9.0, 0.7).unwrap();
        for d in 1..=9 {
            let c = entangled_coeffs(d, 1.3, &m).unwrap();
            assert!((c.matrix().norm_squared() - 1.0).abs() < 1e-12);
            for i in 0..d {
                for j in 0..d {
                    assert_eq!(c.get(i, j), c.get(j, i));
                }
            }
        }
    }

    #[test]
    fn strong_anticorrelation_entropy_is_intermediate() {
        let m = BiphotonGaussian::new(9.0, 1.0 / 6.0).unwrap();
        let s = schmidt_spectrum(&entangled_coeffs(3, 1.0, &m).unwrap());
        assert!(s.entropy > 0.0 && s.entropy < 3f64.log2());
    }

    #[test]
    fn entropy_grows_with_correlation() {
        let mut last = -1.0;
        for r in [0.0, 0.5, 0.9, 0.98, 0.995, 0.998, 0.9998, 0.99998] {
            let m = BiphotonGaussian::from_correlation(9.0, r).unwrap();
            let e = schmidt_spectrum(&entangled_coeffs(5, 1.0, &m).unwrap()).entropy;
            assert!(e >= last - 1e-12, "R={r}: {e} < {last}");
            last = e;
        }
    }

    #[test]
    fn json_round_trip() {
        let c = entangled_coeffs(3, 1.0, &BiphotonGaussian::new(9.0, 1.0).unwrap()).unwrap();
        let back: CoeffMatrix = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }
}
