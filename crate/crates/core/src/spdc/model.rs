use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{BiphotonField, GridSpec};
use crate::{Error, Result};

/// Double-Gaussian photon-pair amplitude
/// `Psi(x1, x2) = psi_+(x1 + x2) psi_-(x1 - x2)` with
/// `psi_pm(u) = exp(-u^2 / (4 kappa_pm^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiphotonGaussian {
    pub kappa_plus: f64,
    pub kappa_minus: f64,
}

impl BiphotonGaussian {
    pub fn new(kappa_plus: f64, kappa_minus: f64) -> Result<Self> {
        for (name, v) in [("kappa_plus", kappa_plus), ("kappa_minus", kappa_minus)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { kappa_plus, kappa_minus })
    }

    /// The model with correlation `r` at fixed `kappa_plus`:
    /// `kappa_minus = kappa_plus sqrt((1 - r) / (1 + r))`.
    pub fn from_correlation(kappa_plus: f64, r: f64) -> Result<Self> {
        if !(r > -1.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("correlation must lie in (-1, 1), got {r}")));
        }
        Self::new(kappa_plus, kappa_plus * ((1.0 - r) / (1.0 + r)).sqrt())
    }

    /// `R = (kappa_+^2 - kappa_-^2) / (kappa_+^2 + kappa_-^2)`.
    pub fn correlation_r(&self) -> f64 {
        let (p, m) = (self.kappa_plus * self.kappa_plus, self.kappa_minus * self.kappa_minus);
        (p - m) / (p + m)
    }

    /// `1 / Delta_+^2 = 1/kappa_+^2 + 1/kappa_-^2`.
    pub fn inv_delta_plus_sq(&self) -> f64 {
        self.kappa_plus.powi(-2) + self.kappa_minus.powi(-2)
    }

    /// `1 / Delta_-^2 = 1/kappa_+^2 - 1/kappa_-^2`; negative when
    /// `kappa_- < kappa_+`.
    pub fn inv_delta_minus_sq(&self) -> f64 {
        self.kappa_plus.powi(-2) - self.kappa_minus.powi(-2)
    }

    /// Amplitude normalized over the plane.
    pub fn amplitude(&self, x1: f64, x2: f64) -> Complex64 {
        let (u, v) = (x1 + x2, x1 - x2);
        let norm = 1.0 / (PI * self.kappa_plus * self.kappa_minus).sqrt();
        let e = -u * u / (4.0 * self.kappa_plus * self.kappa_plus) - v * v / (4.0 * self.kappa_minus * self.kappa_minus);
        Complex64::new(norm * e.exp(), 0.0)
    }

    /// The amplitude on a grid, renormalized to the discrete norm.
    pub fn sample(&self, grid1: GridSpec, grid2: GridSpec) -> Result<BiphotonField> {
        BiphotonField::from_fn(grid1, grid2, |x1, x2| self.amplitude(x1, x2)).normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn correlation_values() {
        let m = BiphotonGaussian::new(9.0, 1.0).unwrap();
        assert!((m.correlation_r() - 80.0 / 82.0).abs() < 1e-15);
        let m = BiphotonGaussian::new(2.0, 2.0).unwrap();
        assert_eq!(m.correlation_r(), 0.0);
        let m = BiphotonGaussian::new(9.0, 1.0 / 6.0).unwrap();
        assert!((m.correlation_r() - 0.999314).abs() < 1e-6);
    }

    #[test]
    fn from_correlation_inverts() {
        for r in [-0.5, 0.0, 0.9, 0.998, 0.99998] {
            let m = BiphotonGaussian::from_correlation(9.0, r).unwrap();
            assert!((m.correlation_r() - r).abs() < 1e-12);
        }
        assert!(BiphotonGaussian::from_correlation(9.0, 1.0).is_err());
    }

    #[test]
    fn amplitude_is_normalized_symmetric_and_peaked() {
        let m = BiphotonGaussian::new(3.0, 0.5).unwrap();
        let g = GridSpec::symmetric(15.0, 600).unwrap();
        let f = BiphotonField::from_fn(g, g, |a, b| m.amplitude(a, b));
        assert!((f.norm_sqr() - 1.0).abs() < 1e-9);
        assert_eq!(m.amplitude(0.3, -1.1), m.amplitude(-1.1, 0.3));
        assert!(m.amplitude(0.0, 0.0).re > m.amplitude(0.1, 0.0).re);
    }

    #[test]
    fn widths_along_diagonals() {
        // Along x1 = x2 the 1/e^2 half-width of |Psi|^2 in u = x1 + x2 is
        // 2 kappa_+; across it, 2 kappa_-.
        let m = BiphotonGaussian::new(4.0, 0.5).unwrap();
        let p0 = m.amplitude(0.0, 0.0).norm_sqr();
        let along = m.amplitude(4.0, 4.0).norm_sqr() / p0;
        let across = m.amplitude(0.5, -0.5).norm_sqr() / p0;
        assert!((along - (-2.0f64).exp()).abs() < 1e-12);
        assert!((across - (-2.0f64).exp()).abs() < 1e-12);
    }
}
