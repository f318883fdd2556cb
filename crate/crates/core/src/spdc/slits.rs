use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::field::{Axis, BiphotonField, GridSpec, SampledField, SlitShape};
use crate::{Error, Result};

/// Minimum samples per slit width required by [`apply_dslit`] and the
/// sampled synthesizers.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 2.0;

/// `D` identical slits at spacing `s`, centered on `x = 0`:
/// slit `d` sits at `(d - (D - 1)/2) s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlitArray {
    pub dim: usize,
    pub spacing: f64,
    pub shape: SlitShape,
    /// Illumination amplitudes `c_d`, unit norm.
    pub amplitudes: Vec<Complex64>,
}

impl SlitArray {
    /// Uniformly illuminated array.
    pub fn new(dim: usize, spacing: f64, shape: SlitShape) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("slit array needs at least one slit".into()));
        }
        let c = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let a = Self { dim, spacing, shape, amplitudes: vec![c; dim] };
        a.validate()?;
        Ok(a)
    }

    /// Replaces the illumination amplitudes; they are rescaled to unit norm.
    pub fn with_amplitudes(mut self, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != self.dim {
            return Err(Error::InvalidParameter(format!("{} amplitudes for {} slits", amplitudes.len(), self.dim)));
        }
        let n: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter("illumination amplitudes are all zero".into()));
        }
        let s = 1.0 / n.sqrt();
        self.amplitudes = amplitudes.into_iter().map(|c| c * s).collect();
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::InvalidParameter(format!("slit spacing must be positive, got {}", self.spacing)));
        }
        if self.dim > 1 && self.spacing <= self.shape.width {
            return Err(Error::InvalidParameter(format!(
                "slit spacing {} must exceed the slit width {}",
                self.spacing, self.shape.width
            )));
        }
        let n: f64 = self.amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if self.amplitudes.len() != self.dim || (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("illumination amplitudes must be unit norm, one per slit".into()));
        }
        Ok(())
    }

    pub fn center(&self, d: usize) -> f64 {
        (d as f64 - 0.5 * (self.dim as f64 - 1.0)) * self.spacing
    }

    /// Aperture transmission `sum_d S(x - x_d)`: every slit has unit peak.
    pub fn aperture(&self, x: f64) -> f64 {
        (0..self.dim).map(|d| self.shape.value(x - self.center(d))).sum()
    }

    /// Illuminated aperture field `S_D(x) = sum_d c_d S(x - x_d)`.
    pub fn field(&self, x: f64) -> Complex64 {
        self.amplitudes.iter().enumerate().map(|(d, c)| c * self.shape.value(x - self.center(d))).sum()
    }

    /// `S_D` sampled on `grid` and normalized.
    pub fn sample(&self, grid: GridSpec) -> Result<SampledField> {
        check_resolution(&grid, self.shape.width)?;
        SampledField::from_fn(grid, |x| self.field(x)).normalized()
    }
}

pub(crate) fn check_resolution(grid: &GridSpec, width: f64) -> Result<()> {
    if width / grid.dx < MIN_SAMPLES_PER_WIDTH {
        return Err(Error::UnderResolved(format!(
            "dx = {} leaves fewer than {MIN_SAMPLES_PER_WIDTH} samples per slit width {width}",
            grid.dx
        )));
    }
    Ok(())
}

/// Pair state behind identical apertures on both photons, renormalized.
#[derive(Debug, Clone)]
pub struct Apertured {
    pub field: BiphotonField,
    /// Fraction of the incident probability that passes both apertures.
    pub transmitted: f64,
}

/// `S(x1) S(x2) Psi(x1, x2)` with `S` the unit-peak aperture of `slits`.
pub fn apply_dslit(field: &BiphotonField, slits: &SlitArray) -> Result<Apertured> {
    slits.validate()?;
    let (g1, g2) = field.grids();
    check_resolution(g1, slits.shape.width)?;
    check_resolution(g2, slits.shape.width)?;
    let before = field.norm_sqr();
    let t1: Vec<Complex64> = g1.coords().map(|x| Complex64::new(slits.aperture(x), 0.0)).collect();
    let t2: Vec<Complex64> = g2.coords().map(|x| Complex64::new(slits.aperture(x), 0.0)).collect();
    let mut out = field.clone();
    out.scale_axis(Axis::First, &t1)?;
    out.scale_axis(Axis::Second, &t2)?;
    let after = out.norm_sqr();
    if !(after > 0.0) {
        return Err(Error::InvalidParameter("nothing is transmitted through the apertures".into()));
    }
    out.normalize()?;
    Ok(Apertured { field: out, transmitted: after / before })
}

/// Probability of each slit pair `(d1, d2)`: the field power within half a
/// spacing of the two slit centers.
pub fn slit_pair_weights(field: &BiphotonField, slits: &SlitArray) -> Vec<Vec<f64>> {
    let (g1, g2) = field.grids();
    let d = slits.dim;
    let which = |x: f64| -> Option<usize> {
        (0..d).find(|&k| (x - slits.center(k)).abs() < 0.5 * slits.spacing)
    };
    let b1: Vec<Option<usize>> = g1.coords().map(which).collect();
    let b2: Vec<Option<usize>> = g2.coords().map(which).collect();
    let mut w = vec![vec![0.0; d]; d];
    for (i, bi) in b1.iter().enumerate() {
        let Some(a) = bi else { continue };
        for (j, bj) in b2.iter().enumerate() {
            if let Some(b) = bj {
                w[*a][*b] += field.get(i, j).norm_sqr();
            }
        }
    }
    let total: f64 = w.iter().flatten().sum();
    if total > 0.0 {
        w.iter_mut().flatten().for_each(|v| *v /= total);
    }
    w
}
