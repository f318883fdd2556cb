//! Feasibility estimates for encoding Talbot qudits on a pixelated SLM and
//! reading them out on a camera.

use serde::{Deserialize, Serialize};

use crate::qudit::talbot_c;
use crate::{Error, Result};

/// Default number of illuminated slits needed for a faithful carpet.
pub const DEFAULT_SLIT_THRESHOLD: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareSpec {
    /// Pixel pitch, meters.
    pub pixel_pitch: f64,
    pub pixels: [u64; 2],
    /// Meters.
    pub wavelength: f64,
}

impl HardwareSpec {
    pub fn new(pixel_pitch: f64, pixels: [u64; 2], wavelength: f64) -> Result<Self> {
        let s = Self { pixel_pitch, pixels, wavelength };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pixel_pitch", self.pixel_pitch), ("wavelength", self.wavelength)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.pixels.contains(&0) {
            return Err(Error::InvalidParameter("pixel counts must be positive".into()));
        }
        Ok(())
    }

    /// Length of the longer SLM side.
    pub fn slm_size(&self) -> f64 {
        self.pixels[0].max(self.pixels[1]) as f64 * self.pixel_pitch
    }
}

/// `z_T = (rho D)^2 / lambda` for slits one pixel apart.
pub fn talbot_length(pixel_pitch: f64, dim: usize, wavelength: f64) -> f64 {
    let period = pixel_pitch * dim as f64;
    period * period / wavelength
}

/// `floor(s_SLM / (threshold rho))`: the largest `D` for which `threshold`
/// periods of `D` pixels fit on the longer side.
pub fn max_dimension(spec: &HardwareSpec, threshold: f64) -> usize {
    let longer = spec.pixels[0].max(spec.pixels[1]) as f64;
    (longer / threshold).floor() as usize
}

/// `-(1/D) sum_d log2(1/D) = log2 D` bits for perfectly correlated outcomes.
pub fn mutual_information(dim: usize) -> f64 {
    if dim <= 1 {
        0.0
    } else {
        (dim as f64).log2()
    }
}

/// Gate distance under the two factor conventions in use: `2 z_T / (c D)`
/// with `c = 2, 1` for even, odd `D` (the one implemented by the Talbot gate),
/// and `z_T / (g D)` with `g = 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDistances {
    pub c_convention: f64,
    pub g_convention: f64,
}

pub fn gate_distances(talbot_length: f64, dim: usize) -> GateDistances {
    let d = dim as f64;
    let g = if dim % 2 == 0 { 1.0 } else { 2.0 };
    GateDistances {
        c_convention: 2.0 * talbot_length / (talbot_c(dim) as f64 * d),
        g_convention: talbot_length / (g * d),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub hardware: HardwareSpec,
    pub threshold: f64,
    pub max_dimension: usize,
    /// Meters, at `max_dimension`.
    pub talbot_length: f64,
    pub gate_distance: GateDistances,
    pub mutual_information: f64,
}

pub fn report(spec: &HardwareSpec, threshold: f64) -> Result<ConstraintReport> {
    spec.validate()?;
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidParameter(format!("slit threshold must be positive, got {threshold}")));
    }
    let d = max_dimension(spec, threshold);
    let zt = talbot_length(spec.pixel_pitch, d, spec.wavelength);
    Ok(ConstraintReport {
        hardware: *spec,
        threshold,
        max_dimension: d,
        talbot_length: zt,
        gate_distance: gate_distances(zt, d.max(1)),
        mutual_information: mutual_information(d),
    })
}
