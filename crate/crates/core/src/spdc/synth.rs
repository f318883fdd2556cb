use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::coeffs::CoeffMatrix;
use super::slits::{check_resolution, SlitArray};
use crate::field::{
    fft_frequencies, spectral_filter, spectral_filter_axis, Axis, BiphotonField, GridSpec, ModeField, SampledField,
    TruncationRule,
};
use crate::qudit::TalbotGeometry;
use crate::{Error, Result};

/// Lens-grating-lens carpet synthesizer: two lenses of focal length `f`
/// around a grating of Gaussian spikes (width `sigma`, pitch `grating_period`)
/// in the Fourier plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesizerGeometry {
    pub focal_length: f64,
    pub wavelength: f64,
    pub grating_period: f64,
    pub grating_width: f64,
}

impl SynthesizerGeometry {
    pub fn new(focal_length: f64, wavelength: f64, grating_period: f64, grating_width: f64) -> Result<Self> {
        let g = Self { focal_length, wavelength, grating_period, grating_width };
        for (name, v) in [
            ("focal_length", focal_length),
            ("wavelength", wavelength),
            ("grating_period", grating_period),
            ("grating_width", grating_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(g)
    }

    /// The focal length that makes the effective period equal `D s`, so the
    /// replicated slit array tiles into a Talbot basis.
    pub fn matched(slits: &SlitArray, wavelength: f64, grating_period: f64, grating_width: f64) -> Result<Self> {
        let f = slits.dim as f64 * slits.spacing * grating_period / wavelength;
        Self::new(f, wavelength, grating_period, grating_width)
    }

    /// `period = f lambda / grating_period`.
    pub fn effective_period(&self) -> f64 {
        self.focal_length * self.wavelength / self.grating_period
    }

    /// Checks that the output is a D-dimensional Talbot state: the effective
    /// period equals `D s` and the slits are narrow against `period / D`.
    pub fn validate_for(&self, slits: &SlitArray) -> Result<()> {
        slits.validate()?;
        let period = self.effective_period();
        let target = slits.dim as f64 * slits.spacing;
        if (period - target).abs() > 1e-9 * target {
            return Err(Error::InvalidParameter(format!(
                "effective period {period} must equal D * s = {target} for the output to be a Talbot state"
            )));
        }
        if slits.shape.width >= period / slits.dim as f64 {
            return Err(Error::InvalidParameter(format!(
                "slit width {} is not below period / D = {}",
                slits.shape.width,
                period / slits.dim as f64
            )));
        }
        Ok(())
    }

    /// Fourier coefficient `A_m = exp(-(2 pi m sigma / l_g)^2 / 2)` of the
    /// grating transmission.
    pub fn grating_coeff(&self, m: i64) -> f64 {
        let a = 2.0 * PI * m as f64 * self.grating_width / self.grating_period;
        (-0.5 * a * a).exp()
    }

    /// Smallest `M` with `sum_{|m|>M} A_m^2 < tol * sum_m A_m^2`.
    pub fn grating_order(&self, rule: TruncationRule) -> i64 {
        let mut tail: Vec<f64> = Vec::new();
        let mut m = 0i64;
        loop {
            let a = self.grating_coeff(m);
            let w = if m == 0 { a * a } else { 2.0 * a * a };
            if w == 0.0 || m as usize > rule.max_order + 1 {
                break;
            }
            tail.push(w);
            m += 1;
        }
        let total: f64 = tail.iter().sum();
        let mut kept = 0.0;
        for (k, w) in tail.iter().enumerate() {
            kept += w;
            if total - kept < rule.tolerance * total || k >= rule.max_order {
                return k as i64;
            }
        }
        (tail.len() as i64 - 1).max(0)
    }

    /// Grating transmission `G(x') = sum_p (l_g / (sigma sqrt(2 pi)))
    /// exp(-(x' - p l_g)^2 / (2 sigma^2))`, whose Fourier coefficients are `A_m`.
    pub fn grating_transmission(&self, x: f64) -> f64 {
        let (lg, sigma) = (self.grating_period, self.grating_width);
        let p0 = (x / lg).round() as i64;
        let reach = (10.0 * sigma / lg).ceil() as i64 + 1;
        let norm = lg / (sigma * (2.0 * PI).sqrt());
        (p0 - reach..=p0 + reach)
            .map(|p| {
                let u = x - p as f64 * lg;
                norm * (-u * u / (2.0 * sigma * sigma)).exp()
            })
            .sum()
    }

    /// Talbot-basis layout of the output plane for `slits`.
    pub fn talbot_geometry(&self, slits: &SlitArray) -> Result<TalbotGeometry> {
        self.validate_for(slits)?;
        TalbotGeometry::new(self.effective_period(), slits.shape, slits.dim, self.wavelength)?.with_origin(slits.center(0))
    }
}

/// Periodic carrier of the synthesized state: `sum_d c_d S(x - x_d)` repeated
/// every effective period. This is the narrow-spike limit of the output, in
/// which the envelope `A_m` is flat across the window of interest.
pub fn synthesize_single(slits: &SlitArray, geom: &SynthesizerGeometry) -> Result<ModeField> {
    geom.validate_for(slits)?;
    let cell: Vec<(f64, Complex64)> = (0..slits.dim).map(|d| (slits.center(d), slits.amplitudes[d])).collect();
    ModeField::from_cell(geom.effective_period(), slits.center(0), &cell, slits.shape, TruncationRule::default())?
        .normalized()
}

/// `T_d(x) = sum_{|m|<=M} A_m S(x - x_d - m period)` sampled on `grid`.
pub fn grating_mode(slits: &SlitArray, geom: &SynthesizerGeometry, d: usize, grid: &GridSpec) -> Result<Vec<Complex64>> {
    check_resolution(grid, slits.shape.width)?;
    let period = geom.effective_period();
    let order = geom.grating_order(TruncationRule::default());
    let coeffs: Vec<f64> = (-order..=order).map(|m| geom.grating_coeff(m)).collect();
    let reach = slits.shape.reach();
    let xd = slits.center(d);
    Ok(grid
        .coords()
        .map(|x| {
            let mut v = 0.0;
            // Only replicas within reach of x contribute.
            let lo = ((x - xd - reach) / period).ceil() as i64;
            let hi = ((x - xd + reach) / period).floor() as i64;
            for m in lo.max(-order)..=hi.min(order) {
                v += coeffs[(m + order) as usize] * slits.shape.value(x - xd - m as f64 * period);
            }
            Complex64::new(v, 0.0)
        })
        .collect())
}

/// Full synthesizer output `sum_d c_d T_d(x)` on `grid`, with the finite
/// grating envelope, normalized.
pub fn synthesize_single_sampled(slits: &SlitArray, geom: &SynthesizerGeometry, grid: GridSpec) -> Result<SampledField> {
    geom.validate_for(slits)?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.n];
    for d in 0..slits.dim {
        let t = grating_mode(slits, geom, d, &grid)?;
        values.iter_mut().zip(t).for_each(|(v, t)| *v += slits.amplitudes[d] * t);
    }
    SampledField::new(grid, values)?.normalized()
}

/// `Psi(x1, x2) = sum C[d1][d2] T_{d1}(x1) T_{d2}(x2)`, normalized.
pub fn two_photon_field(
    c: &CoeffMatrix,
    slits: &SlitArray,
    geom: &SynthesizerGeometry,
    grid1: GridSpec,
    grid2: GridSpec,
) -> Result<BiphotonField> {
    geom.validate_for(slits)?;
    if c.dim() != slits.dim {
        return Err(Error::InvalidParameter(format!("{}x{} coefficients for {} slits", c.dim(), c.dim(), slits.dim)));
    }
    let m1: Vec<_> = (0..slits.dim).map(|d| grating_mode(slits, geom, d, &grid1)).collect::<Result<_>>()?;
    let m2: Vec<_> = (0..slits.dim).map(|d| grating_mode(slits, geom, d, &grid2)).collect::<Result<_>>()?;
    BiphotonField::from_mode_sum(grid1, grid2, &c.rows(), &m1, &m2)?.normalized()
}

/// Fourier-plane mask `G(f lambda u)` on the FFT frequencies of an axis.
fn fourier_plane_mask(geom: &SynthesizerGeometry, grid: &GridSpec) -> Result<Vec<Complex64>> {
    let period = geom.effective_period();
    let periods = grid.extent() / period;
    if (periods - periods.round()).abs() > 1e-6 * periods.max(1.0) {
        return Err(Error::GridMismatch(format!(
            "the optical pipeline needs a whole number of effective periods in the window, got {periods}"
        )));
    }
    let scale = geom.focal_length * geom.wavelength;
    Ok(fft_frequencies(grid.n, grid.dx)
        .into_iter()
        .map(|u| Complex64::new(geom.grating_transmission(scale * u), 0.0))
        .collect())
}

/// Lens, grating, lens on a sampled single-photon field. The second transform
/// is taken with the opposite sign so the output plane is not mirrored.
pub fn optical_pipeline(field: &SampledField, geom: &SynthesizerGeometry) -> Result<SampledField> {
    let grid = *field.grid();
    let mask = fourier_plane_mask(geom, &grid)?;
    let mut values = field.values().to_vec();
    spectral_filter(&mut values, &mask)?;
    SampledField::new(grid, values)
}

/// [`optical_pipeline`] applied to both photons of a pair.
pub fn optical_pipeline_biphoton(field: &BiphotonField, geom: &SynthesizerGeometry) -> Result<BiphotonField> {
    let mut out = field.clone();
    for axis in [Axis::First, Axis::Second] {
        let mask = fourier_plane_mask(geom, out.grid(axis))?;
        spectral_filter_axis(&mut out, axis, &mask)?;
    }
    Ok(out)
}
