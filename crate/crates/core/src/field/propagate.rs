use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::biphoton::{Axis, BiphotonField};
use super::mode::ModeField;
use super::sampled::SampledField;
use crate::{Error, Result};

/// Propagation distance as an exact rational multiple `num/den` of the Talbot
/// length of a given period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalbotFraction {
    pub period: f64,
    pub num: u64,
    pub den: u64,
}

/// Free-space propagation over `distance` at `wavelength`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagationSpec {
    pub wavelength: f64,
    pub distance: f64,
    /// Set when the distance was specified as a Talbot fraction; mode
    /// propagation then uses exact rational phases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub talbot: Option<TalbotFraction>,
}

impl PropagationSpec {
    pub fn new(wavelength: f64, distance: f64) -> Result<Self> {
        if !(wavelength.is_finite() && wavelength > 0.0) {
            return Err(Error::InvalidSpec(format!("wavelength must be positive, got {wavelength}")));
        }
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(Error::InvalidSpec(format!("distance must be non-negative, got {distance}")));
        }
        Ok(Self { wavelength, distance, talbot: None })
    }

    /// `z = (num/den) * period^2 / wavelength`.
    pub fn talbot(wavelength: f64, period: f64, num: u64, den: u64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidSpec(format!("period must be positive, got {period}")));
        }
        if den == 0 {
            return Err(Error::InvalidSpec("Talbot fraction has zero denominator".into()));
        }
        let zt = talbot_length(period, wavelength)?;
        let mut spec = Self::new(wavelength, zt * num as f64 / den as f64)?;
        spec.talbot = Some(TalbotFraction { period, num, den });
        Ok(spec)
    }

    pub fn talbot_length(&self, period: f64) -> Result<f64> {
        talbot_length(period, self.wavelength)
    }

    /// `z / z_T` for the given period.
    pub fn talbot_fraction(&self, period: f64) -> Result<f64> {
        match self.talbot {
            Some(t) if same_period(t.period, period) => Ok(t.num as f64 / t.den as f64),
            _ => Ok(self.distance / self.talbot_length(period)?),
        }
    }
}

/// `z_T = period^2 / wavelength`.
pub fn talbot_length(period: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(Error::InvalidSpec(format!("wavelength must be positive, got {wavelength}")));
    }
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidSpec(format!("period must be positive, got {period}")));
    }
    Ok(period * period / wavelength)
}

fn same_period(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// `exp(-i pi k / den)` with exact values on quarter turns.
fn rational_phase(k: u128, den: u128) -> Complex64 {
    let two_den = 2 * den;
    let k = k % two_den;
    if (2 * k) % den == 0 {
        // Multiple of pi/2.
        return match (2 * k / den) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, -1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, 1.0),
        };
    }
    Complex64::cis(-PI * k as f64 / den as f64)
}

/// Multiplies each `A_n` by `exp(-i pi n^2 z / z_T)`.
pub fn mode_propagate(field: &ModeField, spec: &PropagationSpec) -> Result<ModeField> {
    let mut out = field.clone();
    if spec.distance == 0.0 {
        return Ok(out);
    }
    let m = field.max_order();
    match spec.talbot {
        Some(t) if same_period(t.period, field.period()) => {
            let (num, den) = (t.num as u128, t.den as u128);
            for (i, a) in out.coeffs_mut().iter_mut().enumerate() {
                let n = (i as i64 - m).unsigned_abs() as u128;
                let k = ((n * n) % (2 * den)) * (num % (2 * den));
                *a *= rational_phase(k, den);
            }
        }
        _ => {
            let t = spec.talbot_fraction(field.period())?;
            for (i, a) in out.coeffs_mut().iter_mut().enumerate() {
                let n = (i as i64 - m) as f64;
                let phase = (n * n * t).rem_euclid(2.0);
                *a *= Complex64::cis(-PI * phase);
            }
        }
    }
    Ok(out)
}

/// Checks that the transfer-function phase advances by at most pi between
/// adjacent frequency samples at the band edge: `lambda z <= N dx^2`.
pub fn check_aliasing(n: usize, dx: f64, spec: &PropagationSpec) -> Result<()> {
    let limit = n as f64 * dx * dx;
    let lz = spec.wavelength * spec.distance;
    if lz > limit * (1.0 + 1e-9) {
        return Err(Error::AliasingRisk { phase_step: PI * lz / limit });
    }
    Ok(())
}

/// Spatial frequencies of the DFT bins, in FFT order.
pub fn fft_frequencies(n: usize, dx: f64) -> Vec<f64> {
    let df = 1.0 / (n as f64 * dx);
    (0..n)
        .map(|k| if k < n.div_ceil(2) { k as f64 * df } else { (k as f64 - n as f64) * df })
        .collect()
}

/// Forward FFT, pointwise multiplication by `h`, inverse FFT.
struct SpectralFilter {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    h: Vec<Complex64>,
}

impl SpectralFilter {
    fn new(h: &[Complex64]) -> Self {
        let n = h.len();
        let mut planner = FftPlanner::new();
        let scale = 1.0 / n as f64;
        Self {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            h: h.iter().map(|v| v * scale).collect(),
        }
    }

    fn scratch_len(&self) -> usize {
        self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len())
    }

    fn apply(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        self.fwd.process_with_scratch(buf, scratch);
        buf.iter_mut().zip(&self.h).for_each(|(v, h)| *v *= h);
        self.inv.process_with_scratch(buf, scratch);
    }
}

/// Multiplies the spectrum of a 1-D sample vector by `h` (FFT order).
pub fn spectral_filter(values: &mut [Complex64], h: &[Complex64]) -> Result<()> {
    if values.len() != h.len() {
        return Err(Error::GridMismatch(format!("{} samples, filter of {}", values.len(), h.len())));
    }
    let t = SpectralFilter::new(h);
    let mut scratch = vec![Complex64::new(0.0, 0.0); t.scratch_len()];
    t.apply(values, &mut scratch);
    Ok(())
}

/// Multiplies the spectrum along one axis of a two-photon field by `h`.
pub fn spectral_filter_axis(field: &mut BiphotonField, axis: Axis, h: &[Complex64]) -> Result<()> {
    let (n1, n2) = {
        let (a, b) = field.grids();
        (a.n, b.n)
    };
    let n = match axis {
        Axis::First => n1,
        Axis::Second => n2,
    };
    if h.len() != n {
        return Err(Error::GridMismatch(format!("axis of {n} samples, filter of {}", h.len())));
    }
    let t = SpectralFilter::new(h);
    let zero = Complex64::new(0.0, 0.0);
    let values = field.values_mut();
    match axis {
        Axis::Second => {
            values
                .par_chunks_mut(n2)
                .for_each_init(|| vec![zero; t.scratch_len()], |scratch, row| t.apply(row, scratch));
        }
        Axis::First => {
            // Columns are strided; gather blocks of them into contiguous rows.
            const BLOCK: usize = 32;
            let mut cols = vec![zero; BLOCK * n1];
            for start in (0..n2).step_by(BLOCK) {
                let width = BLOCK.min(n2 - start);
                for i1 in 0..n1 {
                    let row = &values[i1 * n2 + start..i1 * n2 + start + width];
                    for (c, v) in row.iter().enumerate() {
                        cols[c * n1 + i1] = *v;
                    }
                }
                cols[..width * n1]
                    .par_chunks_mut(n1)
                    .for_each_init(|| vec![zero; t.scratch_len()], |s, col| t.apply(col, s));
                for i1 in 0..n1 {
                    let row = &mut values[i1 * n2 + start..i1 * n2 + start + width];
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = cols[c * n1 + i1];
                    }
                }
            }
        }
    }
    Ok(())
}

/// `H(f) = exp(ikz) exp(-i pi lambda z f^2)` on the FFT frequency grid.
fn fresnel_transfer(n: usize, dx: f64, spec: &PropagationSpec) -> Vec<Complex64> {
    let global = Complex64::cis(2.0 * PI * (spec.distance / spec.wavelength).fract());
    fft_frequencies(n, dx)
        .into_iter()
        .map(|f| global * Complex64::cis(-PI * spec.wavelength * spec.distance * f * f))
        .collect()
}

/// Unitary spectral Fresnel propagation of a sampled field.
///
/// The window is treated as periodic, so fields should be tapered (or vanish)
/// at the edges. `z = 0` returns the input unchanged.
pub fn fresnel_propagate(field: &SampledField, spec: &PropagationSpec) -> Result<SampledField> {
    if spec.distance == 0.0 {
        return Ok(field.clone());
    }
    let g = *field.grid();
    check_aliasing(g.n, g.dx, spec)?;
    let mut values = field.values().to_vec();
    spectral_filter(&mut values, &fresnel_transfer(g.n, g.dx, spec))?;
    SampledField::new(g, values)
}

/// Propagates photon `axis` of a two-photon field; the other coordinate is a
/// spectator.
pub fn fresnel_propagate_axis(field: &mut BiphotonField, axis: Axis, spec: &PropagationSpec) -> Result<()> {
    if spec.distance == 0.0 {
        return Ok(());
    }
    let g = *field.grid(axis);
    check_aliasing(g.n, g.dx, spec)?;
    spectral_filter_axis(field, axis, &fresnel_transfer(g.n, g.dx, spec))
}
